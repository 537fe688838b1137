//! Output formatting. JSON keeps full precision; tables, CSV and the chart
//! print 2 decimals.

use std::fmt::Write;

use clap::ValueEnum;
use provrisk_core::present::fmt2;
use provrisk_core::{FactorCatalog, RankedReport, RiskReport};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Csv,
    Svg,
}

pub fn ranking_json(ranked: &[RankedReport]) -> String {
    let mut text = serde_json::to_string_pretty(ranked).expect("reports serialize");
    text.push('\n');
    text
}

pub fn ranking_table(ranked: &[RankedReport]) -> String {
    let width = ranked
        .iter()
        .map(|r| r.report.provider_id.as_str().chars().count())
        .max()
        .unwrap_or(0)
        .max("provider".len());
    let mut out = format!("{:<4}  {:<width$}  {:>5}\n", "rank", "provider", "risk");
    for r in ranked {
        let _ = writeln!(
            out,
            "{:<4}  {:<width$}  {:>5}",
            r.rank,
            r.report.provider_id,
            fmt2(r.report.risk)
        );
    }
    out
}

fn csv_text(
    write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
) -> csv::Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    write(&mut w)?;
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("utf-8 in, utf-8 out"))
}

pub fn ranking_csv(ranked: &[RankedReport]) -> csv::Result<String> {
    csv_text(|w| {
        w.write_record(["rank", "provider_id", "risk"])?;
        for r in ranked {
            w.write_record([
                &r.rank.to_string(),
                r.report.provider_id.as_str(),
                &fmt2(r.report.risk),
            ])?;
        }
        Ok(())
    })
}

/// `factor,alpha,beta,gamma` with factor display names.
pub fn breakdown_csv(report: &RiskReport, catalog: &FactorCatalog) -> csv::Result<String> {
    csv_text(|w| {
        w.write_record(["factor", "alpha", "beta", "gamma"])?;
        for f in &report.factors {
            w.write_record([
                catalog.name_of(f.factor_id.as_str()),
                &fmt2(f.weight),
                &fmt2(f.relevance),
                &fmt2(f.contribution),
            ])?;
        }
        Ok(())
    })
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

const SERIES: [(&str, &str, &str); 3] = [
    ("weight", "Weight", "#4e79a7"),
    ("relevance", "Relevance", "#f28e2b"),
    ("contribution", "Contribution", "#59a14f"),
];

/// Grouped bar chart: one weight / relevance / contribution triple per factor.
pub fn breakdown_svg(report: &RiskReport, catalog: &FactorCatalog) -> String {
    const LEFT: f64 = 56.0;
    const TOP: f64 = 48.0;
    const PLOT_H: f64 = 240.0;
    const BOTTOM: f64 = 150.0;
    const GROUP_W: f64 = 64.0;
    const BAR_W: f64 = 16.0;

    let peak = report
        .factors
        .iter()
        .flat_map(|f| [f.weight, f.relevance, f.contribution])
        .fold(0.0_f64, f64::max);
    let step = if peak > 0.5 { 0.1 } else { 0.05 };
    let y_max = ((peak / step).ceil() * step).max(step);
    let y = |v: f64| TOP + PLOT_H * (1.0 - v / y_max);

    let plot_w = GROUP_W * report.factors.len() as f64;
    let width = LEFT + plot_w + 24.0;
    let height = TOP + PLOT_H + BOTTOM;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{LEFT}" y="18" font-size="13">Weight, relevance and contribution of risk factors: {} (risk {})</text>"#,
        escape(report.provider_id.as_str()),
        fmt2(report.risk)
    );

    let _ = writeln!(svg, r#"<g class="legend">"#);
    for (i, (class, label, color)) in SERIES.iter().enumerate() {
        let x = LEFT + i as f64 * 110.0;
        let _ = writeln!(
            svg,
            r#"<rect class="legend-{class}" x="{x}" y="28" width="10" height="10" fill="{color}"/><text x="{}" y="37">{label}</text>"#,
            x + 14.0
        );
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r#"<g class="axis">"#);
    let ticks = (y_max / step).round() as usize;
    for k in 0..=ticks {
        let v = k as f64 * step;
        let ty = y(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{ty:.1}" x2="{:.1}" y2="{ty:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            ty + 4.0,
            fmt2(v)
        );
    }
    let _ = writeln!(
        svg,
        r##"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.1}" stroke="#333"/>"##,
        TOP + PLOT_H
    );
    let _ = writeln!(svg, "</g>");

    for (i, f) in report.factors.iter().enumerate() {
        let name = escape(catalog.name_of(f.factor_id.as_str()));
        let x0 = LEFT + i as f64 * GROUP_W + (GROUP_W - 3.0 * BAR_W) / 2.0;
        let _ = writeln!(
            svg,
            r#"<g class="factor" data-factor="{}">"#,
            escape(f.factor_id.as_str())
        );
        for (j, ((class, label, color), value)) in SERIES
            .iter()
            .zip([f.weight, f.relevance, f.contribution])
            .enumerate()
        {
            let top = y(value);
            let _ = writeln!(
                svg,
                r#"<rect class="bar {class}" x="{:.1}" y="{top:.1}" width="{BAR_W}" height="{:.1}" fill="{color}"><title>{name}: {label} {}</title></rect>"#,
                x0 + j as f64 * BAR_W,
                TOP + PLOT_H - top,
                fmt2(value)
            );
        }
        let lx = x0 + 1.5 * BAR_W;
        let ly = TOP + PLOT_H + 12.0;
        let _ = writeln!(
            svg,
            r#"<text x="{lx:.1}" y="{ly:.1}" text-anchor="end" transform="rotate(-45 {lx:.1} {ly:.1})">{name}</text>"#
        );
        let _ = writeln!(svg, "</g>");
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use provrisk_core::{
        evaluate, normalize_weights, FactorId, ProviderAssessment, RiskCategory, RiskFactor,
    };

    use super::*;

    fn single_factor() -> (RiskReport, FactorCatalog) {
        let catalog = FactorCatalog::new(vec![RiskFactor::new(
            "only",
            "Only <one>",
            RiskCategory::Uncategorized,
        )])
        .unwrap();
        let weights = normalize_weights(&[(FactorId::new("only"), 4.0)]).unwrap();
        let a = ProviderAssessment::from_raw("p&q", [("only", 3)]).unwrap();
        (evaluate(&weights, &a).unwrap(), catalog)
    }

    #[test]
    fn single_factor_breakdown() {
        let (report, catalog) = single_factor();
        let csv = breakdown_csv(&report, &catalog).unwrap();
        assert_eq!(csv, "factor,alpha,beta,gamma\nOnly <one>,1.00,1.00,1.00\n");
    }

    #[test]
    fn svg_escapes_and_counts_bars() {
        let (report, catalog) = single_factor();
        let svg = breakdown_svg(&report, &catalog);
        assert!(svg.contains("Only &lt;one&gt;"));
        assert!(svg.contains("p&amp;q"));
        assert_eq!(svg.matches(r#"class="bar "#).count(), 3);
        assert_eq!(svg.matches(r#"<g class="factor""#).count(), 1);
    }

    #[test]
    fn table_and_csv_use_two_decimals() {
        let (report, _) = single_factor();
        let ranked = vec![RankedReport { rank: 1, report }];
        assert_eq!(
            ranked_line(&ranking_table(&ranked)),
            "1     p&q        3.00"
        );
        assert_eq!(
            ranking_csv(&ranked).unwrap(),
            "rank,provider_id,risk\n1,p&q,3.00\n"
        );
    }

    fn ranked_line(table: &str) -> &str {
        table.lines().nth(1).unwrap()
    }
}
