use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use chrono::Utc;
use provrisk_core::{
    FactorCatalog, FactorDistribution, FactorId, PocketScale, ProviderAssessment, RiskCategory,
    RiskFactor,
};
use provrisk_store::fixtures::write_reference;
use provrisk_store::{SurveySource, Workspace};

fn provrisk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_provrisk"))
        .args(args)
        .env_remove("RISK_WORKSPACE")
        .output()
        .expect("binary runs")
}

fn with_ws(cmd: &str, ws: &Path, rest: &[&str]) -> Output {
    let mut args = vec![cmd, "--workspace", ws.to_str().unwrap()];
    args.extend_from_slice(rest);
    provrisk(&args)
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn fixture() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    write_reference(dir.path()).unwrap();
    dir
}

/// Adds providers scored uniformly at `b` on every factor.
fn add_uniform(ws: &Path, providers: &[(&str, i64)]) {
    let mut ws = Workspace::load(ws).unwrap();
    let catalog = ws.load_catalog().unwrap();
    for (id, b) in providers {
        let a = ProviderAssessment::from_raw(*id, catalog.ids().map(|f| (f.as_str(), *b))).unwrap();
        ws.upsert_assessment(a).unwrap();
    }
}

#[test]
fn weights_renormalize_lists_first_seven_rows() {
    let dir = fixture();
    let out = with_ws("weights", dir.path(), &["--policy", "renormalize"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    let renormalized: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("renormalized:"))
        .collect();
    assert_eq!(renormalized.len(), 7);
    assert!(renormalized[0].contains("Experience (sum 0.35)"));
    assert!(renormalized[6].contains("The source of financing"));
    assert!(text.contains("consistency: not available"));
    assert_eq!(Workspace::load(dir.path()).unwrap().weights_version(), 2);
}

#[test]
fn weights_strict_on_fixture_exits_2() {
    let dir = fixture();
    let out = with_ws("weights", dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("7 distribution(s)"), "{err}");
    assert!(err.contains("Image: sum 0.77"));
    assert_eq!(Workspace::load(dir.path()).unwrap().weights_version(), 1);
}

#[test]
fn weights_strict_on_valid_rows_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    let catalog = FactorCatalog::new(vec![
        RiskFactor::new(
            "national_identity",
            "National identity",
            RiskCategory::ExternalAdministrative,
        ),
        RiskFactor::new(
            "advertising_activity",
            "Advertising activity",
            RiskCategory::Uncategorized,
        ),
    ])
    .unwrap();
    let mut ws = Workspace::create(dir.path(), &catalog, &PocketScale::default()).unwrap();
    let rows = vec![
        FactorDistribution::new("national_identity", vec![0.64, 0.17, 0.09, 0.05, 0.05]).unwrap(),
        FactorDistribution::new("advertising_activity", vec![0.93, 0.02, 0.03, 0.01, 0.03])
            .unwrap(),
    ];
    ws.save_survey(SurveySource::Pooled, &rows, Utc::now())
        .unwrap();

    let out = with_ws("weights", dir.path(), &["--policy", "strict"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("all distributions valid"));
    let weights = Workspace::load(dir.path())
        .unwrap()
        .require_weights()
        .unwrap();
    assert!((weights.profile.factors()[0].weight - 0.620).abs() < 1e-3);
}

#[test]
fn weights_without_survey_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    Workspace::create(
        dir.path(),
        &FactorCatalog::reference(),
        &PocketScale::default(),
    )
    .unwrap();
    let out = with_ws("weights", dir.path(), &[]);
    assert_eq!(out.status.code(), Some(3));

    let out = with_ws("score", &dir.path().join("nowhere"), &["--all"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn weights_from_published_means() {
    let dir = fixture();
    let means = dir.path().join("means.csv");
    let out = with_ws("weights", dir.path(), &["--means", means.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let ws = Workspace::load(dir.path()).unwrap();
    assert_eq!(ws.weights_version(), 2);
    assert_eq!(
        ws.require_weights().unwrap().profile,
        ws.load_profile_version(1).unwrap().unwrap().profile
    );
}

#[test]
fn score_fixture_provider() {
    let dir = fixture();
    let out = with_ws("score", dir.path(), &["--provider", "provider-1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(
        text.lines()
            .nth(1)
            .unwrap()
            .split_whitespace()
            .collect::<Vec<_>>(),
        ["1", "provider-1", "1.72"]
    );

    let out = with_ws("score", dir.path(), &["--provider", "ghost"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn score_all_lowest_provider_prints_one() {
    let dir = fixture();
    add_uniform(dir.path(), &[("lowest", 1)]);
    let out = with_ws(
        "score",
        dir.path(),
        &["--provider", "lowest", "--format", "csv"],
    );
    assert_eq!(stdout(&out), "rank,provider_id,risk\n1,lowest,1.00\n");
}

#[test]
fn score_direction_orders_providers() {
    let dir = fixture();
    add_uniform(dir.path(), &[("three", 3)]);
    let ids = |dir_flag: &str| -> Vec<String> {
        let out = with_ws(
            "score",
            dir.path(),
            &["--all", "--direction", dir_flag, "--format", "csv"],
        );
        stdout(&out)
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().to_owned())
            .collect()
    };
    assert_eq!(ids("min"), ["provider-1", "three"]);
    assert_eq!(ids("max"), ["three", "provider-1"]);
}

#[test]
fn score_json_is_byte_stable() {
    let dir = fixture();
    add_uniform(dir.path(), &[("b", 2), ("a", 2), ("c", 4)]);
    let first = with_ws("score", dir.path(), &["--all", "--format", "json"]);
    let second = with_ws("score", dir.path(), &["--all", "--format", "json"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let parsed: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    let order: Vec<&str> = parsed
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["provider_id"].as_str().unwrap())
        .collect();
    assert_eq!(order, ["provider-1", "a", "b", "c"]);
}

#[test]
fn env_var_supplies_workspace() {
    let dir = fixture();
    let out = Command::new(env!("CARGO_BIN_EXE_provrisk"))
        .args(["score", "--all"])
        .env("RISK_WORKSPACE", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("1.72"));
}

#[test]
fn report_csv_matches_published_rows() {
    let dir = fixture();
    let out = with_ws("report", dir.path(), &["--provider", "provider-1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "factor,alpha,beta,gamma");
    assert_eq!(lines.len(), 10);
    assert!(lines.contains(&"Experience,0.18,0.07,0.10"));
    assert!(lines.contains(&"Advertising activity,0.03,0.07,0.02"));
}

#[test]
fn report_svg_has_nine_triples() {
    let dir = fixture();
    let path = dir.path().join("fig.svg");
    let out = with_ws(
        "report",
        dir.path(),
        &["--format", "svg", "--out", path.to_str().unwrap()],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let svg = fs::read_to_string(path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches(r#"<g class="factor""#).count(), 9);
    for class in ["weight", "relevance", "contribution"] {
        assert_eq!(svg.matches(&format!(r#"class="bar {class}""#)).count(), 9);
    }
    assert!(svg.contains("Experience: Weight 0.18"));
    assert!(svg.contains("Experience: Contribution 0.10"));
}

#[test]
fn report_single_factor_workspace() {
    let dir = tempfile::tempdir().unwrap();
    let catalog = FactorCatalog::new(vec![RiskFactor::new(
        "only",
        "Only",
        RiskCategory::Uncategorized,
    )])
    .unwrap();
    let mut ws = Workspace::create(dir.path(), &catalog, &PocketScale::default()).unwrap();
    ws.save_weights(&provrisk_core::normalize_weights(&[(FactorId::new("only"), 3.0)]).unwrap())
        .unwrap();
    ws.upsert_assessment(ProviderAssessment::from_raw("p", [("only", 4)]).unwrap())
        .unwrap();
    let out = with_ws("report", dir.path(), &[]);
    assert_eq!(
        stdout(&out),
        "factor,alpha,beta,gamma\nOnly,1.00,1.00,1.00\n"
    );
}

#[test]
fn report_missing_entities_exit_2() {
    let dir = fixture();
    let out = with_ws("report", dir.path(), &["--provider", "ghost"]);
    assert_eq!(out.status.code(), Some(2));

    let empty = tempfile::tempdir().unwrap();
    Workspace::create(
        empty.path(),
        &FactorCatalog::reference(),
        &PocketScale::default(),
    )
    .unwrap();
    let out = with_ws("report", empty.path(), &["--provider", "p"]);
    assert_eq!(out.status.code(), Some(2));

    add_uniform(dir.path(), &[("second", 2)]);
    let out = with_ws("report", dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--provider"));
}

#[test]
fn init_creates_workspaces_once() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("fresh");
    let out = with_ws("init", &root, &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        Workspace::load(&root)
            .unwrap()
            .load_catalog()
            .unwrap()
            .len(),
        9
    );
    let out = with_ws("init", &root, &[]);
    assert_eq!(out.status.code(), Some(2));

    let fixture_root = dir.path().join("reference");
    let out = with_ws("init", &fixture_root, &["--fixture", "reference"]);
    assert_eq!(out.status.code(), Some(0));
    let out = with_ws("score", &fixture_root, &["--all"]);
    assert!(stdout(&out).contains("1.72"));
}
