//! `provrisk`: batch front end for a provrisk workspace.

mod render;

use std::fs;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use provrisk_core::{Direction, FactorCatalog, PocketScale, WeightPolicy, DEFAULT_TOLERANCE};
use provrisk_store::ops::{self, WeightOptions};
use provrisk_store::{fixtures, StoreError, Workspace};

use crate::render::ReportFormat;

#[derive(Parser)]
#[command(
    name = "provrisk",
    version,
    about = "Outsourcing provider risk scoring"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct WorkspaceArg {
    /// Workspace directory.
    #[arg(long, env = "RISK_WORKSPACE")]
    workspace: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Create a workspace with the reference catalog and pocket scale.
    Init {
        #[command(flatten)]
        ws: WorkspaceArg,
        /// Populate it with the reference nine-factor survey instead.
        #[arg(long, value_enum)]
        fixture: Option<Fixture>,
    },
    /// Build the factor weight profile from the survey tables.
    Weights {
        #[command(flatten)]
        ws: WorkspaceArg,
        #[arg(long, value_enum, default_value_t = PolicyArg::Strict)]
        policy: PolicyArg,
        /// Allowed deviation of each distribution's sum from 1.
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[arg(long, default_value_t = provrisk_core::DEFAULT_CONSISTENCY_THRESHOLD)]
        consistency_threshold: f64,
        /// Take mean factor scores from a `factor_id,c` CSV instead of the surveys.
        #[arg(long, value_name = "CSV")]
        means: Option<PathBuf>,
    },
    /// Compute integral risk and rank providers.
    Score {
        #[command(flatten)]
        ws: WorkspaceArg,
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        provider: Option<String>,
        #[arg(long)]
        all: bool,
        #[arg(long, value_enum, default_value_t = DirectionArg::Min)]
        direction: DirectionArg,
        #[arg(long, value_enum, default_value_t = ScoreFormat::Table)]
        format: ScoreFormat,
    },
    /// Per-factor weight / relevance / contribution breakdown for one provider.
    Report {
        #[command(flatten)]
        ws: WorkspaceArg,
        /// Required when the workspace holds more than one provider.
        #[arg(long)]
        provider: Option<String>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
        format: ReportFormat,
    },
    /// Serve the HTTP JSON API.
    Serve {
        #[command(flatten)]
        ws: WorkspaceArg,
        #[arg(long, default_value_t = provrisk_service::DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Fixture {
    Reference,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Strict,
    Renormalize,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Min,
    Max,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScoreFormat {
    Table,
    Json,
    Csv,
}

/// Exit status 2: rejected input or broken workspace; 3: I/O failure.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<StoreError> for Failure {
    fn from(err: StoreError) -> Self {
        let code = if matches!(err, StoreError::Io { .. }) {
            3
        } else {
            2
        };
        Self {
            code,
            error: err.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<std::io::Error>() {
            Some(_) => 3,
            None => 2,
        };
        Self { code, error }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Init { ws, fixture } => init(&ws.workspace, fixture),
        Command::Weights {
            ws,
            policy,
            tolerance,
            consistency_threshold,
            means,
        } => {
            let policy = match policy {
                PolicyArg::Strict => WeightPolicy::Strict,
                PolicyArg::Renormalize => WeightPolicy::Renormalize,
            };
            let options = WeightOptions {
                policy,
                tolerance,
                consistency_threshold,
            };
            weights(&ws.workspace, &options, means.as_deref())
        }
        Command::Score {
            ws,
            provider,
            all: _,
            direction,
            format,
        } => score(&ws.workspace, provider.as_deref(), direction.into(), format),
        Command::Report {
            ws,
            provider,
            out,
            format,
        } => report(&ws.workspace, provider.as_deref(), out.as_deref(), format),
        Command::Serve { ws, port, bind } => serve(&ws.workspace, SocketAddr::new(bind, port)),
    }
}

impl From<DirectionArg> for Direction {
    fn from(arg: DirectionArg) -> Self {
        match arg {
            DirectionArg::Min => Direction::MinRisk,
            DirectionArg::Max => Direction::MaxScore,
        }
    }
}

fn init(root: &Path, fixture: Option<Fixture>) -> Result<(), Failure> {
    match fixture {
        Some(Fixture::Reference) => {
            fixtures::write_reference(root)?;
        }
        None => {
            Workspace::create(root, &FactorCatalog::reference(), &PocketScale::default())?;
        }
    }
    println!("workspace initialized at {}", root.display());
    Ok(())
}

fn weights(root: &Path, options: &WeightOptions, means: Option<&Path>) -> Result<(), Failure> {
    let mut ws = Workspace::load(root)?;
    let catalog = ws.load_catalog()?;

    if let Some(path) = means {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let means = provrisk_store::formats::parse_means_csv(path, &text)?;
        let profile = ops::weights_from_means(&ws, &means)?;
        let stored = ws.save_weights(&profile)?;
        println!(
            "weights v{} written from mean scores in {}",
            stored.version,
            path.display()
        );
        return Ok(());
    }

    let outcome = match ops::compute_weights(&ws, options) {
        Ok(outcome) => outcome,
        Err(StoreError::Domain(provrisk_core::Error::Rejected(diagnostics))) => {
            eprintln!(
                "rejected: {} distribution(s) fail validation at tolerance {}",
                diagnostics.len(),
                options.tolerance
            );
            for d in &diagnostics {
                eprintln!(
                    "  {}: sum {}",
                    catalog.name_of(d.factor_id.as_str()),
                    provrisk_core::present::fmt2(d.sum)
                );
            }
            return Err(Failure {
                code: 2,
                error: anyhow::anyhow!(
                    "strict policy rejected the survey; rerun with --policy renormalize to rescale"
                ),
            });
        }
        Err(e) => return Err(e.into()),
    };
    let stored = ws.save_weights(&outcome.profile)?;

    let mut out = std::io::stdout().lock();
    let _ = writeln!(
        out,
        "weights v{} written to {}",
        stored.version,
        root.join("weights.json").display()
    );
    let _ = writeln!(out, "sources: {}", outcome.sources.join(", "));
    let _ = match outcome.consistency {
        Some(v) => writeln!(
            out,
            "consistency: correlation {:.3}, threshold {} -> {}",
            v.correlation,
            v.threshold,
            if v.consistent {
                "consistent"
            } else {
                "INCONSISTENT"
            }
        ),
        None => writeln!(out, "consistency: not available (single survey table)"),
    };
    if outcome.diagnostics.is_empty() {
        let _ = writeln!(out, "diagnostics: all distributions valid");
    }
    for d in &outcome.diagnostics {
        let _ = writeln!(
            out,
            "renormalized: {} (sum {})",
            catalog.name_of(d.factor_id.as_str()),
            provrisk_core::present::fmt2(d.sum)
        );
    }
    Ok(())
}

fn score(
    root: &Path,
    provider: Option<&str>,
    direction: Direction,
    format: ScoreFormat,
) -> Result<(), Failure> {
    let ws = Workspace::load(root)?;
    let mut ranked = ops::rank(&ws, direction)?;
    if let Some(id) = provider {
        ranked.retain(|r| r.report.provider_id.as_str() == id);
        if ranked.is_empty() {
            return Err(StoreError::Integrity(format!("no assessment for provider `{id}`")).into());
        }
    }
    let text = match format {
        ScoreFormat::Json => render::ranking_json(&ranked),
        ScoreFormat::Table => render::ranking_table(&ranked),
        ScoreFormat::Csv => render::ranking_csv(&ranked).map_err(anyhow::Error::from)?,
    };
    print!("{text}");
    Ok(())
}

fn report(
    root: &Path,
    provider: Option<&str>,
    out: Option<&Path>,
    format: ReportFormat,
) -> Result<(), Failure> {
    let ws = Workspace::load(root)?;
    let catalog = ws.load_catalog()?;
    let provider = match provider {
        Some(id) => id.to_owned(),
        None => {
            let all = ws.load_assessments()?;
            match all.as_slice() {
                [only] => only.provider_id.to_string(),
                [] => return Err(StoreError::Integrity("no provider assessments".into()).into()),
                _ => {
                    return Err(StoreError::Integrity(
                        "several providers assessed; pick one with --provider".into(),
                    )
                    .into())
                }
            }
        }
    };
    if ws.load_assessment(&provider)?.is_none() {
        return Err(
            StoreError::Integrity(format!("no assessment for provider `{provider}`")).into(),
        );
    }
    let report = ops::what_if(&ws, &provider, [])?;
    let text = match format {
        ReportFormat::Csv => {
            render::breakdown_csv(&report, &catalog).map_err(anyhow::Error::from)?
        }
        ReportFormat::Svg => render::breakdown_svg(&report, &catalog),
    };
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            println!("report written to {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn serve(root: &Path, addr: SocketAddr) -> Result<(), Failure> {
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .init();
    let ws = Workspace::load(root)?;
    let runtime = tokio::runtime::Runtime::new().context("starting the async runtime")?;
    runtime
        .block_on(provrisk_service::serve(ws, addr))
        .with_context(|| format!("serving on {addr}"))?;
    Ok(())
}
