//! `vibrancy`: compute, rank, export and serve the AI vibrancy index.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 zero weight sum.
//! Data goes to stdout (or `--output`), diagnostics to stderr.

mod export;
mod render;

use std::fs;
use std::io::{self, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vibrancy_core::ingest::{compute_coverage, load_weight_overrides, validate_inclusion, COVERAGE_THRESHOLD, COVERAGE_WINDOW};
use vibrancy_core::{DatasetBundle, Error, IngestError, WeightConfig, WeightOverrides, Year};
use vibrancy_service::query::{self, QueryError};

#[derive(Debug, Parser)]
#[command(name = "vibrancy", version, about = "Composite AI vibrancy index: scoring, ranking and export")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score every country for each year in a range (index, pillar and indicator scores)
    Compute {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        years: YearArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Ranking table for one year, or rank trajectories when --from/--to is given
    Rank {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        years: YearArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Ranking on one sub-index (innovation, economic_competitiveness, policy_governance_public)
    SubIndex {
        /// Sub-index id
        id: String,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        years: YearArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Data coverage per country-year and indicator-year
    Coverage {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Load and check the dataset and weights; report coverage warnings
    Validate {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Write normalized.csv, pillars.csv, index.csv and coverage.csv (or one JSON document)
    Export {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        years: YearArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Serve the JSON API (and optionally a static UI bundle)
    Serve {
        #[command(flatten)]
        data: DataArgs,
        /// Port to listen on
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Address to bind
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Directory with a built UI bundle, served at `/`
        #[arg(long, value_name = "DIR")]
        ui_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Directory containing metadata.toml, observations.csv and population.csv
    #[arg(long, env = "VIBRANCY_DATA_DIR", value_name = "DIR")]
    data_dir: PathBuf,
    /// TOML file with [pillar_weights] / [indicator_weights] overrides
    #[arg(long, value_name = "FILE")]
    weights: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct YearArgs {
    /// Single year (defaults to the latest year where one is needed)
    #[arg(long, conflicts_with_all = ["from", "to"])]
    year: Option<Year>,
    /// First year of a range (defaults to the earliest year)
    #[arg(long)]
    from: Option<Year>,
    /// Last year of a range (defaults to the latest year)
    #[arg(long)]
    to: Option<Year>,
    /// Divide population-scalable indicators by population in millions
    #[arg(long)]
    per_capita: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write to this file instead of stdout (a directory for `export --format csv`)
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

/// Failure with its exit code.
#[derive(Debug)]
pub(crate) enum Failure {
    Usage(String),
    Data(String),
    ZeroWeight(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Data(_) => 3,
            Failure::ZeroWeight(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::ZeroWeight(m) => m,
        }
    }
}

impl From<QueryError> for Failure {
    fn from(err: QueryError) -> Self {
        let msg = err.to_string();
        match err {
            QueryError::Core(Error::ZeroWeightSum { .. }) => Failure::ZeroWeight(msg),
            QueryError::Core(Error::MissingPopulation { .. }) => Failure::Data(msg),
            QueryError::Core(
                Error::UnknownYear(_)
                | Error::UnknownSubIndex(_)
                | Error::UnknownIndicator(_)
                | Error::UnknownPillar(_)
                | Error::EmptyYearRange { .. }
                | Error::WeightOutOfRange { .. },
            )
            | QueryError::BadParameter(_)
            | QueryError::UnknownCountry(_) => Failure::Usage(msg),
            QueryError::Core(_) => Failure::Data(msg),
        }
    }
}

impl From<IngestError> for Failure {
    fn from(err: IngestError) -> Self {
        Failure::Data(err.to_string())
    }
}

pub(crate) fn io_failure(path: Option<&Path>, err: io::Error) -> Failure {
    match path {
        Some(p) => Failure::Data(format!("cannot write {}: {err}", p.display())),
        None => Failure::Data(format!("cannot write output: {err}")),
    }
}

struct Loaded {
    bundle: DatasetBundle,
    weights: WeightConfig,
}

fn load(data: &DataArgs) -> Result<Loaded, Failure> {
    let bundle = DatasetBundle::load_dir(&data.data_dir)?;
    let overrides = match &data.weights {
        None => WeightOverrides::default(),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Data(format!("cannot read {}: {e}", path.display())))?;
            load_weight_overrides(&text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?
        }
    };
    let weights = query::effective_weights(&bundle, &overrides).map_err(|e| {
        let file = data.weights.as_deref().map(|p| p.display().to_string()).unwrap_or_default();
        match Failure::from(e) {
            zero @ Failure::ZeroWeight(_) => zero,
            other => Failure::Data(format!("{file}: {}", other.message())),
        }
    })?;
    report_inclusion(&bundle);
    Ok(Loaded { bundle, weights })
}

fn report_inclusion(bundle: &DatasetBundle) {
    let coverage = compute_coverage(&bundle.observations, &bundle.metadata);
    let notes = validate_inclusion(&coverage, COVERAGE_THRESHOLD, COVERAGE_WINDOW, &bundle.metadata.inclusion_overrides);
    for note in notes {
        eprintln!("{note}");
    }
}

/// Writes `text` to `--output` or stdout.
pub(crate) fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| io_failure(Some(path), e)),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| io_failure(None, e))
        }
    }
}

pub(crate) fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("payloads serialize");
    text.push('\n');
    text
}

fn year_range(bundle: &DatasetBundle, years: &YearArgs) -> Result<(Year, Year), Failure> {
    match years.year {
        Some(y) => {
            let y = query::resolve_year(bundle, Some(y))?;
            Ok((y, y))
        }
        None => Ok(query::resolve_range(bundle, years.from, years.to)?),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Compute { data, years, out } => {
            let Loaded { bundle, weights } = load(&data)?;
            let (from, to) = year_range(&bundle, &years)?;
            let tables = (from..=to)
                .filter(|y| bundle.observations.has_year(*y))
                .map(|y| query::rankings(&bundle, &weights, y, years.per_capita, None))
                .collect::<Result<Vec<_>, _>>()?;
            let text = match out.format {
                Format::Json => to_json(&tables),
                Format::Csv => render::score_csv(&tables, &bundle.metadata),
                Format::Table => tables
                    .iter()
                    .map(|t| render::ranking_text(t, &bundle.metadata))
                    .collect::<Vec<_>>()
                    .join("\n"),
            };
            emit(out.output.as_deref(), &text)
        }
        Command::Rank { data, years, out } => {
            let Loaded { bundle, weights } = load(&data)?;
            if years.from.is_some() || years.to.is_some() {
                let (from, to) = query::resolve_range(&bundle, years.from, years.to)?;
                let trajectories = query::trajectories(&bundle, &weights, from, to, years.per_capita)?;
                let text = match out.format {
                    Format::Json => to_json(&trajectories),
                    Format::Csv => render::trajectory_csv(&trajectories, from, to),
                    Format::Table => render::trajectory_text(&trajectories, from, to),
                };
                return emit(out.output.as_deref(), &text);
            }
            let year = query::resolve_year(&bundle, years.year)?;
            let table = query::rankings(&bundle, &weights, year, years.per_capita, None)?;
            emit(out.output.as_deref(), &render::ranking(&table, &bundle.metadata, out.format))
        }
        Command::SubIndex { id, data, years, out } => {
            let Loaded { bundle, weights } = load(&data)?;
            if years.from.is_some() || years.to.is_some() {
                return Err(Failure::Usage("sub-index takes --year, not a range".into()));
            }
            let year = query::resolve_year(&bundle, years.year)?;
            let table = query::rankings(&bundle, &weights, year, years.per_capita, Some(&id))?;
            emit(out.output.as_deref(), &render::ranking(&table, &bundle.metadata, out.format))
        }
        Command::Coverage { data, out } => {
            let Loaded { bundle, .. } = load(&data)?;
            let report = compute_coverage(&bundle.observations, &bundle.metadata);
            let text = match out.format {
                Format::Json => to_json(&report),
                Format::Csv => render::coverage_csv(&report),
                Format::Table => render::coverage_text(&report),
            };
            emit(out.output.as_deref(), &text)
        }
        Command::Validate { data } => {
            let Loaded { bundle, weights } = load(&data)?;
            // every year must be computable with the effective weights
            for &year in bundle.observations.years() {
                query::rankings(&bundle, &weights, year, false, None)?;
            }
            let years = bundle.observations.years();
            println!(
                "ok: {} countries, {} indicators, {} pillars, {} observations, years {}-{}, weights {}",
                bundle.observations.countries().len(),
                bundle.metadata.indicators.len(),
                bundle.metadata.pillars.len(),
                bundle.observations.len(),
                years.first().copied().unwrap_or_default(),
                years.last().copied().unwrap_or_default(),
                weights.fingerprint()
            );
            Ok(())
        }
        Command::Export { data, years, out } => {
            let Loaded { bundle, weights } = load(&data)?;
            let (from, to) = year_range(&bundle, &years)?;
            export::run(&bundle, &weights, from, to, years.per_capita, out.format, out.output.as_deref())
        }
        Command::Serve { data, port, host, ui_dir } => {
            let Loaded { bundle, .. } = load(&data)?;
            if let Some(dir) = &ui_dir {
                if !dir.is_dir() {
                    return Err(Failure::Usage(format!("--ui-dir {} is not a directory", dir.display())));
                }
            }
            tracing_subscriber::fmt()
                .with_env_filter(
                    tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
                )
                .with_writer(io::stderr)
                .init();
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Data(e.to_string()))?;
            let addr = SocketAddr::new(host, port);
            runtime
                .block_on(vibrancy_service::serve(Arc::new(bundle), addr, ui_dir))
                .map_err(|e| Failure::Data(format!("cannot serve on {addr}: {e}")))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version print and exit 0, real errors exit 2
            e.exit();
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
