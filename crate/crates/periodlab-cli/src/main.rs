use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use periodlab::cmfield::FieldError;
use periodlab::intertwine::IntertwineError;
use periodlab::lfactors::LError;
use periodlab::weights::WeightError;
use periodlab::weylkostant::KostantError;

mod commands;
mod config;
mod report;

use commands::Settings;
use config::RunConfig;
use report::Report;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}: {1}")]
    Context(String, Box<CliError>),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Kostant(#[from] KostantError),
    #[error(transparent)]
    L(#[from] LError),
    #[error(transparent)]
    Intertwine(#[from] IntertwineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Records,
}

#[derive(Debug, Parser)]
#[command(name = "periodlab", version, about = "Checks for CM-field period relations")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Working precision in decimal digits.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Tolerance for floating-point comparisons.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Seed for sampled permutations.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Discriminant identity and measure normalization of the configured field.
    FieldCheck,
    /// Balanced predicate against the character oracle on the configured grid.
    Balanced,
    /// Kostant lines of a given degree.
    Kostant {
        #[arg(long)]
        p: Option<usize>,
    },
    /// The distinguished Weyl element w^(k) and its uniqueness.
    FindWk {
        #[arg(long)]
        k: Option<usize>,
    },
    /// Sign of the twisted wedge monomial against eps^(n-k).
    WedgeSign {
        #[arg(long)]
        k: Option<usize>,
        /// Number of random admissible permutations; all of them when absent.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Gauss sums of characters of F_q^x of the given order.
    Gauss {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        chi_order: u64,
        #[arg(long, allow_hyphen_values = true)]
        index: Option<i64>,
    },
    /// Unramified local L-ratio as a rational function of X = q^-s.
    Lratio {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// order:index[:qpow]
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long)]
        q: u64,
    },
    /// Non-archimedean spherical intertwining integral.
    IntertwineNonarch {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long)]
        q: u64,
    },
    /// Archimedean intertwining integral by quadrature.
    IntertwineArch {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// Constant-term assembly and holomorphy audit at s = 0.
    ConstantTerm {
        /// 0, pos, or an explicit order.
        #[arg(long)]
        ord0: Option<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::FieldCheck => "field-check",
            Command::Balanced => "balanced",
            Command::Kostant { .. } => "kostant",
            Command::FindWk { .. } => "find-wk",
            Command::WedgeSign { .. } => "wedge-sign",
            Command::Gauss { .. } => "gauss",
            Command::Lratio { .. } => "lratio",
            Command::IntertwineNonarch { .. } => "intertwine-nonarch",
            Command::IntertwineArch { .. } => "intertwine-arch",
            Command::ConstantTerm { .. } => "constant-term",
        }
    }
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let settings = Settings {
        precision: cli.precision.or(cfg.precision).unwrap_or(60),
        tol: cli.tol.or(cfg.tol),
        seed: cli.seed.or(cfg.seed).unwrap_or(0),
    };
    let mut inputs = cfg.echo();
    inputs.insert("precision".into(), settings.precision.to_string());
    inputs.insert("seed".into(), settings.seed.to_string());
    if let Some(t) = settings.tol {
        inputs.insert("tol".into(), report::fmt_f(t));
    }
    let records = match &cli.command {
        Command::FieldCheck => commands::field_check(&cfg, &settings, &mut inputs)?,
        Command::Balanced => commands::balanced(&cfg, &settings, &mut inputs)?,
        Command::Kostant { p } => {
            let p = p.or(cfg.params.p).unwrap_or(0);
            commands::kostant(&cfg, &settings, p, &mut inputs)?
        }
        Command::FindWk { k } => commands::find_wk_cmd(&cfg, &settings, k.or(cfg.params.k))?,
        Command::WedgeSign { k, samples } => {
            if samples.is_some() {
                cfg.params.samples = *samples;
            }
            commands::wedge_sign(&cfg, &settings, k.or(cfg.params.k))?
        }
        Command::Gauss { q, chi_order, index } => commands::gauss(*q, *chi_order, *index, &settings, &mut inputs)?,
        Command::Lratio { n, k, a, q } => commands::lratio(*n, *k, a, *q, &mut inputs)?,
        Command::IntertwineNonarch { n, k, a, q } => commands::intertwine_nonarch(*n, *k, a, *q, &mut inputs)?,
        Command::IntertwineArch { n, k, eta, beta, s } => {
            commands::intertwine_arch(&cfg, &settings, *n, *k, eta, beta.as_deref(), s, &mut inputs)?
        }
        Command::ConstantTerm { ord0 } => {
            let ord0 = match ord0 {
                Some(t) => commands::parse_ord0(t)?,
                None => cfg.params.ord0.unwrap_or(0),
            };
            commands::constant_term(&cfg, &settings, ord0, &mut inputs)?
        }
    };
    Ok(Report::new(cli.command.name(), inputs, records))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let text = match cli.format {
                Format::Table => report.to_table(),
                Format::Records => report.to_records(),
            };
            let _ = std::io::stdout().write_all(text.as_bytes());
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {} failed: {e}", cli.command.name());
            ExitCode::from(2)
        }
    }
}
