//! `wfai`: Wright-Fisher fixation probabilities and active information from
//! the command line.
//!
//! Every subcommand writes one or more records (CSV with a header row, or
//! newline-delimited JSON). Exit status: 0 on success, 2 when a parameter
//! fails validation, 3 on I/O failure, 1 on numerical failure.

mod params;
mod quantity;
mod record;
mod sweep;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use thiserror::Error;

use params::Params;
use quantity::{evaluate, Quantity};
use record::{Format, RecordSink};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl From<wfai::Error> for CliError {
    fn from(e: wfai::Error) -> Self {
        match e {
            wfai::Error::Numerical(m) => CliError::Numerical(m),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numerical(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "wfai",
    version,
    about = "Wright-Fisher fixation probabilities and active information",
    long_about = "Wright-Fisher fixation probabilities and active information.\n\n\
        Active information is log(p_alt / p_null): how much selection and mutation change the \
        probability of an event relative to the neutral, drift-only model. Information columns \
        carry a _nats or _bits suffix.\n\n\
        Diffusion quantities measure time in units of N generations (multiply by N to compare \
        with `simulate` generations; alpha = N s, v1 = N mu1, v2 = N mu2).\n\n\
        The maximum-entropy initial law is uniform on 1..N-1: both alleles are assumed present \
        at time 0, so the absorbing states 0 and N get weight 0."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    params: Params,

    /// Output format
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,

    /// Write records here instead of standard output
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads for Monte Carlo (0 = all cores); results do not depend on it
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Add a wall-clock timestamp to each record's metadata (makes output
    /// non-reproducible)
    #[arg(long, global = true)]
    timestamp: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Forward-simulate one trajectory (one record per generation)
    Simulate,
    /// Active information of one-generation events
    Actinfo {
        #[command(subcommand)]
        op: ActinfoOp,
    },
    /// Eventual fixation probability and its active information
    Fixation {
        #[command(subcommand)]
        op: FixationOp,
    },
    /// Diffusion-limit formulas and the Euler-Maruyama integrator
    Diffusion {
        #[command(subcommand)]
        op: DiffusionOp,
    },
    /// Pairwise coalescence under population-size misspecification
    Coalescent {
        #[command(subcommand)]
        op: CoalescentOp,
    },
    /// Evaluate a quantity over a cartesian grid (row-major over the axes)
    Sweep {
        /// Quantity to evaluate, e.g. diffusion.new-mutant
        #[arg(long, value_enum)]
        quantity: Quantity,
        /// Axis as NAME=v1,v2,... or NAME=start:stop:step; repeatable
        #[arg(long = "axis", required = true, allow_hyphen_values = true)]
        axes: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum ActinfoOp {
    /// Breakdown for explicit probabilities (--p-null, --p-alt)
    FromProbs,
    /// One offspring draws A: log(theta_i / (i/N))
    SingleDraw,
    /// Next generation holds j copies of A
    Offspring,
    /// Fixation in the next generation (no mutation)
    OneStepFixation,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum FixationOp {
    /// Solve the absorbing chain exactly (no mutation)
    Exact,
    /// Monte Carlo estimate (requires --seed and --trials)
    Mc,
    /// Active information of eventual fixation (--method exact|mc)
    Ai,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum DiffusionOp {
    Drift,
    Variance,
    /// Fixation probability from frequency p0
    Pfix,
    /// Active information of fixation from p0
    PfixAi,
    /// Fixation probability of a single new mutant, p_fix(1/N)
    NewMutant,
    /// Deleterious / beneficial / nearly-neutral classification
    Regime,
    /// Exact chain with s = alpha/N against the diffusion formula
    ChainGap,
    /// One Euler-Maruyama path (one record per step)
    SdePath,
    /// Fraction of Euler-Maruyama paths absorbed at 1
    SdeFixation,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum CoalescentOp {
    GeomPmf,
    GeomAi,
    GeomAiLimit,
    KingmanRate,
    KingmanTailAi,
    KingmanTailAiScaled,
    /// Simulated pairwise TMRCA summary (requires --seed and --trials)
    Tmrca,
}

fn quantity_of(c: &Command) -> Quantity {
    match c {
        Command::Simulate => Quantity::Simulate,
        Command::Actinfo { op } => match op {
            ActinfoOp::FromProbs => Quantity::FromProbs,
            ActinfoOp::SingleDraw => Quantity::SingleDraw,
            ActinfoOp::Offspring => Quantity::Offspring,
            ActinfoOp::OneStepFixation => Quantity::OneStepFixation,
        },
        Command::Fixation { op } => match op {
            FixationOp::Exact => Quantity::FixationExact,
            FixationOp::Mc => Quantity::FixationMc,
            FixationOp::Ai => Quantity::FixationAi,
        },
        Command::Diffusion { op } => match op {
            DiffusionOp::Drift => Quantity::Drift,
            DiffusionOp::Variance => Quantity::Variance,
            DiffusionOp::Pfix => Quantity::Pfix,
            DiffusionOp::PfixAi => Quantity::PfixAi,
            DiffusionOp::NewMutant => Quantity::NewMutant,
            DiffusionOp::Regime => Quantity::Regime,
            DiffusionOp::ChainGap => Quantity::ChainGap,
            DiffusionOp::SdePath => Quantity::SdePath,
            DiffusionOp::SdeFixation => Quantity::SdeFixation,
        },
        Command::Coalescent { op } => match op {
            CoalescentOp::GeomPmf => Quantity::GeomPmf,
            CoalescentOp::GeomAi => Quantity::GeomAi,
            CoalescentOp::GeomAiLimit => Quantity::GeomAiLimit,
            CoalescentOp::KingmanRate => Quantity::KingmanRate,
            CoalescentOp::KingmanTailAi => Quantity::KingmanTailAi,
            CoalescentOp::KingmanTailAiScaled => Quantity::KingmanTailAiScaled,
            CoalescentOp::Tmrca => Quantity::Tmrca,
        },
        Command::Sweep { quantity, .. } => *quantity,
    }
}

fn stamp(mut r: record::Record, timestamp: bool) -> record::Record {
    r = r.meta("version", env!("CARGO_PKG_VERSION"));
    if timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        r = r.meta("timestamp_unix", secs);
    }
    r
}

fn run(cli: Cli) -> Result<(), CliError> {
    let quantity = quantity_of(&cli.command);
    if quantity.is_stochastic() {
        cli.params.seed()?;
    }

    // Validate everything before touching the output file.
    let points: Vec<Params> = match &cli.command {
        Command::Sweep { axes, .. } => {
            let axes = axes
                .iter()
                .map(|a| sweep::parse_axis(a))
                .collect::<Result<Vec<_>, _>>()?;
            sweep::grid(&axes)?
                .into_iter()
                .map(|point| {
                    let mut p = cli.params.clone();
                    for (axis, v) in axes.iter().zip(point) {
                        p.set(&axis.name, v)?;
                    }
                    Ok(p)
                })
                .collect::<Result<_, CliError>>()?
        }
        _ => vec![cli.params.clone()],
    };

    let out: Box<dyn Write> = match &cli.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let mut sink = RecordSink::new(cli.format, out);
    for p in &points {
        for r in evaluate(quantity, p)? {
            sink.write(&stamp(r, cli.timestamp))?;
        }
    }
    sink.finish()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build();
    let result = match pool {
        Ok(pool) => pool.install(|| run(cli)),
        Err(e) => Err(CliError::Validation(format!("cannot build thread pool: {e}"))),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wfai: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
