//! Command-line front end. Every command evaluates a parameter grid and
//! emits one CSV table with a row per grid point, in grid order.
//!
//! Exit status: 0 on success, 2 for usage errors (nothing is written),
//! 1 for numerical failures.

mod commands;
mod figures;
mod grid;
mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::harq::Protocol;

pub use table::{format_sig9, Cell, Table};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "HARQ_OUTAGE_THREADS";

/// Invalid command line or parameter grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Parser)]
#[command(name = "harq-outage", version, about = "Fixed-outage rates for Rayleigh block fading, with and without H-ARQ")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct GridArgs {
    /// SNR grid in dB: list and/or start:stop:step ranges, e.g. 0:40:1,45.
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    /// Maximum H-ARQ rounds M, e.g. 1,2,6 or 10:100:10.
    #[arg(long = "M")]
    rounds: Option<String>,
    /// Diversity order L (blocks per codeword without H-ARQ).
    #[arg(long = "L")]
    diversity: Option<String>,
    /// Outage targets ε.
    #[arg(long)]
    eps: Option<String>,
    /// Output CSV path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (also capped by HARQ_OUTAGE_THREADS).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
struct SimArgs {
    #[arg(long, value_enum, default_value_t = ProtocolArg::Ir)]
    protocol: ProtocolArg,
    /// Messages per grid point.
    #[arg(long, default_value_t = 100_000)]
    messages: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Fixed initial rate in bits/symbol instead of the ε-matched one.
    #[arg(long)]
    rate: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProtocolArg {
    Ir,
    Cc,
}

impl From<ProtocolArg> for Protocol {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::Ir => Protocol::IncrementalRedundancy,
            ProtocolArg::Cc => Protocol::ChaseCombining,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// ε-outage capacity without H-ARQ, exact and approximate.
    Capacity {
        #[command(flatten)]
        grid: GridArgs,
        /// Monte Carlo draws for an empirical quantile cross-check.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Incremental-redundancy H-ARQ rate.
    HarqIr {
        #[command(flatten)]
        grid: GridArgs,
        /// Also maximise over the initial rate.
        #[arg(long)]
        optimize: bool,
    },
    /// Chase-combining H-ARQ rate.
    HarqCc {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        optimize: bool,
    },
    /// Initial-rate optimisation.
    Optimize {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum, default_value_t = ProtocolArg::Ir)]
        protocol: ProtocolArg,
    },
    /// Monte Carlo protocol simulation.
    Simulate {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Figure presets 1 to 11.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=11))]
        number: u8,
        #[command(flatten)]
        grid: GridArgs,
        /// Adds simulated columns where the figure supports them.
        #[arg(long)]
        messages: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Analytic rate and outage next to simulated ones, with z-scores.
    Compare {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        sim: SimArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Capacity,
    HarqIr,
    HarqCc,
    Optimize,
    Simulate,
    Figure(u8),
    Compare,
}

/// Validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub command: CommandKind,
    pub snr_db: Option<Vec<f64>>,
    pub rounds: Option<Vec<usize>>,
    pub diversity: Option<Vec<usize>>,
    pub eps: Option<Vec<f64>>,
    pub protocol: Protocol,
    pub optimize: bool,
    pub messages: Option<u64>,
    pub seed: u64,
    pub samples: Option<usize>,
    pub initial_rate: Option<f64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunSpec {
    fn from_cli(cli: Cli) -> Result<Self, UsageError> {
        let mut protocol = Protocol::IncrementalRedundancy;
        let mut optimize = false;
        let mut messages = None;
        let mut seed = 1;
        let mut samples = None;
        let mut initial_rate = None;
        let (command, grid) = match cli.command {
            Command::Capacity { grid, samples: s, seed: sd } => {
                samples = s;
                seed = sd;
                (CommandKind::Capacity, grid)
            }
            Command::HarqIr { grid, optimize: o } => {
                optimize = o;
                (CommandKind::HarqIr, grid)
            }
            Command::HarqCc { grid, optimize: o } => {
                optimize = o;
                protocol = Protocol::ChaseCombining;
                (CommandKind::HarqCc, grid)
            }
            Command::Optimize { grid, protocol: p } => {
                protocol = p.into();
                (CommandKind::Optimize, grid)
            }
            Command::Simulate { grid, sim } => {
                (protocol, messages, seed, initial_rate) = sim_fields(&sim);
                (CommandKind::Simulate, grid)
            }
            Command::Compare { grid, sim } => {
                (protocol, messages, seed, initial_rate) = sim_fields(&sim);
                (CommandKind::Compare, grid)
            }
            Command::Figure { number, grid, messages: m, seed: sd } => {
                messages = m;
                seed = sd;
                (CommandKind::Figure(number), grid)
            }
        };
        if messages == Some(0) {
            return Err(UsageError("--messages: must be >= 1".into()));
        }
        if samples == Some(0) {
            return Err(UsageError("--samples: must be >= 1".into()));
        }
        if let Some(r) = initial_rate {
            if !(r > 0.0 && r.is_finite()) {
                return Err(UsageError(format!("--rate: {r} is not a positive finite rate")));
            }
        }
        if grid.threads == Some(0) {
            return Err(UsageError("--threads: must be >= 1".into()));
        }
        if let Some(path) = &grid.out {
            let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
            if parent.is_some_and(|p| !p.is_dir()) || path.is_dir() {
                return Err(UsageError(format!("--out: {} is not a writable file path", path.display())));
            }
        }
        let eps = grid.eps.as_deref().map(|s| grid::parse_probabilities("eps", s)).transpose()?;
        if let (CommandKind::Figure(n), Some(values)) = (command, &eps) {
            if figures::SINGLE_EPS.contains(&n) && values.len() != 1 {
                return Err(UsageError(format!("--eps: figure {n} takes a single value")));
            }
        }
        Ok(Self {
            command,
            snr_db: grid.snr.as_deref().map(|s| grid::parse_reals("snr", s)).transpose()?,
            rounds: grid.rounds.as_deref().map(|s| grid::parse_counts("M", s)).transpose()?,
            diversity: grid.diversity.as_deref().map(|s| grid::parse_counts("L", s)).transpose()?,
            eps,
            protocol,
            optimize,
            messages,
            seed,
            samples,
            initial_rate,
            out: grid.out,
            threads: grid.threads,
        })
    }

    pub(crate) fn snr_or(&self, default: &[f64]) -> Vec<f64> {
        self.snr_db.clone().unwrap_or_else(|| default.to_vec())
    }

    pub(crate) fn rounds_or(&self, default: &[usize]) -> Vec<usize> {
        self.rounds.clone().unwrap_or_else(|| default.to_vec())
    }

    pub(crate) fn diversity_or(&self, default: &[usize]) -> Vec<usize> {
        self.diversity.clone().unwrap_or_else(|| default.to_vec())
    }

    pub(crate) fn eps_or(&self, default: &[f64]) -> Vec<f64> {
        self.eps.clone().unwrap_or_else(|| default.to_vec())
    }

    /// Effective worker count: the smaller of `--threads` and the
    /// environment cap, when either is set.
    fn worker_threads(&self) -> Result<Option<usize>, UsageError> {
        let env = match std::env::var(THREADS_ENV) {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(n) if n >= 1 => Some(n),
                _ => return Err(UsageError(format!("{THREADS_ENV}: '{v}' is not a positive integer"))),
            },
            Err(_) => None,
        };
        Ok(match (self.threads, env) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        })
    }
}

fn sim_fields(sim: &SimArgs) -> (Protocol, Option<u64>, u64, Option<f64>) {
    (sim.protocol.into(), Some(sim.messages), sim.seed, sim.rate)
}

/// Evaluates a validated run description into its output table.
pub fn execute(spec: &RunSpec) -> crate::error::Result<Table> {
    match spec.command {
        CommandKind::Capacity => commands::capacity(spec),
        CommandKind::HarqIr => commands::harq_ir(spec),
        CommandKind::HarqCc => commands::harq_cc(spec),
        CommandKind::Optimize => commands::optimize(spec),
        CommandKind::Simulate => commands::simulate(spec),
        CommandKind::Compare => commands::compare(spec),
        CommandKind::Figure(n) => figures::figure(n, spec),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let spec = match RunSpec::from_cli(cli) {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("usage error: {e}");
            return 2;
        }
    };
    let threads = match spec.worker_threads() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("usage error: {e}");
            return 2;
        }
    };
    let result = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))
            .and_then(|pool| pool.install(|| execute(&spec))),
        None => execute(&spec),
    };
    let bytes = match result.and_then(|table| table.to_csv()) {
        Ok(bytes) => bytes,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let written = match &spec.out {
        Some(path) => std::fs::write(path, &bytes),
        None => std::io::stdout().lock().write_all(&bytes),
    };
    match written {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: cannot write output: {e}");
            1
        }
    }
}
