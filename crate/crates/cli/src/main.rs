use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use landau_core::report::GridSpec;
use landau_core::volterra::Scheme;

mod commands;
mod output;

use output::Format;

/// Linear Landau damping: dispersion relations, Green's functions and
/// per-mode Volterra solves around radial equilibria.
#[derive(Debug, Parser)]
#[command(name = "landau", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Equilibrium description, e.g. {"kind": {"generalized_poisson": 1}}.
    #[arg(long, global = true)]
    pub equilibrium: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    /// Worker threads for grid sweeps.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GreensMethod {
    /// Contour for |xi| above the low-frequency regime, rays below it.
    Auto,
    Closed,
    High,
    Low,
    RealLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Trapezoid,
    Gregory,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Trapezoid => Scheme::Trapezoid,
            SchemeArg::Gregory => Scheme::Gregory,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Winding numbers of k(R) about positive probes.
    Penrose {
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,1,2,5")]
        probes: Vec<f64>,
        /// Emit the sampled curve instead of the winding numbers.
        #[arg(long)]
        curve: bool,
    },
    /// Low-frequency zeros of r^2 - k on an r grid.
    Dispersion {
        #[arg(long, default_value = "0.01:0.3:30")]
        r_grid: GridSpec,
        /// Sweep sequentially, seeding each point with its predecessor.
        #[arg(long)]
        warm_start: bool,
        /// Fail when the dissipation rate leaves its bracket.
        #[arg(long)]
        bracket: bool,
    },
    /// Poles of the generalized Poisson resolvent.
    Poles {
        #[arg(long)]
        j: u32,
        #[arg(long)]
        xi_grid: GridSpec,
    },
    /// Smooth part of the Green's function.
    Greens {
        #[arg(long, required_unless_present = "xi", conflicts_with = "xi")]
        xi_grid: Option<GridSpec>,
        /// Single frequency, shorthand for `--xi-grid X:X:1`.
        #[arg(long)]
        xi: Option<f64>,
        #[arg(long, default_value = "0:20:41")]
        tau_grid: GridSpec,
        #[arg(long, value_enum, default_value = "auto")]
        method: GreensMethod,
        /// Fail when the envelope ratio exceeds this constant.
        #[arg(long)]
        envelope_constant: Option<f64>,
    },
    /// Per-mode Volterra solve.
    Volterra {
        #[arg(long)]
        xi: f64,
        /// Forcing description, {"kind": "free_streaming", "g": {...}, "q": {...}}.
        #[arg(long)]
        forcing: PathBuf,
        #[arg(long)]
        t_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value = "trapezoid")]
        scheme: SchemeArg,
    },
    /// Sup-norm decay of a free-streaming forcing in physical space.
    ForcingDecay {
        #[arg(long)]
        forcing: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32,64")]
        times: Vec<f64>,
    },
    /// Runs the oracle suites for the equilibrium, or all acceptance criteria.
    Validate {
        #[arg(long)]
        acceptance: bool,
    },
}

/// Usage errors exit with 1, failed checks and failed computations with 2.
pub enum Failure {
    Usage(String),
    Check(String),
}

impl From<landau_core::Error> for Failure {
    fn from(e: landau_core::Error) -> Self {
        use landau_core::Error as E;
        match e {
            E::InvalidArgument(_) | E::EmptyGrid | E::Domain { .. } | E::TailClassMismatch { .. } | E::NonSeparable(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Check(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("landau: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("landau: {msg}");
            eprintln!("see `landau help` for usage");
            ExitCode::from(1)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("landau: {msg}");
            ExitCode::from(2)
        }
    }
}
