//! `h1cb`: experiment runner for triangular-truncation lower bounds.

mod commands;
mod output;
mod range;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Experiments on Fourier-multiplier decompositions of H¹ and the triangular
/// truncation on trace-class matrices.
#[derive(Parser, Debug)]
#[command(name = "h1cb", version)]
pub struct Cli {
    /// Master seed; every parallel task derives its own seed from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads (0 uses every available core).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,

    /// Output directory; results go to stdout when neither this nor
    /// H1CB_OUT is set.
    #[arg(long, global = true, env = "H1CB_OUT")]
    pub out: Option<PathBuf>,

    /// Relative tolerance for the transfer inequality check.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tolerance: f64,

    /// Hard cap on search work per construction step.
    #[arg(long, global = true, default_value_t = h1cb_core::construction::DEFAULT_CAP)]
    pub cap: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TriMethod {
    /// Dual ascent from the witness library and random starts.
    Ascent,
    /// Best ratio over the witness library only.
    Library,
    /// Random rank-one search.
    Brute,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Scan,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Witness {
    Elementary,
    Cauchy,
    Ascent,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProbeModeArg {
    Signs,
    Mask,
    Box,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Estimate ‖T‖ on S¹_d over a range of sizes.
    TriNorm {
        /// Sizes: `a..b` doubles from a to b, `a-b` steps by one, or a comma list.
        #[arg(long, default_value = "2..256")]
        d: String,
        #[arg(long, value_enum, default_value_t = TriMethod::Ascent)]
        method: TriMethod,
        /// Random starts for the ascent.
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        /// Samples for the brute-force method.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Run the inductive construction and re-verify it.
    Construct {
        /// `stein` or a decomposition JSON file.
        #[arg(default_value = "stein")]
        decomposition: String,
        /// Number of levels (1 is the initial state).
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[arg(long, default_value_t = 1e-3)]
        eta: f64,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Trapezoid count for `stein` (default: enough for the run).
        #[arg(long)]
        pieces: Option<usize>,
    },
    /// Emit transfer certificates from a saved construction.
    Certify {
        /// Output of `construct`.
        #[arg(long)]
        state: PathBuf,
        /// Matrix sizes, in the same syntax as `tri-norm --d`.
        #[arg(long, default_value = "2..8")]
        d: String,
        #[arg(long, value_enum, default_value_t = Witness::Ascent)]
        witness: Witness,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
    },
    /// Sample coefficient vectors for unconditionality lower bounds.
    Probe {
        /// `stein` or a decomposition JSON file.
        #[arg(default_value = "stein")]
        decomposition: String,
        #[arg(long, value_enum, default_value_t = ProbeModeArg::Signs)]
        mode: ProbeModeArg,
        /// Number of coefficients N (scalar probes).
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Matrix sizes for amplified probes on construction witnesses.
        #[arg(long)]
        d: Option<String>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Construct, verify and certify in one go.
    Sweep {
        #[arg(long, default_value = "2..128")]
        d: String,
        #[arg(long, value_enum, default_value_t = Witness::Ascent)]
        witness: Witness,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
