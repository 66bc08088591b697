//! `lqcert`: certified verification of lq recovery conditions and sparse
//! recovery experiments.
//!
//! Machine output (JSON or CSV) goes to `--output` or stdout; a short human
//! summary goes to stderr. Exit codes: 0 success or certified, 1 usage or
//! configuration error, 2 refuted, 3 inconclusive, 4 i/o error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lqcert::recovery::Ensemble;
use lqcert::Mode;

#[derive(Parser)]
#[command(name = "lqcert", version, about = "Certified RIC conditions for lq minimization")]
struct Cli {
    /// Worker threads (default: available parallelism)
    #[arg(long, global = true, env = "RIC_CERTIFY_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Float,
    Interval,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Float => Mode::Float,
            ModeArg::Interval => Mode::Interval,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EnsembleArg {
    Gaussian,
    Bernoulli,
}

impl From<EnsembleArg> for Ensemble {
    fn from(e: EnsembleArg) -> Self {
        match e {
            EnsembleArg::Gaussian => Ensemble::Gaussian,
            EnsembleArg::Bernoulli => Ensemble::Bernoulli,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Theorem {
    #[value(name = "7")]
    Seven,
    #[value(name = "9")]
    Nine,
}

/// Arithmetic used by the mesh engine.
#[derive(Args, Debug, Clone)]
struct EngineArgs {
    #[arg(long, value_enum, default_value = "float")]
    mode: ModeArg,

    /// Extra quartering levels for cells whose bound fails
    #[arg(long, default_value_t = 3)]
    refine_budget: u32,
}

/// A sensing matrix: read from a file or generated from a seed.
#[derive(Args, Debug, Clone)]
struct MatrixArgs {
    /// Matrix file (JSON header line, then CSV rows)
    #[arg(long, conflicts_with_all = ["m", "n"])]
    matrix: Option<PathBuf>,

    /// Rows of a generated matrix
    #[arg(long, requires = "n")]
    m: Option<usize>,

    /// Columns of a generated matrix
    #[arg(long, requires = "m")]
    n: Option<usize>,

    #[arg(long, value_enum, default_value = "gaussian")]
    ensemble: EnsembleArg,

    /// Seed of a generated matrix
    #[arg(long, default_value_t = 0)]
    matrix_seed: u64,

    /// Also write the matrix to this file
    #[arg(long)]
    save_matrix: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate q, p_q, dp_q/dq and B(q) as CSV
    PqTable {
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        step: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Certify that B(q) is strictly decreasing, and enclose B at given points
    Boundary {
        #[arg(long, default_value_t = 0.01)]
        q_lo: f64,
        #[arg(long, default_value_t = 0.99)]
        q_hi: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        /// Points at which to enclose B in interval arithmetic
        #[arg(long, value_delimiter = ',')]
        at: Vec<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Verify r(t, q, delta) < 1 with a theorem preset or a job file
    Verify {
        #[arg(long, value_enum, required_unless_present = "config", conflicts_with = "config")]
        theorem: Option<Theorem>,
        /// RIC value (default 0.5 for theorem 7, 0.4931 for theorem 9)
        #[arg(long)]
        delta: Option<f64>,
        /// Upper end of the q range (theorem 7 only, default 0.9181)
        #[arg(long)]
        q_max: Option<f64>,
        /// Job file: {delta, q_max, mode, partitions, refine_budget, workers, output}
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        engine: EngineArgs,
        /// Certificate destination (default stdout)
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Corner-point upper bound of r over one cell
    VerifyCell {
        #[arg(long)]
        t_lo: f64,
        #[arg(long)]
        t_hi: f64,
        #[arg(long)]
        q_lo: f64,
        #[arg(long)]
        q_hi: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum, default_value = "float")]
        mode: ModeArg,
    },
    /// Largest certified q_max on the lattice of the given precision
    SearchQmax {
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long, default_value_t = 1e-4)]
        precision: f64,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// The q = 1 threshold, and the parabola check at a given delta
    ThresholdQ1 {
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Test the converse Cauchy-Schwarz inequality on random vectors or one vector
    Lemma3Test {
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 64)]
        n_max: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])]
        q: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Check this vector only (uses the first q)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        vector: Option<Vec<f64>>,
    },
    /// Maximize sqrt(r) - r^{1/q} / n^{1/q-1/2} over r in [1, n]
    MaxGap {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: f64,
    },
    /// Restricted isometry constant, exact or Monte Carlo
    Ric {
        #[command(flatten)]
        matrix: MatrixArgs,
        #[arg(long)]
        k: usize,
        /// Sample this many subsets instead of enumerating all of them
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Minimize ||x||_q subject to Phi x = b
    Recover {
        #[command(flatten)]
        matrix: MatrixArgs,
        /// Measurements, comma separated
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        b: Vec<f64>,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Probe the null space property on a support T0
    NspCheck {
        #[command(flatten)]
        matrix: MatrixArgs,
        /// Indices of T0, comma separated
        #[arg(long, value_delimiter = ',')]
        t0: Vec<usize>,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Phase-transition experiment; CSV k,q,success_count,trials
    Experiment {
        /// Experiment file: {m, n, k_values, q_values, trials, seed, ensemble}
        #[arg(long, conflicts_with_all = ["m", "n", "k_values", "q_values"])]
        config: Option<PathBuf>,
        #[arg(long, required_unless_present = "config")]
        m: Option<usize>,
        #[arg(long, required_unless_present = "config")]
        n: Option<usize>,
        #[arg(long, value_delimiter = ',', required_unless_present = "config")]
        k_values: Vec<usize>,
        #[arg(long, value_delimiter = ',', required_unless_present = "config")]
        q_values: Vec<f64>,
        #[arg(long, default_value_t = 50)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "gaussian")]
        ensemble: EnsembleArg,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok = 0,
    Usage = 1,
    Refuted = 2,
    Inconclusive = 3,
    Io = 4,
}

fn status_of(err: &anyhow::Error) -> Status {
    for cause in err.chain() {
        if cause.is::<std::io::Error>() || matches!(cause.downcast_ref(), Some(lqcert::Error::Io(_))) {
            return Status::Io;
        }
    }
    Status::Usage
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Status::Usage as u8 } else { Status::Ok as u8 });
        }
    };
    let status = match commands::run(cli) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e:#}");
            status_of(&e)
        }
    };
    ExitCode::from(status as u8)
}
