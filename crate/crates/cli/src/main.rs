//! `entpower` command-line front end. Every subcommand reads a matrix file
//! (except `gen`, `unital`, `sic` and `probe-conjectures`), calls the library
//! and writes a report as indented text or, with `--json`, as JSON.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use entpower::Error;

#[derive(Debug, Parser)]
#[command(name = "entpower", version, about = "Entangling power of bipartite unitary gates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Matrix file to analyze.
    #[arg(long = "in", global = true)]
    input: Option<PathBuf>,
    /// Write the report (or the generated matrix) here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    restarts: Option<usize>,
    #[arg(long = "ancilla-a", global = true)]
    ancilla_a: Option<usize>,
    #[arg(long = "ancilla-b", global = true)]
    ancilla_b: Option<usize>,
    #[arg(long = "no-ancilla", global = true)]
    no_ancilla: bool,
    /// Optimizer convergence tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Unitarity tolerance applied when the matrix file is parsed.
    #[arg(long = "unitary-tol", global = true, default_value_t = entpower::report::UNITARITY_TOL)]
    unitary_tol: f64,
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Operator Schmidt decomposition and Schmidt strength.
    Schmidt,
    /// Entangling power.
    Ke,
    /// Assisted entangling power.
    Kea,
    /// Disentangling power.
    Kd,
    /// The chain K_Sch ≤ K_E ≤ K_Ea ≤ caps.
    Bounds,
    /// Structural classification.
    Classify,
    /// Schmidt-rank-three permutation classifier.
    Perm3,
    /// Closed form for 2 × d_B complex permutations of Schmidt rank three.
    Cp3,
    /// Generalized-CNOT test for Schmidt-rank-two gates.
    Gcnot,
    /// Two-ebit witness for 2 × d_B complex permutations of Schmidt rank four.
    Sr4,
    /// Generalized Clifford test and the common value of all three powers.
    Clifford,
    /// Local equivalence of a d_A × 2 Schmidt-rank-three gate to a symmetric matrix.
    Symmetrize,
    /// Exact branch enumeration of the Schmidt-decomposition protocol.
    Protocol {
        /// Number of seeded random inputs.
        #[arg(long, default_value_t = 20)]
        inputs: usize,
        /// Sampled runs per input for the empirical success frequency.
        #[arg(long, default_value_t = 0)]
        runs: usize,
    },
    /// Equivalence check for a unitary Kraus family.
    Unital {
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// `hw` (Heisenberg-Weyl words) or `shift-clock`.
        #[arg(long, default_value = "hw")]
        family: String,
        #[arg(long, default_value_t = entpower::unital::DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// Fiducial search and the SIC-controlled gate check.
    Sic {
        #[arg(long, default_value_t = 2)]
        d: usize,
    },
    /// Emit a matrix file.
    Gen(GenArgs),
    /// Sweeps comparing conjectured values with numeric estimates.
    ProbeConjectures {
        #[arg(long, default_value_t = 4)]
        count: usize,
        /// Phase count for the Schmidt-rank-two sweep.
        #[arg(long, default_value_t = 4)]
        phases: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    /// haar, permutation, complex-permutation, controlled, named, ud1, gcnot, hw-controlled, pauli-power.
    pub kind: String,
    /// Dimensions `dA dB`, preceded by the gate name for `named`.
    pub args: Vec<String>,
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub thetas: Vec<f64>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub a: Option<usize>,
    #[arg(long)]
    pub b: Option<usize>,
}

/// Exit codes: 1 usage, 2 unreadable or non-unitary matrix, 3 violated precondition, 4 numerical failure.
pub enum Failure {
    Usage(String),
    Matrix(String),
    Precondition(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Matrix(_) => 2,
            Failure::Precondition(_) => 3,
            Failure::Runtime(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Matrix(m) | Failure::Precondition(m) | Failure::Runtime(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Precondition(_) | Error::SamplingExhausted { .. } => Failure::Precondition(e.to_string()),
            Error::Parse(_) => Failure::Usage(e.to_string()),
            Error::SearchFailed(_) | Error::Numerical(_) => Failure::Runtime(e.to_string()),
            Error::Shape(_) | Error::InvalidState(_) | Error::InvalidUnitary(_) | Error::Construction(_) => {
                Failure::Precondition(e.to_string())
            }
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match commands::run(&cli.command, &cli.common, &argv[1..]) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
