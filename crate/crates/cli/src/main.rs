//! csq: coherent-state quantization models from the command line.
//!
//! stdout carries exactly one JSON report per invocation; diagnostics go to
//! stderr. Exit codes: 0 when every check in the report passes, 1 when a
//! check fails or a computation errors out, 2 for usage errors (bad flags,
//! malformed --f, L above the CSQ_MAX_L cap).

mod commands;
mod report;

use clap::{Args, Parser, Subcommand};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "csq",
    about = "Coherent-state quantization on the circle, the 2-sphere, and the fuzzy sphere",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quantize the symmetric 2x2 observable family on the circle
    Circle(CircleArgs),
    /// Spin-1/2 coherent states on the 2-sphere
    Sphere {
        #[command(subcommand)]
        action: SphereAction,
    },
    /// Fuzzy sphere with harmonic cutoff L
    Fuzzy(FuzzyArgs),
    /// Run named verification checks over all models
    Verify(VerifyArgs),
}

#[derive(Args)]
pub struct CircleArgs {
    /// Upper-left matrix entry
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    /// Off-diagonal matrix entry
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    /// Lower-right matrix entry
    #[arg(long, allow_negative_numbers = true)]
    pub d: f64,
    /// Number of evenly spaced angles in the symbol table
    #[arg(long, default_value_t = 8)]
    pub samples: usize,
}

#[derive(Subcommand)]
pub enum SphereAction {
    /// Quantized coordinate and angle operators
    Ops,
    /// Pauli symbol tables sampled over the sphere
    Symbols,
    /// Commutator of the quantized angle operators
    Commutator,
    /// Compare against the phase-shifted state family
    PhaseCheck,
}

#[derive(Args)]
pub struct FuzzyArgs {
    /// Harmonic cutoff; the space has dimension L+1. Capped by CSQ_MAX_L (default 16).
    #[arg(long = "L")]
    pub big_l: usize,
    /// Observable: x1 | x2 | x3 or a harmonic list "l,m,re,im;l,m,re,im;..."
    #[arg(long)]
    pub f: Option<String>,
    /// Write the coefficient tensor to PATH (.json for JSON, anything else CSV)
    #[arg(long)]
    pub export_tensor: Option<std::path::PathBuf>,
    #[command(subcommand)]
    pub action: Option<FuzzyAction>,
}

#[derive(Subcommand)]
pub enum FuzzyAction {
    /// Compare the quantized coordinates against the spin matrices
    Madore,
    /// Entry norms of the quantized degree-ell harmonics
    Truncation {
        #[arg(long)]
        ell: usize,
    },
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Replace the default tolerance of every residual check
    #[arg(long)]
    pub tol: Option<f64>,
    /// Run only checks whose name contains this substring
    #[arg(long)]
    pub only: Option<String>,
}

/// Failure modes a command can report back to `main`.
pub enum CommandError {
    /// Caller mistake: bad flag combination, malformed observable, cap
    /// exceeded. Exit code 2.
    Usage(String),
    /// The computation itself failed. Exit code 1.
    Run(String),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Circle(args) => commands::circle::run(args),
        Command::Sphere { action } => commands::sphere::run(action),
        Command::Fuzzy(args) => commands::fuzzy::run(args),
        Command::Verify(args) => commands::verify::run(args),
    };
    match result {
        Ok(rep) => {
            // A consumer that stops reading (head, broken pipe) is not an
            // error; the exit code keeps reflecting the checks alone.
            use std::io::Write as _;
            let _ = writeln!(std::io::stdout(), "{}", rep.to_json());
            if rep.passed() {
                ExitCode::SUCCESS
            } else {
                for c in rep.failing() {
                    log::error!(
                        "check failed: {} = {:.3e} (bound {} {:.3e})",
                        c.name,
                        c.value,
                        c.comparison,
                        c.tolerance
                    );
                }
                ExitCode::from(1)
            }
        }
        Err(CommandError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CommandError::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
