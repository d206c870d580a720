//! `edge-logdet` — command-line front end for the edge log-determinant
//! laboratory: ensemble sampling, renormalized log-determinants,
//! edge-process traces with a gnuplot viewer, Monte Carlo CLT campaigns,
//! gap-sum scaling fits, the decimation identity check, and a
//! deterministic self-verification suite.
//!
//! Exit codes: 0 success; 1 invalid flags/configuration (including domain
//! errors in the requested parameters); 2 verification failure; 3 runtime
//! error (I/O, numerical singularities).

mod commands;
mod config;
mod verify;

use clap::{Args, Parser, Subcommand};
use edge_logdet_core::Error;
use std::path::PathBuf;

/// How a command failed, carrying the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config file, or parameter domain → exit 1.
    Usage(String),
    /// One or more verification checks failed → exit 2.
    Verification,
    /// I/O or in-flight numerical failure → exit 3.
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_)
            | Error::InvalidInput(_)
            | Error::Domain(_)
            | Error::Regime(_) => Failure::Usage(e.to_string()),
            Error::SingularDeterminant
            | Error::StieltjesSingularity
            | Error::InsufficientData(_) => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "edge-logdet",
    version,
    about = "Simulation laboratory for log-determinants of tridiagonal \
             Gaussian ensembles evaluated near the spectral edge"
)]
struct Cli {
    /// Optional key=value configuration file; command-line flags win
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw one tridiagonal ensemble matrix and write it as CSV
    Sample(SampleArgs),
    /// Compute the sign and log-magnitude of one renormalized determinant
    Logdet(LogdetArgs),
    /// Emit the edge-process trace CSVs plus a gnuplot viewer script
    Trace(TraceArgs),
    /// Run a Monte Carlo campaign of standardized log-determinants
    Clt(CltArgs),
    /// Fit the growth exponents of the spectral gap sums s1 and s2
    Prop1(Prop1Args),
    /// Check the interlacing decimation identity by a two-sample KS test
    Decimate(DecimateArgs),
    /// Run the deterministic identity suite (exit 2 on any failure)
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SampleArgs {
    /// Matrix dimension
    #[arg(long)]
    n: Option<usize>,
    /// Inverse-temperature parameter (1 = unitary-class, 2 = orthogonal-class)
    #[arg(long)]
    alpha: Option<f64>,
    /// Master seed (default: config, then EDGE_LOGDET_SEED, then 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Rank-one spike strength h (0 disables)
    #[arg(long)]
    spike: Option<f64>,
    /// Output CSV path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LogdetArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Edge coordinate σ (the evaluation point is 2θ = 2 + N^{-2/3}σ)
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    spike: Option<f64>,
    /// Evaluation engine: recurrence | eigen
    #[arg(long)]
    method: Option<String>,
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long)]
    n: Option<usize>,
    /// Evaluation point 2θ on the original scale
    #[arg(long = "two-theta")]
    two_theta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also compute the linearized companion series (needs the real-root regime)
    #[arg(long, default_value_t = false)]
    with_l: bool,
    /// Output CSV path; the scatter CSV and gnuplot script are written beside it
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CltArgs {
    /// Comma-separated dimensions, e.g. 128,8192
    #[arg(long = "n-list")]
    n_list: Option<String>,
    /// Replicates per dimension
    #[arg(long)]
    reps: Option<u32>,
    /// σ as a function of N: const:C | loglogsq:C | loglogcube:C
    #[arg(long = "sigma-rule")]
    sigma_rule: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    spike: Option<f64>,
    /// Standardization rule: thm1 (log-N scale) | thm2 (θ-dependent scale)
    #[arg(long)]
    scaling: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (output is independent of this)
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory for samples.csv and summary.csv
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Prop1Args {
    #[arg(long = "n-list")]
    n_list: Option<String>,
    #[arg(long)]
    reps: Option<u32>,
    /// Edge coordinate σ (constant across N)
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Optional CSV path for the per-replicate gap sums
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecimateArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Shift applied to the reference sample (power control; default 0)
    #[arg(long, allow_hyphen_values = true)]
    shift: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Worker threads for the heavier checks (results are independent of this)
    #[arg(long)]
    threads: Option<usize>,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let settings = match config::Settings::load(cli.config.as_deref()) {
        Ok(s) => s,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            return 1;
        }
        Err(_) => unreachable!("config loading only raises usage errors"),
    };
    let outcome = match cli.cmd {
        Cmd::Sample(a) => commands::sample(&a, &settings),
        Cmd::Logdet(a) => commands::logdet(&a, &settings),
        Cmd::Trace(a) => commands::trace(&a, &settings),
        Cmd::Clt(a) => commands::clt(&a, &settings),
        Cmd::Prop1(a) => commands::prop1(&a, &settings),
        Cmd::Decimate(a) => commands::decimate(&a, &settings),
        Cmd::Verify(a) => verify::verify(&a, &settings),
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            1
        }
        Err(Failure::Verification) => 2,
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            3
        }
    }
}
