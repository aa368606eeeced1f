use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use zbest::experiment::run;
use zbest::formats::{EnumerationExport, ExactValue};
use zbest::{ExperimentConfig, ExperimentError, Format, Mode, Process};
use zbest_core::lightbulb::{compute_bn, enumerate_exact, lightbulb_moments, EnumerationOptions};
use zbest_core::{Rational, Scalar};

/// Zero-bias enhanced Stein couplings: exact and Monte Carlo checks of
/// normal-approximation bounds.
#[derive(Debug, Parser)]
#[command(name = "zbest", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment and write its report.
    Run(RunArgs),
    /// Print the former lightbulb constant B_n.
    Bn {
        #[arg(long)]
        n: usize,
    },
    /// Print μ, σ² and λ_n of the lightbulb sum.
    Moments {
        #[arg(long)]
        n: usize,
    },
    /// Write the exact lightbulb laws for n = 4 or 6 as JSON.
    Enumerate {
        #[arg(long)]
        n: usize,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    process: Process,
    /// Number of bulbs (lightbulb).
    #[arg(long, conflicts_with = "p")]
    n: Option<usize>,
    /// Comma-separated success probabilities (bernoulli).
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to the available parallelism.
    #[arg(long, env = "ZBEST_WORKERS")]
    workers: Option<usize>,
    /// Defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Exit with status 1 if a bound margin is violated.
    #[arg(long)]
    check: bool,
    /// Leave wall_time_seconds null so reports are byte-reproducible.
    #[arg(long)]
    no_timing: bool,
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn exact(q: &Rational) -> serde_json::Value {
    serde_json::to_value(ExactValue::from(q)).expect("plain strings")
}

fn run_command(args: RunArgs) -> Result<ExitCode, ExperimentError> {
    let workers = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let config = ExperimentConfig {
        process: args.process,
        n: args.n,
        p: args.p,
        mode: args.mode,
        samples: args.samples,
        seed: args.seed,
        workers,
        output_path: args.out.clone(),
        format: args.format,
        timing: !args.no_timing,
    };
    let report = run(&config)?;
    if args.out.is_none() {
        print!("{}", report.render(args.format)?);
    }
    if args.check && !report.passes_check() {
        eprintln!(
            "bound check failed: margin_k = {}, margin_w = {}",
            report.bound_margin_k, report.bound_margin_w
        );
        return Ok(ExitCode::from(EXIT_CHECK_FAILED));
    }
    Ok(ExitCode::SUCCESS)
}

fn execute(command: Command) -> Result<ExitCode, ExperimentError> {
    match command {
        Command::Run(args) => return run_command(args),
        Command::Bn { n } => {
            let b_n = compute_bn(n)?;
            let sigma2 = lightbulb_moments::<f64>(n)?.sigma2;
            println!("{}", json!({ "n": n, "sigma2": sigma2, "b_n": b_n }));
        }
        Command::Moments { n } => {
            let m = lightbulb_moments::<Rational>(n)?;
            let out = json!({
                "n": n,
                "mu": m.mu.to_f64(),
                "sigma2": m.sigma2.to_f64(),
                "lambda_n": m.lambda_n.to_f64(),
                "exact": { "mu": exact(&m.mu), "sigma2": exact(&m.sigma2), "lambda_n": exact(&m.lambda_n) },
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Enumerate { n, out } => {
            let e = enumerate_exact(n, EnumerationOptions::default())?;
            let text = EnumerationExport::from(&e).to_json()?;
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e @ (ExperimentError::InvalidConfig { .. } | ExperimentError::Core(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
