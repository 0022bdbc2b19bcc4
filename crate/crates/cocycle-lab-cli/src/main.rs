use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use cocycle_lab_cli::config;
use cocycle_lab_cli::run::{run, RunOptions};

#[derive(Parser)]
#[command(name = "cocycle-lab", about = "Monte-Carlo laboratory for random-quasiperiodic cocycles")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

// The subcommand selects the experiment; the config file must agree, so a
// config cannot silently run as the wrong experiment.
#[derive(Subcommand)]
enum Cmd {
    /// Top Lyapunov exponent of one model
    Estimate(RunArgs),
    /// First k Lyapunov exponents
    Spectrum(RunArgs),
    /// Exponent across an energy grid
    Sweep(RunArgs),
    /// Empirical stationary measure, residual and Furstenberg functional
    Stationary(RunArgs),
    /// Uniform-convergence and almost-invariance diagnostics
    Converge(RunArgs),
    /// Positivity-criterion hypothesis certificates
    Criteria(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing)
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override the config's master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to COCYCLE_LAB_WORKERS, then all cores.
    /// Never changes results, only wall-clock.
    #[arg(long)]
    workers: Option<usize>,
    /// Also emit an SVG plot where the experiment produces a curve
    #[arg(long)]
    svg: bool,
    /// Also emit per-sample JSON lines where available
    #[arg(long)]
    jsonl: bool,
}

fn execute(experiment: &str, args: &RunArgs) -> Result<()> {
    let workers = match args.workers {
        Some(w) => Some(w),
        None => match std::env::var("COCYCLE_LAB_WORKERS") {
            Ok(s) => Some(
                s.parse::<usize>()
                    .with_context(|| format!("COCYCLE_LAB_WORKERS={s:?} is not a worker count"))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(w) = workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build_global()
            .context("initializing worker pool")?;
    }
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let cfg = config::parse_config(&text)?;
    if cfg.experiment != experiment {
        anyhow::bail!(
            "config declares experiment {:?} but the {experiment} subcommand was invoked",
            cfg.experiment
        );
    }
    run(
        &cfg,
        &args.out,
        &RunOptions {
            seed_override: args.seed,
            svg: args.svg,
            jsonl: args.jsonl,
        },
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, args) = match &cli.cmd {
        Cmd::Estimate(a) => ("estimate", a),
        Cmd::Spectrum(a) => ("spectrum", a),
        Cmd::Sweep(a) => ("sweep", a),
        Cmd::Stationary(a) => ("stationary", a),
        Cmd::Converge(a) => ("converge", a),
        Cmd::Criteria(a) => ("criteria", a),
    };
    match execute(experiment, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
