use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use sempilot::config::{CorrectorKind, ExperimentConfig};
use sempilot::demo;
use sempilot::report;
use sempilot::runner;
use sempilot::verify;
use sempilot_core::textcodec::Alphabet;

#[derive(Parser)]
#[command(
    name = "sempilot",
    about = "QPSK link simulator benchmarking semantic-pilot data-aided channel estimation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte Carlo benchmark and write CSV/Markdown reports.
    Run(RunArgs),
    /// Print the worked selection example.
    DemoTable1,
    /// Run the analytic-law self-checks.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file (TOML); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// SNR points in dB, comma separated.
    #[arg(long, value_delimiter = ',')]
    snr: Option<Vec<f64>>,
    /// Trials per SNR point.
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Corrector kind: oracle | identity | stochastic | remote.
    #[arg(long)]
    corrector: Option<CorrectorKind>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = automatic).
    #[arg(long)]
    workers: Option<usize>,
    /// Corpus text file.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Chat-completions endpoint URL for the remote corrector.
    #[arg(long)]
    endpoint: Option<String>,
    /// Response cache directory for the remote corrector.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Seed for the self-checks.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn run(args: RunArgs) -> Result<()> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(snr) = args.snr {
        config.snr_db = snr;
    }
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(kind) = args.corrector {
        config.corrector.kind = kind;
    }
    if let Some(out) = args.out {
        config.out_dir = out;
    }
    if let Some(workers) = args.workers {
        config.workers = workers;
    }
    if let Some(corpus) = args.corpus {
        config.corpus = Some(corpus);
    }
    if let Some(endpoint) = args.endpoint {
        config.corrector.remote.endpoint = endpoint;
    }
    if let Some(cache_dir) = args.cache_dir {
        config.corrector.remote.cache_dir = cache_dir;
    }
    config.validate()?;

    let out_dir = config.out_dir.clone();
    let summary = runner::run_experiment(config)?;
    print!("{}", report::summary_markdown(&summary));
    println!(
        "reports written to {} (summary.csv, estimation.csv, ber.csv, selection.csv, summary.md)",
        out_dir.display()
    );
    Ok(())
}

fn verify_checks(args: VerifyArgs) -> Result<bool> {
    let outcomes = verify::run_all_checks(args.seed);
    let mut all_pass = true;
    for outcome in &outcomes {
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{status}  {} — {}", outcome.name, outcome.detail);
        all_pass &= outcome.pass;
    }
    Ok(all_pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args).map(|_| true),
        Command::DemoTable1 => demo::render_walkthrough(Alphabet::standard()).map(|table| {
            print!("{table}");
            true
        }),
        Command::Verify(args) => verify_checks(args),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
