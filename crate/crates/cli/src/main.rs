use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use imbdes::eval::Metric;
use imbdes_bench::records::ResultsFile;
use imbdes_bench::{make_report, run_experiment, BenchError, RunConfig};

#[derive(Parser)]
#[command(name = "imbdes", version, about = "Dynamic selection benchmarks on imbalanced multi-class data")]
struct Cli {
    /// More log output (-v warnings, -vv progress details, -vvv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run (or resume) the experiment described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Rank tables and sign tests from result files.
    Report {
        /// A results.csv file or a directory searched for them.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "auc")]
        metric: String,
    },
    /// Check a config without running anything.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn exit_code(e: &BenchError) -> ExitCode {
    match e {
        BenchError::Validation(_) => ExitCode::from(1),
        _ => ExitCode::from(2),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let filter = match cli.verbose {
        0 => "error,imbdes_bench=info",
        1 => "warn,imbdes_bench=info",
        2 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(filter)).init();

    let outcome = match cli.command {
        Command::Validate { config } => RunConfig::from_file(&config).and_then(|c| c.validate()).map(|plan| {
            println!(
                "ok: {} datasets, {} variants, {} selectors, {} metrics (config hash {})",
                plan.config.datasets.len(),
                plan.variants.len(),
                plan.selectors.len(),
                plan.metrics.len(),
                plan.hash()
            );
            ExitCode::SUCCESS
        }),
        Command::Run { config } => RunConfig::from_file(&config)
            .and_then(|c| c.validate())
            .and_then(|plan| run_experiment(&plan).map(|s| (plan, s)))
            .map(|(plan, summary)| {
                println!(
                    "{} records written to {}, {} units run, {} skipped",
                    summary.records_written,
                    plan.config.output.display(),
                    summary.units_run,
                    summary.units_skipped
                );
                if summary.failures.is_empty() {
                    ExitCode::SUCCESS
                } else {
                    for (d, msg) in &summary.failures {
                        eprintln!("failed: {d}: {msg}");
                    }
                    ExitCode::from(2)
                }
            }),
        Command::Report { input, metric } => metric
            .parse::<Metric>()
            .map_err(|_| BenchError::Validation(format!("unknown metric `{metric}`")))
            .and_then(|m| {
                let records = ResultsFile::read_all(&input)?;
                make_report(&records, m)
            })
            .map(|report| {
                print!("{}", report.render());
                ExitCode::SUCCESS
            }),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        exit_code(&e)
    })
}
