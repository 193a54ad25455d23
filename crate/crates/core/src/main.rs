use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qosbench::dataset::{generate_synthetic, write_csv};
use qosbench::runner::{emit_charts, emit_report, load_report, parse_config, run_experiment};

#[derive(Parser)]
#[command(name = "qosbench", about = "QoS prediction benchmark runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured experiment and write report + charts
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config's `output`)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores)
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Write a synthetic dataset as comma-separated text
    Synth {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-render charts (and summary) from a detail file
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> qosbench::Result<()> {
    match cli.command {
        Command::Run { config, out, jobs } => {
            if let Some(jobs) = jobs {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(jobs)
                    .build_global()
                    .map_err(|e| qosbench::Error::Config(e.to_string()))?;
            }
            let config = parse_config(&config)?;
            let out = out
                .or_else(|| config.output.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("qosbench-out"));
            let report = run_experiment(&config)?;
            for path in emit_report(&report, &out)? {
                println!("wrote {}", path.display());
            }
            for path in emit_charts(&report, &out)? {
                println!("wrote {}", path.display());
            }
            for pair in &report.pairs {
                match pair.summary_metrics(report.aggregation) {
                    Some(m) => println!(
                        "{} / {}: mae={:.3} rmse={:.3} r2={:.3} ({:.1}s)",
                        pair.model.name(),
                        pair.target,
                        m.mae,
                        m.rmse,
                        m.r2,
                        pair.wall_secs
                    ),
                    None => println!(
                        "{} / {}: FAILED: {}",
                        pair.model.name(),
                        pair.target,
                        pair.error.as_deref().unwrap_or("unknown")
                    ),
                }
            }
            Ok(())
        }
        Command::Synth { rows, seed, out } => {
            let dataset = generate_synthetic(rows, seed)?;
            write_csv(&dataset, &out)?;
            println!("wrote {} ({} rows)", out.display(), dataset.row_count());
            Ok(())
        }
        Command::Report { input, out } => {
            let report = load_report(&input)?;
            for path in emit_report(&report, &out)? {
                println!("wrote {}", path.display());
            }
            for path in emit_charts(&report, &out)? {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}
