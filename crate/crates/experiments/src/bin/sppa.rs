use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sppa_experiments::check::run_suite;
use sppa_experiments::{compare_methods, run_experiment, ExperimentConfig, Overrides, RunOptions};

/// Reproducible stochastic proximal point experiments.
#[derive(Debug, Parser)]
#[command(name = "sppa", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run SPPA for every seed; write per-seed traces and a summary.
    Run(RunArgs),
    /// Run SPPA and the stochastic subgradient method on the same draws.
    Compare(RunArgs),
    /// Run the invariant and property suite; exit 2 if any property fails.
    Check {
        /// Seed for the randomized properties.
        #[arg(long, default_value_t = 20_240_101)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    config: PathBuf,
    /// Replace the configured seed list with this single seed.
    #[arg(long)]
    seed_override: Option<u64>,
    #[arg(long)]
    iterations_override: Option<u64>,
    /// Output directory (overrides experiment.output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add a wall_time_s column to the summary (makes output non-reproducible).
    #[arg(long)]
    timing: bool,
}

impl RunArgs {
    fn load(&self) -> sppa_experiments::Result<ExperimentConfig> {
        ExperimentConfig::load(&self.config)?.with_overrides(&Overrides {
            seed: self.seed_override,
            iterations: self.iterations_override,
            out: self.out.clone(),
        })
    }

    fn options(&self) -> RunOptions {
        RunOptions {
            exec: None,
            timing: self.timing,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let outcome = match cli.command {
        Command::Run(args) => args.load().and_then(|c| {
            let report = run_experiment(&c, args.options())?;
            for row in &report.rows {
                eprintln!(
                    "seed {:>6}  final distance {}  final gap {}  ({:.2?})",
                    row.seed,
                    row.final_distance
                        .map_or("NA".into(), |d| format!("{d:.3e}")),
                    row.final_gap.map_or("NA".into(), |d| format!("{d:.3e}")),
                    row.wall_time
                );
            }
            if let Some(m) = report.median_final_distance() {
                eprintln!("median final distance {m:.3e}");
            }
            println!("{}", report.summary_path.display());
            Ok(())
        }),
        Command::Compare(args) => args.load().and_then(|c| {
            let report = compare_methods(&c, args.options())?;
            for row in &report.rows {
                eprintln!(
                    "seed {:>6}  sppa {}{}  subgradient {}{}",
                    row.seed,
                    row.sppa_final_distance
                        .map_or("NA".into(), |d| format!("{d:.3e}")),
                    if row.sppa_diverged { " (diverged)" } else { "" },
                    row.subgradient_final_distance
                        .map_or("NA".into(), |d| format!("{d:.3e}")),
                    if row.subgradient_diverged {
                        " (diverged)"
                    } else {
                        ""
                    },
                );
            }
            println!("{}", report.summary_path.display());
            Ok(())
        }),
        Command::Check { seed } => {
            let results = run_suite(seed);
            let mut failed = 0;
            for r in &results {
                println!("{r}");
                failed += usize::from(!r.passed);
            }
            println!("{} properties, {} failed", results.len(), failed);
            return ExitCode::from(if failed == 0 { 0 } else { 2 });
        }
    };

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
