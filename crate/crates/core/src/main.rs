use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use spectral_boltzmann::cli::{compare_files, exit_code, run, EXIT_ABORT, EXIT_ACCEPTANCE, EXIT_OK};
use spectral_boltzmann::config::{parse_override, ScenarioConfig};
use spectral_boltzmann::docsbench::{bench_run, Tier};
use spectral_boltzmann::Error;

#[derive(Parser)]
#[command(name = "boltzmann", version, about = "Space-homogeneous Boltzmann solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config and write CSV artifacts.
    Solve {
        config: PathBuf,
        /// Override a config key, e.g. `--set grid.N=24`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Output directory (overrides `output.dir`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two CSV series column by column.
    Compare {
        computed: PathBuf,
        reference: PathBuf,
        #[arg(long)]
        tol: f64,
    },
    /// Benchmark catalogue.
    Bench {
        #[command(subcommand)]
        action: BenchAction,
    },
}

#[derive(Subcommand)]
enum BenchAction {
    Run {
        #[arg(long, default_value = "smoke")]
        tier: String,
        #[arg(long)]
        only: Option<String>,
        /// Write each entry's artifacts under this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn fail(err: Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_code(&err) as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve { config, set, out } => {
            let mut overrides = match set.iter().map(|s| parse_override(s)).collect::<Result<Vec<_>, _>>() {
                Ok(o) => o,
                Err(e) => return fail(e),
            };
            if let Some(dir) = out {
                overrides.push(("output.dir".into(), dir.display().to_string()));
            }
            let cfg = match ScenarioConfig::from_file(&config, &overrides) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            match run(&cfg) {
                Ok(output) => {
                    if let Some(e) = &output.aborted {
                        eprintln!("error: {e}");
                        eprintln!("partial outputs written to {}", cfg.out_dir.display());
                        return ExitCode::from(EXIT_ABORT as u8);
                    }
                    println!(
                        "{}: {} steps of dt = {} to t = {}; outputs in {}",
                        cfg.scenario,
                        output.steps,
                        output.dt,
                        output.final_time,
                        cfg.out_dir.display()
                    );
                    ExitCode::from(EXIT_OK as u8)
                }
                Err(e) => fail(e),
            }
        }
        Command::Compare { computed, reference, tol } => match compare_files(&computed, &reference, tol) {
            Ok(rep) => {
                print!("{}", rep.summary());
                ExitCode::from(if rep.passed() { EXIT_OK } else { EXIT_ACCEPTANCE } as u8)
            }
            Err(e) => fail(e),
        },
        Command::Bench {
            action: BenchAction::Run { tier, only, out },
        } => {
            let tier: Tier = match tier.parse() {
                Ok(t) => t,
                Err(e) => return fail(e),
            };
            match bench_run(tier, only.as_deref(), out.as_deref()) {
                Ok(outcomes) => {
                    for o in &outcomes {
                        println!("{o}");
                    }
                    let all = outcomes.iter().all(|o| o.passed);
                    ExitCode::from(if all { EXIT_OK } else { EXIT_ACCEPTANCE } as u8)
                }
                Err(e) => fail(e),
            }
        }
    }
}
