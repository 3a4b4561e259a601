use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dictgreedy::experiment::{compare_algorithms, presets, run_experiment, verify_outputs, ExperimentConfig};
use dictgreedy::Error;

/// Greedy minimization of convex functions over dictionaries.
#[derive(Parser)]
#[command(name = "dictgreedy", version, about)]
struct Cli {
    /// List built-in problems and exit.
    #[arg(long)]
    list_problems: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every algorithm of an experiment config.
    Run {
        config: PathBuf,
        /// Output directory; overrides `outputs.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Re-check written traces instead of running.
        #[arg(long)]
        verify: bool,
    },
    /// Run and tabulate two or more algorithms side by side.
    Compare {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const EXIT_VALIDATION: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Config { .. } | Error::Input(_) => ExitCode::from(EXIT_VALIDATION),
        _ => ExitCode::from(EXIT_RUNTIME),
    }
}

fn load(path: &Path, out: Option<PathBuf>) -> Result<(ExperimentConfig, PathBuf), Error> {
    let cfg = ExperimentConfig::load(path)?;
    let dir = out.unwrap_or_else(|| cfg.outputs.dir.clone());
    Ok((cfg, dir))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_problems {
        for p in presets() {
            println!("{:<20} {}", p.name, p.description);
        }
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: no command given (try `dictgreedy --help`)");
        return ExitCode::from(EXIT_VALIDATION);
    };
    match command {
        Command::Run { config, out, verify: true } => {
            let (cfg, dir) = match load(&config, out) {
                Ok(v) => v,
                Err(e) => return fail(&e),
            };
            let entries = match verify_outputs(&cfg, &dir) {
                Ok(v) => v,
                Err(e) => return fail(&e),
            };
            let mut ok = true;
            for e in &entries {
                let status = if e.passed() { "ok" } else { "FAILED" };
                println!("{:<24} {status}", e.label);
                if let Some(err) = &e.error {
                    println!("  {err}");
                }
                if e.csv_matches == Some(false) {
                    println!("  csv does not match the trace");
                }
                if let Some(inv) = &e.invariants {
                    for c in inv.checks.iter().filter(|c| !c.passed()) {
                        println!("  {}: {} of {} failed", c.name, c.failures, c.checked);
                    }
                }
                ok &= e.passed();
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            }
        }
        Command::Run { config, out, verify: false } => {
            let (cfg, dir) = match load(&config, out) {
                Ok(v) => v,
                Err(e) => return fail(&e),
            };
            match run_experiment(&cfg, &dir) {
                Ok(report) => {
                    print!("{}", dictgreedy::experiment::summary_table(&report));
                    println!("\noutputs written to {}", dir.display());
                    ExitCode::from(report.exit_code() as u8)
                }
                Err(e) => fail(&e),
            }
        }
        Command::Compare { config, out } => {
            let (cfg, dir) = match load(&config, out) {
                Ok(v) => v,
                Err(e) => return fail(&e),
            };
            match compare_algorithms(&cfg, &dir) {
                Ok((report, table)) => {
                    print!("{table}");
                    println!("\noutputs written to {}", dir.display());
                    ExitCode::from(report.exit_code() as u8)
                }
                Err(e) => fail(&e),
            }
        }
    }
}
