use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nfal_cli::{bundled, execute, load, output_root, Mode, Outcome};

/// Near-field ambiguity and aliasing analysis driven by scenario files.
#[derive(Debug, Parser)]
#[command(name = "nfal", version)]
struct Cli {
    /// Worker threads for data-parallel steps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every case and sweep of a scenario.
    Run {
        /// Scenario file, or the name of a bundled scenario.
        scenario: String,
        /// Output root (overrides NFAL_OUTPUT_ROOT).
        #[arg(long)]
        output_root: Option<PathBuf>,
    },
    /// Run only the sweep blocks of a scenario.
    Sweep {
        scenario: String,
        #[arg(long)]
        output_root: Option<PathBuf>,
    },
    /// List the bundled scenarios.
    ListScenarios,
}

fn report(outcome: &Outcome) {
    for c in &outcome.checks {
        println!("{} {} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.scope, c.name, c.detail);
    }
    println!("wrote {} artifacts to {}", outcome.artifacts.len(), outcome.dir.display());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (arg, root, mode) = match cli.command {
        Command::ListScenarios => {
            for (name, text) in bundled::BUNDLED {
                let desc = nfal_cli::parse(text, name).map(|s| s.description).unwrap_or_default();
                println!("{name}\t{desc}");
            }
            return ExitCode::SUCCESS;
        }
        Command::Run { scenario, output_root } => (scenario, output_root, Mode::Run),
        Command::Sweep { scenario, output_root } => (scenario, output_root, Mode::Sweep),
    };
    let go = || -> nfal_cli::Result<Outcome> {
        let scenario = load(&arg)?;
        execute(&scenario, &output_root(root), mode)
    };
    let result = match cli.threads {
        Some(n) => nfal_core::exec::with_workers(n, go),
        None => go(),
    };
    match result {
        Ok(outcome) => {
            report(&outcome);
            if outcome.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
