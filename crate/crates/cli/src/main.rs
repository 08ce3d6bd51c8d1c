use std::path::PathBuf;
use std::process::ExitCode;

use angio_cli::{cmd_analyze, cmd_plot, cmd_simulate, cmd_sweep};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "angio", version, about = "Delayed tumor-angiogenesis models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write `t,x,K,p,c` rows.
    Simulate {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the stability report of a scenario as JSON.
    Analyze {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Analyze and simulate every point of a parameter grid.
    Sweep {
        grid: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; defaults to one per core.
        #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: Option<u16>,
    },
    /// Draw x and K against t as SVG.
    Plot {
        trajectory: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Simulate { scenario, out } => cmd_simulate(scenario, out.as_deref()),
        Command::Analyze { scenario, out } => cmd_analyze(scenario, out.as_deref()),
        Command::Sweep { grid, out, jobs } => {
            cmd_sweep(grid, out.as_deref(), jobs.map(usize::from))
        }
        Command::Plot { trajectory, out } => cmd_plot(trajectory, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("angio: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
