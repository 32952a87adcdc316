use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use reinsure_cli::{run, Command, RunOptions};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Simulate,
    Phi,
    Optimize,
    Compare,
    Check,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Simulate => Command::Simulate,
            Cmd::Phi => Command::Phi,
            Cmd::Optimize => Command::Optimize,
            Cmd::Compare => Command::Compare,
            Cmd::Check => Command::Check,
        }
    }
}

/// Simulate, value and optimise reinsurance strategies under a dynamic contagion claim model.
#[derive(Debug, Parser)]
#[command(name = "reinsure", version)]
struct Args {
    command: Cmd,
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; falls back to $CONTAGION_OUT, then `run.out` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Master seed, overriding `grid.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let opts = RunOptions {
        out: args.out,
        workers: args.workers,
        seed: args.seed,
    };
    let started = Instant::now();
    match run(args.command.into(), &args.config, &opts) {
        Ok(summary) => {
            print!("{summary}");
            eprintln!("done in {:.2?}", started.elapsed());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
