use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use catalyst_bench::{run_all, run_experiment, thread_count, write_merged, BenchError, ExperimentConfig, RunOutput};

#[derive(Parser)]
#[command(name = "bench", about = "Run optimization experiments and write CSV traces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one experiment.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the configuration's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// CSV destination; defaults to the configuration's `out`, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run several experiments on one problem and merge their traces.
    Compare {
        /// Comma-separated configuration files.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        configs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn write_to(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), BenchError> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)?;
        }
    }
    Ok(())
}

fn aborted(runs: &[RunOutput]) -> Result<(), BenchError> {
    match runs.iter().find_map(|r| r.aborted.as_ref().map(|m| (r, m))) {
        None => Ok(()),
        Some((r, m)) => Err(BenchError::Runtime(format!("{} aborted: {m}", r.label))),
    }
}

fn execute(cmd: Cmd) -> Result<(), BenchError> {
    match cmd {
        Cmd::Run { config, seed, out } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let run = run_experiment(&cfg)?;
            let dest = out.or(cfg.out.clone());
            write_to(dest.as_deref(), |w| run.write_csv(w))?;
            // Keep stdout clean for the CSV when no file was given.
            if dest.is_some() {
                println!("{}", run.summary());
            } else {
                eprintln!("{}", run.summary());
            }
            aborted(std::slice::from_ref(&run))
        }
        Cmd::Compare { configs, out } => {
            let cfgs = configs
                .iter()
                .map(|p| ExperimentConfig::from_file(p))
                .collect::<Result<Vec<_>, _>>()?;
            let runs = run_all(&cfgs, thread_count(cfgs.len()))?;
            write_to(Some(&out), |w| write_merged(&runs, w))?;
            for r in &runs {
                println!("{}", r.summary());
            }
            aborted(&runs)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bench: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
