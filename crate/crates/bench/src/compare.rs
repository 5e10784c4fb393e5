//! Runs several experiments on the same problem and merges their traces on
//! a common gradient-evaluation axis.

use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::config::ExperimentConfig;
use crate::run::{run_experiment, RunOutput};
use crate::BenchError;

/// Environment variable capping the number of worker threads.
pub const THREADS_VAR: &str = "BENCH_THREADS";

pub fn thread_count(jobs: usize) -> usize {
    let avail = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let cap = std::env::var(THREADS_VAR)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or(avail);
    cap.min(jobs).max(1)
}

/// Labels must be unique and the problem definitions identical.
pub fn check_compatible(cfgs: &[ExperimentConfig]) -> Result<Vec<String>, BenchError> {
    if cfgs.len() < 2 {
        return Err(BenchError::Config("compare needs at least two configurations".into()));
    }
    let labels: Vec<String> = cfgs
        .iter()
        .enumerate()
        .map(|(i, c)| c.label.clone().unwrap_or_else(|| format!("run{i}")))
        .collect();
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(BenchError::Config(format!("duplicate label `{l}`")));
        }
        if l.is_empty() || l.contains([',', '\n', '"']) {
            return Err(BenchError::Config(format!("label `{l}` cannot be used as a CSV column")));
        }
    }
    let key = |c: &ExperimentConfig| (format!("{:?}", c.problem), c.lipschitz_override.map(f64::to_bits));
    let first = key(&cfgs[0]);
    for (c, l) in cfgs.iter().zip(&labels).skip(1) {
        if key(c) != first {
            return Err(BenchError::Config(format!(
                "`{l}` defines a different problem than `{}`",
                labels[0]
            )));
        }
    }
    Ok(labels)
}

/// Runs every configuration, at most `threads` at a time. Results keep the
/// input order.
pub fn run_all(cfgs: &[ExperimentConfig], threads: usize) -> Result<Vec<RunOutput>, BenchError> {
    let labels = check_compatible(cfgs)?;
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<RunOutput, BenchError>>>> = Mutex::new((0..cfgs.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..threads.max(1).min(cfgs.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= cfgs.len() {
                    break;
                }
                let mut cfg = cfgs[i].clone();
                cfg.label = Some(labels[i].clone());
                let res = run_experiment(&cfg);
                slots.lock().expect("no worker panics while holding the lock")[i] = Some(res);
            });
        }
    });
    slots
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|r| r.expect("every slot filled"))
        .collect()
}

/// Value of a step function (the trace) at `g`: the last row with
/// `grad_evals ≤ g`. `None` past the end of the run.
fn step_at(run: &RunOutput, g: u64) -> Option<(f64, f64)> {
    if g > run.last().grad_evals {
        return None;
    }
    let idx = run.rows.partition_point(|r| r.grad_evals <= g);
    idx.checked_sub(1).map(|i| (run.rows[i].fval, run.rows[i].stationarity))
}

/// Wide CSV: `grad_evals` followed by `fval_<label>,stationarity_<label>` per
/// run, on the union of all runs' evaluation counts. Cells past the end of
/// a run are empty.
pub fn write_merged<W: Write>(runs: &[RunOutput], mut w: W) -> std::io::Result<()> {
    let mut grid: Vec<u64> = runs.iter().flat_map(|r| r.rows.iter().map(|row| row.grad_evals)).collect();
    grid.sort_unstable();
    grid.dedup();
    write!(w, "grad_evals")?;
    for r in runs {
        write!(w, ",fval_{0},stationarity_{0}", r.label)?;
    }
    writeln!(w)?;
    for g in grid {
        write!(w, "{g}")?;
        for r in runs {
            match step_at(r, g) {
                Some((f, s)) => write!(w, ",{f:e},{s:e}")?,
                None => write!(w, ",,")?,
            }
        }
        writeln!(w)?;
    }
    for r in runs {
        if let Some(m) = &r.aborted {
            writeln!(w, "# aborted {}: {}", r.label, m.replace('\n', " "))?;
        }
    }
    Ok(())
}
