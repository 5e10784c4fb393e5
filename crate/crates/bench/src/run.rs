//! Runs one experiment and writes its trace.

use std::io::Write;

use catalyst_core::catalyst::{run_catalyst, CatalystConfig, CatalystRun, Mode};
use catalyst_core::solvers::{InnerSolver, Method, SeedStream, SolverKind};
use catalyst_core::stationarity::outer_stationarity;
use catalyst_core::Counters;

use crate::config::{Budget, ExperimentConfig, Wrapper};
use crate::problem::{build, Instance};
use crate::BenchError;

pub const CSV_HEADER: &str = "iter,grad_evals,fval,stationarity,kappa,winner,elapsed_s";

/// Outer iterations allowed when the configuration does not cap them; the
/// gradient budget is what ends such runs.
const UNCAPPED_OUTER: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub iter: usize,
    pub grad_evals: u64,
    pub fval: f64,
    pub stationarity: f64,
    pub kappa: f64,
    pub winner: &'static str,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub label: String,
    pub rows: Vec<Row>,
    /// Set when the run stopped on an error; `rows` then holds the partial trace.
    pub aborted: Option<String>,
    /// Final iterate.
    pub x: Vec<f64>,
}

impl RunOutput {
    pub fn last(&self) -> &Row {
        self.rows.last().expect("every run has a k = 0 row")
    }

    /// One-line summary for stdout.
    pub fn summary(&self) -> String {
        let last = self.last();
        let best = self.rows.iter().map(|r| r.stationarity).fold(f64::INFINITY, f64::min);
        let status = match &self.aborted {
            None => "ok".to_string(),
            Some(m) => format!("aborted ({m})"),
        };
        format!(
            "{}: iters={} grad_evals={} fval={:e} stationarity={:e} best_stationarity={:e} kappa={:e} status={}",
            self.label, last.iter, last.grad_evals, last.fval, last.stationarity, best, last.kappa, status
        )
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{:e},{:e},{:e},{},{:.6}",
                r.iter, r.grad_evals, r.fval, r.stationarity, r.kappa, r.winner, r.elapsed_s
            )?;
        }
        if let Some(m) = &self.aborted {
            writeln!(w, "# aborted: {}", m.replace('\n', " "))?;
        }
        Ok(())
    }
}

fn stationarity_at(inst: &Instance, x: &[f64]) -> Result<f64, BenchError> {
    let mut scratch = Counters::default();
    outer_stationarity(&inst.objective, x, &mut scratch)
        .map(|r| r.mapping_norm)
        .map_err(|e| BenchError::Runtime(e.to_string()))
}

fn budget_evals(cfg: &ExperimentConfig, n: usize) -> u64 {
    match cfg.budget {
        Budget::Evals(b) => b,
        Budget::Passes(p) => (p * n as f64).round() as u64,
    }
}

/// Practical Catalyst settings with the configuration's overrides applied.
pub fn catalyst_config(cfg: &ExperimentConfig, inst: &Instance) -> CatalystConfig {
    let o = &cfg.catalyst;
    let mut cc = CatalystConfig::practical(inst.lipschitz(), inst.n());
    if let Some(k) = o.kappa0 {
        cc.kappa0 = k;
    }
    if let Some(k) = o.kappa_cvx {
        cc.kappa_cvx = k;
    }
    if let Some(t) = o.t {
        cc.t_budget = t;
    }
    if let Some(s) = o.s {
        cc.s_budget = s;
    }
    cc.use_logk_factor = o.use_logk;
    cc.max_outer = o.max_outer.unwrap_or(UNCAPPED_OUTER);
    cc.lazy_prox = o.lazy_prox;
    cc.inner_tol = o.inner_tol;
    cc.eps = cfg.eps;
    cc.seed = cfg.seed;
    cc.mode = if cfg.wrapper == Wrapper::CatalystBasic { Mode::Basic } else { Mode::Auto };
    cc.max_grad_evals = Some(budget_evals(cfg, inst.n()));
    cc
}

/// Fixed stepsize used by the plain (unwrapped) methods.
pub fn baseline_step(wrapper: Wrapper, method: Method, lipschitz: f64, n: usize) -> f64 {
    match (method, wrapper) {
        (Method::Gd, _) => 1.0 / lipschitz,
        (_, Wrapper::Nonconvex) => 1.0 / (lipschitz * (n as f64).powf(2.0 / 3.0)),
        _ => 0.5 / lipschitz,
    }
}

/// Builds the problem and runs the configured method. Configuration
/// problems are errors; numerical failures during the run are reported in
/// [`RunOutput::aborted`] with the partial trace.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput, BenchError> {
    let inst = build(cfg)?;
    run_instance(cfg, &inst)
}

pub fn run_instance(cfg: &ExperimentConfig, inst: &Instance) -> Result<RunOutput, BenchError> {
    let label = cfg.label.clone().unwrap_or_else(|| format!("{}-{:?}", cfg.method.name(), cfg.wrapper).to_lowercase());
    let f0 = inst.objective.value_uncounted(&inst.x0);
    if !f0.is_finite() {
        return Err(BenchError::Runtime("objective is not finite at the starting point".into()));
    }
    let kappa0 = if cfg.wrapper.is_catalyst() { catalyst_config(cfg, inst).kappa0 } else { 0.0 };
    let row0 = Row {
        iter: 0,
        grad_evals: 0,
        fval: f0,
        stationarity: stationarity_at(inst, &inst.x0)?,
        kappa: kappa0,
        winner: "na",
        elapsed_s: 0.0,
    };
    let mut out = RunOutput { label, rows: vec![row0], aborted: None, x: inst.x0.clone() };
    if cfg.wrapper.is_catalyst() {
        run_wrapped(cfg, inst, &mut out)?;
    } else {
        run_plain(cfg, inst, &mut out)?;
    }
    Ok(out)
}

fn run_wrapped(cfg: &ExperimentConfig, inst: &Instance, out: &mut RunOutput) -> Result<(), BenchError> {
    let cc = catalyst_config(cfg, inst);
    cc.validate().map_err(|e| BenchError::Config(e.to_string()))?;
    let kind = SolverKind::new(cfg.method);
    let (run, aborted): (CatalystRun, _) = match run_catalyst(&inst.objective, &inst.x0, &cc, &kind) {
        Ok(r) => (r, None),
        Err(a) => (a.partial, Some(a.error.to_string())),
    };
    out.rows.extend(run.trace.iter().map(|t| Row {
        iter: t.k,
        grad_evals: t.grad_evals,
        fval: t.fval,
        stationarity: t.stationarity,
        kappa: t.kappa,
        winner: t.winner.as_str(),
        elapsed_s: t.elapsed_s,
    }));
    out.x = run.x;
    out.aborted = aborted;
    Ok(())
}

/// Plain method with a fixed stepsize; one row per pass over the data
/// (per iteration for GD).
fn run_plain(cfg: &ExperimentConfig, inst: &Instance, out: &mut RunOutput) -> Result<(), BenchError> {
    let n = inst.n();
    let budget = budget_evals(cfg, n);
    let step = baseline_step(cfg.wrapper, cfg.method, inst.lipschitz(), n);
    let kind = SolverKind::new(cfg.method).with_step(step);
    let mut solver = InnerSolver::new(&kind, &inst.objective, &inst.x0, SeedStream::new(cfg.seed, 0))
        .map_err(|e| BenchError::Config(e.to_string()))?;
    let per_row = if cfg.method == Method::Gd { 1 } else { n };
    let clock = std::time::Instant::now();
    let mut iter = 0;
    while solver.evals().grad_evals < budget && out.last().stationarity >= cfg.eps {
        let ok = solver.advance(per_row);
        iter += 1;
        let failure = match ok {
            Err(e) => Some(e.to_string()),
            Ok(_) if solver.diverged() => Some("iterates became non-finite".to_string()),
            Ok(_) => None,
        };
        if let Some(m) = failure {
            out.aborted = Some(m);
            break;
        }
        let x = solver.point();
        let fval = inst.objective.value_uncounted(x);
        let stationarity = match stationarity_at(inst, x) {
            Ok(s) => s,
            Err(e) => {
                out.aborted = Some(e.to_string());
                break;
            }
        };
        out.rows.push(Row {
            iter,
            grad_evals: solver.evals().grad_evals,
            fval,
            stationarity,
            kappa: 0.0,
            winner: "na",
            elapsed_s: clock.elapsed().as_secs_f64(),
        });
        out.x = x.to_vec();
        if !fval.is_finite() {
            out.aborted = Some("objective became non-finite".into());
            break;
        }
    }
    Ok(())
}
