//! The outer accelerated proximal-point loop.
//!
//! Each outer iteration runs two inner solves: a proximal step from the
//! previous iterate (which certifies descent) and an extrapolated step from
//! a Nesterov-style point. The better of the two becomes the next iterate.

mod budget;
mod criteria;
mod sequence;

pub use budget::{budget_s, budget_t};
pub use criteria::{auto_adapt, check_criteria, AutoAdapt, AutoAdaptOutcome, CriteriaCheck, DOUBLING_CAP};
pub use sequence::{alpha_next, extrapolate, update_anchor};

use crate::linalg::{all_finite, dist};
use crate::objective::{Composite, CompositeObjective, Counters, ProxSubproblem};
use crate::solvers::{run_inner, warm_start, SeedStream, SolverKind};
use crate::stationarity::outer_stationarity;
use crate::{Error, Result};

/// How the proximal step picks κ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// κ stays at `kappa0`; the proximal step is retried in chunks of `T`
    /// iterations until both stopping tests pass.
    Basic,
    /// κ starts from the previous value and doubles until the tests pass.
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalystConfig {
    pub kappa0: f64,
    pub kappa_cvx: f64,
    /// Inner iterations per proximal attempt.
    pub t_budget: usize,
    /// Inner iterations for the extrapolated step.
    pub s_budget: usize,
    /// Multiply `S` by `⌈log(k + 1)⌉` and tighten the extrapolated-step test
    /// to `1/(k + 1)`.
    pub use_logk_factor: bool,
    /// Stop once the outer gradient-mapping norm at `x̄_k` falls below this.
    pub eps: f64,
    pub max_outer: usize,
    pub mode: Mode,
    pub seed: u64,
    /// Solve both subproblems until the witness norm is at most this value.
    pub inner_tol: Option<f64>,
    /// Warm-start the next proximal step from `x̃_k` instead of the usual start.
    pub lazy_prox: bool,
    /// Stop after the first outer iteration that reaches this many gradient
    /// evaluations.
    pub max_grad_evals: Option<u64>,
    pub doubling_cap: u32,
    /// Keep `x̄_k`, `x̃_k` and `x_k` in every trace record.
    pub record_points: bool,
}

impl CatalystConfig {
    pub fn new(kappa0: f64, kappa_cvx: f64, t_budget: usize, s_budget: usize) -> Self {
        Self {
            kappa0,
            kappa_cvx,
            t_budget,
            s_budget,
            use_logk_factor: false,
            eps: 1e-6,
            max_outer: 100,
            mode: Mode::Auto,
            seed: 0,
            inner_tol: None,
            lazy_prox: false,
            max_grad_evals: None,
            doubling_cap: DOUBLING_CAP,
            record_points: false,
        }
    }

    /// `κ₀ = κ_cvx = 2L/n`, `T = S = n`.
    pub fn practical(lipschitz: f64, n: usize) -> Self {
        let n = n.max(1);
        let kappa = 2.0 * lipschitz / n as f64;
        Self::new(kappa, kappa, n, n)
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !pos(self.kappa0) || !pos(self.kappa_cvx) {
            return Err(Error::InvalidParameter("κ₀ and κ_cvx must be positive and finite".into()));
        }
        if self.t_budget == 0 || self.s_budget == 0 {
            return Err(Error::InvalidParameter("T and S must be ≥ 1".into()));
        }
        if !(self.eps >= 0.0) {
            return Err(Error::InvalidParameter("ε must be ≥ 0".into()));
        }
        if let Some(tol) = self.inner_tol {
            if !pos(tol) {
                return Err(Error::InvalidParameter("inner tolerance must be positive".into()));
            }
        }
        Ok(())
    }

    fn s_at(&self, k: usize) -> usize {
        if self.use_logk_factor {
            let f = ((k + 1) as f64).ln().ceil().max(1.0) as usize;
            self.s_budget * f
        } else {
            self.s_budget
        }
    }
}

/// Which candidate became `x_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winner {
    Prox,
    Accel,
    /// Both candidates were worse than `x_{k−1}` (by rounding only, since the
    /// proximal step passed the descent test), so the iterate was kept.
    Kept,
}

impl Winner {
    pub fn as_str(self) -> &'static str {
        match self {
            Winner::Prox => "prox",
            Winner::Accel => "accel",
            Winner::Kept => "na",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    /// Outer iteration, starting at 1.
    pub k: usize,
    /// `f(x_k)`.
    pub fval: f64,
    /// Gradient-mapping norm of `f` at `x̄_k`.
    pub stationarity: f64,
    /// `‖x̄_k − x_{k−1}‖`.
    pub step_norm: f64,
    /// κ used by the proximal step.
    pub kappa: f64,
    pub winner: Winner,
    pub prox_value: f64,
    pub accel_value: f64,
    /// Doublings performed in this iteration.
    pub doublings: u32,
    /// Outcome of the extrapolated-step test, when it was run.
    pub accel_ok: Option<bool>,
    /// Cumulative gradient evaluations.
    pub grad_evals: u64,
    pub elapsed_s: f64,
    /// `(x̄_k, x̃_k, x_k)` when requested by the configuration.
    pub points: Option<TracePoints>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TracePoints {
    pub prox: Vec<f64>,
    pub accel: Vec<f64>,
    pub iterate: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Stationary,
    MaxOuter,
    Budget,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalystRun {
    pub x: Vec<f64>,
    pub trace: Vec<TraceRecord>,
    pub evals: Counters,
    pub stop: StopReason,
}

/// A run that hit an error. `partial` holds the iterate and trace up to the
/// last completed outer iteration.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{error}")]
pub struct CatalystAbort {
    pub error: Error,
    pub partial: CatalystRun,
}

/// Retry ceiling for chunked solves, in multiples of the chunk.
const RETRY_CHUNKS: usize = 10;
/// Ceiling on chunks when solving to a fixed tolerance.
const TOL_CHUNKS: usize = 1000;

struct Clock {
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Clock {
    fn start() -> Self {
        Self {
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    fn elapsed(&self) -> f64 {
        #[cfg(not(target_arch = "wasm32"))]
        {
            self.start.elapsed().as_secs_f64()
        }
        #[cfg(target_arch = "wasm32")]
        {
            0.0
        }
    }
}

fn stream(k: usize, phase: u64, idx: usize) -> u64 {
    ((k as u64) << 16) | (phase << 12) | (idx as u64 & 0xfff)
}

/// Runs chunks of `chunk` iterations from `z` until `accept` holds on the
/// check at the latest iterate, or `max_chunks` chunks have run. Returns the
/// last check and whether it was accepted.
#[allow(clippy::too_many_arguments)]
fn solve_in_chunks(
    kind: &SolverKind,
    sub: &ProxSubproblem<'_>,
    mut z: Vec<f64>,
    chunk: usize,
    max_chunks: usize,
    seed: u64,
    k: usize,
    phase: u64,
    factor: f64,
    center_value: f64,
    accept: impl Fn(&CriteriaCheck) -> bool,
    ctr: &mut Counters,
) -> Result<(CriteriaCheck, bool)> {
    let mut check = None;
    for c in 0..max_chunks {
        let run = run_inner(kind, sub, &z, chunk, SeedStream::new(seed, stream(k, phase, c)))?;
        *ctr += run.evals;
        z = run.point;
        if run.diverged {
            break;
        }
        let ch = criteria::check_against(sub, &z, factor, center_value, ctr)?;
        if accept(&ch) {
            return Ok((ch, true));
        }
        check = Some(ch);
    }
    let ch = match check {
        Some(c) => c,
        None => criteria::check_against(sub, &z, factor, center_value, ctr)?,
    };
    Ok((ch, false))
}

/// Continues an inner solve from `z` until the witness norm is at most `tol`.
fn refine(
    kind: &SolverKind,
    sub: &ProxSubproblem<'_>,
    z: Vec<f64>,
    chunk: usize,
    tol: f64,
    seed: u64,
    k: usize,
    phase: u64,
    ctr: &mut Counters,
) -> Result<CriteriaCheck> {
    let center_value = sub.value(sub.center(), ctr);
    let first = criteria::check_against(sub, &z, 1.0, center_value, ctr)?;
    if first.residual <= tol {
        return Ok(first);
    }
    let (check, _) = solve_in_chunks(
        kind, sub, z, chunk, TOL_CHUNKS, seed, k, phase, 1.0, center_value,
        |c| c.residual <= tol,
        ctr,
    )?;
    Ok(check)
}

struct ProxOutcome {
    point: Vec<f64>,
    kappa: f64,
    doublings: u32,
}

/// Accelerated inexact proximal-point method on `obj` from `x0`.
pub fn run_catalyst(
    obj: &CompositeObjective,
    x0: &[f64],
    cfg: &CatalystConfig,
    kind: &SolverKind,
) -> std::result::Result<CatalystRun, CatalystAbort> {
    let mut run = CatalystRun {
        x: x0.to_vec(),
        trace: Vec::new(),
        evals: Counters::default(),
        stop: StopReason::MaxOuter,
    };
    let fail = |error: Error, partial: &CatalystRun| CatalystAbort {
        error,
        partial: partial.clone(),
    };
    if let Err(e) = cfg.validate().and_then(|_| kind.validate()).and_then(|_| obj.check_dim(x0)) {
        return Err(fail(e, &run));
    }
    if !all_finite(x0) {
        return Err(fail(Error::NonFinite("starting point"), &run));
    }

    let clock = Clock::start();
    let mut alpha = 1.0;
    let mut anchor = x0.to_vec();
    let mut kappa = cfg.kappa0;
    let mut lazy_start: Option<Vec<f64>> = None;
    let mut f_prev = obj.value(x0, &mut run.evals);
    if !f_prev.is_finite() {
        return Err(fail(Error::NonFinite("objective at the starting point"), &run));
    }

    for k in 1..=cfg.max_outer {
        if cfg.max_grad_evals.is_some_and(|b| run.evals.grad_evals >= b) {
            run.stop = StopReason::Budget;
            return Ok(run);
        }
        let mut ctr = run.evals;
        let x_prev = run.x.clone();
        let step = iterate(obj, cfg, kind, k, &x_prev, kappa, alpha, &anchor, lazy_start.take(), &mut ctr);
        let out = match step {
            Ok(o) => o,
            Err(e) => {
                run.evals = ctr;
                return Err(fail(e, &run));
            }
        };
        run.evals = ctr;
        kappa = out.prox.kappa;
        anchor = update_anchor(alpha, &x_prev, &out.accel);
        alpha = match alpha_next(alpha) {
            Ok(a) => a,
            Err(e) => return Err(fail(e, &run)),
        };

        let mut winner = if out.accel_value <= out.prox_value { Winner::Accel } else { Winner::Prox };
        if out.accel_value.min(out.prox_value) > f_prev {
            winner = Winner::Kept;
        }
        let (x_new, fval) = match winner {
            Winner::Accel => (out.accel.clone(), out.accel_value),
            Winner::Prox => (out.prox.point.clone(), out.prox_value),
            Winner::Kept => (x_prev.clone(), f_prev),
        };
        f_prev = fval;
        let mut scratch = Counters::default();
        let stationarity = match outer_stationarity(obj, &out.prox.point, &mut scratch) {
            Ok(r) => r.mapping_norm,
            Err(e) => return Err(fail(e, &run)),
        };
        if cfg.lazy_prox {
            lazy_start = Some(out.accel.clone());
        }
        run.trace.push(TraceRecord {
            k,
            fval,
            stationarity,
            step_norm: dist(&out.prox.point, &x_prev),
            kappa: out.prox.kappa,
            winner,
            prox_value: out.prox_value,
            accel_value: out.accel_value,
            doublings: out.prox.doublings,
            accel_ok: out.accel_ok,
            grad_evals: run.evals.grad_evals,
            elapsed_s: clock.elapsed(),
            points: cfg.record_points.then(|| TracePoints {
                prox: out.prox.point.clone(),
                accel: out.accel.clone(),
                iterate: x_new.clone(),
            }),
        });
        run.x = x_new;
        if stationarity < cfg.eps {
            run.stop = StopReason::Stationary;
            return Ok(run);
        }
    }
    if cfg.max_grad_evals.is_some_and(|b| run.evals.grad_evals >= b) {
        run.stop = StopReason::Budget;
    }
    Ok(run)
}

struct IterationOutcome {
    prox: ProxOutcome,
    prox_value: f64,
    accel: Vec<f64>,
    accel_value: f64,
    accel_ok: Option<bool>,
}

#[allow(clippy::too_many_arguments)]
fn iterate(
    obj: &CompositeObjective,
    cfg: &CatalystConfig,
    kind: &SolverKind,
    k: usize,
    x_prev: &[f64],
    kappa: f64,
    alpha: f64,
    anchor: &[f64],
    lazy_start: Option<Vec<f64>>,
    ctr: &mut Counters,
) -> Result<IterationOutcome> {
    let prox = prox_step(obj, cfg, kind, k, x_prev, kappa, lazy_start, ctr)?;
    let prox_value = obj.value(&prox.point, ctr);
    if !prox_value.is_finite() {
        return Err(Error::NonFinite("objective at the proximal point"));
    }

    let y = extrapolate(alpha, anchor, x_prev);
    let sub = ProxSubproblem::new(obj, &y, cfg.kappa_cvx)?;
    let z0 = warm_start(&sub, ctr)?;
    let s = cfg.s_at(k);
    let run = run_inner(kind, &sub, &z0, s, SeedStream::new(cfg.seed, stream(k, 2, 0)))?;
    *ctr += run.evals;

    let (accel, accel_ok) = if let Some(tol) = cfg.inner_tol {
        let c = refine(kind, &sub, run.point, s, tol, cfg.seed, k, 3, ctr)?;
        (c.point, None)
    } else if cfg.mode == Mode::Basic {
        let factor = 1.0 / (k as f64 + 1.0);
        let center_value = sub.value(&y, ctr);
        let first = criteria::check_against(&sub, &run.point, factor, center_value, ctr)?;
        if first.stationarity_ok && !run.diverged {
            (first.point, Some(true))
        } else {
            let (c, ok) = solve_in_chunks(
                kind, &sub, run.point, s, RETRY_CHUNKS - 1, cfg.seed, k, 3, factor, center_value,
                |c| c.stationarity_ok,
                ctr,
            )?;
            (c.point, Some(ok))
        }
    } else {
        (run.point, None)
    };
    if !all_finite(&accel) {
        return Err(Error::NonFinite("extrapolated step"));
    }
    let accel_value = obj.value(&accel, ctr);
    if accel_value.is_nan() {
        return Err(Error::NonFinite("objective at the extrapolated point"));
    }
    Ok(IterationOutcome { prox, prox_value, accel, accel_value, accel_ok })
}

#[allow(clippy::too_many_arguments)]
fn prox_step(
    obj: &CompositeObjective,
    cfg: &CatalystConfig,
    kind: &SolverKind,
    k: usize,
    x_prev: &[f64],
    kappa: f64,
    lazy_start: Option<Vec<f64>>,
    ctr: &mut Counters,
) -> Result<ProxOutcome> {
    match cfg.mode {
        Mode::Auto => {
            let mut aa = AutoAdapt::new(kind, cfg.t_budget);
            aa.cap = cfg.doubling_cap;
            aa.start = lazy_start;
            let out = aa.run(obj, x_prev, kappa, SeedStream::new(cfg.seed, stream(k, 0, 0)), ctr)?;
            let point = match cfg.inner_tol {
                Some(tol) => {
                    let sub = ProxSubproblem::new(obj, x_prev, out.kappa)?;
                    let c = refine(kind, &sub, out.raw, cfg.t_budget, tol, cfg.seed, k, 1, ctr)?;
                    if c.descent_ok { c.point } else { out.point }
                }
                None => out.point,
            };
            Ok(ProxOutcome { point, kappa: out.kappa, doublings: out.doublings })
        }
        Mode::Basic => {
            let sub = ProxSubproblem::new(obj, x_prev, cfg.kappa0)?;
            let z0 = match lazy_start {
                Some(z) => z,
                None => warm_start(&sub, ctr)?,
            };
            let center_value = sub.value(x_prev, ctr);
            let point = if let Some(tol) = cfg.inner_tol {
                let c = refine(kind, &sub, z0, cfg.t_budget, tol, cfg.seed, k, 1, ctr)?;
                if !c.passed() {
                    return Err(Error::CriteriaNotMet { k, iterations: cfg.t_budget * TOL_CHUNKS });
                }
                c.point
            } else {
                let (c, ok) = solve_in_chunks(
                    kind, &sub, z0, cfg.t_budget, RETRY_CHUNKS, cfg.seed, k, 1, 1.0, center_value,
                    |c| c.passed(),
                    ctr,
                )?;
                if !ok {
                    return Err(Error::CriteriaNotMet { k, iterations: cfg.t_budget * RETRY_CHUNKS });
                }
                c.point
            };
            Ok(ProxOutcome { point, kappa: cfg.kappa0, doublings: 0 })
        }
    }
}
