//! Inner methods: full gradient descent, prox-SVRG and SAGA.
//!
//! Every method runs a fixed number of iterations on a [`Composite`] model
//! (usually a [`ProxSubproblem`]) from a given start, and reports how many
//! component gradients it consumed. One SVRG or SAGA iteration is one
//! stochastic step, so a budget of `n` iterations is one pass over the data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::all_finite;
use crate::objective::{Composite, Counters, ProxSubproblem};
use crate::stationarity::prox_gradient_step;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Gd,
    Svrg,
    Saga,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Gd => "gd",
            Method::Svrg => "svrg",
            Method::Saga => "saga",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gd" | "fg" => Ok(Method::Gd),
            "svrg" => Ok(Method::Svrg),
            "saga" => Ok(Method::Saga),
            other => Err(Error::InvalidParameter(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// `1/L` for GD and `1/(2L)` for SVRG/SAGA, where `L` is the model's
    /// smoothness (so `L + κ` on a subproblem).
    Smoothness,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverKind {
    pub method: Method,
    /// SVRG snapshot period in stochastic steps; `None` means `n`.
    pub epoch_len: Option<usize>,
    pub step: StepRule,
}

impl SolverKind {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            epoch_len: None,
            step: StepRule::Smoothness,
        }
    }

    pub fn gd() -> Self {
        Self::new(Method::Gd)
    }

    pub fn svrg() -> Self {
        Self::new(Method::Svrg)
    }

    pub fn saga() -> Self {
        Self::new(Method::Saga)
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = StepRule::Fixed(step);
        self
    }

    pub fn with_epoch_len(mut self, len: usize) -> Self {
        self.epoch_len = Some(len);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let StepRule::Fixed(s) = self.step {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidParameter(format!("stepsize must be positive, got {s}")));
            }
        }
        if self.epoch_len == Some(0) {
            return Err(Error::InvalidParameter("SVRG epoch length must be ≥ 1".into()));
        }
        Ok(())
    }

    pub fn step_size(&self, lipschitz: f64) -> f64 {
        match self.step {
            StepRule::Fixed(s) => s,
            StepRule::Smoothness => match self.method {
                Method::Gd => 1.0 / lipschitz,
                Method::Svrg | Method::Saga => 0.5 / lipschitz,
            },
        }
    }
}

/// Seed plus stream id for the counter-based sampling generator. Distinct
/// streams under one seed are independent, which keeps concurrent or
/// repeated runs reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SeedStream {
    pub seed: u64,
    pub stream: u64,
}

impl SeedStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

impl From<u64> for SeedStream {
    fn from(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerRunResult {
    pub point: Vec<f64>,
    /// Iterations actually executed; short of the request only on divergence.
    pub iterations: usize,
    pub evals: Counters,
    pub diverged: bool,
}

/// Start point for the inner method on `f_κ(·; y)`: `y` itself when `f` is
/// smooth, otherwise one prox-gradient step from `y` with `η = 1/(L + κ)`.
pub fn warm_start(sub: &ProxSubproblem<'_>, ctr: &mut Counters) -> Result<Vec<f64>> {
    if sub.is_smooth() {
        return Ok(sub.center().to_vec());
    }
    prox_gradient_step(sub, 1.0 / sub.lipschitz(), sub.center(), ctr)
}

/// Runs exactly `iters` iterations of `kind` on `model` from `z0`, stopping
/// early only if the iterate stops being finite.
pub fn run_inner<M: Composite + ?Sized>(
    kind: &SolverKind,
    model: &M,
    z0: &[f64],
    iters: usize,
    seed: SeedStream,
) -> Result<InnerRunResult> {
    let mut solver = InnerSolver::new(kind, model, z0, seed)?;
    solver.advance(iters)?;
    Ok(solver.into_result())
}

enum MethodState {
    Gd,
    Svrg {
        epoch: usize,
        snapshot: Vec<f64>,
        full: Vec<f64>,
        gs: Vec<f64>,
    },
    Saga {
        /// Component gradients at the most recent visit, filled at the
        /// first step from the starting point.
        table: Option<Vec<f64>>,
        avg: Vec<f64>,
    },
}

/// A resumable inner run. Calling [`advance`](Self::advance) repeatedly is
/// equivalent to one long run: SVRG keeps its epoch clock and snapshot, and
/// SAGA keeps its gradient table.
pub struct InnerSolver<'m, M: ?Sized> {
    model: &'m M,
    step: f64,
    z: Vec<f64>,
    shifted: Vec<f64>,
    grad: Vec<f64>,
    dir: Vec<f64>,
    evals: Counters,
    iterations: usize,
    diverged: bool,
    rng: ChaCha8Rng,
    state: MethodState,
}

impl<'m, M: Composite + ?Sized> InnerSolver<'m, M> {
    pub fn new(kind: &SolverKind, model: &'m M, z0: &[f64], seed: SeedStream) -> Result<Self> {
        kind.validate()?;
        if z0.len() != model.dim() {
            return Err(Error::DimensionMismatch {
                expected: model.dim(),
                got: z0.len(),
            });
        }
        let p = z0.len();
        let state = match kind.method {
            Method::Gd => MethodState::Gd,
            Method::Svrg => MethodState::Svrg {
                epoch: kind.epoch_len.unwrap_or(model.n_components()).max(1),
                snapshot: vec![0.0; p],
                full: vec![0.0; p],
                gs: vec![0.0; p],
            },
            Method::Saga => MethodState::Saga { table: None, avg: vec![0.0; p] },
        };
        Ok(Self {
            model,
            step: kind.step_size(model.lipschitz()),
            z: z0.to_vec(),
            shifted: vec![0.0; p],
            grad: vec![0.0; p],
            dir: vec![0.0; p],
            evals: Counters::default(),
            iterations: 0,
            diverged: false,
            rng: seed.rng(),
            state,
        })
    }

    pub fn point(&self) -> &[f64] {
        &self.z
    }

    pub fn evals(&self) -> Counters {
        self.evals
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn diverged(&self) -> bool {
        self.diverged
    }

    /// Runs `iters` more iterations; returns `true` if the run has diverged.
    pub fn advance(&mut self, iters: usize) -> Result<bool> {
        for _ in 0..iters {
            if self.diverged {
                break;
            }
            self.direction();
            if !self.prox_step()? {
                self.diverged = true;
            }
        }
        Ok(self.diverged)
    }

    pub fn into_result(self) -> InnerRunResult {
        InnerRunResult {
            point: self.z,
            iterations: self.iterations,
            evals: self.evals,
            diverged: self.diverged,
        }
    }

    /// Fills `self.dir` with the search direction at the current iterate.
    fn direction(&mut self) {
        let n = self.model.n_components();
        let t = self.iterations;
        match &mut self.state {
            MethodState::Gd => self.model.gradient(&self.z, &mut self.dir, &mut self.evals),
            MethodState::Svrg { epoch, snapshot, full, gs } => {
                if t % *epoch == 0 {
                    snapshot.copy_from_slice(&self.z);
                    self.model.gradient(snapshot, full, &mut self.evals);
                }
                let i = self.rng.random_range(0..n);
                self.model.component_gradient(i, &self.z, &mut self.grad, &mut self.evals);
                self.model.component_gradient(i, snapshot, gs, &mut self.evals);
                for (((d, a), b), c) in self.dir.iter_mut().zip(&self.grad).zip(gs.iter()).zip(full.iter()) {
                    *d = a - b + c;
                }
            }
            MethodState::Saga { table, avg } => {
                let p = self.z.len();
                let inv_n = 1.0 / n as f64;
                let table = table.get_or_insert_with(|| {
                    let mut rows = vec![0.0; n * p];
                    for (i, row) in rows.chunks_mut(p).enumerate() {
                        self.model.component_gradient(i, &self.z, row, &mut self.evals);
                        for (a, r) in avg.iter_mut().zip(row.iter()) {
                            *a += r;
                        }
                    }
                    avg.iter_mut().for_each(|a| *a *= inv_n);
                    rows
                });
                let j = self.rng.random_range(0..n);
                self.model.component_gradient(j, &self.z, &mut self.grad, &mut self.evals);
                let row = &mut table[j * p..(j + 1) * p];
                for k in 0..p {
                    let delta = self.grad[k] - row[k];
                    self.dir[k] = delta + avg[k];
                    avg[k] += delta * inv_n;
                    row[k] = self.grad[k];
                }
            }
        }
    }

    /// `z ← prox_{ηψ}(z − η·dir)`; returns `false` when the update blew up.
    fn prox_step(&mut self) -> Result<bool> {
        for ((s, z), d) in self.shifted.iter_mut().zip(&self.z).zip(&self.dir) {
            *s = z - self.step * d;
        }
        if !all_finite(&self.shifted) {
            return Ok(false);
        }
        self.model.prox(self.step, &self.shifted, &mut self.z, &mut self.evals)?;
        self.iterations += 1;
        Ok(true)
    }
}

/// Linear-convergence constants of an inner method for smoothness `L` and
/// `n` components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodConstants {
    pub method: Method,
    pub lipschitz: f64,
    pub n: usize,
    /// `1/τ_L`, the inverse rate at `κ = L`.
    pub inv_tau_l: f64,
    pub kappa_cvx: f64,
    /// `1/τ_{κ_cvx}`.
    pub inv_tau_cvx: f64,
    /// `A_{4L}`.
    pub a_4l: f64,
}

impl MethodConstants {
    /// Linear rate `τ_κ` on a subproblem with proximal weight `κ`.
    pub fn tau(&self, kappa: f64) -> f64 {
        let cond = (self.lipschitz + kappa) / kappa;
        match self.effective_method() {
            Method::Gd => 1.0 / cond,
            Method::Svrg => 1.0 / (self.n as f64 + cond),
            Method::Saga => 1.0 / (4.0 * self.n as f64).max(3.0 * cond),
        }
    }

    fn effective_method(&self) -> Method {
        if self.method == Method::Svrg && self.n < 2 {
            Method::Gd
        } else {
            self.method
        }
    }
}

pub fn method_constants(method: Method, lipschitz: f64, n: usize) -> Result<MethodConstants> {
    if !(lipschitz > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Lipschitz constant must be positive, got {lipschitz}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one component".into()));
    }
    let l = lipschitz;
    let nf = n as f64;
    let (inv_tau_l, kappa_cvx, inv_tau_cvx, a_4l) = match method {
        Method::Svrg if n >= 2 => (nf + 2.0, l / (nf - 1.0), 2.0 * nf, 8.0 * l),
        Method::Gd | Method::Svrg => (2.0, l, 2.0, 8.0 * l),
        Method::Saga => (4.0 * nf, 3.0 * l / (4.0 * nf - 3.0), 4.0 * nf, 8.0 * l * nf),
    };
    Ok(MethodConstants {
        method,
        lipschitz,
        n,
        inv_tau_l,
        kappa_cvx,
        inv_tau_cvx,
        a_4l,
    })
}
