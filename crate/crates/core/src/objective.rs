//! Composite objectives `f = f₀ + ψ` with `f₀ = (1/n) Σ f_i`, and the
//! quadratically perturbed subproblems built around them.

use std::fmt::Debug;
use std::ops::AddAssign;
use std::sync::Arc;

use crate::linalg::{all_finite, axpy, dist_sq};
use crate::prox::Regularizer;
use crate::{Error, Result};

/// The smooth finite-sum part `f₀ = (1/n) Σ f_i`.
pub trait SmoothSum: Send + Sync + Debug {
    fn dim(&self) -> usize;
    fn n_components(&self) -> usize;
    fn component_value(&self, i: usize, x: &[f64]) -> f64;
    /// Overwrites `out` with `∇f_i(x)`.
    fn component_gradient(&self, i: usize, x: &[f64], out: &mut [f64]);

    fn value(&self, x: &[f64]) -> f64 {
        let n = self.n_components();
        (0..n).map(|i| self.component_value(i, x)).sum::<f64>() / n as f64
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n_components();
        out.iter_mut().for_each(|o| *o = 0.0);
        let mut g = vec![0.0; self.dim()];
        for i in 0..n {
            self.component_gradient(i, x, &mut g);
            axpy(1.0, &g, out);
        }
        let inv = 1.0 / n as f64;
        out.iter_mut().for_each(|o| *o *= inv);
    }
}

/// Per-run oracle accounting. `grad_evals` counts component-gradient calls,
/// so one full gradient costs `n`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub value_evals: u64,
    pub grad_evals: u64,
    pub prox_calls: u64,
}

impl AddAssign for Counters {
    fn add_assign(&mut self, rhs: Self) {
        self.value_evals += rhs.value_evals;
        self.grad_evals += rhs.grad_evals;
        self.prox_calls += rhs.prox_calls;
    }
}

/// Anything an inner method can minimize: a finite-sum smooth part with
/// component gradients plus a prox-friendly ψ.
pub trait Composite {
    fn dim(&self) -> usize;
    fn n_components(&self) -> usize;
    /// Lipschitz constant of the smooth part's gradient (and of each component's).
    fn lipschitz(&self) -> f64;
    fn is_smooth(&self) -> bool;

    fn value(&self, x: &[f64], ctr: &mut Counters) -> f64;
    fn component_gradient(&self, i: usize, x: &[f64], out: &mut [f64], ctr: &mut Counters);
    fn gradient(&self, x: &[f64], out: &mut [f64], ctr: &mut Counters);
    /// `prox_{step·ψ}(v)`; fails if the result is not finite.
    fn prox(&self, step: f64, v: &[f64], out: &mut [f64], ctr: &mut Counters) -> Result<()>;
}

/// `f(x) = (1/n) Σ f_i(x) + ψ(x)` together with a Lipschitz estimate `L` for
/// the component gradients and, when known, the weak-convexity constant ρ.
#[derive(Debug, Clone)]
pub struct CompositeObjective {
    smooth: Arc<dyn SmoothSum>,
    reg: Arc<dyn Regularizer>,
    lipschitz: f64,
    weak_convexity: Option<f64>,
}

impl CompositeObjective {
    pub fn new(
        smooth: Arc<dyn SmoothSum>,
        reg: Arc<dyn Regularizer>,
        lipschitz: f64,
    ) -> Result<Self> {
        if !(lipschitz > 0.0 && lipschitz.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Lipschitz estimate must be positive and finite, got {lipschitz}"
            )));
        }
        if smooth.dim() == 0 || smooth.n_components() == 0 {
            return Err(Error::InvalidParameter(
                "objective needs p ≥ 1 and n ≥ 1".into(),
            ));
        }
        Ok(Self {
            smooth,
            reg,
            lipschitz,
            weak_convexity: None,
        })
    }

    pub fn with_weak_convexity(mut self, rho: f64) -> Self {
        self.weak_convexity = Some(rho);
        self
    }

    pub fn with_lipschitz(mut self, lipschitz: f64) -> Self {
        self.lipschitz = lipschitz;
        self
    }

    pub fn weak_convexity(&self) -> Option<f64> {
        self.weak_convexity
    }

    pub fn smooth(&self) -> &dyn SmoothSum {
        self.smooth.as_ref()
    }

    pub fn regularizer(&self) -> &dyn Regularizer {
        self.reg.as_ref()
    }

    /// `f₀(x) + ψ(x)` without touching any counter. Non-finite results are
    /// returned as they are.
    pub fn value_uncounted(&self, x: &[f64]) -> f64 {
        self.smooth.value(x) + self.reg.value(x)
    }

    /// Returns `f₀(x) + ψ(x)` and charges `n` component evaluations.
    pub fn evaluate(&self, x: &[f64], ctr: &mut Counters) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.value(x, ctr))
    }

    pub fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.smooth.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.smooth.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

impl Composite for CompositeObjective {
    fn dim(&self) -> usize {
        self.smooth.dim()
    }
    fn n_components(&self) -> usize {
        self.smooth.n_components()
    }
    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
    fn is_smooth(&self) -> bool {
        self.reg.is_zero()
    }

    fn value(&self, x: &[f64], ctr: &mut Counters) -> f64 {
        ctr.value_evals += self.smooth.n_components() as u64;
        self.value_uncounted(x)
    }

    fn component_gradient(&self, i: usize, x: &[f64], out: &mut [f64], ctr: &mut Counters) {
        ctr.grad_evals += 1;
        self.smooth.component_gradient(i, x, out);
    }

    fn gradient(&self, x: &[f64], out: &mut [f64], ctr: &mut Counters) {
        ctr.grad_evals += self.smooth.n_components() as u64;
        self.smooth.gradient(x, out);
    }

    fn prox(&self, step: f64, v: &[f64], out: &mut [f64], ctr: &mut Counters) -> Result<()> {
        ctr.prox_calls += 1;
        self.reg.prox(step, v, out);
        if all_finite(out) {
            Ok(())
        } else {
            Err(Error::ProxFailure { step })
        }
    }
}

/// `f_κ(x; y) = f(x) + (κ/2)‖x − y‖²`. The quadratic is folded into every
/// component, so the smooth part stays a finite sum with Lipschitz constant
/// `L + κ`.
#[derive(Debug, Clone)]
pub struct ProxSubproblem<'a> {
    obj: &'a CompositeObjective,
    center: Vec<f64>,
    kappa: f64,
}

impl<'a> ProxSubproblem<'a> {
    pub fn new(obj: &'a CompositeObjective, center: &[f64], kappa: f64) -> Result<Self> {
        obj.check_dim(center)?;
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "proximal weight must be positive, got {kappa}"
            )));
        }
        Ok(Self {
            obj,
            center: center.to_vec(),
            kappa,
        })
    }

    pub fn objective(&self) -> &'a CompositeObjective {
        self.obj
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `f(x) + (κ/2)‖x − y‖²`, charging `n` component evaluations.
    pub fn evaluate(&self, x: &[f64], ctr: &mut Counters) -> Result<f64> {
        self.obj.check_dim(x)?;
        Ok(self.value(x, ctr))
    }

    #[inline]
    fn add_quadratic_gradient(&self, x: &[f64], out: &mut [f64]) {
        for ((o, xi), yi) in out.iter_mut().zip(x).zip(&self.center) {
            *o += self.kappa * (xi - yi);
        }
    }
}

impl Composite for ProxSubproblem<'_> {
    fn dim(&self) -> usize {
        self.obj.dim()
    }
    fn n_components(&self) -> usize {
        self.obj.n_components()
    }
    fn lipschitz(&self) -> f64 {
        self.obj.lipschitz() + self.kappa
    }
    fn is_smooth(&self) -> bool {
        self.obj.is_smooth()
    }

    fn value(&self, x: &[f64], ctr: &mut Counters) -> f64 {
        self.obj.value(x, ctr) + 0.5 * self.kappa * dist_sq(x, &self.center)
    }

    fn component_gradient(&self, i: usize, x: &[f64], out: &mut [f64], ctr: &mut Counters) {
        self.obj.component_gradient(i, x, out, ctr);
        self.add_quadratic_gradient(x, out);
    }

    fn gradient(&self, x: &[f64], out: &mut [f64], ctr: &mut Counters) {
        self.obj.gradient(x, out, ctr);
        self.add_quadratic_gradient(x, out);
    }

    fn prox(&self, step: f64, v: &[f64], out: &mut [f64], ctr: &mut Counters) -> Result<()> {
        self.obj.prox(step, v, out, ctr)
    }
}
