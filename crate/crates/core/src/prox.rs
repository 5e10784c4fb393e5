//! Nonsmooth regularizers ψ and their proximal operators
//! `prox_{βψ}(v) = argmin_z ψ(z) + ‖z − v‖² / (2β)`.

use std::fmt::Debug;

use crate::linalg::norm;

/// A convex, prox-friendly regularizer.
pub trait Regularizer: Send + Sync + Debug {
    fn value(&self, x: &[f64]) -> f64;

    /// Writes `prox_{step·ψ}(v)` into `out`.
    fn prox(&self, step: f64, v: &[f64], out: &mut [f64]);

    /// `true` when ψ ≡ 0, which lets callers skip the prox entirely.
    fn is_zero(&self) -> bool {
        false
    }
}

#[inline]
pub fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Componentwise `soft(v_j, βλ) / (1 + βμ)`, the prox of `(μ/2)‖·‖² + λ‖·‖₁`.
pub fn elastic_net_prox(v: &[f64], step: f64, mu: f64, lambda: f64) -> Vec<f64> {
    let shrink = 1.0 / (1.0 + step * mu);
    v.iter()
        .map(|&vj| soft_threshold(vj, step * lambda) * shrink)
        .collect()
}

/// Scales every column of a column-major `rows × (len/rows)` matrix onto the
/// unit ℓ₂ ball: `d_j ↦ d_j / max(1, ‖d_j‖)`.
pub fn project_columns(d: &[f64], rows: usize) -> Vec<f64> {
    let mut out = d.to_vec();
    project_columns_in_place(&mut out, rows, 1.0);
    out
}

fn project_columns_in_place(d: &mut [f64], rows: usize, radius: f64) {
    for col in d.chunks_mut(rows) {
        let nrm = norm(col);
        if nrm > radius {
            let s = radius / nrm;
            col.iter_mut().for_each(|c| *c *= s);
        }
    }
}

// Feasibility slack for indicator values, so that projected points count as feasible.
const FEAS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl Regularizer for Zero {
    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn prox(&self, _step: f64, v: &[f64], out: &mut [f64]) {
        out.copy_from_slice(v);
    }
    fn is_zero(&self) -> bool {
        true
    }
}

/// `λ‖x‖₁`
#[derive(Debug, Clone, Copy)]
pub struct L1 {
    pub lambda: f64,
}

impl Regularizer for L1 {
    fn value(&self, x: &[f64]) -> f64 {
        self.lambda * x.iter().map(|v| v.abs()).sum::<f64>()
    }
    fn prox(&self, step: f64, v: &[f64], out: &mut [f64]) {
        let t = step * self.lambda;
        for (o, &vi) in out.iter_mut().zip(v) {
            *o = soft_threshold(vi, t);
        }
    }
}

/// `(μ/2)‖x‖² + λ‖x‖₁`
#[derive(Debug, Clone, Copy)]
pub struct ElasticNet {
    pub mu: f64,
    pub lambda: f64,
}

impl Regularizer for ElasticNet {
    fn value(&self, x: &[f64]) -> f64 {
        x.iter()
            .map(|v| 0.5 * self.mu * v * v + self.lambda * v.abs())
            .sum()
    }
    fn prox(&self, step: f64, v: &[f64], out: &mut [f64]) {
        let shrink = 1.0 / (1.0 + step * self.mu);
        let t = step * self.lambda;
        for (o, &vi) in out.iter_mut().zip(v) {
            *o = soft_threshold(vi, t) * shrink;
        }
    }
}

/// Indicator of the centered ℓ₂ ball of the given radius.
#[derive(Debug, Clone, Copy)]
pub struct Ball {
    pub radius: f64,
}

impl Regularizer for Ball {
    fn value(&self, x: &[f64]) -> f64 {
        if norm(x) <= self.radius * (1.0 + FEAS_TOL) {
            0.0
        } else {
            f64::INFINITY
        }
    }
    fn prox(&self, _step: f64, v: &[f64], out: &mut [f64]) {
        out.copy_from_slice(v);
        project_columns_in_place(out, v.len().max(1), self.radius);
    }
}

/// Indicator of matrices (column-major, `rows` entries per column) whose
/// columns all lie in the unit ℓ₂ ball.
#[derive(Debug, Clone, Copy)]
pub struct UnitColumns {
    pub rows: usize,
}

impl Regularizer for UnitColumns {
    fn value(&self, x: &[f64]) -> f64 {
        let feasible = x
            .chunks(self.rows)
            .all(|col| norm(col) <= 1.0 + FEAS_TOL);
        if feasible {
            0.0
        } else {
            f64::INFINITY
        }
    }
    fn prox(&self, _step: f64, v: &[f64], out: &mut [f64]) {
        out.copy_from_slice(v);
        project_columns_in_place(out, self.rows, 1.0);
    }
}
