use std::sync::Arc;

use nalgebra::DMatrix;

use super::floor_lipschitz;
use crate::objective::{CompositeObjective, SmoothSum};
use crate::prox::{soft_threshold, UnitColumns};
use crate::{Error, Result};

/// Sparse dictionary learning over `D ∈ R^{m×p}` (flattened column-major):
///
/// `f_i(D) = min_α ½‖x_i − Dα‖² + (μ/2)‖α‖² + λ‖α‖₁`
///
/// with ψ the indicator of dictionaries whose columns lie in the unit ball.
/// Each oracle call re-solves the inner elastic net by cyclic coordinate
/// descent; gradients follow from Danskin's theorem.
#[derive(Debug, Clone)]
pub struct DictionaryProblem {
    data: DMatrix<f64>,
    atoms: usize,
    mu: f64,
    lambda: f64,
    tol: f64,
    max_sweeps: usize,
}

/// Result of one inner elastic-net solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCode {
    pub coefficients: Vec<f64>,
    pub sweeps: usize,
}

impl DictionaryProblem {
    pub fn new(data: DMatrix<f64>, atoms: usize, mu: f64, lambda: f64) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 || atoms == 0 {
            return Err(Error::InvalidParameter("dictionary problem needs data and p ≥ 1".into()));
        }
        if !(mu >= 0.0 && lambda >= 0.0) {
            return Err(Error::InvalidParameter("μ and λ must be ≥ 0".into()));
        }
        Ok(Self {
            data,
            atoms,
            mu,
            lambda,
            tol: 1e-9,
            max_sweeps: 10_000,
        })
    }

    pub fn with_inner_tolerance(mut self, tol: f64, max_sweeps: usize) -> Self {
        self.tol = tol;
        self.max_sweeps = max_sweeps;
        self
    }

    /// Signal dimension `m`.
    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// First `p` signals as atoms (cycled when `n < p`), projected onto the
    /// constraint set.
    pub fn initial_dictionary(&self) -> Vec<f64> {
        let m = self.rows();
        let mut d = Vec::with_capacity(m * self.atoms);
        for j in 0..self.atoms {
            d.extend(self.data.column(j % self.data.ncols()).iter());
        }
        crate::prox::project_columns(&d, m)
    }

    pub fn objective(self, lipschitz: f64) -> Result<CompositeObjective> {
        let rows = self.rows();
        CompositeObjective::new(
            Arc::new(self),
            Arc::new(UnitColumns { rows }),
            floor_lipschitz(lipschitz),
        )
    }

    fn check_dictionary(&self, d: &[f64]) -> Result<()> {
        let expected = self.rows() * self.atoms;
        if d.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: d.len() });
        }
        Ok(())
    }

    /// `α_i(D)` by cyclic coordinate descent from zero.
    pub fn sparse_code(&self, i: usize, d: &[f64]) -> Result<SparseCode> {
        self.sparse_code_from(i, d, &vec![0.0; self.atoms])
    }

    /// Coordinate descent from `start`; stops when the largest coordinate
    /// update in a sweep falls below the tolerance.
    pub fn sparse_code_from(&self, i: usize, d: &[f64], start: &[f64]) -> Result<SparseCode> {
        self.check_dictionary(d)?;
        let m = self.rows();
        let p = self.atoms;
        let x = self.data.column(i);
        let cols: Vec<&[f64]> = d.chunks(m).collect();
        let corr: Vec<f64> = cols.iter().map(|c| c.iter().zip(x.iter()).map(|(a, b)| a * b).sum()).collect();
        let mut gram = vec![0.0; p * p];
        for a in 0..p {
            for b in a..p {
                let g: f64 = cols[a].iter().zip(cols[b]).map(|(u, v)| u * v).sum();
                gram[a * p + b] = g;
                gram[b * p + a] = g;
            }
        }

        let mut alpha = start.to_vec();
        // gram_alpha = G α, kept in sync with every coordinate move.
        let mut gram_alpha: Vec<f64> = (0..p)
            .map(|a| (0..p).map(|b| gram[a * p + b] * alpha[b]).sum())
            .collect();
        for sweep in 1..=self.max_sweeps {
            let mut max_delta = 0.0f64;
            for j in 0..p {
                let gjj = gram[j * p + j];
                let denom = gjj + self.mu;
                let new = if denom > 0.0 {
                    let rho = corr[j] - gram_alpha[j] + gjj * alpha[j];
                    soft_threshold(rho, self.lambda) / denom
                } else {
                    0.0
                };
                let delta = new - alpha[j];
                if delta != 0.0 {
                    alpha[j] = new;
                    for (ga, g) in gram_alpha.iter_mut().zip(&gram[j * p..(j + 1) * p]) {
                        *ga += g * delta;
                    }
                    max_delta = max_delta.max(delta.abs());
                }
            }
            if max_delta < self.tol {
                return Ok(SparseCode { coefficients: alpha, sweeps: sweep });
            }
        }
        Err(Error::InnerSolve { sweeps: self.max_sweeps })
    }

    fn residual(&self, i: usize, d: &[f64], alpha: &[f64]) -> Vec<f64> {
        let m = self.rows();
        let mut r: Vec<f64> = self.data.column(i).iter().copied().collect();
        for (col, a) in d.chunks(m).zip(alpha) {
            if *a != 0.0 {
                for (ri, c) in r.iter_mut().zip(col) {
                    *ri -= a * c;
                }
            }
        }
        r
    }

    fn inner_objective(&self, residual: &[f64], alpha: &[f64]) -> f64 {
        0.5 * residual.iter().map(|v| v * v).sum::<f64>()
            + alpha
                .iter()
                .map(|a| 0.5 * self.mu * a * a + self.lambda * a.abs())
                .sum::<f64>()
    }

    pub fn component_value_checked(&self, i: usize, d: &[f64]) -> Result<f64> {
        let code = self.sparse_code(i, d)?;
        let r = self.residual(i, d, &code.coefficients);
        Ok(self.inner_objective(&r, &code.coefficients))
    }

    /// `∇_D f_i(D) = −(x_i − Dα_i(D)) α_i(D)ᵀ`, flattened column-major.
    pub fn component_gradient_checked(&self, i: usize, d: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; d.len()];
        self.gradient_into(i, d, &mut out)?;
        Ok(out)
    }

    fn gradient_into(&self, i: usize, d: &[f64], out: &mut [f64]) -> Result<()> {
        let code = self.sparse_code(i, d)?;
        let r = self.residual(i, d, &code.coefficients);
        for (col, a) in out.chunks_mut(self.rows()).zip(&code.coefficients) {
            for (o, ri) in col.iter_mut().zip(&r) {
                *o = -ri * a;
            }
        }
        Ok(())
    }
}

impl SmoothSum for DictionaryProblem {
    fn dim(&self) -> usize {
        self.rows() * self.atoms
    }

    fn n_components(&self) -> usize {
        self.data.ncols()
    }

    fn component_value(&self, i: usize, x: &[f64]) -> f64 {
        self.component_value_checked(i, x).unwrap_or(f64::NAN)
    }

    fn component_gradient(&self, i: usize, x: &[f64], out: &mut [f64]) {
        if self.gradient_into(i, x, out).is_err() {
            out.iter_mut().for_each(|o| *o = f64::NAN);
        }
    }
}

/// `max_i ‖α_i(D₀)‖²`, the Lipschitz heuristic for the dictionary objective.
/// Returns the raw maximum, which is zero on degenerate data; callers floor it.
pub fn estimate_lipschitz_dictionary(prob: &DictionaryProblem, d0: &[f64]) -> Result<f64> {
    let mut best = 0.0f64;
    for i in 0..prob.n_components() {
        let code = prob.sparse_code(i, d0)?;
        best = best.max(code.coefficients.iter().map(|a| a * a).sum());
    }
    Ok(best)
}
