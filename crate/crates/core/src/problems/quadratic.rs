use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};

use super::floor_lipschitz;
use crate::objective::{CompositeObjective, SmoothSum};
use crate::prox::Regularizer;
use crate::{Error, Result};

/// `f(x) = ½xᵀQx + bᵀx`, split as `f_i(x) = ½xᵀQx + b_iᵀx` with the `b_i`
/// averaging to `b`. Every component shares `Q`, so each has the same
/// Lipschitz constant `L = max|λ(Q)|`, and `ρ = max(0, −λ_min(Q))`.
#[derive(Debug, Clone)]
pub struct QuadraticProblem {
    q: DMatrix<f64>,
    linear: Vec<f64>,
    components: Vec<Vec<f64>>,
    spectrum: Vec<f64>,
}

impl QuadraticProblem {
    pub fn new(q: DMatrix<f64>, linear: Vec<f64>) -> Result<Self> {
        let p = q.nrows();
        if q.ncols() != p || p == 0 {
            return Err(Error::InvalidParameter("Q must be square and non-empty".into()));
        }
        if linear.len() != p {
            return Err(Error::DimensionMismatch { expected: p, got: linear.len() });
        }
        let asym = (&q - q.transpose()).amax();
        if asym > 1e-12 * q.amax().max(1.0) {
            return Err(Error::InvalidParameter("Q must be symmetric".into()));
        }
        let mut spectrum: Vec<f64> = SymmetricEigen::new(q.clone()).eigenvalues.iter().copied().collect();
        spectrum.sort_by(f64::total_cmp);
        Ok(Self {
            components: vec![linear.clone()],
            q,
            linear,
            spectrum,
        })
    }

    pub fn diagonal(diag: &[f64], linear: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)), linear.to_vec())
    }

    /// Splits the linear term into components `b + shift_i`. The shifts are
    /// re-centered so that they average to zero.
    pub fn with_component_shifts(mut self, shifts: Vec<Vec<f64>>) -> Result<Self> {
        let p = self.dim();
        if shifts.is_empty() {
            return Err(Error::InvalidParameter("need at least one component".into()));
        }
        if let Some(bad) = shifts.iter().find(|s| s.len() != p) {
            return Err(Error::DimensionMismatch { expected: p, got: bad.len() });
        }
        let n = shifts.len() as f64;
        let mut mean = vec![0.0; p];
        for s in &shifts {
            for (m, v) in mean.iter_mut().zip(s) {
                *m += v / n;
            }
        }
        self.components = shifts
            .into_iter()
            .map(|s| {
                s.iter()
                    .zip(&mean)
                    .zip(&self.linear)
                    .map(|((v, m), b)| b + (v - m))
                    .collect()
            })
            .collect();
        Ok(self)
    }

    pub fn with_linear_term(self, linear: Vec<f64>) -> Result<Self> {
        let shifts: Vec<Vec<f64>> = self
            .components
            .iter()
            .map(|c| c.iter().zip(&self.linear).map(|(ci, b)| ci - b).collect())
            .collect();
        let q = self.q;
        Self::new(q, linear)?.with_component_shifts(shifts)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    /// Eigenvalues of `Q` in ascending order.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    pub fn lipschitz(&self) -> f64 {
        self.spectrum.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn weak_convexity(&self) -> f64 {
        (-self.spectrum[0]).max(0.0)
    }

    /// Wraps the problem with `ψ`; `L` is floored away from zero and the
    /// known `ρ` is attached.
    pub fn objective(self, reg: Arc<dyn Regularizer>) -> Result<CompositeObjective> {
        let l = floor_lipschitz(self.lipschitz());
        let rho = self.weak_convexity();
        Ok(CompositeObjective::new(Arc::new(self), reg, l)?.with_weak_convexity(rho))
    }

    fn quad_form_and_product(&self, x: &[f64], qx: &mut [f64]) -> f64 {
        let p = self.dim();
        let data = self.q.as_slice();
        // Q is symmetric, so row r equals column r.
        for (r, out) in qx.iter_mut().enumerate() {
            let col = &data[r * p..(r + 1) * p];
            *out = col.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        0.5 * qx.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
    }
}

impl SmoothSum for QuadraticProblem {
    fn dim(&self) -> usize {
        self.q.nrows()
    }

    fn n_components(&self) -> usize {
        self.components.len()
    }

    fn component_value(&self, i: usize, x: &[f64]) -> f64 {
        let mut qx = vec![0.0; x.len()];
        let half = self.quad_form_and_product(x, &mut qx);
        half + self.components[i].iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
    }

    fn component_gradient(&self, i: usize, x: &[f64], out: &mut [f64]) {
        self.quad_form_and_product(x, out);
        for (o, b) in out.iter_mut().zip(&self.components[i]) {
            *o += b;
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut qx = vec![0.0; x.len()];
        let half = self.quad_form_and_product(x, &mut qx);
        half + self.linear.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        self.quad_form_and_product(x, out);
        for (o, b) in out.iter_mut().zip(&self.linear) {
            *o += b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_constants() {
        let q = QuadraticProblem::diagonal(&[-1.0, 2.0], &[0.0, 0.0]).unwrap();
        assert_eq!(q.spectrum(), &[-1.0, 2.0]);
        assert_eq!(q.lipschitz(), 2.0);
        assert_eq!(q.weak_convexity(), 1.0);
        let q = QuadraticProblem::diagonal(&[0.0, 3.0], &[0.0, 0.0]).unwrap();
        assert_eq!(q.weak_convexity(), 0.0);
    }

    #[test]
    fn rejects_asymmetric() {
        let q = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(QuadraticProblem::new(q, vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn components_average_to_whole() {
        let q = QuadraticProblem::diagonal(&[1.0, 2.0], &[0.5, -1.0])
            .unwrap()
            .with_component_shifts(vec![vec![1.0, 2.0], vec![3.0, -4.0], vec![0.0, 0.5]])
            .unwrap();
        let x = [0.3, -0.7];
        let n = q.n_components() as f64;
        let mean: f64 = (0..3).map(|i| q.component_value(i, &x)).sum::<f64>() / n;
        assert!((mean - SmoothSum::value(&q, &x)).abs() < 1e-14);
        let mut g = [0.0; 2];
        let mut acc = [0.0; 2];
        for i in 0..3 {
            q.component_gradient(i, &x, &mut g);
            acc[0] += g[0] / n;
            acc[1] += g[1] / n;
        }
        let mut full = [0.0; 2];
        SmoothSum::gradient(&q, &x, &mut full);
        assert!((acc[0] - full[0]).abs() < 1e-14 && (acc[1] - full[1]).abs() < 1e-14);
    }
}
