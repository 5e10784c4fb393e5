use std::sync::Arc;

use super::{floor_lipschitz, log1p_exp, sigmoid};
use crate::data::Dataset;
use crate::objective::{CompositeObjective, SmoothSum};
use crate::prox::Regularizer;
use crate::{Error, Result};

/// `f_i(x) = log(1 + exp(−b_i a_iᵀx)) + (l2/2)‖x‖²`
#[derive(Debug, Clone)]
pub struct LogisticProblem {
    data: Arc<Dataset>,
    l2: f64,
}

impl LogisticProblem {
    pub fn new(data: Arc<Dataset>, l2: f64) -> Result<Self> {
        if data.is_empty() || data.n_features == 0 {
            return Err(Error::InvalidParameter("logistic regression needs data".into()));
        }
        if !(l2 >= 0.0) {
            return Err(Error::InvalidParameter(format!("l2 must be ≥ 0, got {l2}")));
        }
        Ok(Self { data, l2 })
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn l2(&self) -> f64 {
        self.l2
    }

    /// `max_i ‖a_i‖²/4 + l2`, a Lipschitz constant valid for every component.
    pub fn lipschitz(&self) -> f64 {
        let max_sq = self.data.rows.iter().map(|r| r.norm_sq()).fold(0.0, f64::max);
        0.25 * max_sq + self.l2
    }

    pub fn objective(self, reg: Arc<dyn Regularizer>) -> Result<CompositeObjective> {
        let l = floor_lipschitz(self.lipschitz());
        let rho = 0.0;
        Ok(CompositeObjective::new(Arc::new(self), reg, l)?.with_weak_convexity(rho))
    }
}

impl SmoothSum for LogisticProblem {
    fn dim(&self) -> usize {
        self.data.n_features
    }

    fn n_components(&self) -> usize {
        self.data.len()
    }

    fn component_value(&self, i: usize, x: &[f64]) -> f64 {
        let margin = self.data.labels[i] * self.data.rows[i].dot(x);
        let reg = 0.5 * self.l2 * x.iter().map(|v| v * v).sum::<f64>();
        log1p_exp(-margin) + reg
    }

    fn component_gradient(&self, i: usize, x: &[f64], out: &mut [f64]) {
        let b = self.data.labels[i];
        let margin = b * self.data.rows[i].dot(x);
        for (o, xi) in out.iter_mut().zip(x) {
            *o = self.l2 * xi;
        }
        self.data.rows[i].add_to(-b * sigmoid(-margin), out);
    }

    fn value(&self, x: &[f64]) -> f64 {
        let n = self.data.len() as f64;
        let loss: f64 = self
            .data
            .rows
            .iter()
            .zip(&self.data.labels)
            .map(|(r, b)| log1p_exp(-b * r.dot(x)))
            .sum();
        loss / n + 0.5 * self.l2 * x.iter().map(|v| v * v).sum::<f64>()
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let inv_n = 1.0 / self.data.len() as f64;
        for (o, xi) in out.iter_mut().zip(x) {
            *o = self.l2 * xi;
        }
        for (r, b) in self.data.rows.iter().zip(&self.data.labels) {
            let margin = b * r.dot(x);
            r.add_to(-b * sigmoid(-margin) * inv_n, out);
        }
    }
}
