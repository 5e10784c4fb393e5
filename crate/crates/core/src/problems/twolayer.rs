use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{floor_lipschitz, log1p_exp, sigmoid};
use crate::data::Dataset;
use crate::linalg::{dist, norm};
use crate::objective::{CompositeObjective, SmoothSum};
use crate::prox::Zero;
use crate::{Error, Result};

/// Two-layer network `s(a) = W₂ᵀ σ(W₁ᵀ a)` with softplus `σ(u) = log(1 + eᵘ)`
/// fitted with the logistic loss `log(1 + e^{−b s})`.
///
/// Parameters are flattened as `[W₁ (p × d, column-major), W₂ (d)]`, so hidden
/// unit `h` owns the slice `W₁[h·p .. (h+1)·p]`.
#[derive(Debug, Clone)]
pub struct TwoLayerNet {
    data: Arc<Dataset>,
    hidden: usize,
}

impl TwoLayerNet {
    pub fn new(data: Arc<Dataset>, hidden: usize) -> Result<Self> {
        if data.is_empty() || data.n_features == 0 || hidden == 0 {
            return Err(Error::InvalidParameter("network needs data and d ≥ 1".into()));
        }
        Ok(Self { data, hidden })
    }

    pub fn inputs(&self) -> usize {
        self.data.n_features
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    fn split<'a>(&self, w: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        w.split_at(self.inputs() * self.hidden)
    }

    /// Weights drawn uniformly from `[−1/√fan_in, 1/√fan_in]` per layer.
    pub fn init_weights(&self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.draw_weights(&mut rng)
    }

    fn draw_weights(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let p = self.inputs();
        let s1 = 1.0 / (p as f64).sqrt();
        let s2 = 1.0 / (self.hidden as f64).sqrt();
        let mut w: Vec<f64> = (0..p * self.hidden).map(|_| rng.random_range(-s1..s1)).collect();
        w.extend((0..self.hidden).map(|_| rng.random_range(-s2..s2)));
        w
    }

    pub fn objective(self, lipschitz: f64) -> Result<CompositeObjective> {
        CompositeObjective::new(Arc::new(self), Arc::new(Zero), floor_lipschitz(lipschitz))
    }

    fn score(&self, i: usize, w1: &[f64], w2: &[f64], pre: &mut [f64]) -> f64 {
        let row = &self.data.rows[i];
        let p = self.inputs();
        let mut s = 0.0;
        for h in 0..self.hidden {
            pre[h] = row.dot(&w1[h * p..(h + 1) * p]);
            s += w2[h] * log1p_exp(pre[h]);
        }
        s
    }

    /// Gradients of the `i`-th loss with respect to `W₁` and `W₂`.
    pub fn gradient_blocks(&self, i: usize, w1: &[f64], w2: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut g1 = vec![0.0; w1.len()];
        let mut g2 = vec![0.0; w2.len()];
        self.gradient_blocks_into(i, w1, w2, &mut g1, &mut g2);
        (g1, g2)
    }

    fn gradient_blocks_into(&self, i: usize, w1: &[f64], w2: &[f64], g1: &mut [f64], g2: &mut [f64]) {
        let p = self.inputs();
        let b = self.data.labels[i];
        let mut pre = vec![0.0; self.hidden];
        let s = self.score(i, w1, w2, &mut pre);
        let dloss = -b * sigmoid(-b * s);
        g1.iter_mut().for_each(|g| *g = 0.0);
        let row = &self.data.rows[i];
        for h in 0..self.hidden {
            g2[h] = dloss * log1p_exp(pre[h]);
            let coef = dloss * w2[h] * sigmoid(pre[h]);
            if coef != 0.0 {
                row.add_to(coef, &mut g1[h * p..(h + 1) * p]);
            }
        }
    }

    /// The per-layer difference quotients between two weight draws, maximized
    /// over samples: `‖∇f_i(W₁,W₂) − ∇f_i(W₁′,W₂)‖ / ‖W₁ − W₁′‖` and the
    /// analogous quotient for the second layer.
    pub fn lipschitz_quotients(&self, a: &[f64], b: &[f64]) -> (f64, f64) {
        let (a1, a2) = self.split(a);
        let (b1, b2) = self.split(b);
        let mut swap1 = b1.to_vec();
        swap1.extend_from_slice(a2);
        let mut swap2 = a1.to_vec();
        swap2.extend_from_slice(b2);
        let d1 = dist(a1, b1);
        let d2 = dist(a2, b2);
        let (mut l1, mut l2) = (0.0f64, 0.0f64);
        let dim = a.len();
        let (mut ga, mut g1, mut g2) = (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
        for i in 0..self.n_components() {
            self.component_gradient(i, a, &mut ga);
            self.component_gradient(i, &swap1, &mut g1);
            self.component_gradient(i, &swap2, &mut g2);
            l1 = l1.max(dist(&ga, &g1) / d1);
            l2 = l2.max(dist(&ga, &g2) / d2);
        }
        (l1, l2)
    }
}

impl SmoothSum for TwoLayerNet {
    fn dim(&self) -> usize {
        self.inputs() * self.hidden + self.hidden
    }

    fn n_components(&self) -> usize {
        self.data.len()
    }

    fn component_value(&self, i: usize, x: &[f64]) -> f64 {
        let (w1, w2) = self.split(x);
        let mut pre = vec![0.0; self.hidden];
        let s = self.score(i, w1, w2, &mut pre);
        log1p_exp(-self.data.labels[i] * s)
    }

    fn component_gradient(&self, i: usize, x: &[f64], out: &mut [f64]) {
        let (w1, w2) = self.split(x);
        let (g1, g2) = out.split_at_mut(w1.len());
        self.gradient_blocks_into(i, w1, w2, g1, g2);
    }
}

/// Per-layer Lipschitz estimates `(L₁, L₂)` from two random weight draws.
/// Draws whose layers coincide are redrawn.
pub fn estimate_lipschitz_nn(prob: &TwoLayerNet, seed: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    estimate_with(prob, || prob.draw_weights(&mut rng))
}

const MAX_REDRAWS: usize = 100;

fn estimate_with(prob: &TwoLayerNet, mut draw: impl FnMut() -> Vec<f64>) -> Result<(f64, f64)> {
    let first = draw();
    let (f1, f2) = prob.split(&first);
    for _ in 0..MAX_REDRAWS {
        let second = draw();
        let (s1, s2) = prob.split(&second);
        if norm(&crate::linalg::sub(f1, s1)) > 0.0 && norm(&crate::linalg::sub(f2, s2)) > 0.0 {
            return Ok(prob.lipschitz_quotients(&first, &second));
        }
    }
    Err(Error::InvalidParameter("weight draws kept coinciding".into()))
}
