//! Concrete objectives: quadratics with a known spectrum, regularized
//! logistic regression, sparse dictionary learning and a two-layer network.

mod dictionary;
mod logistic;
mod quadratic;
mod twolayer;

pub use dictionary::{estimate_lipschitz_dictionary, DictionaryProblem};
pub use logistic::LogisticProblem;
pub use quadratic::QuadraticProblem;
pub use twolayer::{estimate_lipschitz_nn, TwoLayerNet};

/// Lower bound substituted for degenerate Lipschitz estimates.
pub const LIPSCHITZ_FLOOR: f64 = 1e-8;

pub fn floor_lipschitz(l: f64) -> f64 {
    if l.is_finite() {
        l.max(LIPSCHITZ_FLOOR)
    } else {
        LIPSCHITZ_FLOOR
    }
}

/// `log(1 + eᵗ)` without overflow.
#[inline]
pub fn log1p_exp(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// `1 / (1 + e^{−t})`
#[inline]
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}
