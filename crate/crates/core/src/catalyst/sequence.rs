//! The extrapolation sequence: momentum coefficients, prox-centers and anchors.

use crate::{Error, Result};

/// Next momentum coefficient: the root in (0, 1) of
/// `(1 − α')/α'² = 1/α²`, i.e. `α' = (√(α⁴ + 4α²) − α²)/2`.
pub fn alpha_next(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("α must lie in (0, 1], got {alpha}")));
    }
    // Same root written as 2/(1 + √(1 + 4/α²)), which stays accurate as α → 0.
    Ok(2.0 / (1.0 + (1.0 + 4.0 / (alpha * alpha)).sqrt()))
}

/// `y = α v + (1 − α) x`
pub fn extrapolate(alpha: f64, anchor: &[f64], prev: &[f64]) -> Vec<f64> {
    debug_assert_eq!(anchor.len(), prev.len());
    if alpha == 1.0 {
        return anchor.to_vec();
    }
    anchor
        .iter()
        .zip(prev)
        .map(|(v, x)| alpha * v + (1.0 - alpha) * x)
        .collect()
}

/// `v = x_prev + (x̃ − x_prev)/α`
pub fn update_anchor(alpha: f64, prev: &[f64], accel: &[f64]) -> Vec<f64> {
    debug_assert_eq!(prev.len(), accel.len());
    if alpha == 1.0 {
        return accel.to_vec();
    }
    prev.iter()
        .zip(accel)
        .map(|(x, xt)| x + (xt - x) / alpha)
        .collect()
}
