//! Inner iteration budgets `T` and `S` sized from the method constants.

use crate::solvers::{method_constants, Method};
use crate::Result;

/// Smallest integer `T ≥ (1/τ_L) log(40 A_{4L} / L)`.
pub fn budget_t(method: Method, lipschitz: f64, n: usize) -> Result<usize> {
    let c = method_constants(method, lipschitz, n)?;
    Ok(ceil_positive(c.inv_tau_l * (40.0 * c.a_4l / lipschitz).ln()))
}

/// Smallest integer `S ≥ (1/τ_{κ_cvx}) log(8 A (κ_cvx + L) / κ_cvx²)`, the
/// `k`-independent part of the extrapolation budget. `A` is the tabulated
/// `A_{4L}`, an upper bound on `A_{κ_cvx}` since `A_κ` grows with `κ`. The
/// `(k+1)²` factor is left to the run-time `log(k+1)` multiplier.
pub fn budget_s(method: Method, lipschitz: f64, n: usize) -> Result<usize> {
    let c = method_constants(method, lipschitz, n)?;
    let kc = c.kappa_cvx;
    let arg = 8.0 * c.a_4l * (kc + lipschitz) / (kc * kc);
    Ok(ceil_positive(c.inv_tau_cvx * arg.ln()))
}

fn ceil_positive(v: f64) -> usize {
    (v.ceil() as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_descent_t() {
        assert_eq!((2.0 * 320f64.ln()).ceil(), 12.0);
        assert_eq!(budget_t(Method::Gd, 1.0, 1).unwrap(), 12);
        assert_eq!(budget_t(Method::Gd, 7.5, 40).unwrap(), 12);
    }

    #[test]
    fn svrg_t() {
        assert_eq!(budget_t(Method::Svrg, 2.0, 100).unwrap(), 589);
        assert_eq!(budget_t(Method::Svrg, 1.0, 100).unwrap(), (102.0 * 320f64.ln()).ceil() as usize);
    }

    #[test]
    fn saga_t() {
        let n = 10;
        let expect = (40.0 * (320.0 * n as f64).ln()).ceil() as usize;
        assert_eq!(budget_t(Method::Saga, 1.0, n).unwrap(), expect);
    }

    #[test]
    fn s_budgets() {
        // GD: κ_cvx = L, A = 8L → 2 log(8·8L·2L/L²) = 2 log 128.
        assert_eq!(budget_s(Method::Gd, 3.0, 5).unwrap(), (2.0 * 128f64.ln()).ceil() as usize);
        let s = budget_s(Method::Svrg, 2.0, 100).unwrap();
        let kc = 2.0 / 99.0;
        let expect = (200.0_f64 * (8.0_f64 * 16.0 * (kc + 2.0) / (kc * kc)).ln()).ceil() as usize;
        assert_eq!(s, expect);
    }
}
