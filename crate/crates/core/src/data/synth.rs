//! Seeded synthetic data: image-like patches, quadratics with a prescribed
//! spectrum, and binary classification sets.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{Dataset, SparseRow};
use crate::problems::QuadraticProblem;
use crate::{Error, Result};

const LOW_FREQ_WAVES: usize = 4;
const PATCH_NOISE: f64 = 0.2;

/// `n` patches of dimension `m` (column-major `m × n`). Each column samples a
/// smooth random field on an `h × w` grid (`h·w = m`, `h` the largest divisor
/// of `m` not above `√m`), adds white noise, then is centered and scaled to
/// unit ℓ₂ norm.
pub fn generate_patches(m: usize, n: usize, seed: u64) -> Result<DMatrix<f64>> {
    if m < 2 || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "patches need m ≥ 2 and n ≥ 1 (got m = {m}, n = {n})"
        )));
    }
    let h = (1..=m).filter(|d| m % d == 0 && d * d <= m).max().unwrap_or(1);
    let w = m / h;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = DMatrix::zeros(m, n);
    for mut col in out.column_iter_mut() {
        let waves: Vec<[f64; 4]> = (0..LOW_FREQ_WAVES)
            .map(|_| {
                [
                    rng.random_range(-1.5..1.5),
                    rng.random_range(-1.5..1.5),
                    rng.random_range(0.0..std::f64::consts::TAU),
                    rng.sample::<f64, _>(StandardNormal),
                ]
            })
            .collect();
        for r in 0..h {
            for c in 0..w {
                let (u, v) = (r as f64 / h as f64, c as f64 / w as f64);
                let smooth: f64 = waves
                    .iter()
                    .map(|[fu, fv, phase, amp]| amp * (std::f64::consts::TAU * (fu * u + fv * v) + phase).sin())
                    .sum();
                let noise: f64 = rng.sample(StandardNormal);
                col[r * w + c] = smooth + PATCH_NOISE * noise;
            }
        }
        let mean = col.mean();
        col.add_scalar_mut(-mean);
        let nrm = col.norm();
        if nrm > 0.0 {
            col /= nrm;
        } else {
            col[0] = 1.0;
            col[1] = -1.0;
            col /= 2f64.sqrt();
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticSpec {
    pub dim: usize,
    pub components: usize,
    pub lipschitz: f64,
    pub weak_convexity: f64,
    /// Standard deviation of the (mean-zero) per-component linear shifts.
    pub shift_scale: f64,
    /// Random orthogonal conjugation; `false` keeps `Q` diagonal.
    pub rotate: bool,
    pub seed: u64,
}

impl QuadraticSpec {
    pub fn new(dim: usize, lipschitz: f64, weak_convexity: f64, seed: u64) -> Self {
        Self {
            dim,
            components: 1,
            lipschitz,
            weak_convexity,
            shift_scale: 1.0,
            rotate: true,
            seed,
        }
    }

    pub fn with_components(mut self, n: usize) -> Self {
        self.components = n;
        self
    }
}

/// Random quadratic whose spectrum spans `[−ρ, L]` with both endpoints
/// attained. The linear term is zero; components differ by centered random
/// linear shifts.
pub fn generate_quadratic(spec: &QuadraticSpec) -> Result<QuadraticProblem> {
    let QuadraticSpec { dim: p, components: n, lipschitz: l, weak_convexity: rho, .. } = *spec;
    if p < 2 || n == 0 {
        return Err(Error::InvalidParameter("quadratic needs p ≥ 2 and n ≥ 1".into()));
    }
    if !(l > 0.0 && (0.0..=l).contains(&rho)) {
        return Err(Error::InvalidParameter(format!(
            "need L > 0 and 0 ≤ ρ ≤ L (got L = {l}, ρ = {rho})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut eig: Vec<f64> = (0..p).map(|_| rng.random_range(-rho..=l)).collect();
    eig[0] = -rho;
    eig[p - 1] = l;

    let lambda = DMatrix::from_diagonal(&DVector::from_vec(eig));
    let q = if spec.rotate {
        let g = DMatrix::from_fn(p, p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let qr = g.qr();
        let mut u = qr.q();
        let r = qr.r();
        for j in 0..p {
            if r[(j, j)] < 0.0 {
                u.column_mut(j).neg_mut();
            }
        }
        let a = &u * lambda * u.transpose();
        (&a + a.transpose()) * 0.5
    } else {
        lambda
    };

    let shifts = (0..n)
        .map(|_| {
            (0..p)
                .map(|_| spec.shift_scale * rng.sample::<f64, _>(StandardNormal))
                .collect()
        })
        .collect();
    let base = QuadraticProblem::new(q, vec![0.0; p])?;
    if n == 1 {
        Ok(base)
    } else {
        base.with_component_shifts(shifts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassificationSpec {
    pub samples: usize,
    pub features: usize,
    /// Feature `j` has scale `decay^j` before row normalization.
    pub decay: f64,
    /// Probability of flipping each label.
    pub flip: f64,
    pub seed: u64,
}

/// Gaussian features with geometrically decaying scales, rows normalized to
/// unit norm, labels from a random linear separator with label noise.
pub fn generate_classification(spec: &ClassificationSpec) -> Result<Dataset> {
    let ClassificationSpec { samples, features, decay, flip, seed } = *spec;
    if samples == 0 || features == 0 || !(0.0..=1.0).contains(&flip) || !(decay > 0.0) {
        return Err(Error::InvalidParameter("invalid classification spec".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth: Vec<f64> = (0..features).map(|_| rng.sample(StandardNormal)).collect();
    let mut rows = Vec::with_capacity(samples);
    let mut labels = Vec::with_capacity(samples);
    for _ in 0..samples {
        let mut a: Vec<f64> = (0..features)
            .map(|j| decay.powi(j as i32) * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let nrm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nrm > 0.0 {
            a.iter_mut().for_each(|v| *v /= nrm);
        }
        let score: f64 = a.iter().zip(&truth).map(|(x, w)| x * w).sum();
        let mut label = if score >= 0.0 { 1.0 } else { -1.0 };
        if rng.random::<f64>() < flip {
            label = -label;
        }
        rows.push(SparseRow::from_dense(&a));
        labels.push(label);
    }
    Ok(Dataset { n_features: features, rows, labels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patches_are_centered_unit_columns() {
        let x = generate_patches(64, 30, 1).unwrap();
        for col in x.column_iter() {
            assert!(col.mean().abs() < 1e-12);
            assert!((col.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn patches_deterministic_in_seed() {
        let a = generate_patches(16, 10, 7).unwrap();
        assert_eq!(a, generate_patches(16, 10, 7).unwrap());
        assert_ne!(a, generate_patches(16, 10, 8).unwrap());
        assert!(generate_patches(1, 3, 0).is_err());
    }

    #[test]
    fn quadratic_spectrum_endpoints() {
        let q = generate_quadratic(&QuadraticSpec::new(10, 2.0, 1.0, 3)).unwrap();
        let s = q.spectrum();
        assert!((s[0] + 1.0).abs() < 1e-10);
        assert!((s[9] - 2.0).abs() < 1e-10);
        assert!((q.weak_convexity() - 1.0).abs() < 1e-10);

        let convex = generate_quadratic(&QuadraticSpec::new(5, 3.0, 0.0, 4)).unwrap();
        assert!(convex.spectrum()[0].abs() < 1e-10);

        let mut spec = QuadraticSpec::new(2, 2.0, 1.0, 0);
        spec.rotate = false;
        let q = generate_quadratic(&spec).unwrap();
        assert_eq!(q.spectrum(), &[-1.0, 2.0]);

        assert!(generate_quadratic(&QuadraticSpec::new(3, 1.0, 2.0, 0)).is_err());
    }

    #[test]
    fn quadratic_components() {
        let q = generate_quadratic(&QuadraticSpec::new(4, 1.0, 0.5, 9).with_components(7)).unwrap();
        use crate::objective::SmoothSum;
        assert_eq!(q.n_components(), 7);
        assert_eq!(q.linear(), &[0.0; 4]);
    }

    #[test]
    fn classification_rows_unit_norm() {
        let spec = ClassificationSpec { samples: 50, features: 6, decay: 0.7, flip: 0.1, seed: 2 };
        let d = generate_classification(&spec).unwrap();
        assert_eq!(d.len(), 50);
        assert!(d.rows.iter().all(|r| (r.norm_sq() - 1.0).abs() < 1e-12));
        assert!(d.labels.iter().all(|&l| l == 1.0 || l == -1.0));
        assert_eq!(d, generate_classification(&spec).unwrap());
    }
}
