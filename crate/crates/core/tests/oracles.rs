//! Brute-force and finite-difference oracles for the prox operators, the
//! problem gradients and the stationarity witness.

mod common;

use std::sync::Arc;

use catalyst_core::data::{generate_classification, generate_patches, generate_quadratic, ClassificationSpec, QuadraticSpec};
use catalyst_core::objective::{Composite, Counters, ProxSubproblem, SmoothSum};
use catalyst_core::problems::{estimate_lipschitz_dictionary, DictionaryProblem, LogisticProblem, QuadraticProblem, TwoLayerNet};
use catalyst_core::prox::{elastic_net_prox, project_columns, soft_threshold, Ball, ElasticNet, UnitColumns, Zero, L1};
use catalyst_core::solvers::warm_start;
use catalyst_core::stationarity::stationarity_residual;
use catalyst_core::Regularizer;
use common::*;
use nalgebra::DMatrix;
use rand::Rng;

/// Scalar prox of `λ|z| + (μ/2)z²` by grid search and golden refinement.
/// Values are compared as differences from a reference point, which keeps
/// the comparison free of cancellation near the minimum.
fn scalar_prox_oracle(v: f64, step: f64, mu: f64, lambda: f64) -> f64 {
    let phi = |z: f64| lambda * z.abs() + 0.5 * mu * z * z + (z - v).powi(2) / (2.0 * step);
    let coarse = grid_refine(phi, v - 4.0, v + 4.0, 4000);
    let r = coarse;
    let diff = |z: f64| {
        lambda * (z.abs() - r.abs()) + 0.5 * mu * (z - r) * (z + r) + (z - r) * (z + r - 2.0 * v) / (2.0 * step)
    };
    golden(diff, r - 1e-3, r + 1e-3, 1e-15)
}

#[test]
fn l1_and_elastic_net_prox_match_grid_oracle() {
    let mut rng = rng(11);
    for _ in 0..100 {
        let v: f64 = rng.random_range(-3.0..3.0);
        let step: f64 = rng.random_range(0.1..2.0);
        let lambda: f64 = rng.random_range(0.0..1.0);
        let mu: f64 = rng.random_range(0.0..2.0);

        let mut out = [0.0];
        L1 { lambda }.prox(step, &[v], &mut out);
        let oracle = scalar_prox_oracle(v, step, 0.0, lambda);
        assert!((out[0] - oracle).abs() < 1e-8, "L1: v={v} step={step} λ={lambda}: {} vs {oracle}", out[0]);
        assert!((soft_threshold(v, step * lambda) - oracle).abs() < 1e-8);

        ElasticNet { mu, lambda }.prox(step, &[v], &mut out);
        let oracle = scalar_prox_oracle(v, step, mu, lambda);
        assert!((out[0] - oracle).abs() < 1e-8, "elastic net: {} vs {oracle}", out[0]);
        assert!((elastic_net_prox(&[v], step, mu, lambda)[0] - oracle).abs() < 1e-8);
    }
}

#[test]
fn elastic_net_worked_examples() {
    assert_eq!(elastic_net_prox(&[1.0, -2.0], 1.0, 0.0, 0.0), vec![1.0, -2.0]);
    assert_eq!(elastic_net_prox(&[1.0], 1.0, 0.0, 0.25), vec![0.75]);
    let got = elastic_net_prox(&[1.0], 1.0, 1e-5, 0.25)[0];
    assert!((got - 0.7499925).abs() < 1e-7);
    assert!((got - scalar_prox_oracle(1.0, 1.0, 1e-5, 0.25)).abs() < 1e-10);
}

/// Euclidean projection of a 2-D point onto the disk of radius `r`, by a
/// polar grid followed by golden refinement (on the boundary circle, or
/// coordinatewise in the interior).
fn disk_projection_oracle(v: [f64; 2], r: f64) -> [f64; 2] {
    let sq = |z: [f64; 2]| (z[0] - v[0]).powi(2) + (z[1] - v[1]).powi(2);
    let (nr, nt) = (200, 720);
    let mut best = ([0.0, 0.0], sq([0.0, 0.0]), 0usize);
    for i in 0..=nr {
        let rad = r * i as f64 / nr as f64;
        for j in 0..nt {
            let t = std::f64::consts::TAU * j as f64 / nt as f64;
            let z = [rad * t.cos(), rad * t.sin()];
            let f = sq(z);
            if f < best.1 {
                best = (z, f, i);
            }
        }
    }
    let (mut zb, _, ib) = best;
    // Differences from the current reference point avoid cancellation; the
    // reference is re-centred after each pass so the bracket keeps shrinking.
    let diff = |z: [f64; 2], zb: [f64; 2]| {
        (z[0] - zb[0]) * (z[0] + zb[0] - 2.0 * v[0]) + (z[1] - zb[1]) * (z[1] + zb[1] - 2.0 * v[1])
    };
    if ib == nr {
        let mut t = zb[1].atan2(zb[0]);
        let mut dt = std::f64::consts::TAU / nt as f64;
        for _ in 0..3 {
            let t0 = t;
            // Boundary displacement written with half-angle products so it
            // stays accurate for nearby angles.
            let along = |s: f64| {
                let (h, m) = ((s - t0) / 2.0, (s + t0) / 2.0);
                let dz = [-2.0 * r * m.sin() * h.sin(), 2.0 * r * m.cos() * h.sin()];
                let z0 = [r * t0.cos(), r * t0.sin()];
                dz[0] * (2.0 * z0[0] + dz[0] - 2.0 * v[0]) + dz[1] * (2.0 * z0[1] + dz[1] - 2.0 * v[1])
            };
            t = golden(along, t - dt, t + dt, 1e-16);
            dt = 1e-6;
        }
        [r * t.cos(), r * t.sin()]
    } else {
        for _ in 0..3 {
            let reference = zb;
            let half = (r * r - zb[1] * zb[1]).max(0.0).sqrt();
            zb[0] = golden(|a| diff([a, reference[1]], reference), -half, half, 1e-16);
            let reference = zb;
            let half = (r * r - zb[0] * zb[0]).max(0.0).sqrt();
            zb[1] = golden(|b| diff([reference[0], b], reference), -half, half, 1e-16);
        }
        zb
    }
}

#[test]
fn ball_and_column_projections_match_grid_oracle() {
    let mut rng = rng(12);
    for _ in 0..100 {
        let v = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let radius: f64 = rng.random_range(0.3..2.0);
        let mut out = [0.0; 2];
        Ball { radius }.prox(1.0, &v, &mut out);
        let oracle = disk_projection_oracle(v, radius);
        assert!(
            (out[0] - oracle[0]).abs() < 1e-8 && (out[1] - oracle[1]).abs() < 1e-8,
            "v={v:?} r={radius}: {out:?} vs {oracle:?}"
        );
    }
    // Three 2-row columns at once.
    for _ in 0..20 {
        let d: Vec<f64> = (0..6).map(|_| rng.random_range(-2.0..2.0)).collect();
        let mut out = vec![0.0; 6];
        UnitColumns { rows: 2 }.prox(0.5, &d, &mut out);
        assert_eq!(out, project_columns(&d, 2));
        for c in 0..3 {
            let o = disk_projection_oracle([d[2 * c], d[2 * c + 1]], 1.0);
            assert!((out[2 * c] - o[0]).abs() < 1e-8 && (out[2 * c + 1] - o[1]).abs() < 1e-8);
        }
    }
}

#[test]
fn projection_examples() {
    let feasible = vec![0.6, 0.8, 0.1, 0.0];
    assert_eq!(project_columns(&feasible, 2), feasible);
    let out = project_columns(&[2.0, 0.0], 2);
    assert_eq!(out, vec![1.0, 0.0]);
    let col = [3.7 * 0.6, 3.7 * 0.8];
    let out = project_columns(&col, 2);
    assert!(((out[0] * out[0] + out[1] * out[1]).sqrt() - 1.0).abs() < 1e-12);
}

fn assert_fd_match(name: &str, smooth: &dyn SmoothSum, points: &[Vec<f64>], h: f64, tol: f64) {
    for x in points {
        let mut g = vec![0.0; x.len()];
        smooth.gradient(x, &mut g);
        let fd = fd_gradient(|z| smooth.value(z), x, h);
        let e = rel_err(&g, &fd);
        assert!(e < tol, "{name}: full gradient rel err {e}");

        let i = smooth.n_components() / 2;
        smooth.component_gradient(i, x, &mut g);
        let fd = fd_gradient(|z| smooth.component_value(i, z), x, h);
        let e = rel_err(&g, &fd);
        assert!(e < tol, "{name}: component gradient rel err {e}");
    }
}

#[test]
fn quadratic_gradients_match_finite_differences() {
    let q = generate_quadratic(&QuadraticSpec::new(6, 2.0, 1.0, 4).with_components(5)).unwrap();
    let mut rng = rng(13);
    let pts: Vec<Vec<f64>> = (0..10).map(|_| random_point(&mut rng, 6, 2.0)).collect();
    assert_fd_match("quadratic", &q, &pts, 1e-5, 1e-5);
}

#[test]
fn logistic_gradients_match_finite_differences() {
    let spec = ClassificationSpec { samples: 30, features: 5, decay: 0.8, flip: 0.1, seed: 3 };
    let prob = LogisticProblem::new(Arc::new(generate_classification(&spec).unwrap()), 0.1).unwrap();
    let mut rng = rng(14);
    let pts: Vec<Vec<f64>> = (0..10).map(|_| random_point(&mut rng, 5, 3.0)).collect();
    assert_fd_match("logistic", &prob, &pts, 1e-5, 1e-5);
}

#[test]
fn network_gradients_match_finite_differences() {
    let spec = ClassificationSpec { samples: 8, features: 3, decay: 1.0, flip: 0.0, seed: 5 };
    let net = TwoLayerNet::new(Arc::new(generate_classification(&spec).unwrap()), 5).unwrap();
    let pts: Vec<Vec<f64>> = (0..10).map(|s| net.init_weights(100 + s)).collect();
    assert_fd_match("two-layer net", &net, &pts, 1e-5, 1e-5);
}

#[test]
fn danskin_gradients_match_finite_differences() {
    let data = generate_patches(4, 6, 21).unwrap();
    let prob = DictionaryProblem::new(data, 3, 1e-5, 0.1).unwrap().with_inner_tolerance(1e-13, 100_000);
    let mut rng = rng(15);
    let pts: Vec<Vec<f64>> = (0..10)
        .map(|_| project_columns(&random_point(&mut rng, 12, 1.0), 4))
        .collect();
    assert_fd_match("dictionary", &prob, &pts, 1e-6, 1e-4);
}

#[test]
fn dictionary_values_independent_of_inner_start() {
    let data = generate_patches(16, 20, 2).unwrap();
    let prob = DictionaryProblem::new(data.clone(), 8, 1e-5, 0.25).unwrap();
    let d = prob.initial_dictionary();
    let mut rng = rng(16);
    for i in 0..20 {
        let a = prob.sparse_code(i, &d).unwrap();
        let start = random_point(&mut rng, 8, 1.0);
        let b = prob.sparse_code_from(i, &d, &start).unwrap();
        let value = |alpha: &[f64]| {
            let mut r: Vec<f64> = data.column(i).iter().copied().collect();
            for (col, c) in d.chunks(16).zip(alpha) {
                for (ri, dv) in r.iter_mut().zip(col) {
                    *ri -= c * dv;
                }
            }
            0.5 * r.iter().map(|v| v * v).sum::<f64>()
                + alpha.iter().map(|c| 0.5e-5 * c * c + 0.25 * c.abs()).sum::<f64>()
        };
        assert!((value(&a.coefficients) - value(&b.coefficients)).abs() < 1e-7);
        assert!((value(&a.coefficients) - prob.component_value_checked(i, &d).unwrap()).abs() < 1e-12);
    }
}

/// Sparse code by proximal gradient (ISTA) to high accuracy: a different
/// algorithm from the coordinate-descent solver under test.
fn ista_code(x: &[f64], d: &[f64], m: usize, mu: f64, lambda: f64) -> Vec<f64> {
    let p = d.len() / m;
    let dm = DMatrix::from_column_slice(m, p, d);
    let gram = dm.transpose() * &dm;
    let step = 1.0 / (gram.symmetric_eigenvalues().max() + mu);
    let xv = nalgebra::DVector::from_column_slice(x);
    let corr = dm.transpose() * xv;
    let mut a = nalgebra::DVector::zeros(p);
    for _ in 0..20_000 {
        let g = &gram * &a - &corr + &a * mu;
        let v: Vec<f64> = (&a - g * step).iter().copied().collect();
        a = nalgebra::DVector::from_vec(v.iter().map(|t| soft_threshold(*t, step * lambda)).collect());
    }
    a.iter().copied().collect()
}

#[test]
fn dictionary_lipschitz_estimate_matches_independent_solves() {
    let data = generate_patches(64, 40, 8).unwrap();
    let prob = DictionaryProblem::new(data.clone(), 16, 1e-5, 0.25).unwrap();
    let d0 = prob.initial_dictionary();
    let est = estimate_lipschitz_dictionary(&prob, &d0).unwrap();
    let oracle = (0..40)
        .map(|i| {
            let x: Vec<f64> = data.column(i).iter().copied().collect();
            ista_code(&x, &d0, 64, 1e-5, 0.25).iter().map(|a| a * a).sum::<f64>()
        })
        .fold(0.0, f64::max);
    assert!(est > 0.0);
    assert!((est - oracle).abs() < 1e-6 * oracle.max(1.0), "{est} vs {oracle}");

    let big_lambda = DictionaryProblem::new(data.columns(0, 1).into_owned(), 16, 1e-5, 1e3).unwrap();
    assert_eq!(estimate_lipschitz_dictionary(&big_lambda, &big_lambda.initial_dictionary()).unwrap(), 0.0);
}

#[test]
fn secant_inequality_is_tight_at_reported_rho() {
    let q = generate_quadratic(&QuadraticSpec::new(8, 2.0, 1.0, 6)).unwrap();
    let rho = q.weak_convexity();
    let eig = nalgebra::SymmetricEigen::new(q.matrix().clone());
    let imin = eig.eigenvalues.imin();
    let dir: Vec<f64> = eig.eigenvectors.column(imin).iter().copied().collect();
    let f = |x: &[f64]| q.value(x);
    let mut rng = rng(17);
    let mut violations_09 = 0;
    for s in 0..200 {
        let x = random_point(&mut rng, 8, 2.0);
        let y: Vec<f64> = if s % 2 == 0 {
            // Displacement along the most negative curvature direction.
            let t: f64 = rng.random_range(0.5..2.0);
            x.iter().zip(&dir).map(|(a, d)| a + t * d).collect()
        } else {
            random_point(&mut rng, 8, 2.0)
        };
        let lam: f64 = rng.random_range(0.05..0.95);
        let mix: Vec<f64> = x.iter().zip(&y).map(|(a, b)| lam * a + (1.0 - lam) * b).collect();
        let d2: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum();
        let lhs = f(&mix);
        let rhs = |r: f64| lam * f(&x) + (1.0 - lam) * f(&y) + 0.5 * r * lam * (1.0 - lam) * d2;
        assert!(lhs <= rhs(rho) + 1e-10);
        if lhs > rhs(0.9 * rho) + 1e-12 {
            violations_09 += 1;
        }

        // Hypomonotonicity of the gradient.
        let (mut gx, mut gy) = (vec![0.0; 8], vec![0.0; 8]);
        q.gradient(&x, &mut gx);
        q.gradient(&y, &mut gy);
        let inner: f64 = gx.iter().zip(&gy).zip(x.iter().zip(&y)).map(|((a, b), (c, d))| (a - b) * (c - d)).sum();
        assert!(inner >= -rho * d2 - 1e-10);
    }
    assert!(violations_09 > 0);
}

#[test]
fn quadratic_spectrum_constants() {
    let q = generate_quadratic(&QuadraticSpec::new(12, 3.0, 0.5, 1)).unwrap();
    let eig = nalgebra::SymmetricEigen::new(q.matrix().clone()).eigenvalues;
    assert!((q.lipschitz() - eig.iter().fold(0.0f64, |m, v| m.max(v.abs()))).abs() < 1e-10);
    assert!((q.weak_convexity() - (-eig.min()).max(0.0)).abs() < 1e-10);
    assert!((q.weak_convexity() - 0.5).abs() < 1e-10);
    assert!((q.lipschitz() - 3.0).abs() < 1e-10);
}

#[test]
fn warm_start_examples() {
    let mut ctr = Counters::default();
    let smooth = QuadraticProblem::diagonal(&[1.0], &[0.0]).unwrap().objective(Arc::new(Zero)).unwrap();
    let sub = ProxSubproblem::new(&smooth, &[3.0], 1.0).unwrap();
    assert_eq!(warm_start(&sub, &mut ctr).unwrap(), vec![3.0]);

    // f₀ ≡ 0 with L = 1 set explicitly, ψ = 0.25‖·‖₁.
    let l1 = QuadraticProblem::diagonal(&[0.0, 0.0], &[0.0, 0.0])
        .unwrap()
        .objective(Arc::new(L1 { lambda: 0.25 }))
        .unwrap()
        .with_lipschitz(1.0);
    let sub = ProxSubproblem::new(&l1, &[1.0, 0.1], 1.0).unwrap();
    let z = warm_start(&sub, &mut ctr).unwrap();
    assert!((z[0] - 0.875).abs() < 1e-15 && z[1] == 0.0);

    let ball = QuadraticProblem::diagonal(&[1.0, 1.0], &[0.0, 0.0])
        .unwrap()
        .objective(Arc::new(Ball { radius: 1.0 }))
        .unwrap();
    let sub = ProxSubproblem::new(&ball, &[3.0, 0.0], 1.0).unwrap();
    assert_eq!(warm_start(&sub, &mut ctr).unwrap(), vec![1.0, 0.0]);
}

#[test]
fn witness_lies_in_the_subdifferential() {
    // h = ½xᵀQx + κ/2‖x − y‖² + λ‖x‖₁. The witness minus ∇s(z⁺) must be a
    // subgradient of λ‖·‖₁ at z⁺, checked coordinatewise.
    let lambda = 0.3;
    let q = generate_quadratic(&QuadraticSpec::new(6, 2.0, 0.5, 9)).unwrap();
    let qm = q.clone();
    let obj = q.objective(Arc::new(L1 { lambda })).unwrap();
    let mut rng = rng(18);
    for _ in 0..10 {
        let y = random_point(&mut rng, 6, 1.0);
        let z = random_point(&mut rng, 6, 1.0);
        let sub = ProxSubproblem::new(&obj, &y, 1.5).unwrap();
        let mut ctr = Counters::default();
        let rep = stationarity_residual(&sub, &z, &mut ctr).unwrap();
        let eta = rep.step;
        let zp = &rep.point;
        let grad_s = |x: &[f64]| {
            let mut g = vec![0.0; 6];
            qm.gradient(x, &mut g);
            g.iter().zip(x).zip(&y).map(|((gi, xi), yi)| gi + 1.5 * (xi - yi)).collect::<Vec<f64>>()
        };
        let (gz, gzp) = (grad_s(&z), grad_s(zp));
        let xi: Vec<f64> = (0..6).map(|j| (z[j] - zp[j]) / eta + gzp[j] - gz[j]).collect();
        let wn = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((wn - rep.witness_norm).abs() < 1e-12);
        for j in 0..6 {
            let sub_l1 = xi[j] - gzp[j];
            if zp[j] != 0.0 {
                assert!((sub_l1 - lambda * zp[j].signum()).abs() < 1e-10);
            } else {
                assert!(sub_l1.abs() <= lambda + 1e-10);
            }
        }
        assert_eq!(ctr.grad_evals, 2 * sub.n_components() as u64);
    }
}
