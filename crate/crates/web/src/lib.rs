//! Browser bindings for three small interactive views:
//!
//! - the momentum sequence and its envelope,
//! - the accelerated proximal-point iterates on a 2-D weakly convex
//!   quadratic restricted to a disk, with κ adaptation,
//! - the κ chosen by a single adaptation call as the inner budget varies.
//!
//! Everything returns flat `Vec<f64>` buffers (typed arrays on the JS side)
//! so the page can draw without further glue.

use std::sync::Arc;

use catalyst_core::catalyst::{alpha_next, run_catalyst, AutoAdapt, CatalystConfig, Mode, Winner};
use catalyst_core::objective::Counters;
use catalyst_core::problems::QuadraticProblem;
use catalyst_core::prox::Ball;
use catalyst_core::solvers::{SeedStream, SolverKind};
use catalyst_core::CompositeObjective;
use nalgebra::{Matrix2, Rotation2};
use wasm_bindgen::prelude::*;

/// `[α_k, √2/(k+2), 2/(k+1)]` for `k = 1..=count`, row by row.
#[wasm_bindgen]
pub fn alpha_envelope(count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(3 * count);
    let mut alpha = 1.0;
    for k in 1..=count {
        let kf = k as f64;
        out.extend([alpha, 2f64.sqrt() / (kf + 2.0), 2.0 / (kf + 1.0)]);
        alpha = alpha_next(alpha).unwrap_or(alpha);
    }
    out
}

/// A 2-D quadratic `½xᵀQx + bᵀx` with eigenvalues `{−ρ, L}` along axes
/// rotated by `angle`, restricted to the disk of radius `radius`.
#[wasm_bindgen]
#[derive(Debug, Clone, Copy)]
pub struct Landscape {
    rho: f64,
    lipschitz: f64,
    angle: f64,
    radius: f64,
    tilt: f64,
}

#[wasm_bindgen]
impl Landscape {
    #[wasm_bindgen(constructor)]
    pub fn new(rho: f64, lipschitz: f64, angle: f64, radius: f64, tilt: f64) -> Result<Landscape, String> {
        if !(lipschitz > 0.0 && (0.0..=lipschitz).contains(&rho) && radius > 0.0 && tilt.is_finite()) {
            return Err("need L > 0, 0 ≤ ρ ≤ L and a positive radius".into());
        }
        Ok(Landscape { rho, lipschitz, angle, radius, tilt })
    }

    fn matrix(&self) -> Matrix2<f64> {
        let r = Rotation2::new(self.angle).into_inner();
        r * Matrix2::new(-self.rho, 0.0, 0.0, self.lipschitz) * r.transpose()
    }

    fn objective(&self) -> CompositeObjective {
        let q = self.matrix();
        let b = vec![self.tilt, 0.5 * self.tilt];
        let prob = QuadraticProblem::new(nalgebra::DMatrix::from_column_slice(2, 2, q.as_slice()), b)
            .expect("2 × 2 symmetric matrix");
        prob.objective(Arc::new(Ball { radius: self.radius })).expect("valid quadratic")
    }

    /// Smooth part on an `n × n` grid over `[−extent, extent]²`, row-major
    /// from the top-left corner; points outside the disk are NaN.
    pub fn grid(&self, n: usize, extent: f64) -> Vec<f64> {
        let obj = self.objective();
        let mut out = Vec::with_capacity(n * n);
        let step = if n > 1 { 2.0 * extent / (n - 1) as f64 } else { 0.0 };
        for i in 0..n {
            let y = extent - i as f64 * step;
            for j in 0..n {
                let x = -extent + j as f64 * step;
                let v = obj.value_uncounted(&[x, y]);
                out.push(if v.is_finite() { v } else { f64::NAN });
            }
        }
        out
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        self.objective().value_uncounted(&[x, y])
    }

    /// Runs the outer loop from `(x, y)` with gradient-descent inner solves.
    pub fn run(&self, x: f64, y: f64, kappa0: f64, inner: usize, iterations: usize, adaptive: bool) -> Trajectory {
        let obj = self.objective();
        let mut start = [x, y];
        let norm = x.hypot(y);
        if norm > self.radius {
            start = [x * self.radius / norm, y * self.radius / norm];
        }
        let mut cfg = CatalystConfig::new(kappa0, kappa0, inner.max(1), inner.max(1));
        cfg.mode = if adaptive { Mode::Auto } else { Mode::Basic };
        cfg.max_outer = iterations;
        cfg.eps = 1e-9;
        cfg.record_points = true;
        let (run, error) = match run_catalyst(&obj, &start, &cfg, &SolverKind::gd()) {
            Ok(r) => (r, None),
            Err(a) => (a.partial, Some(a.error.to_string())),
        };
        let mut t = Trajectory {
            iterates: start.to_vec(),
            prox: Vec::new(),
            accel: Vec::new(),
            values: vec![obj.value_uncounted(&start)],
            kappas: Vec::new(),
            winners: Vec::new(),
            error,
        };
        for rec in &run.trace {
            let p = rec.points.as_ref().expect("points were requested");
            t.iterates.extend(&p.iterate);
            t.prox.extend(&p.prox);
            t.accel.extend(&p.accel);
            t.values.push(rec.fval);
            t.kappas.push(rec.kappa);
            t.winners.push(match rec.winner {
                Winner::Prox => 0,
                Winner::Accel => 1,
                Winner::Kept => 2,
            });
        }
        t
    }

    /// κ returned by one adaptation call at `(x, y)` from `kappa0`, for each
    /// inner budget `1..=max_inner`. Failed calls are reported as NaN.
    pub fn adapted_kappa(&self, x: f64, y: f64, kappa0: f64, max_inner: usize) -> Vec<f64> {
        let obj = self.objective();
        let gd = SolverKind::gd();
        (1..=max_inner)
            .map(|t| {
                let mut ctr = Counters::default();
                AutoAdapt::new(&gd, t)
                    .run(&obj, &[x, y], kappa0, SeedStream::new(0, 0), &mut ctr)
                    .map(|o| o.kappa)
                    .unwrap_or(f64::NAN)
            })
            .collect()
    }
}

/// Output of [`Landscape::run`]. Point buffers are flat `[x, y, x, y, …]`.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct Trajectory {
    iterates: Vec<f64>,
    prox: Vec<f64>,
    accel: Vec<f64>,
    values: Vec<f64>,
    kappas: Vec<f64>,
    winners: Vec<u8>,
    error: Option<String>,
}

#[wasm_bindgen]
impl Trajectory {
    /// `x_0, x_1, …`
    pub fn iterates(&self) -> Vec<f64> {
        self.iterates.clone()
    }

    /// `x̄_1, x̄_2, …`
    pub fn prox_points(&self) -> Vec<f64> {
        self.prox.clone()
    }

    /// `x̃_1, x̃_2, …`
    pub fn accel_points(&self) -> Vec<f64> {
        self.accel.clone()
    }

    /// `f(x_0), f(x_1), …`
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }

    pub fn kappas(&self) -> Vec<f64> {
        self.kappas.clone()
    }

    /// 0 = proximal point kept, 1 = extrapolated point kept, 2 = neither.
    pub fn winners(&self) -> Vec<u8> {
        self.winners.clone()
    }

    pub fn error(&self) -> Option<String> {
        self.error.clone()
    }
}
