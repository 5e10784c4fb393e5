//! Turns a [`ProblemSpec`] into an objective and a starting point.

use std::fs::File;
use std::io::BufReader;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use catalyst_core::data::{
    generate_classification, generate_patches, generate_quadratic, parse_libsvm, ClassificationSpec, Dataset,
    QuadraticSpec,
};
use catalyst_core::problems::{estimate_lipschitz_dictionary, estimate_lipschitz_nn, DictionaryProblem, LogisticProblem, TwoLayerNet};
use catalyst_core::prox::{Ball, Zero, L1};
use catalyst_core::{CompositeObjective, Regularizer};

use crate::config::{DataSource, ExperimentConfig, ProblemSpec, StartSpec};
use crate::BenchError;

/// A ready-to-run instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub objective: CompositeObjective,
    pub x0: Vec<f64>,
}

impl Instance {
    pub fn n(&self) -> usize {
        self.objective.smooth().n_components()
    }

    pub fn lipschitz(&self) -> f64 {
        use catalyst_core::Composite;
        self.objective.lipschitz()
    }
}

fn cfg_err(e: impl std::fmt::Display) -> BenchError {
    BenchError::Config(e.to_string())
}

pub fn load_dataset(src: &DataSource) -> Result<Dataset, BenchError> {
    match src {
        DataSource::File { path, n_features } => {
            let f = File::open(path).map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))?;
            parse_libsvm(BufReader::new(f), *n_features)
                .map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))
        }
        DataSource::Synthetic { samples, features, decay, flip, seed } => generate_classification(&ClassificationSpec {
            samples: *samples,
            features: *features,
            decay: *decay,
            flip: *flip,
            seed: *seed,
        })
        .map_err(cfg_err),
    }
}

/// Builds the objective and the starting point. The experiment seed only
/// affects random starts; data generation uses the problem's own seed.
pub fn build(cfg: &ExperimentConfig) -> Result<Instance, BenchError> {
    let (mut objective, natural_x0) = match &cfg.problem {
        ProblemSpec::Quadratic { dim, lipschitz, rho, components, radius, l1, seed } => {
            let spec = QuadraticSpec::new(*dim, *lipschitz, *rho, *seed).with_components(*components);
            let q = generate_quadratic(&spec).map_err(cfg_err)?;
            let reg: Arc<dyn Regularizer> = match (radius, *l1 > 0.0) {
                (Some(_), true) => return Err(BenchError::Config("quadratic takes `radius` or `l1`, not both".into())),
                (Some(r), false) if *r > 0.0 => Arc::new(Ball { radius: *r }),
                (Some(r), false) => return Err(BenchError::Config(format!("radius must be positive, got {r}"))),
                (None, true) => Arc::new(L1 { lambda: *l1 }),
                (None, false) => {
                    if *rho > 0.0 {
                        return Err(BenchError::Config(
                            "a weakly convex quadratic is unbounded below; set `radius`".into(),
                        ));
                    }
                    Arc::new(Zero)
                }
            };
            (q.objective(reg).map_err(cfg_err)?, vec![0.0; *dim])
        }
        ProblemSpec::Logistic { data, l2, l1 } => {
            let d = Arc::new(load_dataset(data)?);
            let p = d.n_features;
            let reg: Arc<dyn Regularizer> = if *l1 > 0.0 { Arc::new(L1 { lambda: *l1 }) } else { Arc::new(Zero) };
            let obj = LogisticProblem::new(d, *l2).and_then(|l| l.objective(reg)).map_err(cfg_err)?;
            (obj, vec![0.0; p])
        }
        ProblemSpec::Dictionary { m, atoms, samples, lambda, mu, seed } => {
            let data = generate_patches(*m, *samples, *seed).map_err(cfg_err)?;
            let prob = DictionaryProblem::new(data, *atoms, *mu, *lambda).map_err(cfg_err)?;
            let d0 = prob.initial_dictionary();
            let l = estimate_lipschitz_dictionary(&prob, &d0).map_err(cfg_err)?;
            (prob.objective(l).map_err(cfg_err)?, d0)
        }
        ProblemSpec::TwoLayer { data, hidden } => {
            let d = Arc::new(load_dataset(data)?);
            let net = TwoLayerNet::new(d, *hidden).map_err(cfg_err)?;
            let (l1, l2) = estimate_lipschitz_nn(&net, cfg.seed).map_err(cfg_err)?;
            let w0 = net.init_weights(cfg.seed);
            (net.objective(l1.max(l2)).map_err(cfg_err)?, w0)
        }
    };
    if let Some(l) = cfg.lipschitz_override {
        if !(l > 0.0 && l.is_finite()) {
            return Err(BenchError::Config(format!("lipschitz_override must be positive, got {l}")));
        }
        objective = objective.with_lipschitz(l);
    }
    let p = natural_x0.len();
    // The origin is stationary for the generated quadratics, so they start
    // from a random point unless told otherwise.
    let start = match (cfg.start, &cfg.problem) {
        (StartSpec::Default, ProblemSpec::Quadratic { .. }) => StartSpec::Random { scale: 1.0 },
        (s, _) => s,
    };
    let x0 = match start {
        StartSpec::Default => natural_x0,
        StartSpec::Zeros => vec![0.0; p],
        StartSpec::Random { scale } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let raw: Vec<f64> = (0..p).map(|_| scale * rng.random_range(-1.0..=1.0)).collect();
            if objective.regularizer().value(&raw).is_finite() {
                raw
            } else {
                // Outside dom ψ, which only happens for indicators: project.
                let mut out = vec![0.0; p];
                objective.regularizer().prox(1.0, &raw, &mut out);
                out
            }
        }
    };
    Ok(Instance { objective, x0 })
}
