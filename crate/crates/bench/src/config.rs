//! Flat `key = value` experiment files. `#` starts a comment; blank lines are
//! ignored; every key may appear at most once.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use catalyst_core::solvers::Method;

use crate::BenchError;

/// Data for logistic regression and the two-layer network.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    File { path: PathBuf, n_features: Option<usize> },
    Synthetic { samples: usize, features: usize, decay: f64, flip: f64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    /// Random quadratic with spectrum in `[−ρ, L]`, optionally restricted to
    /// a centred ball and/or ℓ₁-regularized.
    Quadratic {
        dim: usize,
        lipschitz: f64,
        rho: f64,
        components: usize,
        radius: Option<f64>,
        l1: f64,
        seed: u64,
    },
    Logistic { data: DataSource, l2: f64, l1: f64 },
    Dictionary { m: usize, atoms: usize, samples: usize, lambda: f64, mu: f64, seed: u64 },
    TwoLayer { data: DataSource, hidden: usize },
}

/// What drives the inner method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wrapper {
    /// Plain method with the convex stepsize `1/(2L)` (`1/L` for GD).
    Convex,
    /// Plain method with the nonconvex stepsize `1/(L n^{2/3})` (`1/L` for GD).
    Nonconvex,
    CatalystBasic,
    CatalystAuto,
}

impl Wrapper {
    pub fn is_catalyst(self) -> bool {
        matches!(self, Wrapper::CatalystBasic | Wrapper::CatalystAuto)
    }
}

impl FromStr for Wrapper {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "convex" | "none-convex-stepsize" => Ok(Wrapper::Convex),
            "nonconvex" | "none-nonconvex-stepsize" => Ok(Wrapper::Nonconvex),
            "catalyst-basic" => Ok(Wrapper::CatalystBasic),
            "catalyst-auto" => Ok(Wrapper::CatalystAuto),
            other => Err(format!("unknown wrapper `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StartSpec {
    Zeros,
    /// Uniform in `[−scale, scale]` per coordinate (projected onto the
    /// feasible set by the problem builder when needed).
    Random { scale: f64 },
    /// The problem's natural start (initial dictionary, network init).
    Default,
}

/// Catalyst settings; unset fields take the practical defaults
/// `κ₀ = κ_cvx = 2L/n`, `T = S = n`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CatalystOptions {
    pub kappa0: Option<f64>,
    pub kappa_cvx: Option<f64>,
    pub t: Option<usize>,
    pub s: Option<usize>,
    pub use_logk: bool,
    pub max_outer: Option<usize>,
    pub lazy_prox: bool,
    pub inner_tol: Option<f64>,
}

/// Gradient-evaluation budget, absolute or in passes over the data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget {
    Evals(u64),
    Passes(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub label: Option<String>,
    pub problem: ProblemSpec,
    pub method: Method,
    pub wrapper: Wrapper,
    pub catalyst: CatalystOptions,
    pub budget: Budget,
    pub eps: f64,
    pub seed: u64,
    pub start: StartSpec,
    pub lipschitz_override: Option<f64>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            BenchError::Config(m) => BenchError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        if cfg.label.is_none() {
            cfg.label = path.file_stem().map(|s| s.to_string_lossy().into_owned());
        }
        // Relative data paths resolve against the config file's directory.
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |src: &mut DataSource| {
            if let DataSource::File { path: p, .. } = src {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        };
        match &mut cfg.problem {
            ProblemSpec::Logistic { data, .. } | ProblemSpec::TwoLayer { data, .. } => fix(data),
            _ => {}
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let mut kv = Pairs::read(text)?;
        let cfg = Self::from_pairs(&mut kv)?;
        kv.finish()?;
        Ok(cfg)
    }

    fn from_pairs(kv: &mut Pairs) -> Result<Self, BenchError> {
        let problem = match kv.required("problem")?.as_str() {
            "quadratic" => ProblemSpec::Quadratic {
                dim: kv.get("dim")?.unwrap_or(20),
                lipschitz: kv.get("lipschitz")?.unwrap_or(2.0),
                rho: kv.get("rho")?.unwrap_or(0.0),
                components: kv.get("components")?.unwrap_or(1),
                radius: kv.get("radius")?,
                l1: kv.get("l1")?.unwrap_or(0.0),
                seed: kv.get("data_seed")?.unwrap_or(0),
            },
            "logistic" => ProblemSpec::Logistic {
                data: data_source(kv)?,
                l2: kv.get("l2")?.unwrap_or(0.0),
                l1: kv.get("l1")?.unwrap_or(0.0),
            },
            "dictionary" => ProblemSpec::Dictionary {
                m: kv.get("m")?.unwrap_or(16),
                atoms: kv.get("atoms")?.unwrap_or(8),
                samples: kv.get("samples")?.unwrap_or(500),
                lambda: kv.get("lambda")?.unwrap_or(0.25),
                mu: kv.get("mu")?.unwrap_or(1e-5),
                seed: kv.get("data_seed")?.unwrap_or(0),
            },
            "twolayer" | "nn" => ProblemSpec::TwoLayer {
                data: data_source(kv)?,
                hidden: kv.get("hidden")?.unwrap_or(10),
            },
            other => return Err(BenchError::Config(format!("unknown problem `{other}`"))),
        };
        let method: Method = kv.get("method")?.unwrap_or(Method::Svrg);
        let wrapper: Wrapper = kv.get("wrapper")?.unwrap_or(Wrapper::CatalystAuto);
        let budget = match (kv.get::<u64>("budget")?, kv.get::<f64>("budget_passes")?) {
            (Some(_), Some(_)) => {
                return Err(BenchError::Config("set only one of `budget` and `budget_passes`".into()))
            }
            (Some(b), None) => Budget::Evals(b),
            (None, Some(p)) if p >= 0.0 && p.is_finite() => Budget::Passes(p),
            (None, Some(p)) => return Err(BenchError::Config(format!("invalid budget_passes {p}"))),
            (None, None) => Budget::Passes(50.0),
        };
        let start = match kv.get::<String>("x0")?.as_deref() {
            None | Some("default") => StartSpec::Default,
            Some("zeros") => StartSpec::Zeros,
            Some("random") => StartSpec::Random { scale: kv.get("x0_scale")?.unwrap_or(1.0) },
            Some(other) => return Err(BenchError::Config(format!("unknown x0 `{other}`"))),
        };
        let catalyst = CatalystOptions {
            kappa0: kv.get("kappa0")?,
            kappa_cvx: kv.get("kappa_cvx")?,
            t: kv.get("t")?,
            s: kv.get("s")?,
            use_logk: kv.get("use_logk")?.unwrap_or(false),
            max_outer: kv.get("max_outer")?,
            lazy_prox: kv.get("lazy_prox")?.unwrap_or(false),
            inner_tol: kv.get("inner_tol")?,
        };
        let eps: f64 = kv.get("eps")?.unwrap_or(0.0);
        if !(eps >= 0.0) {
            return Err(BenchError::Config(format!("eps must be ≥ 0, got {eps}")));
        }
        Ok(Self {
            label: kv.get("label")?,
            problem,
            method,
            wrapper,
            catalyst,
            budget,
            eps,
            seed: kv.get("seed")?.unwrap_or(0),
            start,
            lipschitz_override: kv.get("lipschitz_override")?,
            out: kv.get::<String>("out")?.map(PathBuf::from),
        })
    }
}

fn data_source(kv: &mut Pairs) -> Result<DataSource, BenchError> {
    if let Some(path) = kv.get::<String>("data")? {
        return Ok(DataSource::File { path: PathBuf::from(path), n_features: kv.get("n_features")? });
    }
    Ok(DataSource::Synthetic {
        samples: kv.get("samples")?.unwrap_or(1000),
        features: kv.get("features")?.unwrap_or(50),
        decay: kv.get("decay")?.unwrap_or(1.0),
        flip: kv.get("flip")?.unwrap_or(0.0),
        seed: kv.get("data_seed")?.unwrap_or(0),
    })
}

/// Parsed pairs; keys are removed as they are read so leftovers can be
/// reported as unknown.
struct Pairs {
    map: BTreeMap<String, (usize, String)>,
}

impl Pairs {
    fn read(text: &str) -> Result<Self, BenchError> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| BenchError::Config(format!("line {}: expected key = value", i + 1)))?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if k.is_empty() {
                return Err(BenchError::Config(format!("line {}: empty key", i + 1)));
            }
            if map.insert(k.clone(), (i + 1, v)).is_some() {
                return Err(BenchError::Config(format!("line {}: duplicate key `{k}`", i + 1)));
            }
        }
        Ok(Self { map })
    }

    fn get<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, BenchError>
    where
        T::Err: std::fmt::Display,
    {
        match self.map.remove(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|e| BenchError::Config(format!("line {line}: bad value for `{key}`: {e}"))),
        }
    }

    fn required(&mut self, key: &str) -> Result<String, BenchError> {
        self.get(key)?.ok_or_else(|| BenchError::Config(format!("missing key `{key}`")))
    }

    fn finish(self) -> Result<(), BenchError> {
        match self.map.into_iter().next() {
            None => Ok(()),
            Some((k, (line, _))) => Err(BenchError::Config(format!("line {line}: unknown key `{k}`"))),
        }
    }
}
