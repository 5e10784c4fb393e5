//! Experiment runner: parses flat `key = value` configurations, builds the
//! benchmark problems, runs plain or Catalyst-wrapped inner methods and
//! writes per-iteration CSV traces.

pub mod compare;
pub mod config;
pub mod problem;
pub mod run;

pub use compare::{run_all, thread_count, write_merged};
pub use config::{Budget, CatalystOptions, DataSource, ExperimentConfig, ProblemSpec, StartSpec, Wrapper};
pub use problem::{build, Instance};
pub use run::{run_experiment, run_instance, Row, RunOutput, CSV_HEADER};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl BenchError {
    /// Process exit code: 2 for configuration problems, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 2,
            BenchError::Runtime(_) | BenchError::Io(_) => 3,
        }
    }
}
