//! Composite nonconvex minimization with proximal-point acceleration.
//!
//! The crate is organised around a finite-sum composite objective
//! `f = (1/n) Σ f_i + ψ` ([`CompositeObjective`]) and the quadratically
//! perturbed subproblems `f(·) + (κ/2)‖· − y‖²` ([`ProxSubproblem`]) that the
//! outer scheme in [`catalyst`] solves approximately with one of the inner
//! methods in [`solvers`].
//!
//! - [`objective`]: oracles, subproblems and evaluation counters.
//! - [`prox`]: nonsmooth regularizers and their proximal operators.
//! - [`stationarity`]: prox-gradient steps and stationarity measures.
//! - [`solvers`]: gradient descent, prox-SVRG and SAGA.
//! - [`catalyst`]: the accelerated outer loop and κ adaptation.
//! - [`problems`]: quadratics, logistic regression, dictionary learning and a
//!   two-layer network.
//! - [`data`]: libsvm parsing and synthetic generators.

pub mod catalyst;
pub mod data;
mod error;
pub mod linalg;
pub mod objective;
pub mod problems;
pub mod prox;
pub mod solvers;
pub mod stationarity;

pub use error::{Error, Result};
pub use objective::{Composite, CompositeObjective, Counters, ProxSubproblem, SmoothSum};
pub use prox::Regularizer;
pub use stationarity::StationarityReport;
