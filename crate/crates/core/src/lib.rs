//! Feature attribution for black-box functions.
//!
//! Shapley values are computed against interchangeable value functions:
//! the marginal (interventional) expectation `E[f(x_T, X_rest)]` and the
//! observational conditional expectation `E[f(x_T, X_rest) | X_T = x_T]`.
//! The two differ in whether a feature the model ignores can still receive
//! attribution. Integrated gradients and a property verifier round out the
//! toolkit.

pub mod coalition;
pub mod data;
pub mod error;
pub mod intgrad;
pub mod linalg;
pub mod model;
pub mod rng;
pub mod shapley;
pub mod valuefn;

pub use coalition::Coalition;
pub use data::{DiscreteDistribution, GaussianSpec, SampleMatrix};
pub use error::{Error, ErrorKind, Result};
pub use model::{Expr, LinearModel, Model};
pub use shapley::{AttributionResult, CoalitionMode};
pub use valuefn::{CoalitionValueTable, ValueFunctionSpec};
