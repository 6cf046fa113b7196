//! Command-line surface: single-instance explanations, the linear
//! ground-truth experiments and the property suites.

pub mod error;
pub mod experiment;
pub mod explain;
pub mod verify;

pub use error::{CliError, CliResult};
