//! Front end for the `dicke` binary: single solves, γ-sweeps, the convergence
//! table, benchmarks and oracle checks.

pub mod check;
pub mod config;
pub mod error;
pub mod solve;
pub mod sweep;
pub mod table;

pub use error::{CliError, Result};
