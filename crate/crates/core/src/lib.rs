//! Exact marginal distributions of every ordered eigenvalue of the Laguerre
//! and Jacobi β-ensembles, together with derived fixed-trace and conductance
//! distributions, generating-function zeros and independent cross-checks.

pub mod crosschecks;
pub mod error;
pub mod fixedtrace;
pub mod gfzeros;
pub mod marginals;
pub mod recurrence;
pub mod scalar;
pub mod serial;
pub mod symfunc;

pub use error::{Error, Result};
pub use scalar::{ExactScalar, Q};
