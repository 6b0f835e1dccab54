//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value violates its contract (tolerances, node counts,
    /// scheme weights, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Evaluation requested exactly at the kernel singularity.
    #[error("singular point: {0}")]
    Singularity(String),

    /// Adaptive quadrature ran out of depth before meeting its tolerance.
    /// Carries the partial value and the achieved error estimate.
    #[error("quadrature did not converge: partial value {partial}, error estimate {err_est} above tolerance {abs_tol}")]
    QuadratureNonConvergence {
        partial: f64,
        err_est: f64,
        abs_tol: f64,
    },

    /// A series evaluation exhausted its term budget.
    #[error("accuracy budget exhausted after {max_terms} terms (last term {last_term})")]
    BudgetExhausted { max_terms: usize, last_term: f64 },

    /// No retained radius is small enough to certify strict positivity at the
    /// requested frequency; the caller must deepen the series truncation.
    #[error("strictness certificate unavailable: {0}")]
    CertificateUnavailable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
