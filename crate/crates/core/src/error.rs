use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("zero successes at threshold {threshold} ({trials} trials); the threshold is too deep for the sample budget")]
    ZeroCount { threshold: f64, trials: u64 },

    #[error("design is degenerate: {0}")]
    DegenerateDesign(String),

    #[error(
        "quadrature did not converge: estimated error {achieved:e} exceeds tolerance {tolerance:e}"
    )]
    Quadrature { achieved: f64, tolerance: f64 },

    #[error("rejection sampler accepted {accepted} of {wanted} after {attempts} attempts")]
    AttemptBudget {
        attempts: u64,
        accepted: u64,
        wanted: u64,
    },

    #[error("worker pool: {0}")]
    Workers(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Numerical failures, as opposed to rejected input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ZeroCount { .. }
                | Error::DegenerateDesign(_)
                | Error::Quadrature { .. }
                | Error::AttemptBudget { .. }
        )
    }
}
