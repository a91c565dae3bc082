use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuinError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("premium rates are equal after normalization (c1 = c2 = {0}); barrier lines are parallel and t* is undefined")]
    ParallelLines(f64),

    #[error("peak constants A_i are undefined at t* = {0}; they require t* > 0")]
    UndefinedPeakConstant(f64),

    #[error("{which} constant required for this case; {hint}")]
    ConstantRequired { which: &'static str, hint: &'static str },

    #[error("only the logarithmic rate is available in regime {0}; use log_rate_and")]
    OnlyLogRate(String),

    #[error("regime {regime} is not supported here: {reason}")]
    UnsupportedRegime { regime: String, reason: String },

    #[error("beta = {0} <= 1: the defining expectation diverges (non-integrable)")]
    NonIntegrable(f64),

    #[error("covariance matrix is not numerically positive definite (failing pivot {pivot})")]
    Factorization { pivot: usize },

    #[error("grid of {n} points exceeds the dense factorization limit of {limit}")]
    GridTooLarge { n: usize, limit: usize },

    #[error("circulant embedding has a negative eigenvalue {min} (max {max})")]
    NegativeEmbedding { min: f64, max: f64 },
}

pub type Result<T> = std::result::Result<T, RuinError>;

impl RuinError {
    /// True for errors caused by bad user input rather than numerical trouble.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            RuinError::InvalidParameter(_)
                | RuinError::Domain(_)
                | RuinError::ParallelLines(_)
                | RuinError::UndefinedPeakConstant(_)
                | RuinError::ConstantRequired { .. }
                | RuinError::OnlyLogRate(_)
                | RuinError::UnsupportedRegime { .. }
                | RuinError::NonIntegrable(_)
                | RuinError::GridTooLarge { .. }
        )
    }
}
