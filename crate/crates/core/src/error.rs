use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A bound or kernel was evaluated outside the range where it is defined.
    #[error("{name} requires {requirement}, got {value}")]
    Domain {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("invalid integration interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },

    /// The subdivision budget ran out before the error estimate met the
    /// tolerance. The best available estimate is carried along.
    #[error(
        "quadrature did not converge: value {value:e}, error estimate {abs_error:e} \
         after {evaluations} evaluations"
    )]
    NonConvergence {
        value: f64,
        abs_error: f64,
        evaluations: usize,
    },
}

impl Error {
    pub fn is_non_convergence(&self) -> bool {
        matches!(self, Error::NonConvergence { .. })
    }
}
