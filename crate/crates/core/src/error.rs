use thiserror::Error;

/// Errors raised by constructions, quadrature and the concentration pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("frequency overflow: {0}")]
    Overflow(String),
    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),
    #[error("frequency collision at {frequency}: product is not idempotent")]
    Collision { frequency: u64 },
    #[error("{a} is not coprime to {m}")]
    NotCoprime { a: i64, m: u64 },
    #[error("degree {degree} too large for modulus {modulus}")]
    DegreeTooLarge { degree: u64, modulus: u64 },
    #[error("polynomial vanishes on the whole grid")]
    ZeroGridSum,
    #[error("continued fraction terminated after {terms} terms")]
    RationalInput { terms: usize },
    #[error("no admissible grid point found: {0}")]
    NotFound(String),
    #[error("illegal regime: {0}")]
    IllegalRegime(String),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("target ratio {target} unreachable; best achieved {best}")]
    TargetUnreachable { target: f64, best: f64 },
    #[error("gap violation: min gap {found} < required {required}")]
    GapViolation { found: u64, required: u64 },
    #[error("series diverges for exponent {0}")]
    Divergence(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-readable code, used in CLI error objects.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Overflow(_) => "Overflow",
            Error::NonConvergence(_) => "NonConvergence",
            Error::Collision { .. } => "Collision",
            Error::NotCoprime { .. } => "NotCoprime",
            Error::DegreeTooLarge { .. } => "DegreeTooLarge",
            Error::ZeroGridSum => "ZeroGridSum",
            Error::RationalInput { .. } => "RationalInput",
            Error::NotFound(_) => "NotFound",
            Error::IllegalRegime(_) => "IllegalRegime",
            Error::ResourceLimit(_) => "ResourceLimit",
            Error::TargetUnreachable { .. } => "TargetUnreachable",
            Error::GapViolation { .. } => "GapViolation",
            Error::Divergence(_) => "Divergence",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    /// Errors that reflect the mathematics of the request rather than a bug.
    pub fn is_domain_error(&self) -> bool {
        matches!(
            self,
            Error::IllegalRegime(_)
                | Error::NotFound(_)
                | Error::TargetUnreachable { .. }
                | Error::ResourceLimit(_)
                | Error::GapViolation { .. }
                | Error::Divergence(_)
                | Error::NotCoprime { .. }
                | Error::DegreeTooLarge { .. }
                | Error::ZeroGridSum
                | Error::Collision { .. }
                | Error::InvalidInput(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
