use thiserror::Error;

/// Errors raised by state constructors, measurement builders and calculators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("vector is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("operator is not positive semi-definite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("trace is not one (got {0})")]
    InvalidTrace(f64),

    #[error("operator is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("elements do not resolve the identity (max residual {0:e})")]
    Incomplete(f64),

    #[error("{what} = {value} is outside {range}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid subsystem selector: {0}")]
    InvalidSelector(String),

    #[error("outcome is impossible for this state (probability {0:e})")]
    ImpossibleOutcome(f64),

    #[error("states are linearly dependent (Gram eigenvalue ratio {0:e})")]
    LinearlyDependent(f64),

    #[error("Schmidt spectrum is rank deficient (smallest coefficient {0:e})")]
    RankDeficient(f64),

    #[error("requested success probabilities are infeasible: inconclusive element has eigenvalue {min_eigenvalue:e}")]
    Infeasible { min_eigenvalue: f64 },

    #[error("priors must be uniform for this construction")]
    NonUniformPriors,

    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    /// True for errors that signal an impossible or over-demanding request rather
    /// than malformed input.
    pub fn is_infeasibility(&self) -> bool {
        matches!(
            self,
            Error::Infeasible { .. } | Error::LinearlyDependent(_) | Error::RankDeficient(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
