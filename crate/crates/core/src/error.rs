use thiserror::Error;

pub type Result<T> = std::result::Result<T, QmmError>;

/// Every failure the calibration library can report.
///
/// Variants are grouped by the stage that raises them so the command-line
/// front end can map them onto stable exit codes (see [`QmmError::category`]).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QmmError {
    #[error("non-finite basis value at basis {basis}, sample {sample}")]
    NonFiniteBasis { basis: usize, sample: usize },

    #[error("non-finite ordinate value at sample {sample}")]
    NonFiniteOrdinate { sample: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("empty linear system (M = 0)")]
    EmptySystem,

    #[error("no informative basis: Gram matrix has rank 0 but the moment vector is nonzero")]
    NoInformativeBasis,

    #[error("linear solver failed: {0}")]
    Solver(String),

    #[error("{family}: abscissa {value}{} is outside the domain (must be > 0)", at_sample(*.sample))]
    Domain {
        family: &'static str,
        sample: Option<usize>,
        value: f64,
    },

    #[error("ordinate {value}{} must be > 0 for a logarithmic transform", at_sample(*.sample))]
    OrdinateDomain { sample: Option<usize>, value: f64 },

    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid normalization input: {0}")]
    Normalization(String),

    #[error("invalid measurement data: {0}")]
    Data(String),

    #[error("model/data mismatch: {0}")]
    Incompatible(String),

    #[error("invalid metric input: {0}")]
    Metric(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

fn at_sample(sample: Option<usize>) -> String {
    sample
        .map(|k| format!(" at sample {k}"))
        .unwrap_or_default()
}

impl QmmError {
    /// Attaches a sample index to domain errors raised by scalar evaluation.
    pub fn at_sample(self, k: usize) -> Self {
        match self {
            QmmError::Domain { family, value, .. } => QmmError::Domain {
                family,
                value,
                sample: Some(k),
            },
            QmmError::OrdinateDomain { value, .. } => QmmError::OrdinateDomain {
                value,
                sample: Some(k),
            },
            other => other,
        }
    }
}

/// Coarse classification used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Data,
    Solver,
}

impl QmmError {
    pub fn category(&self) -> ErrorCategory {
        use QmmError::*;
        match self {
            Config(_) | InvalidParameter(_) => ErrorCategory::Config,
            Data(_) | OrdinateDomain { .. } | Normalization(_) | Incompatible(_) | Metric(_) => {
                ErrorCategory::Data
            }
            NonFiniteBasis { .. }
            | NonFiniteOrdinate { .. }
            | Shape(_)
            | InvalidWeights(_)
            | EmptySystem
            | NoInformativeBasis
            | Solver(_)
            | Domain { .. } => ErrorCategory::Solver,
        }
    }
}
