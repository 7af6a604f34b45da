use thiserror::Error;

/// Which side of the hedge admissibility band was violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HedgeBound {
    /// kappa must be strictly above the safe asset's own risk.
    Lower,
    /// kappa must not exceed the risk of the unhedged position.
    Upper,
}

impl std::fmt::Display for HedgeBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HedgeBound::Lower => f.write_str("lower bound (kappa > safe-asset risk)"),
            HedgeBound::Upper => f.write_str("upper bound (kappa <= position risk)"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid distribution: {0}")]
    Distribution(String),

    #[error("value {value} at index {index} outside raw range [{min}, {max}]")]
    OutOfRange {
        index: usize,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("infeasible hedge: {bound} violated (kappa = {kappa}, limit = {limit})")]
    InfeasibleHedge {
        bound: HedgeBound,
        kappa: f64,
        limit: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// True for failures caused by input data rather than by arguments.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::InsufficientData(_)
                | Error::OutOfRange { .. }
                | Error::Io(_)
                | Error::Distribution(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
