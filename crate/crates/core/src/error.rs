use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{0}")]
    Degenerate(String),
    #[error("secondary fan undefined: no free weights")]
    NoFreeWeights,
    #[error("empty semistable locus")]
    EmptySemistableLocus,
    #[error("need a maximal cone: {0}")]
    NotAChamber(String),
    #[error("rank formula requires complete simplicial stacky fan")]
    RankFormulaUnavailable,
    #[error("χ must be surjective")]
    ChiNotSurjective,
    #[error("total space is not a GIT quotient for non-nef D_{0}")]
    NonNefDivisor(usize),
    #[error("hypersurface classification requires a Fano base")]
    NotFano,
    #[error("undefined side: {0}")]
    UndefinedSide(String),
    #[error("path planning failed: {0}")]
    PathPlanning(String),
    #[error("inconsistent weights at coordinate {0}")]
    InconsistentWeights(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    /// Stable machine-readable code used in CLI reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::Degenerate(_) => "degenerate",
            Error::NoFreeWeights => "no_free_weights",
            Error::EmptySemistableLocus => "empty_semistable_locus",
            Error::NotAChamber(_) => "not_a_chamber",
            Error::RankFormulaUnavailable => "rank_formula_unavailable",
            Error::ChiNotSurjective => "chi_not_surjective",
            Error::NonNefDivisor(_) => "non_nef_divisor",
            Error::NotFano => "not_fano",
            Error::UndefinedSide(_) => "undefined_side",
            Error::PathPlanning(_) => "path_planning",
            Error::InconsistentWeights(_) => "inconsistent_weights",
            Error::Internal(_) => "internal",
            Error::Parse { .. } => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
