use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("spectrum needs at least two levels, got {0}")]
    TooFewLevels(usize),

    #[error("non-finite energy level at index {0}")]
    NonFiniteLevel(usize),

    #[error("compression deviation {0} must be < 1 (cold spectrum would collapse or invert)")]
    ChiTooLarge(f64),

    #[error("dimension mismatch: {0} vs {1} entries")]
    DimensionMismatch(usize, usize),

    #[error("invalid engine parameters: {0}")]
    InvalidEngine(String),

    #[error("thermal populations became non-finite at beta = {0}")]
    NonFinitePopulations(f64),

    #[error("not an engine: {0}")]
    NotAnEngine(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unbound parameter '{0}'")]
    UnboundParam(String),

    #[error("unknown preset '{0}'")]
    UnknownPreset(String),

    #[error("preset '{preset}' needs parameter '{param}'")]
    MissingParam { preset: String, param: String },

    #[error("symmetry test indeterminate: every sample point hit a domain error")]
    IndeterminateSymmetry,

    #[error("constraint has no |Eh| solution on the search range at chi = {chi}")]
    NoSolution { chi: f64 },

    #[error("constraint is ambiguous at chi = {chi}: {crossings} sign changes on the scan grid")]
    AmbiguousConstraint { chi: f64, crossings: usize },

    #[error("singular constraint at chi = {0}: the log-derivative denominator vanishes")]
    SingularConstraint(f64),

    #[error("degenerate constraint: G10 + G01 vanishes at the expansion point")]
    DegenerateConstraint,

    #[error("constraint unsolvable everywhere on (0, eta_c)")]
    Unsolvable,

    #[error("expansion coefficients unavailable: {0}")]
    InvalidCoeffs(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit code the CLI assigns to this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotAnEngine(_) | Error::Unsolvable => 2,
            _ => 1,
        }
    }
}
