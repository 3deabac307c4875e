use thiserror::Error;

/// Failures surfaced by the toolkit. Each variant maps onto a fixed CLI exit code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("precision exhausted at {bits} bits while {context}")]
    PrecisionExhausted { bits: u32, context: String },
    #[error("expression is singular at its true value: {0}")]
    NonRefinable(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("q*phi is too close to an integer for K = {k} (q = {q})")]
    SmallQPhi { q: String, k: String },
    #[error("reduction stalled: {0}")]
    Stalled(String),
    #[error("{a} and {b} are multiplicatively dependent")]
    MultiplicativelyDependent { a: String, b: String },
    #[error("{0} is not squarefree")]
    NotSquarefree(String),
    #[error("triple is not coprime")]
    NotCoprime,
    #[error("triple does not sum to zero")]
    NotZeroSum,
    #[error("cannot factor {0} with the available methods")]
    FactorizationTooHard(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameters(msg.into())
    }

    pub fn exhausted(bits: u32, context: impl Into<String>) -> Self {
        Error::PrecisionExhausted {
            bits,
            context: context.into(),
        }
    }

    /// Stable machine-readable tag used in JSON error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameters(_) => "InvalidParameters",
            Error::PrecisionExhausted { .. } => "PrecisionExhausted",
            Error::NonRefinable(_) => "NonRefinable",
            Error::NotApplicable(_) => "NotApplicable",
            Error::SmallQPhi { .. } => "SmallQPhi",
            Error::Stalled(_) => "Stalled",
            Error::MultiplicativelyDependent { .. } => "MultiplicativelyDependent",
            Error::NotSquarefree(_) => "NotSquarefree",
            Error::NotCoprime => "NotCoprime",
            Error::NotZeroSum => "NotZeroSum",
            Error::FactorizationTooHard(_) => "FactorizationTooHard",
            Error::Parse(_) => "Parse",
            Error::Io(_) => "Io",
            Error::Verification(_) => "Verification",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
