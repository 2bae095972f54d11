use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements live in unrelated towers")]
    TowerMismatch,
    #[error("cannot take the square root of zero")]
    ZeroRadicand,
    #[error("radicand {0} is not positive at the distinguished embedding")]
    NotPositive(String),
    #[error("sign assignment is inconsistent: generator {generator} has a negative square")]
    InconsistentEmbedding { generator: usize },
    #[error("{0} has support on a formal (non-rational-radicand) generator")]
    FormalSupport(String),
    #[error("{element} does not lie in {field}")]
    NotInField { element: String, field: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("label m={0} has no cosine in a quadratic tower")]
    UnsupportedLabel(u64),
    #[error("dotted weight between nodes {0} and {1} is unknown")]
    UnknownWeight(usize, usize),
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate form: {0}")]
    Degenerate(String),
    #[error("dyadic places are not supported")]
    DyadicPlace,
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("assumption fails: {0}")]
    AssumptionFailed(String),
    #[error("cannot factor {0}")]
    Factorization(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
