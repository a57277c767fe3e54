use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("undeclared grammar symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("map is not total: node `{0}` has no image")]
    PartialMap(String),
    #[error("view set is empty")]
    EmptyViewSet,
    #[error("unknown automaton state {0}")]
    UnknownState(usize),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("index {index} out of range (path length {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("counterexample certificate failed: {0}")]
    CertificateFailure(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("datalog emission too large: {0}")]
    EmissionTooLarge(String),
    #[error("head variable `{0}` does not occur in the rule body")]
    UnboundHeadVariable(String),
    #[error("instance is not the view image of any database within the bound")]
    NotAViewImage,
    #[error("graph is not connected")]
    NotConnected,
    #[error("template too large: {0}")]
    TemplateTooLarge(String),
    #[error("fixture has no reference rewriting: {0}")]
    FixtureMismatch(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
