use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),

    #[error("type mismatch: {0}")]
    TypeMismatch(String),

    #[error("unbound variable `{0}`")]
    Unbound(String),

    #[error("indeterminate quotient 0/0")]
    Indeterminate,

    #[error("value {value} of `{formula}` is outside the domain of `{target}`")]
    OutsideDomain { target: String, formula: String, value: String },

    #[error("duplicate name `{0}`")]
    Duplicate(String),

    #[error("{0}")]
    Model(String),

    #[error("model is invalid:\n{}", .0.join("\n"))]
    Invalid(Vec<String>),

    #[error("invalid query: {0}")]
    Query(String),

    #[error("solver: {0}")]
    Solver(String),

    #[error("search: {0}")]
    Search(String),
}

impl Error {
    pub fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Syntax { line, col, msg: msg.into() }
    }
}
