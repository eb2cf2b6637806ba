use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero: denominator {denominator} vanishes")]
    DivisionByZero { denominator: String },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error(
        "pivot {pivot} may vanish on an undeclared locus; declare it non-zero or pick a point"
    )]
    Genericity { pivot: String },

    #[error("config error at {key} (line {line}): {message}")]
    Config {
        key: String,
        line: usize,
        message: String,
    },

    #[error("invalid flag: {0}")]
    Flag(String),

    #[error("cap exceeded: requested {requested}, cap {cap}")]
    Cap { requested: usize, cap: usize },

    #[error("element is not invariant: d_{generator} leaves {residue}")]
    Invariance { generator: String, residue: String },

    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("not implemented: {0}")]
    NotImplemented(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

impl Error {
    pub fn config(key: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            line,
            message: message.into(),
        }
    }
}
