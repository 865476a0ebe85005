use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus must be a positive odd integer, got {0}")]
    EvenModulus(i64),
    #[error("modulus must be an odd integer >= 3, got {0}")]
    SmallModulus(i64),
    #[error("{value} is not coprime to {modulus}")]
    NotCoprime { value: i64, modulus: i64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("sign quadruple {0:?} has product {1}, expected -1")]
    SignProduct([i8; 4], i8),
    #[error("unknown label '{0}'")]
    UnknownLabel(String),
    #[error("inadmissible channel: {0}")]
    InadmissibleChannel(String),
    #[error("no F-matrix stored for admissible quadruple {0}")]
    MissingF(String),
    #[error("F-matrix for {key} has shape {got:?}, expected {expected:?}")]
    Shape { key: String, got: (usize, usize), expected: (usize, usize) },
    #[error("conflicting F-matrix derivations for {0}")]
    Conflict(String),
    #[error("rotation closure left admissible quadruples undefined: {0}")]
    Uncovered(String),
    #[error("sign table conflict on triple {0}")]
    SignConflict(String),
    #[error("pivotal equation has {0} solutions, expected 2")]
    PivotalCount(usize),
    #[error("left and right quantum dimensions differ for {0}")]
    NonSpherical(String),
    #[error("S-matrix is degenerate (|det| = {0:e})")]
    DegenerateS(f64),
    #[error("entry ({row}, {col}) out of range for {key}")]
    EntryOutOfRange { key: String, row: usize, col: usize },
    #[error("malformed mutation spec '{0}'")]
    BadMutation(String),
    #[error("io: {0}")]
    Io(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
