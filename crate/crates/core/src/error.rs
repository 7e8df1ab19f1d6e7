use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {value} outside the domain (0, {x_max}]")]
    Domain { value: f64, x_max: f64 },
    #[error("value {value} outside the sampled range [{lo}, {hi}]")]
    Range { value: f64, lo: f64, hi: f64 },
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate regression window: {0}")]
    DegenerateWindow(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("covering gap: {count} occupied cells uncovered, first at {first:?}")]
    CoveringGap { count: usize, first: [u32; 2] },
    #[error("empty test family")]
    EmptyFamily,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
