use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("family must contain at least one generator")]
    EmptyFamily,
    /// 1-based index of the offending generator.
    #[error("generator b_{index} = {value} is not odd")]
    NotOdd { index: usize, value: u64 },
    #[error("generator b_{index} = {value} is not greater than one")]
    NotGreaterThanOne { index: usize, value: u64 },
    #[error("generators b_{0} and b_{1} are not coprime")]
    NotCoprime(usize, usize),
    #[error("divisor {0} must be at least 2")]
    InvalidDivisor(u64),
    #[error("set {0:?} is not primitive")]
    NotPrimitive(Vec<u64>),
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
    #[error("truncation depth cannot decide position {0}")]
    DepthInsufficient(i64),
    #[error("level {level} is outside 1..={depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("level {level} is too shallow for code width {width}: need 2^t > width")]
    LevelTooShallow { level: usize, width: usize },
    #[error("window of length {have} is too short, need at least {need}")]
    WindowTooShort { have: usize, need: usize },
    #[error("odometer depths differ: {0} vs {1}")]
    DepthMismatch(usize, usize),
    #[error("residues are not compatible at level {0}")]
    IncompatibleResidues(usize),
    #[error("search needs {needed} rule checks, budget is {budget}")]
    ComplexityRefusal { needed: u128, budget: u64 },
    #[error("levels disagree at position {0}")]
    InconsistentLevels(i64),
    #[error("{0}")]
    InvalidArgument(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DepthInsufficient(_)
            | Error::WindowTooShort { .. }
            | Error::LevelOutOfRange { .. }
            | Error::LevelTooShallow { .. } => 2,
            Error::ComplexityRefusal { .. } => 3,
            Error::InconsistentLevels(_) => 4,
            _ => 1,
        }
    }
}
