use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("arity {0} is not a prime")]
    NotPrime(u32),
    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: u8, right: u8 },
    #[error("letter {letter} out of range for arity {p}")]
    LetterOutOfRange { letter: u32, p: u8 },
    #[error("malformed automaton: {0}")]
    Malformed(String),
    #[error("dangling reference to state `{0}`")]
    DanglingReference(String),
    #[error("root power {perm} out of range for arity {p}")]
    PermOutOfRange { perm: i64, p: u8 },
    #[error("degree p^{level} exceeds the configured limit of {limit} points")]
    DegreeOverflow { level: usize, limit: usize },
    #[error("budget of {budget} exceeded ({what})")]
    BudgetExceeded { what: String, budget: usize },
    #[error("level {level} too small: {reason}")]
    LevelTooSmall { level: usize, reason: String },
    #[error("unknown subgroup spec `{0}`")]
    UnknownSubgroup(String),
    #[error("unknown group `{0}`")]
    UnknownGroup(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("chain is not an N-series: {0}")]
    NotNSeries(String),
    #[error("quotient is not elementary abelian at index {0}")]
    NotElementaryAbelian(usize),
    #[error("faithful range exceeded: {0}")]
    FaithfulRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
