use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("log_gamma requires a positive argument, got {0}")]
    NonPositiveGammaArgument(String),
    #[error("cannot parse `{0}` as an exact rational")]
    ParseRational(String),
    #[error("invalid problem parameters: {0}")]
    InvalidParameters(String),
    #[error("n_max must be at least 1")]
    EmptyRange,
    #[error("late-term model evaluated at n = {0}; the domain starts at n = 2")]
    ModelDomain(u64),
    #[error("invalid index range: {0}")]
    InvalidRange(String),
    #[error("sequence of length {len} too short for Richardson order {order}")]
    SequenceTooShort { len: usize, order: u32 },
    #[error("slope fit needs at least 5 points, window holds {0}")]
    TooFewPoints(usize),
    #[error("oscillation table requires a two-pole conjugate-pair model")]
    NotConjugatePair,
}

pub type Result<T> = std::result::Result<T, Error>;
