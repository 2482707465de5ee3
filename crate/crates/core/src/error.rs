use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("division by zero")]
    DivisionByZero,

    #[error("not a rational literal: {0:?}")]
    BadRational(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("operation needs a two-player game, got {0} players")]
    NotTwoPlayer(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no Nash equilibrium with supports of size at most {0}")]
    NotFoundWithinSupport(usize),

    #[error("no k-uniform eps-Nash profile found at k = {k}")]
    ScanExhausted { k: usize },

    #[error("budget exceeded: scan needs {required} steps, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
