use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("partition has no members")]
    EmptyPartition,

    #[error("members do not sum to one: max residual {max_residual:e}")]
    NotPartition { max_residual: f64 },

    #[error("operands live on different systems")]
    SystemMismatch,

    #[error("member {0} has empty support")]
    EmptySupport(usize),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("conditioning function has zero mass")]
    ZeroMass,

    #[error("budget exceeded: at least {needed} word evaluations needed, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },

    #[error("infeasible bounds: {0}")]
    Infeasible(String),

    #[error("sequence is not subadditive at n={n}, m={m} (excess {excess:e})")]
    NotSubadditive { n: usize, m: usize, excess: f64 },

    #[error("sequence does not settle: {0}")]
    NonConvergent(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
