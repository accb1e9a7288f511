use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A bound that holds as a theorem was observed to fail; this is
    /// always an implementation bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("projected cost {estimate} exceeds budget {budget}")]
    BudgetExceeded { estimate: f64, budget: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

pub(crate) fn check_budget(estimate: f64, budget: f64) -> Result<()> {
    if estimate > budget {
        Err(Error::BudgetExceeded { estimate, budget })
    } else {
        Ok(())
    }
}
