use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no samples supplied")]
    EmptyInput,
    #[error("sample {index} is negative ({value})")]
    NegativeValue { index: usize, value: f64 },
    #[error("sample {index} is not finite")]
    NonFinite { index: usize },
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("invalid query: {name} = {value}")]
    InvalidQuery { name: &'static str, value: f64 },
    #[error("invalid parameter grid: {0}")]
    InvalidGrid(&'static str),
    #[error("no parameter in the grid passed the dominance screen")]
    EmptyAdmissibleSet,
}
