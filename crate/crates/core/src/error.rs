use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument violates a documented bound. `bound` names the violated
    /// constraint, `detail` carries the offending values.
    #[error("domain error: {bound} violated ({detail})")]
    Domain { bound: &'static str, detail: String },

    #[error("no admissible pattern of order {order} for N={n}, S={s}")]
    NoAdmissiblePattern { order: usize, n: usize, s: usize },

    #[error("budget exceeded: estimated cost {cost} exceeds budget {budget}")]
    BudgetExceeded { cost: String, budget: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(bound: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            bound,
            detail: detail.into(),
        }
    }
}
