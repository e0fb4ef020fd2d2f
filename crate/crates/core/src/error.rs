use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("part {part} out of range 0..={k}")]
    InvalidPart { part: u32, k: u32 },

    #[error("element {element} is already assigned to part {part}")]
    AlreadyAssigned { element: usize, part: u32 },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("enumeration of {needed} items exceeds budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("rejection sampling exhausted after {samples} samples")]
    RejectionExhausted { samples: usize },

    /// Phase one ended with positive artificial mass. On monotone input the LP
    /// always has a feasible point, so this signals bad input or a solver bug.
    #[error("extreme-point LP infeasible (phase-one objective {objective:e}); dump: {dump}")]
    LpInfeasible { objective: f64, dump: String },

    #[error("numerical failure in LP solver: {message}; dump: {dump}")]
    Numerical { message: String, dump: String },

    #[error("support overflow at iteration {iteration}: {size} entries, bound {bound}")]
    SupportOverflow {
        iteration: usize,
        size: usize,
        bound: usize,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Process exit code: 2 usage/parse, 3 budget, 4 internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DimensionMismatch { .. }
            | Error::InvalidPart { .. }
            | Error::AlreadyAssigned { .. }
            | Error::Validation(_)
            | Error::Parse(_) => 2,
            Error::BudgetExceeded { .. } | Error::RejectionExhausted { .. } => 3,
            Error::LpInfeasible { .. }
            | Error::Numerical { .. }
            | Error::SupportOverflow { .. }
            | Error::Invariant(_) => 4,
        }
    }
}

/// Refuses when `base^exp` exceeds `budget`.
pub(crate) fn check_budget(base: usize, exp: usize, budget: u128) -> Result<u128> {
    let mut needed: u128 = 1;
    for _ in 0..exp {
        needed = needed.saturating_mul(base as u128);
        if needed > budget {
            return Err(Error::BudgetExceeded { needed, budget });
        }
    }
    Ok(needed)
}
