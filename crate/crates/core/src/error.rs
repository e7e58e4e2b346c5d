use thiserror::Error;

/// Errors raised by the walk simulators and the closed-form evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("measurement probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("{what} is only defined for 0 < p <= 1 (got p = {p})")]
    RequiresPositiveP { what: &'static str, p: f64 },

    #[error("invalid time argument: {0}")]
    InvalidTime(String),

    #[error("time {t} is beyond the table horizon {t_max}")]
    BeyondHorizon { t: usize, t_max: usize },

    #[error("path enumeration is limited to t <= {max} (got t = {t})")]
    OracleTooLarge { t: usize, max: usize },

    #[error("density operator needs {needed} entries, budget is {budget}")]
    MemoryBudget { needed: usize, budget: usize },

    #[error("|q z| = {0} is not inside the unit disk")]
    OutsideDisk(f64),

    #[error("pole proximity: |denominator| = {0:e}")]
    PoleProximity(f64),

    #[error("invalid contour: {0}")]
    InvalidContour(String),

    #[error("roundoff amplification {amplification:e} at t = {t_max} exceeds 1e-8")]
    Amplification { t_max: usize, amplification: f64 },

    #[error("truncation T = {t} leaves tail bound {bound:e} (needs < 1e-12)")]
    InsufficientTruncation { t: usize, bound: f64 },

    #[error("root finding failed: {0}")]
    RootNotFound(String),
}

pub type Result<T> = std::result::Result<T, WalkError>;
