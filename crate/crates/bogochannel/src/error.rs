use thiserror::Error;

/// Crate-wide error type. Variants are grouped by origin: construction and
/// precondition violations versus numerical failures detected at run time.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mode labels must be distinct and cutoff at least 1")]
    InvalidModeSet,
    #[error("Fock dimension {dim} exceeds budget {budget}")]
    DimensionBudget { dim: usize, budget: usize },
    #[error("slot {slot} out of range for {n_slots} oscillator slots")]
    SlotOutOfRange { slot: usize, n_slots: usize },
    #[error("dimension {got} does not match expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("mode sets do not match")]
    ModeSetMismatch,
    #[error("operator is not Hermitian (residual {residual:.3e})")]
    NonHermitian { residual: f64 },
    #[error("iterative scheme failed to converge (estimate {residual:.3e} after {steps} substeps)")]
    NonConvergence { residual: f64, steps: usize },
    #[error("weights must be nonnegative and sum to 1 (deviation {deviation:.3e})")]
    WeightSum { deviation: f64 },
    #[error("eigenvalue {lambda} exceeds capacity {capacity} of the mode set")]
    CapacityExceeded { lambda: i64, capacity: i64 },
    #[error("grid spacing {h} too coarse for width {width} (need h <= width/4)")]
    GridTooCoarse { h: f64, width: f64 },
    #[error("canonicality violated (residual {residual:.3e})")]
    Canonicality { residual: f64 },
    #[error("closed form disagrees with oracle (delta {delta:.3e})")]
    OracleMismatch { delta: f64 },
    #[error("truncation leakage {leakage:.3e} exceeds budget {budget:.3e}")]
    LeakageBudget { leakage: f64, budget: f64 },
    #[error("special function evaluation failed: {0}")]
    SpecialFunction(String),
    #[error("dense spectral decomposition refused at dimension {dim} (limit {limit})")]
    DimensionTooLarge { dim: usize, limit: usize },
    #[error("{invalid} of {total} trials exceeded the leakage budget; cutoff is too small")]
    ExcessInvalidTrials { invalid: usize, total: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Process exit code class: 1 for validation errors, 2 for numerical failures.
    pub fn exit_class(&self) -> i32 {
        match self {
            Error::NonConvergence { .. }
            | Error::Canonicality { .. }
            | Error::OracleMismatch { .. }
            | Error::LeakageBudget { .. }
            | Error::SpecialFunction(_)
            | Error::ExcessInvalidTrials { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
