use thiserror::Error;

use crate::spectral::Basis;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("rejected input: {0}")]
    InvalidInput(String),

    #[error("basis mismatch: expected {expected:?}, found {found:?}")]
    BasisMismatch { expected: Basis, found: Basis },

    #[error("time {t} lies outside the forcing grid [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },

    #[error("root bracketing failed for clamped mode k={k}")]
    RootBracket { k: usize },

    #[error("incompatible boundary data: |h(0)| = {value:e} while compatibility is enforced")]
    Incompatible { value: f64 },

    #[error("non-finite value in the nonlinearity (blow-up candidate)")]
    Overflow,

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error(
        "Picard iteration failed: existence time fell below dt={dt} \
         (data norm r={data_norm:e}, last contraction factor {last_factor:e})"
    )]
    NoConvergence {
        dt: f64,
        data_norm: f64,
        last_factor: f64,
    },

    #[error("clamped-basis projection residual {residual:e} exceeds {limit:e}")]
    Projection { residual: f64, limit: f64 },

    #[error("integer overflow while counting lattice buckets at K={k}")]
    CountOverflow { k: i64 },
}
