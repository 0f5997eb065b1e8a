//! Numerical experiments on the regularity theory: boundary smoothing
//! exponents, the optimality counterexample, the `Λ(4)` counting bound,
//! regularity of the periodic-flow traces and two series identities.

pub mod fit;
pub mod identities;
pub mod kato;
pub mod lambda4;
pub mod optimality;
pub mod tail;
pub mod traces;

pub use identities::{identity_checks, IdentityReport};
pub use kato::{kato_sweep, ExponentEstimate, RegularitySweep, SweepRow};
pub use lambda4::{count_lambda4, Lambda4Report};
pub use optimality::{optimality_run, CounterexampleRun, RatioRow, RunKind};
pub use tail::{tail_bound_spotcheck, TailReport};
pub use traces::{trace_regularity_r, TraceRegularityReport};
