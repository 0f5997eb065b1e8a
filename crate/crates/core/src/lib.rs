//! Spectral solver and verification lab for the biharmonic Schrödinger
//! equation
//!
//! ```text
//! i u_t + u_xxxx + λ |u|^{p-2} u = 0   on (0,1) × (0,T)
//! ```
//!
//! with non-homogeneous Navier (`u`, `u_xx` prescribed at both ends) or
//! Dirichlet (`u`, `u_x` prescribed at both ends) boundary data.
//!
//! The crate is organised by layer:
//!
//! * [`spectral`], [`transform`], [`trace`]: coefficient representations on
//!   the interval, fast sine/cosine transforms and almost-periodic boundary
//!   traces.
//! * [`flow`] and [`clamped`]: free propagators and Duhamel convolution.
//! * [`boundary`]: boundary-integral operators, lifts and trace extraction.
//! * [`nonlinear`]: Picard iteration for the full nonlinear problem.
//! * [`lab`]: numerical experiments on smoothing, optimality and the
//!   supporting series estimates.

pub mod boundary;
pub mod clamped;
pub mod error;
pub mod flow;
pub mod lab;
pub mod nonlinear;
pub mod quadrature;
pub mod spectral;
pub mod trace;
pub mod transform;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// `π⁴`, the fundamental time frequency of the periodic flow.
pub const PI4: f64 = std::f64::consts::PI
    * std::f64::consts::PI
    * std::f64::consts::PI
    * std::f64::consts::PI;

/// Period `2/π³` of the almost-periodic trace lattice `{n π⁴}`.
pub const TRACE_PERIOD: f64 =
    2.0 / (std::f64::consts::PI * std::f64::consts::PI * std::f64::consts::PI);

/// `(-1)^k` as a float.
#[inline]
pub(crate) fn parity(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `e^{iθ}` as a complex number.
#[inline]
pub(crate) fn cis(theta: f64) -> C64 {
    let (s, c) = theta.sin_cos();
    C64::new(c, s)
}
