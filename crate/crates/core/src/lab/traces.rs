//! Regularity of the traces `r₁..r₄` of the periodic flow `u_o + u_e`.
//!
//! For each datum and `s` the time-Sobolev norms of the four traces are
//! divided by the space norms `‖φ_e‖_{H^{(s+ε)/2}}` (for `r₁, r₂`) and
//! `‖φ_o‖_{H^{(s+ε)/2+1}}` (for the derivative traces `r₃, r₄`). The
//! quotients are the empirical constants.

use serde::Serialize;

use crate::boundary::dirichlet_traces;
use crate::trace::trace_sobolev_norm;
use crate::{Error, Result, C64};

#[derive(Clone, Debug, Serialize)]
pub struct TraceRegularityRow {
    pub sample: usize,
    pub s: f64,
    pub norms: [f64; 4],
    pub rhs_even: f64,
    pub rhs_odd: f64,
    /// `norms[i] / rhs`, zero when both vanish.
    pub constants: [f64; 4],
}

/// Exponent bookkeeping at one `s`.
#[derive(Clone, Debug, Serialize)]
pub struct BookkeepingRow {
    pub s: f64,
    /// `(s+3)/8 < s`.
    pub first: bool,
    /// `s − ½ < s`.
    pub second: bool,
    /// `(s+10)/8 < s`.
    pub third: bool,
}

impl BookkeepingRow {
    pub fn new(s: f64) -> Self {
        Self {
            s,
            first: (s + 3.0) / 8.0 < s,
            second: s - 0.5 < s,
            third: (s + 10.0) / 8.0 < s,
        }
    }

    pub fn all(&self) -> bool {
        self.first && self.second && self.third
    }
}

/// Exact form of the third inequality for `s = num/den`, `den > 0`:
/// `(s+10)/8 < s ⟺ 7·num > 10·den`.
pub fn third_inequality_rational(num: i64, den: i64) -> bool {
    7 * num > 10 * den
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceRegularityReport {
    pub epsilon: f64,
    pub rows: Vec<TraceRegularityRow>,
    pub bookkeeping: Vec<BookkeepingRow>,
    /// Largest empirical constant per trace over all rows.
    pub max_constants: [f64; 4],
}

/// Admissible `s ∈ (0,2]` and `ε > 0`.
pub fn check_parameters(s_grid: &[f64], epsilon: f64) -> Result<()> {
    if s_grid.iter().any(|&s| !(s > 0.0 && s <= 2.0)) {
        return Err(Error::InvalidInput("s must lie in (0,1] ∪ (1,2]".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput("ε > 0 required".into()));
    }
    Ok(())
}

/// `samples[j]` holds `φ_j` on a uniform grid of `[0,1]` including both ends.
pub fn trace_regularity_r(
    samples: &[Vec<C64>],
    s_grid: &[f64],
    modes: usize,
    epsilon: f64,
) -> Result<TraceRegularityReport> {
    check_parameters(s_grid, epsilon)?;
    let mut rows = Vec::new();
    for (j, phi) in samples.iter().enumerate() {
        let (odd, even) = crate::spectral::odd_even_from_samples(phi, modes)?;
        let tr = dirichlet_traces(&odd, &even)?;
        for &s in s_grid {
            let norms = [
                trace_sobolev_norm(&tr.r1, s)?,
                trace_sobolev_norm(&tr.r2, s)?,
                trace_sobolev_norm(&tr.r3, s)?,
                trace_sobolev_norm(&tr.r4, s)?,
            ];
            let sigma = 0.5 * (s + epsilon);
            let rhs_even = even.h_norm(sigma);
            let rhs_odd = odd.h_norm(sigma + 1.0);
            let ratio = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a / b };
            let constants = [
                ratio(norms[0], rhs_even),
                ratio(norms[1], rhs_even),
                ratio(norms[2], rhs_odd),
                ratio(norms[3], rhs_odd),
            ];
            rows.push(TraceRegularityRow {
                sample: j,
                s,
                norms,
                rhs_even,
                rhs_odd,
                constants,
            });
        }
    }
    let mut max_constants = [0.0; 4];
    for r in &rows {
        for i in 0..4 {
            max_constants[i] = f64::max(max_constants[i], r.constants[i]);
        }
    }
    Ok(TraceRegularityReport {
        epsilon,
        rows,
        bookkeeping: s_grid.iter().map(|&s| BookkeepingRow::new(s)).collect(),
        max_constants,
    })
}
