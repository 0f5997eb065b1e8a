//! Optimality of the boundary regularity for the Navier operators.
//!
//! With `h_n(t) = Σ_{0<|m|≤n} |m|^{−β} e^{i(m⁴+1)π⁴t}` the boundary operator
//! of order `i ∈ {0, 2}` gives mode coefficients
//!
//! ```text
//! q_k(t) = −W_k/(iπ⁴) [ Σ_m a_m e^{iν_m t}/(n_m − k⁴) − e^{i(kπ)⁴t} Σ_m a_m/(n_m − k⁴) ],
//! ```
//!
//! with `n_m = m⁴+1`, `a_m = 2m^{−β}` and `ν_m = n_m π⁴`. No `n_m` equals a
//! `k⁴`, and all exponentials are orthogonal over the period `2/π³`, so the
//! space-time `L²` norm is an exact finite sum per mode.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::trace::{trace_sobolev_norm, BoundaryTrace};
use crate::{Error, Result, C64, TRACE_PERIOD};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunKind {
    /// `α` below the critical exponent: the ratio should grow with `n`.
    Counterexample,
    /// `α` at or above the critical exponent: the ratio should stay bounded.
    BoundednessCheck,
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioRow {
    pub n: usize,
    /// `‖u_{0,h_n}‖_{L²((0,1)×(0,2/π³))}`.
    pub solution_norm: f64,
    /// `‖h_n‖_{H^α}` with weight `(1+ν²)^α`, `ν` the integer frequency.
    pub trace_norm: f64,
    pub ratio: f64,
    /// `‖u‖²_{L²}` divided by the period, the quantity compared with the bound.
    pub time_averaged: f64,
    pub lower_bound: f64,
    /// Every diagonal term dominates its share of the lower bound.
    pub termwise: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleRun {
    pub alpha: f64,
    pub beta: f64,
    pub order: usize,
    pub kind: RunKind,
    pub rows: Vec<RatioRow>,
}

impl CounterexampleRun {
    pub fn ratio_at(&self, n: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.n == n).map(|r| r.ratio)
    }

    pub fn bound_holds(&self) -> bool {
        self.rows.iter().all(|r| r.termwise && r.time_averaged >= r.lower_bound)
    }
}

/// Critical exponent `(3−i)/4` of the order-`i` operator at `s = 0`, and the
/// upper end of the admissible `β` interval, `(7−2i)/2`.
fn thresholds(order: usize) -> (f64, f64) {
    let i = order as f64;
    ((3.0 - i) / 4.0, (7.0 - 2.0 * i) / 2.0)
}

fn weight_sq(order: usize, k: f64) -> f64 {
    let kp = k * PI;
    match order {
        0 => 4.0 * kp.powi(6),
        _ => 4.0 * kp * kp,
    }
}

/// Lower-bound prefactor `π^{−2}` (order 0) or `π^{−6}` (order 2) times the
/// `|m|^{2(3−i)−2β}` sum over `0 < |m| ≤ n`.
fn lower_bound_term(order: usize, beta: f64, m: f64) -> f64 {
    let pow = if order == 0 { -2 } else { -6 };
    2.0 * PI.powi(pow) * m.powf(2.0 * (3.0 - order as f64) - 2.0 * beta)
}

/// The boundary datum `h_n` as an almost-periodic series.
pub fn counterexample_trace(n: usize, beta: f64) -> BoundaryTrace {
    BoundaryTrace::from_series((1..=n).map(|m| {
        let f = (m as i64).pow(4) + 1;
        (f, C64::new(2.0 * (m as f64).powf(-beta), 0.0))
    }))
}

/// Check the parameters of [`optimality_run`] and classify the run.
pub fn check_parameters(alpha: f64, beta: f64, order: usize, n_grid: &[usize]) -> Result<RunKind> {
    if order != 0 && order != 2 {
        return Err(Error::InvalidInput(format!("order must be 0 or 2 (got {order})")));
    }
    if !(alpha > 0.0) {
        return Err(Error::InvalidInput(format!("α > 0 required (got {alpha})")));
    }
    if n_grid.is_empty() || n_grid.iter().any(|&n| n == 0 || n > 5000) {
        return Err(Error::InvalidInput("n must lie in 1..=5000 (non-empty grid)".into()));
    }
    let (critical, beta_max) = thresholds(order);
    if alpha < critical {
        let lo = (1.0 + 8.0 * alpha) / 2.0;
        if !(beta > lo && beta < beta_max) {
            return Err(Error::InvalidInput(format!(
                "β ∈ ({lo}, {beta_max}) required for α={alpha} (got {beta})"
            )));
        }
        Ok(RunKind::Counterexample)
    } else {
        Ok(RunKind::BoundednessCheck)
    }
}

/// Ratio table for `order ∈ {0, 2}` over `n_grid`, summing modes up to
/// `max(20000, 8n)`.
pub fn optimality_run(alpha: f64, beta: f64, order: usize, n_grid: &[usize]) -> Result<CounterexampleRun> {
    let kind = check_parameters(alpha, beta, order, n_grid)?;
    let rows = n_grid
        .iter()
        .map(|&n| ratio_row(alpha, beta, order, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(CounterexampleRun {
        alpha,
        beta,
        order,
        kind,
        rows,
    })
}

fn ratio_row(alpha: f64, beta: f64, order: usize, n: usize) -> Result<RatioRow> {
    let modes = (8 * n).max(20_000);
    let freqs: Vec<f64> = (1..=n).map(|m| (m as f64).powi(4) + 1.0).collect();
    let amps: Vec<f64> = (1..=n).map(|m| 2.0 * (m as f64).powf(-beta)).collect();
    // Per mode: (1/T)∫₀ᵀ|q_k|² = |W_k|²/π⁸ (Σ a²/d² + (Σ a/d)²), d = n_m − k⁴.
    let per_mode: Vec<f64> = (1..=modes)
        .into_par_iter()
        .map(|k| {
            let k4 = (k as f64).powi(4);
            let (mut s1, mut s2) = (0.0, 0.0);
            for (f, a) in freqs.iter().zip(&amps) {
                let d = f - k4;
                s1 += a * a / (d * d);
                s2 += a / d;
            }
            weight_sq(order, k as f64) / PI.powi(8) * (s1 + s2 * s2)
        })
        .collect();
    // The x-integral of sin² contributes ½.
    let time_averaged = 0.5 * per_mode.iter().sum::<f64>();
    let solution_norm = (time_averaged * TRACE_PERIOD).sqrt();
    let trace_norm = trace_sobolev_norm(&counterexample_trace(n, beta), alpha)?;
    let lower_bound: f64 = (1..=n).map(|m| lower_bound_term(order, beta, m as f64)).sum();
    let termwise = (1..=n).all(|m| 0.5 * per_mode[m - 1] >= lower_bound_term(order, beta, m as f64));
    Ok(RatioRow {
        n,
        solution_norm,
        trace_norm,
        ratio: solution_norm / trace_norm,
        time_averaged,
        lower_bound,
        termwise,
    })
}
