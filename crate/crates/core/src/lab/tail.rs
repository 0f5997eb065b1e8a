//! Spot check of the tail bound
//!
//! ```text
//! |Σ_{k≥k₀} sin(kπx)/(k − λ^{1/4})| ≤ C x^{α−1} (1 + λ^{1/4})^{α−1},   k₀ = ⌊(2λ)^{1/4}⌋.
//! ```

use std::f64::consts::PI;

use serde::Serialize;

use super::fit::fit_log_log;
use crate::{Error, Result};

/// First summation index. It is raised above `λ^{1/4}` when the floor lands
/// on or below it, so that every denominator is positive.
pub fn first_index(lambda: f64) -> usize {
    let b = lambda.powf(0.25);
    let k0 = (2.0 * lambda).powf(0.25).floor() as usize;
    k0.max(b.floor() as usize + 1).max(1)
}

/// Tail sum with `terms` explicit terms and the leading summation-by-parts
/// remainder `c_{K+1} cos((K+½)πx) / (2 sin(πx/2))`.
pub fn tail_sum(x: f64, lambda: f64, terms: usize) -> f64 {
    let b = lambda.powf(0.25);
    let k0 = first_index(lambda);
    let last = k0 + terms - 1;
    let mut s: f64 = (k0..=last).map(|k| (k as f64 * PI * x).sin() / (k as f64 - b)).sum();
    let next = 1.0 / ((last + 1) as f64 - b);
    s += next * ((last as f64 + 0.5) * PI * x).cos() / (2.0 * (0.5 * PI * x).sin());
    s.abs()
}

#[derive(Clone, Debug, Serialize)]
pub struct TailPoint {
    pub x: f64,
    pub lambda: f64,
    pub value: f64,
    pub bound_shape: f64,
    /// The sum changed by more than 1e-6 when the term count doubled.
    pub flagged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TailReport {
    pub alpha: f64,
    pub points: Vec<TailPoint>,
    /// `max value / bound_shape` over unflagged points.
    pub constant: f64,
    /// Log-log slope of the sum in `x` at the smallest `λ`.
    pub slope_x: f64,
    /// Log-log slope of the sum in `1 + λ^{1/4}` at the middle `x`.
    pub slope_lambda: f64,
}

/// `α ∈ (¾,1)`, `x ∈ (0,2)` and `λ > 0`.
pub fn check_parameters(x_grid: &[f64], lambda_grid: &[f64], alpha: f64) -> Result<()> {
    if !(alpha > 0.75 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("α ∈ (3/4, 1) required (got {alpha})")));
    }
    if x_grid.iter().any(|&x| !(x > 0.0 && x < 2.0)) || lambda_grid.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::InvalidInput("x ∈ (0,2) and λ > 0 required".into()));
    }
    Ok(())
}

/// Evaluate the tail sum over the grid and fit the bound's constant.
pub fn tail_bound_spotcheck(x_grid: &[f64], lambda_grid: &[f64], alpha: f64) -> Result<TailReport> {
    check_parameters(x_grid, lambda_grid, alpha)?;
    let terms = 1 << 16;
    let mut points = Vec::new();
    for &lambda in lambda_grid {
        for &x in x_grid {
            let value = tail_sum(x, lambda, terms);
            let check = tail_sum(x, lambda, 2 * terms);
            let bound_shape = x.powf(alpha - 1.0) * (1.0 + lambda.powf(0.25)).powf(alpha - 1.0);
            points.push(TailPoint {
                x,
                lambda,
                value,
                bound_shape,
                flagged: !value.is_finite() || (value - check).abs() > 1e-6,
            });
        }
    }
    let constant = points
        .iter()
        .filter(|p| !p.flagged)
        .map(|p| p.value / p.bound_shape)
        .fold(0.0, f64::max);
    let l0 = lambda_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let (xs, vx): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|p| p.lambda == l0 && !p.flagged)
        .map(|p| (p.x, p.value))
        .unzip();
    let x_mid = x_grid[x_grid.len() / 2];
    let (ls, vl): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|p| p.x == x_mid && !p.flagged)
        .map(|p| (1.0 + p.lambda.powf(0.25), p.value))
        .unzip();
    let slope = |f: Option<super::fit::LineFit>| f.map(|f| f.slope).unwrap_or(f64::NAN);
    Ok(TailReport {
        alpha,
        points,
        constant,
        slope_x: slope(fit_log_log(&xs, &vx)),
        slope_lambda: slope(fit_log_log(&ls, &vl)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corrected_partial_sums_converge() {
        let a = tail_sum(0.5, 16.0, 1 << 12);
        let b = tail_sum(0.5, 16.0, 1 << 18);
        assert!((a - b).abs() < 1e-7, "{a} {b}");
    }

    #[test]
    fn alternating_end_stays_bounded() {
        for x in [0.9, 0.99, 0.999] {
            let v = tail_sum(x, 100.0, 1 << 16);
            assert!(v.is_finite() && v < 10.0, "{x} {v}");
        }
    }

    #[test]
    fn reference_point_is_below_fitted_bound() {
        let xs = [0.1, 0.25, 0.5, 0.75, 0.9];
        let ls = [16.0, 256.0, 4096.0, 65536.0, 1e6];
        let rep = tail_bound_spotcheck(&xs, &ls, 0.9).unwrap();
        let p = rep
            .points
            .iter()
            .find(|p| p.x == 0.5 && p.lambda == 16.0)
            .unwrap();
        assert!(p.value.is_finite());
        assert!(p.value <= rep.constant * 0.5f64.powf(-0.1) * 3f64.powf(-0.1) + 1e-15);
        assert!(rep.points.iter().all(|p| !p.flagged));
    }
}
