//! The sine-series identity
//!
//! ```text
//! Σ_{k≥1} (k³ + i k a²)/(k⁴ + a⁴) sin(kx) = (π/2) sin(√i a(π−x)) / sin(√i a π),   0 < x < π,
//! ```
//!
//! with `√i = e^{iπ/4}`, and the exponential form of `sin(√i a)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::Serialize;

use crate::C64;

fn sqrt_i() -> C64 {
    C64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2)
}

/// Partial sum up to `k_max` terms.
pub fn expansion_partial_sum(a: f64, x: f64, k_max: usize) -> C64 {
    let a2 = a * a;
    let a4 = a2 * a2;
    (1..=k_max)
        .map(|k| {
            let k = k as f64;
            C64::new(k * k * k, k * a2) / (k.powi(4) + a4) * (k * x).sin()
        })
        .sum()
}

/// Right-hand side of the identity; the sawtooth `(π−x)/2` at `a = 0`.
pub fn expansion_closed_form(a: f64, x: f64) -> C64 {
    if a == 0.0 {
        return C64::new(0.5 * (PI - x), 0.0);
    }
    let z = sqrt_i() * a;
    0.5 * PI * (z * (PI - x)).sin() / (z * PI).sin()
}

/// `(e^{−c}e^{ic} − e^{c}e^{−ic})/(2i)` with `c = a/√2`, the expanded form of
/// `sin(√i a)`.
pub fn sin_sqrt_i_exponential(a: f64) -> C64 {
    let c = a * FRAC_1_SQRT_2;
    let e = |r: f64, th: f64| C64::from_polar(r.exp(), th);
    (e(-c, c) - e(c, -c)) / C64::new(0.0, 2.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    /// `(K, max residual over the (a,x) grid)`.
    pub residuals: Vec<(usize, f64)>,
    /// Whether each doubling of `K` reduced the residual, allowing 10% jitter.
    pub monotone: bool,
    /// Largest deviation between `sin(√i a)` and its exponential form.
    pub sina_error: f64,
}

/// Residuals over `a ∈ a_grid`, `x ∈ x_grid` for each `K` in `ks`.
pub fn identity_checks(a_grid: &[f64], x_grid: &[f64], ks: &[usize]) -> IdentityReport {
    let residuals: Vec<(usize, f64)> = ks
        .iter()
        .map(|&k| {
            let worst = a_grid
                .iter()
                .flat_map(|&a| x_grid.iter().map(move |&x| (a, x)))
                .map(|(a, x)| (expansion_partial_sum(a, x, k) - expansion_closed_form(a, x)).norm())
                .fold(0.0, f64::max);
            (k, worst)
        })
        .collect();
    let monotone = residuals.windows(2).all(|w| w[1].1 <= 1.1 * w[0].1);
    let sina_error = a_grid
        .iter()
        .map(|&a| {
            let direct = (sqrt_i() * a).sin();
            (direct - sin_sqrt_i_exponential(a)).norm() / direct.norm().max(1.0)
        })
        .fold(0.0, f64::max);
    IdentityReport {
        residuals,
        monotone,
        sina_error,
    }
}

/// Default grids: `a ∈ {0.5, 1, …, 5}`, `x` at ten interior points of `(0,π)`,
/// `K ∈ {250, 500, …, 8000}`.
pub fn default_identity_checks() -> IdentityReport {
    let a: Vec<f64> = (1..=10).map(|j| 0.5 * j as f64).collect();
    let x: Vec<f64> = (1..=10).map(|j| PI * j as f64 / 11.0).collect();
    let ks: Vec<usize> = (0..6).map(|j| 250usize << j).collect();
    identity_checks(&a, &x, &ks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_a_limit_is_the_sawtooth() {
        for x in [0.3, 1.0, 2.5] {
            let near = expansion_closed_form(1e-4, x);
            assert!((near - 0.5 * (PI - x)).norm() < 1e-6);
            let series = expansion_partial_sum(0.0, x, 200_000);
            assert!((series - 0.5 * (PI - x)).norm() < 1e-4);
        }
    }

    #[test]
    fn midpoint_residual() {
        let r = (expansion_partial_sum(1.0, PI / 2.0, 10_000) - expansion_closed_form(1.0, PI / 2.0)).norm();
        assert!(r < 1e-3, "{r}");
    }

    #[test]
    fn exponential_form_at_sqrt2() {
        let a = 2f64.sqrt();
        let lhs = (sqrt_i() * a).sin();
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let rhs = ((-one).exp() * i.exp() - one.exp() * (-i).exp()) / (2.0 * i);
        assert!((lhs - rhs).norm() < 1e-15);
        assert!((sin_sqrt_i_exponential(a) - rhs).norm() < 1e-15);
    }

    #[test]
    fn residual_decreases_with_k() {
        let rep = default_identity_checks();
        assert!(rep.monotone, "{:?}", rep.residuals);
        assert!(rep.sina_error < 1e-14);
    }
}
