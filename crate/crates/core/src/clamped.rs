//! Eigenfunctions of `∂ₓ⁴` on `(0,1)` with clamped ends `u = u' = 0`.
//!
//! The eigenvalues are `μ_k⁴` with `cos μ cosh μ = 1` and
//!
//! ```text
//! φ_k(x) = C_k [cosh μx − cos μx − σ (sinh μx − sin μx)],
//! σ = (cosh μ − cos μ)/(sinh μ − sin μ).
//! ```
//!
//! The hyperbolic part is evaluated as `A e^{μ(x−1)} + ½(1+σ) e^{−μx}` with
//! `A = ½(1−σ)e^{μ}` rewritten in terms of `e^{−μ}` only, so nothing
//! overflows for large `μ`.

use std::f64::consts::PI;

use crate::quadrature::CompositeRule;
use crate::{cis, Error, Result, C64};

#[derive(Clone, Debug)]
pub struct ClampedBasis {
    mu: Vec<f64>,
    sigma: Vec<f64>,
    growth: Vec<f64>,
    scale: Vec<f64>,
}

/// Coefficients in the clamped basis at a given time.
#[derive(Clone, Debug, PartialEq)]
pub struct ClampedState {
    pub coeffs: Vec<C64>,
    pub time: f64,
}

impl ClampedState {
    pub fn zeros(k: usize) -> Self {
        Self {
            coeffs: vec![C64::new(0.0, 0.0); k],
            time: 0.0,
        }
    }

    /// `L²(0,1)` norm (the basis is orthonormal).
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

fn scaled_characteristic(mu: f64) -> f64 {
    mu.cos() - 1.0 / mu.cosh()
}

fn scaled_characteristic_derivative(mu: f64) -> f64 {
    -mu.sin() + mu.tanh() / mu.cosh()
}

/// Root of `cos μ cosh μ = 1` near `(k+½)π`.
fn clamped_root(k: usize) -> Result<f64> {
    let centre = (k as f64 + 0.5) * PI;
    let (mut lo, mut hi) = (centre - 0.5, centre + 0.5);
    let (mut flo, fhi) = (scaled_characteristic(lo), scaled_characteristic(hi));
    if flo * fhi > 0.0 {
        return Err(Error::RootBracket { k });
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let fm = scaled_characteristic(mid);
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if fm * flo < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    let mut mu = 0.5 * (lo + hi);
    for _ in 0..4 {
        let step = scaled_characteristic(mu) / scaled_characteristic_derivative(mu);
        if !step.is_finite() {
            break;
        }
        mu -= step;
    }
    if !mu.is_finite() || (mu - centre).abs() > 0.5 {
        return Err(Error::RootBracket { k });
    }
    Ok(mu)
}

impl ClampedBasis {
    /// Build the first `k_max` eigenfunctions.
    pub fn new(k_max: usize) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::InvalidInput("clamped basis needs K ≥ 1".into()));
        }
        let mut basis = Self {
            mu: Vec::with_capacity(k_max),
            sigma: Vec::with_capacity(k_max),
            growth: Vec::with_capacity(k_max),
            scale: Vec::with_capacity(k_max),
        };
        for k in 1..=k_max {
            let mu = clamped_root(k)?;
            let e = (-mu).exp();
            let (s, c) = mu.sin_cos();
            let den = 1.0 - e * e - 2.0 * e * s;
            let sigma = (1.0 + e * e - 2.0 * e * c) / den;
            let growth = (c - s - e) / den;
            basis.mu.push(mu);
            basis.sigma.push(sigma);
            basis.growth.push(growth);
            basis.scale.push(1.0);
        }
        // Normalise numerically; the classical normalisation makes these
        // close to 1 already.
        let rule = CompositeRule::new(0.0, 1.0, 4 * k_max.max(8), 12);
        for k in 1..=k_max {
            let norm2 = rule.integrate(|x| basis.eval(k, x, 0).powi(2));
            basis.scale[k - 1] = 1.0 / norm2.sqrt();
        }
        Ok(basis)
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    /// `μ_k`, `k ≥ 1`.
    pub fn mu(&self, k: usize) -> f64 {
        self.mu[k - 1]
    }

    pub fn sigma(&self, k: usize) -> f64 {
        self.sigma[k - 1]
    }

    /// Eigenvalue `μ_k⁴` of the clamped biharmonic operator.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        self.mu[k - 1].powi(4)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        (1..=self.len()).map(|k| self.eigenvalue(k)).collect()
    }

    /// `|cos μ_k cosh μ_k − 1|`; only meaningful while `cosh μ_k` is moderate.
    pub fn characteristic_residual(&self, k: usize) -> f64 {
        let mu = self.mu(k);
        (mu.cos() * mu.cosh() - 1.0).abs()
    }

    /// `|cos μ_k − sech μ_k|`, the same equation divided by `cosh μ_k`.
    pub fn scaled_residual(&self, k: usize) -> f64 {
        scaled_characteristic(self.mu(k)).abs()
    }

    /// `order`-th derivative (0..=3) of `φ_k` at `x`.
    pub fn eval(&self, k: usize, x: f64, order: u32) -> f64 {
        let i = k - 1;
        let mu = self.mu[i];
        let sigma = self.sigma[i];
        let m = mu.powi(order as i32);
        let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
        let hyper = self.growth[i] * (mu * (x - 1.0)).exp() + sign * 0.5 * (1.0 + sigma) * (-mu * x).exp();
        let (s, c) = (mu * x).sin_cos();
        // −cos μx + σ sin μx and its derivatives.
        let trig = match order % 4 {
            0 => -c + sigma * s,
            1 => s + sigma * c,
            2 => c - sigma * s,
            _ => -s - sigma * c,
        };
        self.scale[i] * m * (hyper + trig)
    }

    /// `φ_k''(0) = 2μ²` (times the normalisation).
    pub fn d2_at_zero(&self, k: usize) -> f64 {
        2.0 * self.scale[k - 1] * self.mu(k).powi(2)
    }

    /// `φ_k'''(0) = −2σμ³` (times the normalisation).
    pub fn d3_at_zero(&self, k: usize) -> f64 {
        -2.0 * self.scale[k - 1] * self.sigma(k) * self.mu(k).powi(3)
    }

    /// `(1+μ_k²)^s`-weighted norm, the clamped analogue of the sine `H^s`
    /// weight.
    pub fn h_norm(&self, coeffs: &[C64], s: f64) -> f64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (1.0 + self.mu[i].powi(2)).powf(s) * c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Sum `Σ c_k φ_k^{(order)}(x)`.
    pub fn synthesize(&self, coeffs: &[C64], x: f64, order: u32) -> C64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * self.eval(i + 1, x, order))
            .sum()
    }
}

/// `c_k ↦ e^{iμ_k⁴ t} c_k`.
pub fn propagate_dirichlet(basis: &ClampedBasis, state: &ClampedState, t: f64) -> ClampedState {
    ClampedState {
        coeffs: state
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * cis(basis.eigenvalue(i + 1) * t))
            .collect(),
        time: state.time + t,
    }
}

/// Quadrature-based projector onto the clamped basis.
#[derive(Clone, Debug)]
pub struct ClampedProjector {
    rule: CompositeRule,
    /// `table[k-1][j] = φ_k(x_j)`.
    table: Vec<Vec<f64>>,
}

impl ClampedProjector {
    pub fn new(basis: &ClampedBasis, panels: usize, order: usize) -> Self {
        let rule = CompositeRule::new(0.0, 1.0, panels, order);
        let table = (1..=basis.len())
            .map(|k| rule.nodes.iter().map(|&x| basis.eval(k, x, 0)).collect())
            .collect();
        Self { rule, table }
    }

    /// Default resolution for `K` modes.
    pub fn for_basis(basis: &ClampedBasis) -> Self {
        Self::new(basis, (2 * basis.len()).max(32), 10)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.rule.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.rule.weights
    }

    /// `⟨f, φ_k⟩` from values at the quadrature nodes.
    pub fn project(&self, values: &[C64]) -> Vec<C64> {
        self.table
            .iter()
            .map(|row| {
                row.iter()
                    .zip(values)
                    .zip(&self.rule.weights)
                    .map(|((p, v), w)| v * (p * w))
                    .sum()
            })
            .collect()
    }

    /// Values of `Σ c_k φ_k` at the nodes.
    pub fn synthesize(&self, coeffs: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.rule.nodes.len()];
        for (row, c) in self.table.iter().zip(coeffs) {
            if c.norm_sqr() == 0.0 {
                continue;
            }
            for (o, p) in out.iter_mut().zip(row) {
                *o += c * p;
            }
        }
        out
    }

    /// Relative `L²` residual `‖f − P f‖ / ‖f‖` of the projection.
    pub fn residual(&self, values: &[C64]) -> f64 {
        let coeffs = self.project(values);
        let back = self.synthesize(&coeffs);
        let (mut num, mut den) = (0.0, 0.0);
        for ((v, b), w) in values.iter().zip(&back).zip(&self.rule.weights) {
            num += w * (v - b).norm_sqr();
            den += w * v.norm_sqr();
        }
        if den == 0.0 {
            0.0
        } else {
            (num / den).sqrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bisect(k: usize) -> f64 {
        let f = |m: f64| m.cos() * m.cosh() - 1.0;
        let c = (k as f64 + 0.5) * PI;
        let (mut a, mut b) = (c - 0.5, c + 0.5);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(a) * f(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn first_roots() {
        let b = ClampedBasis::new(5).unwrap();
        assert!((b.mu(1) - 4.7300408).abs() < 1e-7);
        assert!((b.mu(2) - 7.8532046).abs() < 1e-7);
        assert!((b.mu(1) - bisect(1)).abs() < 1e-12);
        assert!((b.mu(2) - bisect(2)).abs() < 1e-12);
        assert!((b.mu(5) - 5.5 * PI).abs() < 1e-4);
        let gaps: Vec<f64> = (1..=5).map(|k| (b.mu(k) - (k as f64 + 0.5) * PI).abs()).collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn characteristic_equation_holds() {
        let b = ClampedBasis::new(200).unwrap();
        for k in 1..=2 {
            assert!(b.characteristic_residual(k) <= 1e-12, "k={k}");
        }
        for k in 1..=200 {
            assert!(b.scaled_residual(k) <= 1e-12, "k={k}");
        }
    }

    #[test]
    fn boundary_conditions_and_derivatives() {
        let b = ClampedBasis::new(60).unwrap();
        for k in 1..=60 {
            for x in [0.0, 1.0] {
                assert!(b.eval(k, x, 0).abs() < 1e-10, "k={k} x={x}");
                let scale = b.mu(k);
                assert!(b.eval(k, x, 1).abs() < 1e-10 * scale, "k={k} x={x}");
            }
            let d2 = b.eval(k, 0.0, 2);
            let d3 = b.eval(k, 0.0, 3);
            assert!((d2 - b.d2_at_zero(k)).abs() < 1e-10 * d2.abs());
            assert!((d3 - b.d3_at_zero(k)).abs() < 1e-10 * d3.abs());
        }
    }

    #[test]
    fn mirror_symmetry() {
        let b = ClampedBasis::new(12).unwrap();
        for k in 1..=12 {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            for x in [0.1, 0.33, 0.5, 0.8] {
                assert!((b.eval(k, 1.0 - x, 0) - sign * b.eval(k, x, 0)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn eigen_equation_by_finite_differences() {
        let b = ClampedBasis::new(3).unwrap();
        let h = 1e-3;
        for k in 1..=3 {
            let x = 0.4;
            let d3p = b.eval(k, x + h, 3);
            let d3m = b.eval(k, x - h, 3);
            let d4 = (d3p - d3m) / (2.0 * h);
            let lhs = b.eigenvalue(k) * b.eval(k, x, 0);
            assert!((d4 - lhs).abs() < 1e-4 * b.eigenvalue(k), "k={k}");
        }
    }

    #[test]
    fn propagation_is_a_phase() {
        let b = ClampedBasis::new(2).unwrap();
        let st = ClampedState {
            coeffs: vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            time: 0.0,
        };
        assert_eq!(propagate_dirichlet(&b, &st, 0.0).coeffs, st.coeffs);
        let out = propagate_dirichlet(&b, &st, 0.01);
        let expect = cis(b.eigenvalue(1) * 0.01);
        assert!((out.coeffs[0] - expect).norm() < 1e-15);
        assert!((out.coeffs[0].norm() - 1.0).abs() < 1e-15);
        let z = ClampedState::zeros(2);
        assert_eq!(propagate_dirichlet(&b, &z, 0.3).coeffs, z.coeffs);
    }
}
