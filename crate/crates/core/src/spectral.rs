//! Coefficient representations of functions on `(0,1)`.
//!
//! A [`FourierState`] stores truncated sine and cosine coefficients
//!
//! ```text
//! u(x) = p₀ + Σ_{k=1}^{N} p_k cos(kπx) + Σ_{k=1}^{N} q_k sin(kπx)
//! ```
//!
//! Two coefficient conventions are in use. For the sine basis of the Navier
//! problem, `q_k = 2∫₀¹ φ sin(kπx)` so that the series reproduces `φ` on
//! `(0,1)`. For the odd/even splitting of the Dirichlet problem, the factor
//! `½` is folded into the extensions: `q_k = ∫₀¹ φ sin`, `p_k = ∫₀¹ φ cos`,
//! `p₀ = ½∫₀¹ φ`, and the two series sum to `φ`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::transform::Transform;
use crate::{Error, Result, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Sine,
    Cosine,
    Mixed,
}

impl Basis {
    /// Smallest basis containing both arguments.
    pub fn join(self, other: Basis) -> Basis {
        if self == other {
            self
        } else {
            Basis::Mixed
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    SpaceInterval,
    TimeInterval,
}

/// A regularity exponent tagged with the variable it measures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevIndex {
    s: f64,
    domain: Domain,
}

impl SobolevIndex {
    /// Spatial index, restricted to the working range `[0, 9/2]`.
    pub fn space(s: f64) -> Result<Self> {
        if !(0.0..=4.5).contains(&s) {
            return Err(Error::InvalidInput(format!(
                "spatial Sobolev index s={s} outside [0, 9/2]"
            )));
        }
        Ok(Self {
            s,
            domain: Domain::SpaceInterval,
        })
    }

    pub fn time(s: f64) -> Result<Self> {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "time Sobolev index must be non-negative, got {s}"
            )));
        }
        Ok(Self {
            s,
            domain: Domain::TimeInterval,
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }
}

/// Truncated coefficient vector of a function on `(0,1)` at time `time`.
///
/// Both coefficient vectors always have length `N`; the ones that do not
/// belong to the basis are identically zero.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierState {
    basis: Basis,
    mean: C64,
    cosine: Vec<C64>,
    sine: Vec<C64>,
    time: f64,
}

impl FourierState {
    /// Validated constructor.
    pub fn new(basis: Basis, mean: C64, cosine: Vec<C64>, sine: Vec<C64>, time: f64) -> Result<Self> {
        let n = sine.len();
        if n == 0 {
            return Err(Error::InvalidInput("truncation order N must be at least 1".into()));
        }
        if cosine.len() != n {
            return Err(Error::InvalidInput(format!(
                "sine and cosine parts disagree on N ({} vs {})",
                n,
                cosine.len()
            )));
        }
        let finite = |c: &C64| c.re.is_finite() && c.im.is_finite();
        if !finite(&mean) || !sine.iter().all(finite) || !cosine.iter().all(finite) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        match basis {
            Basis::Sine if mean != ZERO || cosine.iter().any(|c| *c != ZERO) => {
                return Err(Error::InvalidInput("sine state with cosine content".into()))
            }
            Basis::Cosine if sine.iter().any(|c| *c != ZERO) => {
                return Err(Error::InvalidInput("cosine state with sine content".into()))
            }
            _ => {}
        }
        Ok(Self {
            basis,
            mean,
            cosine,
            sine,
            time,
        })
    }

    pub fn zeros(basis: Basis, n: usize) -> Self {
        assert!(n >= 1, "truncation order N must be at least 1");
        Self {
            basis,
            mean: ZERO,
            cosine: vec![ZERO; n],
            sine: vec![ZERO; n],
            time: 0.0,
        }
    }

    /// Sine state with `q[k-1] = q_k`.
    ///
    /// # Panics
    /// If `q` is empty.
    pub fn from_sine(q: Vec<C64>) -> Self {
        assert!(!q.is_empty(), "truncation order N must be at least 1");
        let n = q.len();
        Self {
            basis: Basis::Sine,
            mean: ZERO,
            cosine: vec![ZERO; n],
            sine: q,
            time: 0.0,
        }
    }

    /// Cosine state with mean `p0` and `p[k-1] = p_k`.
    pub fn from_cosine(p0: C64, p: Vec<C64>) -> Self {
        assert!(!p.is_empty(), "truncation order N must be at least 1");
        let n = p.len();
        Self {
            basis: Basis::Cosine,
            mean: p0,
            cosine: p,
            sine: vec![ZERO; n],
            time: 0.0,
        }
    }

    pub fn mixed(p0: C64, p: Vec<C64>, q: Vec<C64>) -> Self {
        assert!(!q.is_empty() && p.len() == q.len());
        Self {
            basis: Basis::Mixed,
            mean: p0,
            cosine: p,
            sine: q,
            time: 0.0,
        }
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.time = t;
        self
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// Truncation order `N`.
    pub fn modes(&self) -> usize {
        self.sine.len()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Constant cosine mode `p₀`.
    pub fn mean(&self) -> C64 {
        self.mean
    }

    /// Sine coefficients, `sine()[k-1] = q_k`.
    pub fn sine(&self) -> &[C64] {
        &self.sine
    }

    /// Cosine coefficients, `cosine()[k-1] = p_k`.
    pub fn cosine(&self) -> &[C64] {
        &self.cosine
    }

    /// Multiply every mode `k ≥ 1` by `factor(k)`, leaving `p₀` unchanged.
    pub fn scale_modes<F: Fn(usize) -> C64>(&self, factor: F) -> Self {
        self.scale_parts(&factor, &factor)
    }

    /// Multiply sine and cosine modes by separate factors.
    pub fn scale_parts<F, G>(&self, sine_factor: F, cosine_factor: G) -> Self
    where
        F: Fn(usize) -> C64,
        G: Fn(usize) -> C64,
    {
        let mut out = self.clone();
        for (i, q) in out.sine.iter_mut().enumerate() {
            if *q != ZERO {
                *q *= sine_factor(i + 1);
            }
        }
        for (i, p) in out.cosine.iter_mut().enumerate() {
            if *p != ZERO {
                *p *= cosine_factor(i + 1);
            }
        }
        out
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = self.clone();
        out.mean *= c;
        out.sine.iter_mut().for_each(|q| *q *= c);
        out.cosine.iter_mut().for_each(|p| *p *= c);
        out
    }

    /// `self + c·other`; the basis of the result is the join of both bases.
    pub fn axpy(&self, c: C64, other: &FourierState) -> Result<Self> {
        if self.modes() != other.modes() {
            return Err(Error::InvalidInput(format!(
                "cannot combine states with N={} and N={}",
                self.modes(),
                other.modes()
            )));
        }
        let mut out = self.clone();
        out.basis = self.basis.join(other.basis);
        out.mean += c * other.mean;
        for (a, b) in out.sine.iter_mut().zip(&other.sine) {
            *a += c * b;
        }
        for (a, b) in out.cosine.iter_mut().zip(&other.cosine) {
            *a += c * b;
        }
        Ok(out)
    }

    pub fn add(&self, other: &FourierState) -> Result<Self> {
        self.axpy(C64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &FourierState) -> Result<Self> {
        self.axpy(C64::new(-1.0, 0.0), other)
    }

    /// `(|p₀|² + ½Σ(|p_k|² + |q_k|²))^{1/2}`.
    ///
    /// For a pure sine or cosine state this is the `L²(0,1)` norm of the
    /// series. For a mixed state it is the normalised `L²(-1,1)` norm of the
    /// 2-periodic function the coefficients describe.
    pub fn l2_norm(&self) -> f64 {
        let modes: f64 = self
            .sine
            .iter()
            .chain(&self.cosine)
            .map(|c| c.norm_sqr())
            .sum();
        (self.mean.norm_sqr() + 0.5 * modes).sqrt()
    }

    /// Truncated `H^s` norm with weight `(1+(kπ)²)^s`.
    pub fn h_norm(&self, s: f64) -> f64 {
        let mut acc = self.mean.norm_sqr();
        for k in 1..=self.modes() {
            let w = (1.0 + (k as f64 * PI).powi(2)).powf(s);
            acc += w * (self.sine[k - 1].norm_sqr() + self.cosine[k - 1].norm_sqr());
        }
        acc.sqrt()
    }
}

/// `(|p₀|² + Σ_k (1+(kπ)²)^s (|q_k|²+|p_k|²))^{1/2}`.
pub fn sobolev_norm(state: &FourierState, idx: SobolevIndex) -> Result<f64> {
    if idx.domain() != Domain::SpaceInterval {
        return Err(Error::InvalidInput(
            "sobolev_norm measures spatial regularity; got a time index".into(),
        ));
    }
    Ok(state.h_norm(idx.s()))
}

/// Evaluate the series at arbitrary points.
pub fn reconstruct(state: &FourierState, grid: &[f64]) -> Vec<C64> {
    reconstruct_derivative(state, grid, 0)
}

/// Evaluate the `order`-th spatial derivative of the series term by term.
pub fn reconstruct_derivative(state: &FourierState, grid: &[f64], order: u32) -> Vec<C64> {
    grid.iter()
        .map(|&x| {
            let mut acc = if order == 0 { state.mean } else { ZERO };
            for k in 1..=state.modes() {
                let kp = k as f64 * PI;
                let (s, c) = (kp * x).sin_cos();
                let scale = kp.powi(order as i32);
                // d^m/dx^m sin = kp^m sin(θ + mπ/2), likewise for cos.
                let (ds, dc) = match order % 4 {
                    0 => (s, c),
                    1 => (c, -s),
                    2 => (-s, -c),
                    _ => (-c, s),
                };
                acc += scale * (state.sine[k - 1] * ds + state.cosine[k - 1] * dc);
            }
            acc
        })
        .collect()
}

/// Default number of trapezoid intervals used for callable inputs.
pub fn default_grid(n: usize) -> usize {
    (4 * n + 1).max(4096)
}

fn sample<F: Fn(f64) -> C64>(f: F, m: usize) -> Result<Vec<C64>> {
    let values: Vec<C64> = (0..=m).map(|j| f(j as f64 / m as f64)).collect();
    check_finite(&values)?;
    Ok(values)
}

fn check_finite(values: &[C64]) -> Result<()> {
    if values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput("non-finite samples".into()))
    }
}

/// `q_k = 2∫₀¹ φ sin(kπx) dx`, `k = 1..=n`, on the default trapezoid grid.
pub fn sine_coefficients<F: Fn(f64) -> C64>(f: F, n: usize) -> Result<FourierState> {
    sine_coefficients_on_grid(f, n, default_grid(n))
}

/// As [`sine_coefficients`] with an explicit number of grid intervals.
pub fn sine_coefficients_on_grid<F: Fn(f64) -> C64>(f: F, n: usize, m: usize) -> Result<FourierState> {
    sine_coefficients_from_samples(&sample(f, m)?, n)
}

/// Sine coefficients from samples `f(j/M)`, `j = 0..=M`, with `M > n`.
pub fn sine_coefficients_from_samples(samples: &[C64], n: usize) -> Result<FourierState> {
    if n == 0 {
        return Err(Error::InvalidInput("truncation order N must be at least 1".into()));
    }
    if samples.len() < n + 2 {
        return Err(Error::InvalidInput(format!(
            "{} samples cannot resolve {} sine modes",
            samples.len(),
            n
        )));
    }
    check_finite(samples)?;
    let m = samples.len() - 1;
    let s = Transform::new(m).dst1(samples);
    let scale = 2.0 / m as f64;
    Ok(FourierState::from_sine((1..=n).map(|k| s[k] * scale).collect()))
}

/// Odd and even parts of `φ` with the `½`-convention (see module docs).
pub fn odd_even_extend<F: Fn(f64) -> C64>(f: F, n: usize) -> Result<(FourierState, FourierState)> {
    odd_even_from_samples(&sample(f, default_grid(n))?, n)
}

/// Odd/even splitting from samples `f(j/M)`, `j = 0..=M`.
pub fn odd_even_from_samples(samples: &[C64], n: usize) -> Result<(FourierState, FourierState)> {
    if n == 0 {
        return Err(Error::InvalidInput("truncation order N must be at least 1".into()));
    }
    if samples.len() < n + 2 {
        return Err(Error::InvalidInput(format!(
            "{} samples cannot resolve {} modes",
            samples.len(),
            n
        )));
    }
    check_finite(samples)?;
    let m = samples.len() - 1;
    let t = Transform::new(m);
    let h = 1.0 / m as f64;
    let s = t.dst1(samples);
    let c = t.dct1(samples);
    let odd = FourierState::from_sine((1..=n).map(|k| s[k] * h).collect());
    let even = FourierState::from_cosine(0.5 * c[0] * h, (1..=n).map(|k| c[k] * h).collect());
    Ok((odd, even))
}
