//! Boundary-integral operators, polynomial lifts and boundary-trace
//! extraction.
//!
//! # Navier data
//!
//! A sine mode of the solution obeys `i q_k' + (kπ)⁴ q_k = β_k` where the
//! boundary values enter through integration by parts:
//!
//! ```text
//! β_k = 2(kπ)³ h₁ − 2kπ h₅ − (−1)^k [2(kπ)³ h₂ − 2kπ h₆].
//! ```
//!
//! Hence `q_k = −i∫e^{i(kπ)⁴(t−τ)}β_k`. The tabulated weights
//! [`navier0_weight`]`= 2i(kπ)³` and [`navier2_weight`]`= −2ikπ` are the
//! published ones; [`w0n`] and [`w2n`] apply their negatives, which is the
//! sign that makes the assembled series take the value `h₁` at `x = 0`.
//!
//! # Dirichlet data
//!
//! [`w0d`]/[`w1d`] evaluate the published trigonometric formulas with the
//! `β` table. The solver uses the clamped-basis realisation
//! [`w0d_clamped`]/[`w1d_clamped`], obtained the same way from
//! `i c_k' + μ_k⁴ c_k = [vφ_k''' − v'φ_k'']₀¹`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::clamped::{ClampedBasis, ClampedState};
use crate::flow::{convolve_exponential, convolve_trace, convolve_trace_grid, navier_frequency};
use crate::spectral::{Basis, FourierState};
use crate::trace::{solve_dense, BoundaryTrace};
use crate::{parity, Error, Result, C64, PI4};

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Published zero-order Navier weight `2i(kπ)³`.
pub fn navier0_weight(k: usize) -> C64 {
    C64::new(0.0, 2.0 * (k as f64 * PI).powi(3))
}

/// Published second-order Navier weight `−2ikπ`.
pub fn navier2_weight(k: usize) -> C64 {
    C64::new(0.0, -2.0 * k as f64 * PI)
}

/// `β₀₁ = −i(kπ)³ − 6ikπ(cos kπ + 1)`.
pub fn beta01(k: usize) -> C64 {
    let kp = k as f64 * PI;
    let c = parity(k);
    C64::new(0.0, -kp.powi(3) - 6.0 * kp * (c + 1.0))
}

/// `β₀₂ = 12i(kπ − 1)`.
pub fn beta02(k: usize) -> C64 {
    let kp = k as f64 * PI;
    C64::new(0.0, 12.0 * (kp - 1.0))
}

/// `β₁₁ = −2ikπ(cos kπ + 2)`.
pub fn beta11(k: usize) -> C64 {
    let kp = k as f64 * PI;
    let c = parity(k);
    C64::new(0.0, -2.0 * kp * (c + 2.0))
}

/// `β₁₂ = i(kπ)² + 6i(cos kπ − 1)`.
pub fn beta12(k: usize) -> C64 {
    let kp = k as f64 * PI;
    let c = parity(k);
    C64::new(0.0, kp.powi(2) + 6.0 * (c - 1.0))
}

/// Assembled coefficient table for `k = 1..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct BetaTable {
    pub navier0: Vec<C64>,
    pub navier2: Vec<C64>,
    pub beta01: Vec<C64>,
    pub beta02: Vec<C64>,
    pub beta11: Vec<C64>,
    pub beta12: Vec<C64>,
}

impl BetaTable {
    pub fn new(n: usize) -> Self {
        let col = |f: fn(usize) -> C64| (1..=n).map(f).collect::<Vec<_>>();
        Self {
            navier0: col(navier0_weight),
            navier2: col(navier2_weight),
            beta01: col(beta01),
            beta02: col(beta02),
            beta11: col(beta11),
            beta12: col(beta12),
        }
    }

    pub fn len(&self) -> usize {
        self.beta01.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta01.is_empty()
    }
}

/// The reflection `x ↦ 1 − x` acting on coefficients.
#[derive(Clone, Copy, Debug, Default)]
pub struct MirrorMap;

impl MirrorMap {
    /// `q_k ↦ (−1)^{k+1} q_k`, `p_k ↦ (−1)^k p_k`, `p₀ ↦ p₀`.
    pub fn apply(&self, state: &FourierState) -> FourierState {
        state.scale_parts(|k| C64::new(-parity(k), 0.0), |k| C64::new(parity(k), 0.0))
    }

    /// Clamped modes satisfy `φ_k(1−x) = (−1)^{k+1} φ_k(x)`.
    pub fn apply_clamped(&self, coeffs: &[C64]) -> Vec<C64> {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| -parity(i + 1) * c)
            .collect()
    }
}

pub fn mirror(state: &FourierState) -> FourierState {
    MirrorMap.apply(state)
}

/// Whether boundary operators insist on the corner condition `h(0) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Compatibility {
    Enforce,
    Ignore,
}

const CORNER_TOL: f64 = 1e-12;

fn check_corner(h: &BoundaryTrace, compat: Compatibility) -> Result<()> {
    if compat == Compatibility::Enforce {
        let v = h.eval(0.0).norm();
        if v > CORNER_TOL {
            return Err(Error::Incompatible { value: v });
        }
    }
    Ok(())
}

/// `q_k = −W_k ∫₀ᵗ e^{i(kπ)⁴(t−τ)} h(τ) dτ` for a weight sequence `W_k`.
fn navier_operator(h: &BoundaryTrace, t: f64, n: usize, weight: fn(usize) -> C64) -> Result<FourierState> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    let q = (1..=n)
        .into_par_iter()
        .map(|k| Ok(-weight(k) * convolve_trace(navier_frequency(k), h, t)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(FourierState::from_sine(q).with_time(t))
}

/// Zero-order Navier boundary operator (data `u(0,t) = h`).
pub fn w0n(h: &BoundaryTrace, t: f64, n: usize, compat: Compatibility) -> Result<FourierState> {
    check_corner(h, compat)?;
    navier_operator(h, t, n, navier0_weight)
}

/// Second-order Navier boundary operator (data `u_xx(0,t) = h`).
pub fn w2n(h: &BoundaryTrace, t: f64, n: usize, compat: Compatibility) -> Result<FourierState> {
    check_corner(h, compat)?;
    navier_operator(h, t, n, navier2_weight)
}

/// Coefficient convention for the trigonometric `W_{1,D}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum W1dConvention {
    /// Sine part `−iβ₁₁`, cosine part `−iβ₁₂ kπ`, as in the operator's own
    /// display.
    #[default]
    Display,
    /// Sine part `β₁₁`, cosine part `β₁₂`, as in the coefficient table.
    Table,
}

fn dirichlet_trig(
    h: &BoundaryTrace,
    t: f64,
    n: usize,
    sine_w: &(dyn Fn(usize) -> C64 + Sync),
    cos_w: &(dyn Fn(usize) -> C64 + Sync),
    mean_factor: f64,
) -> Result<FourierState> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    let conv = (1..=n)
        .into_par_iter()
        .map(|k| convolve_trace(navier_frequency(k), h, t))
        .collect::<Result<Vec<_>>>()?;
    let sine = conv.iter().enumerate().map(|(i, c)| sine_w(i + 1) * c).collect();
    let cosine = conv.iter().enumerate().map(|(i, c)| cos_w(i + 1) * c).collect();
    FourierState::new(Basis::Mixed, mean_factor * h.eval(t), cosine, sine, t)
}

/// Trigonometric zero-order Dirichlet operator: sine part `β₀₁`, cosine part
/// `β₀₂`, mean `¼h(t)` (half the mean of the cubic lift, matching the
/// odd/even coefficient convention).
pub fn w0d(h: &BoundaryTrace, t: f64, n: usize, compat: Compatibility) -> Result<FourierState> {
    check_corner(h, compat)?;
    dirichlet_trig(h, t, n, &beta01, &beta02, 0.25)
}

/// Trigonometric first-order Dirichlet operator, mean `h(t)/24`.
pub fn w1d(
    h: &BoundaryTrace,
    t: f64,
    n: usize,
    compat: Compatibility,
    convention: W1dConvention,
) -> Result<FourierState> {
    check_corner(h, compat)?;
    match convention {
        W1dConvention::Display => dirichlet_trig(
            h,
            t,
            n,
            &|k| -I * beta11(k),
            &|k| -I * beta12(k) * (k as f64 * PI),
            1.0 / 24.0,
        ),
        W1dConvention::Table => dirichlet_trig(h, t, n, &beta11, &beta12, 1.0 / 24.0),
    }
}

/// Clamped zero-order operator: `c_k = i φ_k'''(0) ∫₀ᵗ e^{iμ_k⁴(t−τ)} h dτ`.
pub fn w0d_clamped(basis: &ClampedBasis, h: &BoundaryTrace, t: f64, compat: Compatibility) -> Result<ClampedState> {
    check_corner(h, compat)?;
    let coeffs = (1..=basis.len())
        .into_par_iter()
        .map(|k| Ok(I * basis.d3_at_zero(k) * convolve_trace(basis.eigenvalue(k), h, t)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClampedState { coeffs, time: t })
}

/// Clamped first-order operator: `c_k = −i φ_k''(0) ∫₀ᵗ e^{iμ_k⁴(t−τ)} h dτ`.
pub fn w1d_clamped(basis: &ClampedBasis, h: &BoundaryTrace, t: f64, compat: Compatibility) -> Result<ClampedState> {
    check_corner(h, compat)?;
    let coeffs = (1..=basis.len())
        .into_par_iter()
        .map(|k| Ok(-I * basis.d2_at_zero(k) * convolve_trace(basis.eigenvalue(k), h, t)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClampedState { coeffs, time: t })
}

/// Convolutions `∫₀^{t_j} e^{iω_m(t_j−τ)} h(τ)dτ` for all modes on the grid
/// `t_j = j·dt`, returned as `[node][mode]`.
pub fn trace_response_grid(omegas: &[f64], h: &BoundaryTrace, dt: f64, steps: usize) -> Result<Vec<Vec<C64>>> {
    if h.is_zero() {
        return Ok(vec![vec![ZERO; omegas.len()]; steps + 1]);
    }
    let cols = omegas
        .par_iter()
        .map(|&w| convolve_trace_grid(w, h, dt, steps))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..=steps)
        .map(|j| cols.iter().map(|c| c[j]).collect())
        .collect())
}

/// A cubic polynomial `Σ_{j≤3} c_j x^j` used as a boundary lift.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cubic {
    pub c: [C64; 4],
}

impl Cubic {
    pub fn zero() -> Self {
        Self { c: [ZERO; 4] }
    }

    fn powers_of_one_minus_x(a1: C64, a2: C64, a3: C64) -> Self {
        // a1 (1−x) + a2 (1−x)² + a3 (1−x)³
        Self {
            c: [
                a1 + a2 + a3,
                -a1 - 2.0 * a2 - 3.0 * a3,
                a2 + 3.0 * a3,
                -a3,
            ],
        }
    }

    fn reflect(&self) -> Self {
        // p(1 − x)
        let [c0, c1, c2, c3] = self.c;
        Self {
            c: [
                c0 + c1 + c2 + c3,
                -c1 - 2.0 * c2 - 3.0 * c3,
                c2 + 3.0 * c3,
                -c3,
            ],
        }
    }

    pub fn add(&self, other: &Cubic) -> Cubic {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(other.c) {
            *a += b;
        }
        Cubic { c }
    }

    pub fn value(&self, x: f64) -> C64 {
        self.derivative(x, 0)
    }

    pub fn derivative(&self, x: f64, m: u32) -> C64 {
        let [c0, c1, c2, c3] = self.c;
        match m {
            0 => c0 + x * (c1 + x * (c2 + x * c3)),
            1 => c1 + x * (2.0 * c2 + 3.0 * x * c3),
            2 => 2.0 * c2 + 6.0 * x * c3,
            3 => 6.0 * c3,
            _ => ZERO,
        }
    }

    /// `2∫₀¹ g sin(kπx)dx`, `k = 1..=n`, in closed form.
    pub fn sine_coefficients(&self, n: usize) -> Vec<C64> {
        let (g0, g1) = (self.value(0.0), self.value(1.0));
        let (s0, s1) = (self.derivative(0.0, 2), self.derivative(1.0, 2));
        (1..=n)
            .map(|k| {
                let kp = k as f64 * PI;
                let sg = parity(k);
                2.0 * ((g0 - sg * g1) / kp - (s0 - sg * s1) / kp.powi(3))
            })
            .collect()
    }

    /// `∫₀¹ g cos(kπx)dx`, `k = 1..=n`, in closed form.
    pub fn cosine_integrals(&self, n: usize) -> Vec<C64> {
        let (d0, d1) = (self.derivative(0.0, 1), self.derivative(1.0, 1));
        let (t0, t1) = (self.derivative(0.0, 3), self.derivative(1.0, 3));
        (1..=n)
            .map(|k| {
                let kp = k as f64 * PI;
                let sg = parity(k);
                -(d0 - sg * d1) / kp.powi(2) + (t0 - sg * t1) / kp.powi(4)
            })
            .collect()
    }

    /// `∫₀¹ g dx`.
    pub fn integral(&self) -> C64 {
        let [c0, c1, c2, c3] = self.c;
        c0 + c1 / 2.0 + c2 / 3.0 + c3 / 4.0
    }

    /// `⟨g, φ_k⟩ = μ_k⁻⁴ [g φ_k''' − g' φ_k'']₀¹` (exact since `g'''' = 0`).
    pub fn clamped_coefficients(&self, basis: &ClampedBasis) -> Vec<C64> {
        let (g0, g1) = (self.value(0.0), self.value(1.0));
        let (d0, d1) = (self.derivative(0.0, 1), self.derivative(1.0, 1));
        (1..=basis.len())
            .map(|k| {
                let (p2, p3) = (basis.d2_at_zero(k), basis.d3_at_zero(k));
                // φ'''(1) = (−1)^k φ'''(0), φ''(1) = (−1)^{k+1} φ''(0)
                let sg = parity(k);
                let p3_1 = sg * p3;
                let p2_1 = -sg * p2;
                (g1 * p3_1 - d1 * p2_1 - g0 * p3 + d0 * p2) / basis.eigenvalue(k)
            })
            .collect()
    }
}

/// `(1−x)(h₁ − h₅/6) + (1−x)³h₅/6`: value `h₁` and curvature `h₅` at 0,
/// both vanishing at 1.
pub fn navier_lift(h1: C64, h5: C64) -> Cubic {
    Cubic::powers_of_one_minus_x(h1 - h5 / 6.0, ZERO, h5 / 6.0)
}

/// Navier lift for all four data: left lift plus the reflected right lift.
pub fn navier_lift_full(h1: C64, h5: C64, h2: C64, h6: C64) -> Cubic {
    navier_lift(h1, h5).add(&navier_lift(h2, h6).reflect())
}

/// `(1−x)²(3h₁+h₃) − (1−x)³(2h₁+h₃)`: value `h₁` and slope `h₃` at 0,
/// value and slope zero at 1.
pub fn dirichlet_lift(h1: C64, h3: C64) -> Cubic {
    Cubic::powers_of_one_minus_x(ZERO, 3.0 * h1 + h3, -(2.0 * h1 + h3))
}

/// Dirichlet lift with `u(0)=h₁, u'(0)=h₃, u(1)=h₂, u'(1)=h₄`.
///
/// The right-end data enter the reflected left lift with slope `−h₄`, since
/// reflection flips the sign of a first derivative.
pub fn dirichlet_lift_full(h1: C64, h3: C64, h2: C64, h4: C64) -> Cubic {
    dirichlet_lift(h1, h3).add(&dirichlet_lift(h2, -h4).reflect())
}

/// Boundary traces of the periodic flow of the odd/even extensions.
#[derive(Clone, Debug)]
pub struct DirichletTraces {
    /// `u_o + u_e` at `x = 0`.
    pub r1: BoundaryTrace,
    /// `u_o + u_e` at `x = 1`.
    pub r2: BoundaryTrace,
    /// `∂ₓ(u_o + u_e)` at `x = 0`.
    pub r3: BoundaryTrace,
    /// `∂ₓ(u_o + u_e)` at `x = 1`.
    pub r4: BoundaryTrace,
    pub odd: FourierState,
    pub even: FourierState,
}

/// `r₁ = p₀ + Σp_k e^{i(kπ)⁴t}`, `r₂` with `cos kπ`, `r₃ = Σ kπ q_k e^{i(kπ)⁴t}`,
/// `r₄` with `cos kπ`; frequencies `k⁴` on the `π⁴` lattice.
pub fn dirichlet_traces(odd: &FourierState, even: &FourierState) -> Result<DirichletTraces> {
    if odd.basis() != Basis::Sine {
        return Err(Error::BasisMismatch {
            expected: Basis::Sine,
            found: odd.basis(),
        });
    }
    if even.basis() != Basis::Cosine {
        return Err(Error::BasisMismatch {
            expected: Basis::Cosine,
            found: even.basis(),
        });
    }
    let freq = |k: usize| -> Result<i64> {
        (k as i64)
            .checked_pow(4)
            .ok_or_else(|| Error::InvalidInput(format!("mode {k} overflows the trace lattice")))
    };
    let mut r1 = vec![(0, even.mean())];
    let mut r2 = vec![(0, even.mean())];
    let mut r3 = Vec::new();
    let mut r4 = Vec::new();
    for k in 1..=even.modes().max(odd.modes()) {
        let n = freq(k)?;
        let sg = parity(k);
        if let Some(p) = even.cosine().get(k - 1) {
            r1.push((n, *p));
            r2.push((n, sg * p));
        }
        if let Some(q) = odd.sine().get(k - 1) {
            let d = k as f64 * PI * q;
            r3.push((n, d));
            r4.push((n, sg * d));
        }
    }
    Ok(DirichletTraces {
        r1: BoundaryTrace::from_series(r1),
        r2: BoundaryTrace::from_series(r2),
        r3: BoundaryTrace::from_series(r3),
        r4: BoundaryTrace::from_series(r4),
        odd: odd.clone(),
        even: even.clone(),
    })
}

/// Endpoint data recovered from the coefficient tail of a truncated series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EndpointFit {
    /// `u(0)`.
    pub left: C64,
    /// `u(1)`.
    pub right: C64,
    /// `u''(0)` for sine series, `u'(0)` for clamped series.
    pub left_aux: C64,
    /// `u''(1)` for sine series, `u'(1)` for clamped series.
    pub right_aux: C64,
    /// Relative least-squares residual over the fitting window.
    pub residual: f64,
}

fn fit_window(n: usize) -> std::ops::RangeInclusive<usize> {
    if n < 16 {
        1..=n
    } else {
        (n / 2 + 1)..=n
    }
}

/// Least squares on rows `(columns, target)`, columns rescaled to unit norm.
fn endpoint_least_squares(rows: &[([f64; 4], C64)]) -> Result<([C64; 4], f64)> {
    let mut scale = [0.0f64; 4];
    for (cols, _) in rows {
        for (s, c) in scale.iter_mut().zip(cols) {
            *s += c * c;
        }
    }
    let scale = scale.map(|s| if s > 0.0 { s.sqrt() } else { 1.0 });
    let mut gram = vec![vec![ZERO; 4]; 4];
    let mut rhs = vec![ZERO; 4];
    for (cols, y) in rows {
        let c: Vec<f64> = cols.iter().zip(&scale).map(|(c, s)| c / s).collect();
        for a in 0..4 {
            rhs[a] += c[a] * y;
            for b in 0..4 {
                gram[a][b] += C64::new(c[a] * c[b], 0.0);
            }
        }
    }
    let sol = solve_dense(gram, rhs)?;
    let x = [0, 1, 2, 3].map(|i| sol[i] / scale[i]);
    let (mut num, mut den) = (0.0, 0.0);
    for (cols, y) in rows {
        let fit: C64 = cols.iter().zip(&x).map(|(c, v)| c * v).sum();
        num += (fit - y).norm_sqr();
        den += y.norm_sqr();
    }
    let residual = if den > 0.0 { (num / den).sqrt() } else { 0.0 };
    Ok((x, residual))
}

/// Recover `u(0), u''(0), u(1), u''(1)` from sine coefficients
/// `q_k = 2∫u sin(kπx)` using their leading asymptotics
///
/// ```text
/// kπ q_k / 2 ≈ u(0) − u''(0)/(kπ)² − (−1)^k [u(1) − u''(1)/(kπ)²].
/// ```
///
/// The sine series itself vanishes at both ends, so the boundary values are
/// visible only through this tail.
pub fn sine_endpoint_fit(q: &[C64]) -> Result<EndpointFit> {
    if q.len() < 4 {
        return Err(Error::InvalidInput("endpoint fit needs at least 4 modes".into()));
    }
    let rows: Vec<([f64; 4], C64)> = fit_window(q.len())
        .map(|k| {
            let kp = k as f64 * PI;
            let sg = parity(k);
            ([1.0, -1.0 / (kp * kp), -sg, sg / (kp * kp)], 0.5 * kp * q[k - 1])
        })
        .collect();
    let (x, residual) = endpoint_least_squares(&rows)?;
    Ok(EndpointFit {
        left: x[0],
        left_aux: x[1],
        right: x[2],
        right_aux: x[3],
        residual,
    })
}

/// Recover `u(0), u'(0), u(1), u'(1)` from clamped coefficients using
/// `c_k ≈ μ_k⁻⁴ [u(1)φ_k'''(1) − u'(1)φ_k''(1) − u(0)φ_k'''(0) + u'(0)φ_k''(0)]`.
pub fn clamped_endpoint_fit(basis: &ClampedBasis, c: &[C64]) -> Result<EndpointFit> {
    if c.len() < 4 || c.len() > basis.len() {
        return Err(Error::InvalidInput(
            "clamped endpoint fit needs 4..=K coefficients".into(),
        ));
    }
    let rows: Vec<([f64; 4], C64)> = fit_window(c.len())
        .map(|k| {
            let (p2, p3) = (basis.d2_at_zero(k), basis.d3_at_zero(k));
            let sg = parity(k);
            let mu4 = basis.eigenvalue(k);
            // Rows scaled by μ³ so every row carries comparable weight.
            let w = basis.mu(k).powi(3) / mu4;
            ([-p3 * w, p2 * w, sg * p3 * w, sg * p2 * w], c[k - 1] * basis.mu(k).powi(3))
        })
        .collect();
    let (x, residual) = endpoint_least_squares(&rows)?;
    Ok(EndpointFit {
        left: x[0],
        left_aux: x[1],
        right: x[2],
        right_aux: x[3],
        residual,
    })
}

/// Term-by-term value of a series derivative at `x` together with the
/// change between the partial sums over `N/2` and `N` modes; a large drift
/// signals a divergent or slowly converging derivative series.
pub fn term_by_term(state: &FourierState, x: f64, order: u32) -> (C64, f64) {
    let full = crate::spectral::reconstruct_derivative(state, &[x], order)[0];
    let half_n = (state.modes() / 2).max(1);
    let half = FourierState::mixed(
        state.mean(),
        state.cosine()[..half_n].to_vec(),
        state.sine()[..half_n].to_vec(),
    );
    let partial = crate::spectral::reconstruct_derivative(&half, &[x], order)[0];
    (full, (full - partial).norm())
}

/// Closed-form `w0n` response of a series trace evaluated directly as
/// `−2i(kπ)³ Σ_n a_n ∫₀ᵗ e^{i(kπ)⁴(t−τ)}e^{inπ⁴τ}dτ`; used as a reference.
pub fn w0n_series_reference(h: &BoundaryTrace, t: f64, k: usize) -> C64 {
    let omega = navier_frequency(k);
    -navier0_weight(k)
        * h.terms()
            .iter()
            .map(|(n, a)| a * convolve_exponential(omega, *n as f64 * PI4, t))
            .sum::<C64>()
}
