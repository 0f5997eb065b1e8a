//! Picard iteration for `i u_t + u_xxxx + λ|u|^{p−2}u = 0` with Navier or
//! Dirichlet boundary data.
//!
//! Navier: with the stationary cubic `γ` matching the corner data, `v = u−γ`
//! is the fixed point of
//!
//! ```text
//! Γ(v) = W(t)(φ−γ) + iλ∫₀ᵗ W(t−τ)|u|^{p−2}u dτ + boundary responses of h − h(0).
//! ```
//!
//! Dirichlet: `u = u_o + u_e + v + w`, where `u_o + u_e` is the periodic flow
//! of the odd/even extensions, `v` carries the boundary data minus the traces
//! of `u_o + u_e`, and `w` is the nonlinear Duhamel term in the clamped basis.
//!
//! The iteration metric is the maximum over time nodes of the truncated
//! `H^s` norm. When the iteration does not converge the existence time is
//! halved and the solve restarts.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{
    clamped_endpoint_fit, dirichlet_lift_full, dirichlet_traces, navier0_weight, navier2_weight,
    navier_lift_full, sine_endpoint_fit, trace_response_grid, Compatibility, Cubic,
};
use crate::clamped::{ClampedBasis, ClampedProjector, ClampedState};
use crate::flow::{convolve_modes_uniform, navier_frequency};
use crate::spectral::{
    odd_even_from_samples, reconstruct, sine_coefficients_from_samples, Basis, FourierState,
};
use crate::trace::BoundaryTrace;
use crate::transform::Transform;
use crate::{cis, parity, Error, Result, C64};

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Navier,
    Dirichlet,
}

/// Initial datum `φ` on `(0,1)`.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialData {
    Zero,
    /// Samples `φ(j/M)`, `j = 0..=M`.
    Grid(Vec<C64>),
    /// Sine coefficients `q_k = 2∫₀¹ φ sin(kπx)`.
    SineModes(Vec<C64>),
}

const SYNTH_GRID: usize = 4096;

impl InitialData {
    /// Samples on `j/M` for `M ≥ m`.
    fn samples(&self, m: usize) -> Vec<C64> {
        match self {
            InitialData::Zero => vec![ZERO; m + 1],
            InitialData::Grid(v) => v.clone(),
            InitialData::SineModes(q) => {
                let m = m.max(q.len() + 2);
                Transform::new(m).synthesize_sine(q)
            }
        }
    }

    /// Navier-convention sine state with `n` modes.
    pub fn navier_state(&self, n: usize) -> Result<FourierState> {
        match self {
            InitialData::Zero => Ok(FourierState::zeros(Basis::Sine, n)),
            InitialData::SineModes(q) => {
                let mut q = q.clone();
                q.resize(n, ZERO);
                FourierState::new(Basis::Sine, ZERO, vec![ZERO; n], q, 0.0)
            }
            InitialData::Grid(v) => sine_coefficients_from_samples(v, n),
        }
    }

    /// Odd and even parts with `n` modes each.
    pub fn odd_even(&self, n: usize) -> Result<(FourierState, FourierState)> {
        match self {
            InitialData::Zero => Ok((
                FourierState::zeros(Basis::Sine, n),
                FourierState::zeros(Basis::Cosine, n),
            )),
            _ => odd_even_from_samples(&self.samples(SYNTH_GRID.max(4 * n)), n),
        }
    }

    /// `(φ(0), φ(1))`.
    pub fn endpoint_values(&self) -> (C64, C64) {
        match self {
            InitialData::Grid(v) => (v[0], v[v.len() - 1]),
            _ => (ZERO, ZERO),
        }
    }

    /// `(φ'(0), φ'(1))`: term-by-term for sine modes, second-order one-sided
    /// differences for grid samples.
    pub fn endpoint_slopes(&self) -> (C64, C64) {
        match self {
            InitialData::Zero => (ZERO, ZERO),
            InitialData::SineModes(q) => {
                let mut d0 = ZERO;
                let mut d1 = ZERO;
                for (i, c) in q.iter().enumerate() {
                    let kp = (i + 1) as f64 * PI;
                    d0 += kp * c;
                    d1 += kp * parity(i + 1) * c;
                }
                (d0, d1)
            }
            InitialData::Grid(v) => {
                let m = v.len() - 1;
                let h = 1.0 / m as f64;
                let d0 = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
                let d1 = (3.0 * v[m] - 4.0 * v[m - 1] + v[m - 2]) / (2.0 * h);
                (d0, d1)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            InitialData::Zero => true,
            InitialData::Grid(v) | InitialData::SineModes(v) => v.iter().all(|c| c.norm_sqr() == 0.0),
        }
    }

    fn minus_cubic(&self, g: &Cubic, n: usize) -> Result<InitialData> {
        Ok(match self {
            InitialData::Grid(v) => {
                let m = v.len() - 1;
                InitialData::Grid(
                    v.iter()
                        .enumerate()
                        .map(|(j, x)| x - g.value(j as f64 / m as f64))
                        .collect(),
                )
            }
            _ => {
                let q = self.navier_state(n)?;
                let gs = g.sine_coefficients(n);
                InitialData::SineModes(q.sine().iter().zip(&gs).map(|(a, b)| a - b).collect())
            }
        })
    }
}

/// Boundary data. For Navier `aux` traces are `u_xx`, for Dirichlet `u_x`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoundaryData {
    /// `u(0,t)`: `h₁`.
    pub left: BoundaryTrace,
    /// `u(1,t)`: `h₂`.
    pub right: BoundaryTrace,
    /// `u_xx(0,t)` = `h₅` (Navier) or `u_x(0,t)` = `h₃` (Dirichlet).
    pub left_aux: BoundaryTrace,
    /// `u_xx(1,t)` = `h₆` (Navier) or `u_x(1,t)` = `h₄` (Dirichlet).
    pub right_aux: BoundaryTrace,
}

impl BoundaryData {
    pub fn zero() -> Self {
        Self::default()
    }

    fn all(&self) -> [&BoundaryTrace; 4] {
        [&self.left, &self.right, &self.left_aux, &self.right_aux]
    }

    fn at(&self, t: f64) -> [C64; 4] {
        self.all().map(|h| h.eval(t))
    }

    pub fn is_zero(&self) -> bool {
        self.all().iter().all(|h| h.is_zero())
    }

    fn sup_norm(&self, t_end: f64) -> f64 {
        let mut m: f64 = 0.0;
        for j in 0..=256 {
            let t = t_end * j as f64 / 256.0;
            for h in self.all() {
                m = m.max(h.eval(t).norm());
            }
        }
        m
    }
}

/// Full problem description.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub family: Family,
    pub s: f64,
    pub p: f64,
    pub lambda: f64,
    pub horizon: f64,
    pub initial: InitialData,
    pub boundary: BoundaryData,
    pub modes: usize,
    pub dt: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Multiplier on the minimal pseudo-spectral grid `⌈p/2⌉N + 1`.
    pub dealias: f64,
    pub compatibility: Compatibility,
    /// Run the Navier iteration in the discrete `L⁴` metric for `s < ½`.
    pub low_regularity: bool,
    /// Number of stored snapshots (at least the two end points).
    pub snapshots: usize,
}

impl ProblemSpec {
    pub fn new(family: Family) -> Self {
        Self {
            family,
            s: if family == Family::Navier { 1.0 } else { 2.0 },
            p: 4.0,
            lambda: 1.0,
            horizon: 1.0,
            initial: InitialData::Zero,
            boundary: BoundaryData::zero(),
            modes: 128,
            dt: 1e-4,
            tol: 1e-8,
            max_iter: 50,
            dealias: 1.0,
            compatibility: Compatibility::Enforce,
            low_regularity: false,
            snapshots: 101,
        }
    }

    /// Check the admissible parameter ranges.
    pub fn validate(&self) -> Result<()> {
        let s = self.s;
        let bad = |m: String| Err(Error::Constraint(m));
        if !s.is_finite() || s < 0.0 {
            return bad(format!("s must be a non-negative number (got s={s})"));
        }
        if !(self.p >= 3.0) || !self.p.is_finite() {
            return bad(format!("p ≥ 3 required (got p={})", self.p));
        }
        if !self.lambda.is_finite() {
            return bad("λ must be finite".into());
        }
        let frac = s - s.floor();
        if (frac - 0.5).abs() < 1e-12 {
            return bad(format!("s={s} excluded: s ≠ n+1/2"));
        }
        match self.family {
            Family::Navier => {
                if self.low_regularity {
                    if s >= 0.5 {
                        return bad(format!("the L⁴ experiment covers s ∈ [0, 1/2) only (got s={s})"));
                    }
                    if self.p > 4.0 {
                        return bad(format!("the L⁴ experiment requires p ∈ [3,4] (got p={})", self.p));
                    }
                } else if s <= 0.5 {
                    return bad(format!("Navier requires s > 1/2 for the H^s iteration (got s={s})"));
                }
                if s >= 4.5 {
                    return bad(format!("Navier requires s < 9/2 (got s={s})"));
                }
            }
            Family::Dirichlet => {
                if s <= 10.0 / 7.0 {
                    return bad(format!("Dirichlet requires s > 10/7 (got s={s})"));
                }
                if s > 4.5 {
                    return bad(format!("Dirichlet requires s ≤ 9/2 (got s={s})"));
                }
            }
        }
        let polynomial = self.p.fract() == 0.0 && (self.p as i64) % 2 == 0;
        if s >= 1.0 && !polynomial && s.floor() >= self.p - 2.0 {
            return bad(format!(
                "⌊s⌋ < p−2 required for |u|^(p−2)u to be smooth enough (s={s}, p={})",
                self.p
            ));
        }
        if self.modes < 4 {
            return bad(format!("N ≥ 4 required (got N={})", self.modes));
        }
        if !(self.dt > 0.0) || !(self.horizon > 0.0) || !(self.tol > 0.0) {
            return bad("dt, T and tol must be positive".into());
        }
        if self.dt > self.horizon {
            return bad("dt must not exceed T".into());
        }
        if self.max_iter == 0 {
            return bad("max_iter ≥ 1 required".into());
        }
        if !(self.dealias >= 1.0) {
            return bad("dealias factor must be ≥ 1".into());
        }
        if self.snapshots < 2 {
            return bad("at least two snapshots required".into());
        }
        if let InitialData::Grid(v) = &self.initial {
            if v.len() < self.modes + 2 {
                return bad(format!(
                    "initial grid with {} samples cannot resolve N={} modes",
                    v.len(),
                    self.modes
                ));
            }
        }
        if self.compatibility == Compatibility::Enforce && self.s > 0.5 {
            let (phi0, phi1) = self.initial.endpoint_values();
            let (h1, h2) = (self.boundary.left.eval(0.0), self.boundary.right.eval(0.0));
            let gap = (h1 - phi0).norm().max((h2 - phi1).norm());
            if gap > 1e-8 {
                return bad(format!(
                    "compatibility h(0) = φ(endpoint) violated by {gap:e}"
                ));
            }
            if self.family == Family::Dirichlet && self.s > 1.5 {
                let (d0, d1) = self.initial.endpoint_slopes();
                let (h3, h4) = (self.boundary.left_aux.eval(0.0), self.boundary.right_aux.eval(0.0));
                let gap = ((h3 - d0).norm() / (1.0 + d0.norm())).max((h4 - d1).norm() / (1.0 + d1.norm()));
                if gap > 1e-3 {
                    return bad(format!(
                        "compatibility h₃(0) = φ'(0), h₄(0) = φ'(1) violated by {gap:e}"
                    ));
                }
            }
        }
        Ok(())
    }

    fn pseudo_grid(&self) -> usize {
        let base = (self.p / 2.0).ceil() * self.modes as f64 + 1.0;
        (self.dealias * base).ceil() as usize
    }

    fn data_norm(&self) -> f64 {
        let phi = self
            .initial
            .navier_state(self.modes)
            .map(|st| st.h_norm(self.s))
            .unwrap_or(f64::NAN);
        phi + self.boundary.sup_norm(self.horizon.min(1.0))
    }
}

/// Stationary cubic matching the corner data, and the shifted problem.
pub fn homogenize_navier(spec: &ProblemSpec) -> Result<(Cubic, ProblemSpec)> {
    if spec.family != Family::Navier {
        return Err(Error::InvalidInput("homogenization applies to Navier data".into()));
    }
    let [h1, h2, h5, h6] = spec.boundary.at(0.0);
    let gamma = navier_lift_full(h1, h5, h2, h6);
    let mut shifted = spec.clone();
    shifted.initial = spec.initial.minus_cubic(&gamma, spec.modes)?;
    shifted.boundary = BoundaryData {
        left: spec.boundary.left.shifted_to_zero(),
        right: spec.boundary.right.shifted_to_zero(),
        left_aux: spec.boundary.left_aux.shifted_to_zero(),
        right_aux: spec.boundary.right_aux.shifted_to_zero(),
    };
    Ok((gamma, shifted))
}

#[inline]
fn power_map(u: C64, p: f64, lambda: f64) -> C64 {
    let m2 = u.norm_sqr();
    if m2 == 0.0 {
        return ZERO;
    }
    let w = if p == 4.0 { m2 } else if p == 3.0 { m2.sqrt() } else { m2.powf(0.5 * (p - 2.0)) };
    lambda * w * u
}

fn apply_power(values: &mut [C64], p: f64, lambda: f64) -> Result<()> {
    for v in values.iter_mut() {
        *v = power_map(*v, p, lambda);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Overflow);
        }
    }
    Ok(())
}

/// Pseudo-spectral `λ|u|^{p−2}u` in the basis of `state`, evaluated on
/// `⌈dealias·(⌈p/2⌉N+1)⌉` grid intervals.
pub fn nonlinearity(state: &FourierState, p: f64, lambda: f64, dealias: f64) -> Result<FourierState> {
    if !(p >= 3.0) {
        return Err(Error::InvalidInput(format!("p ≥ 3 required (got {p})")));
    }
    let n = state.modes();
    let m = ((dealias.max(1.0)) * ((p / 2.0).ceil() * n as f64 + 1.0)).ceil() as usize;
    let m = m.max(n + 2);
    let tr = Transform::new(m);
    let scale = 2.0 / m as f64;
    let even = tr.synthesize_cosine(state.mean(), state.cosine());
    let odd = tr.synthesize_sine(state.sine());
    let out = match state.basis() {
        Basis::Sine => {
            let mut u = odd;
            apply_power(&mut u, p, lambda)?;
            let q = project_sine(&tr, &u, n);
            FourierState::from_sine(q)
        }
        Basis::Cosine => {
            let mut u = even;
            apply_power(&mut u, p, lambda)?;
            let c = tr.dct1(&u);
            FourierState::from_cosine(c[0] / m as f64, (1..=n).map(|k| c[k] * scale).collect())
        }
        Basis::Mixed => {
            // u(x) = E(x) + O(x) and u(−x) = E(x) − O(x) for x ∈ [0,1].
            let mut plus: Vec<C64> = even.iter().zip(&odd).map(|(e, o)| e + o).collect();
            let mut minus: Vec<C64> = even.iter().zip(&odd).map(|(e, o)| e - o).collect();
            apply_power(&mut plus, p, lambda)?;
            apply_power(&mut minus, p, lambda)?;
            let e: Vec<C64> = plus.iter().zip(&minus).map(|(a, b)| 0.5 * (a + b)).collect();
            let o: Vec<C64> = plus.iter().zip(&minus).map(|(a, b)| 0.5 * (a - b)).collect();
            let c = tr.dct1(&e);
            let q = project_sine(&tr, &o, n);
            FourierState::mixed(c[0] / m as f64, (1..=n).map(|k| c[k] * scale).collect(), q)
        }
    };
    Ok(out.with_time(state.time()))
}

/// `2∫₀¹ f sin(kπx)` from grid values, with the linear interpolant of the end
/// values removed before the transform and added back in closed form.
fn project_sine(tr: &Transform, f: &[C64], n: usize) -> Vec<C64> {
    let m = tr.intervals();
    let (a, b) = (f[0], f[m]);
    let g: Vec<C64> = f
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let x = j as f64 / m as f64;
            v - (a * (1.0 - x) + b * x)
        })
        .collect();
    let s = tr.dst1(&g);
    let scale = 2.0 / m as f64;
    (1..=n)
        .map(|k| {
            let kp = k as f64 * PI;
            s[k] * scale + 2.0 * (a - parity(k) * b) / kp
        })
        .collect()
}

/// Convergence and quality diagnostics of a solve.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub contraction_factors: Vec<f64>,
    pub distances: Vec<f64>,
    pub converged: bool,
    /// `max_t ‖Γ(u) − u‖` for the returned iterate.
    pub fixed_point_residual: f64,
    /// Final existence time.
    pub existence_time: f64,
    pub restarts: usize,
    /// Relative finite-difference residual of the mode equations.
    pub mode_ode_residual: f64,
    pub data_norm: f64,
    pub projection_residual: Option<f64>,
}

impl Diagnostics {
    /// Largest contraction factor observed after the first iteration.
    pub fn max_contraction(&self) -> f64 {
        self.contraction_factors.iter().copied().fold(0.0, f64::max)
    }
}

/// Solution snapshot. `value = lift + Σ(coeffs − lift coeffs)·basis + periodic part`.
#[derive(Clone, Debug)]
pub struct SolutionState {
    pub time: f64,
    /// Navier: sine coefficients of `u`. Dirichlet: `u_o + u_e` (mixed).
    pub fourier: FourierState,
    /// Dirichlet only: clamped coefficients of `v + w`.
    pub clamped: Option<ClampedState>,
    /// Cubic carrying the boundary values of the non-periodic part.
    pub lift: Cubic,
}

/// Boundary values reconstructed from the stored coefficients.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BoundarySample {
    pub t: f64,
    pub left: C64,
    pub right: C64,
    /// `u_xx` (Navier) or `u_x` (Dirichlet) at 0.
    pub left_aux: C64,
    pub right_aux: C64,
}

#[derive(Clone, Debug)]
pub struct SolutionRecord {
    pub family: Family,
    pub times: Vec<f64>,
    pub states: Vec<SolutionState>,
    pub boundary: Vec<BoundarySample>,
    pub diagnostics: Diagnostics,
    pub basis: Option<Arc<ClampedBasis>>,
}

impl SolutionRecord {
    /// Evaluate snapshot `j` on a grid.
    pub fn eval(&self, j: usize, xs: &[f64]) -> Vec<C64> {
        let st = &self.states[j];
        match (self.family, &st.clamped, &self.basis) {
            (Family::Navier, _, _) => {
                let lift_q = st.lift.sine_coefficients(st.fourier.modes());
                let reg: Vec<C64> = st.fourier.sine().iter().zip(&lift_q).map(|(a, b)| a - b).collect();
                let reg = FourierState::from_sine(reg);
                reconstruct(&reg, xs)
                    .into_iter()
                    .zip(xs)
                    .map(|(r, &x)| r + st.lift.value(x))
                    .collect()
            }
            (Family::Dirichlet, Some(c), Some(basis)) => {
                let per = reconstruct(&st.fourier, xs);
                let lc = st.lift.clamped_coefficients(basis);
                let reg: Vec<C64> = c.coeffs.iter().zip(&lc).map(|(a, b)| a - b).collect();
                xs.iter()
                    .zip(per)
                    .map(|(&x, p)| p + st.lift.value(x) + basis.synthesize(&reg, x, 0))
                    .collect()
            }
            _ => vec![ZERO; xs.len()],
        }
    }

    /// `L²(0,1)` norm of snapshot `j` by Gauss–Legendre quadrature.
    pub fn l2_norm(&self, j: usize) -> f64 {
        match self.family {
            Family::Navier => self.states[j].fourier.l2_norm(),
            Family::Dirichlet => {
                let rule = crate::quadrature::CompositeRule::new(0.0, 1.0, 64, 10);
                let v = self.eval(j, &rule.nodes);
                v.iter().zip(&rule.weights).map(|(u, w)| w * u.norm_sqr()).sum::<f64>().sqrt()
            }
        }
    }
}

fn snapshot_indices(steps: usize, count: usize) -> Vec<usize> {
    let count = count.min(steps + 1).max(2);
    let mut idx: Vec<usize> = (0..count)
        .map(|i| ((i as f64) * steps as f64 / (count - 1) as f64).round() as usize)
        .collect();
    idx.dedup();
    idx
}

/// Iteration outcome on one time window.
struct WindowResult {
    nodes: Vec<Vec<C64>>,
    diag: Diagnostics,
}

/// Generic Picard loop over node-indexed coefficient histories.
///
/// `gamma` maps an iterate to its image; `metric` measures the distance
/// between two histories.
fn picard_loop<G, M>(
    initial: Vec<Vec<C64>>,
    max_iter: usize,
    tol: f64,
    gamma: G,
    metric: M,
) -> Result<WindowResult>
where
    G: Fn(&[Vec<C64>]) -> Result<Vec<Vec<C64>>>,
    M: Fn(&[Vec<C64>], &[Vec<C64>]) -> f64,
{
    let mut diag = Diagnostics::default();
    let mut current = initial;
    let mut rising = 0;
    for it in 1..=max_iter {
        let next = gamma(&current)?;
        let d = metric(&next, &current);
        diag.iterations = it;
        if let Some(&prev) = diag.distances.last() {
            let f = if prev > 0.0 { d / prev } else { 0.0 };
            diag.contraction_factors.push(f);
            rising = if f > 1.0 { rising + 1 } else { 0 };
        }
        diag.distances.push(d);
        current = next;
        if !d.is_finite() {
            break;
        }
        if d < tol {
            diag.converged = true;
            break;
        }
        if rising >= 3 {
            break;
        }
    }
    if diag.converged {
        let check = gamma(&current)?;
        diag.fixed_point_residual = metric(&check, &current);
    }
    Ok(WindowResult { nodes: current, diag })
}

fn sup_h_metric(weights: &[f64]) -> impl Fn(&[Vec<C64>], &[Vec<C64>]) -> f64 + '_ {
    move |a, b| {
        a.par_iter()
            .zip(b)
            .map(|(x, y)| {
                x.iter()
                    .zip(y)
                    .zip(weights)
                    .map(|((u, v), w)| w * (u - v).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// Solve with Navier data.
pub fn picard_navier(spec: &ProblemSpec) -> Result<SolutionRecord> {
    if spec.family != Family::Navier {
        return Err(Error::InvalidInput("picard_navier needs a Navier problem".into()));
    }
    spec.validate()?;
    let (gamma, shifted) = homogenize_navier(spec)?;
    let n = spec.modes;
    let v0 = shifted.initial.navier_state(n)?;
    let gamma_q = gamma.sine_coefficients(n);
    let omegas: Vec<f64> = (1..=n).map(navier_frequency).collect();
    let weights: Vec<f64> = (1..=n)
        .map(|k| (1.0 + (k as f64 * PI).powi(2)).powf(spec.s))
        .collect();
    let data_norm = spec.data_norm();

    let mut t_star = spec.horizon.min(1.0);
    let mut restarts = 0;
    loop {
        let steps = ((t_star / spec.dt).round() as usize).max(1);
        let dt = t_star / steps as f64;
        let result = navier_window(spec, &shifted, &gamma, &gamma_q, &v0, &omegas, &weights, steps, dt)?;
        if result.diag.converged || spec.lambda == 0.0 {
            let mut diag = result.diag;
            diag.existence_time = t_star;
            diag.restarts = restarts;
            diag.data_norm = data_norm;
            diag.mode_ode_residual =
                navier_mode_residual(spec, &shifted, &gamma, &gamma_q, &omegas, &result.nodes, dt)?;
            return assemble_navier(spec, &gamma_q, result.nodes, dt, steps, diag);
        }
        let last = result.diag.contraction_factors.last().copied().unwrap_or(f64::NAN);
        t_star *= 0.5;
        restarts += 1;
        if t_star < spec.dt {
            return Err(Error::NoConvergence {
                dt: spec.dt,
                data_norm,
                last_factor: last,
            });
        }
    }
}

/// Lift of the full boundary data at time `t`.
fn navier_lift_at(spec: &ProblemSpec, t: f64) -> Cubic {
    let [h1, h2, h5, h6] = spec.boundary.at(t);
    navier_lift_full(h1, h5, h2, h6)
}

#[allow(clippy::too_many_arguments)]
fn navier_window(
    spec: &ProblemSpec,
    shifted: &ProblemSpec,
    _gamma: &Cubic,
    gamma_q: &[C64],
    v0: &FourierState,
    omegas: &[f64],
    weights: &[f64],
    steps: usize,
    dt: f64,
) -> Result<WindowResult> {
    let n = omegas.len();
    // Linear part: free flow plus the four boundary responses.
    let mut linear: Vec<Vec<C64>> = (0..=steps)
        .into_par_iter()
        .map(|j| {
            let t = j as f64 * dt;
            (0..n).map(|i| v0.sine()[i] * cis(omegas[i] * t)).collect()
        })
        .collect();
    let b = &shifted.boundary;
    let ops: [(&BoundaryTrace, fn(usize) -> C64, bool); 4] = [
        (&b.left, navier0_weight, false),
        (&b.right, navier0_weight, true),
        (&b.left_aux, navier2_weight, false),
        (&b.right_aux, navier2_weight, true),
    ];
    for (h, weight, mirrored) in ops {
        if h.is_zero() {
            continue;
        }
        let resp = trace_response_grid(omegas, h, dt, steps)?;
        for (row, r) in linear.iter_mut().zip(resp) {
            for (i, (x, c)) in row.iter_mut().zip(r).enumerate() {
                let k = i + 1;
                let sign = if mirrored { -parity(k) } else { 1.0 };
                *x += sign * (-weight(k)) * c;
            }
        }
    }
    if spec.lambda == 0.0 {
        let diag = Diagnostics {
            iterations: 1,
            distances: vec![0.0],
            converged: true,
            ..Default::default()
        };
        return Ok(WindowResult { nodes: linear, diag });
    }

    let m = spec.pseudo_grid().max(n + 2);
    let tr = Transform::new(m);
    let lifts: Vec<(Cubic, Vec<C64>)> = (0..=steps)
        .map(|j| {
            let l = navier_lift_at(spec, j as f64 * dt);
            let q = l.sine_coefficients(n);
            (l, q)
        })
        .collect();
    let grid = tr.grid();
    let lift_values: Vec<Vec<C64>> = lifts
        .iter()
        .map(|(l, _)| grid.iter().map(|&x| l.value(x)).collect())
        .collect();

    let forcing = |v: &[Vec<C64>]| -> Result<Vec<Vec<C64>>> {
        v.par_iter()
            .enumerate()
            .map(|(j, vj)| {
                let reg: Vec<C64> = vj
                    .iter()
                    .zip(gamma_q)
                    .zip(&lifts[j].1)
                    .map(|((a, g), l)| a + g - l)
                    .collect();
                let mut u = tr.synthesize_sine(&reg);
                for (x, l) in u.iter_mut().zip(&lift_values[j]) {
                    *x += l;
                }
                apply_power(&mut u, spec.p, spec.lambda)?;
                Ok(project_sine(&tr, &u, n))
            })
            .collect()
    };
    let gamma_map = |v: &[Vec<C64>]| -> Result<Vec<Vec<C64>>> {
        let f = forcing(v)?;
        let d = convolve_modes_uniform(omegas, dt, &f);
        Ok(linear
            .iter()
            .zip(d)
            .map(|(l, dj)| l.iter().zip(dj).map(|(a, b)| a + I * b).collect())
            .collect())
    };
    if spec.low_regularity {
        let metric = |a: &[Vec<C64>], b: &[Vec<C64>]| -> f64 {
            // Collected before summing so the result is independent of the
            // thread count.
            let per_node: Vec<f64> = a
                .par_iter()
                .zip(b)
                .map(|(x, y)| {
                    let diff: Vec<C64> = x.iter().zip(y).map(|(u, v)| u - v).collect();
                    let vals = tr.synthesize_sine(&diff);
                    vals.iter().map(|z| z.norm_sqr().powi(2)).sum::<f64>() / m as f64
                })
                .collect();
            let acc: f64 = per_node.iter().sum();
            (acc * dt).powf(0.25)
        };
        picard_loop(linear.clone(), spec.max_iter, spec.tol, gamma_map, metric)
    } else {
        picard_loop(linear.clone(), spec.max_iter, spec.tol, gamma_map, sup_h_metric(weights))
    }
}

/// Finite-difference residual of `i q' + ω q + n_k − β_k = 0` for modes with
/// `ω dt ≤ 0.1`, relative to the size of `ω q`.
fn navier_mode_residual(
    spec: &ProblemSpec,
    shifted: &ProblemSpec,
    _gamma: &Cubic,
    gamma_q: &[C64],
    omegas: &[f64],
    nodes: &[Vec<C64>],
    dt: f64,
) -> Result<f64> {
    let steps = nodes.len() - 1;
    if steps < 2 {
        return Ok(0.0);
    }
    let active: Vec<usize> = (0..omegas.len()).filter(|&i| omegas[i] * dt <= 0.1).collect();
    if active.is_empty() {
        return Ok(0.0);
    }
    let n = omegas.len();
    let m = spec.pseudo_grid().max(n + 2);
    let tr = Transform::new(m);
    let grid = tr.grid();
    let b = &shifted.boundary;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for j in 1..steps {
        let t = j as f64 * dt;
        let nl = if spec.lambda != 0.0 {
            let lift = navier_lift_at(spec, t);
            let lq = lift.sine_coefficients(n);
            let reg: Vec<C64> = nodes[j]
                .iter()
                .zip(gamma_q)
                .zip(&lq)
                .map(|((a, g), l)| a + g - l)
                .collect();
            let mut u = tr.synthesize_sine(&reg);
            for (x, &g) in u.iter_mut().zip(&grid) {
                *x += lift.value(g);
            }
            apply_power(&mut u, spec.p, spec.lambda)?;
            project_sine(&tr, &u, n)
        } else {
            vec![ZERO; n]
        };
        let [h1, h2, h5, h6] = [&b.left, &b.right, &b.left_aux, &b.right_aux].map(|h| h.eval(t));
        for &i in &active {
            let k = i + 1;
            let kp = k as f64 * PI;
            let sg = parity(k);
            let beta = 2.0 * kp.powi(3) * h1 - 2.0 * kp * h5 - sg * (2.0 * kp.powi(3) * h2 - 2.0 * kp * h6);
            let dq = (nodes[j + 1][i] - nodes[j - 1][i]) / (2.0 * dt);
            let r = I * dq + omegas[i] * nodes[j][i] + nl[i] - beta;
            worst = worst.max(r.norm());
            scale = scale.max((omegas[i] * nodes[j][i]).norm()).max(beta.norm());
        }
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

fn assemble_navier(
    spec: &ProblemSpec,
    gamma_q: &[C64],
    nodes: Vec<Vec<C64>>,
    dt: f64,
    steps: usize,
    diag: Diagnostics,
) -> Result<SolutionRecord> {
    let idx = snapshot_indices(steps, spec.snapshots);
    let mut times = Vec::with_capacity(idx.len());
    let mut states = Vec::with_capacity(idx.len());
    let mut boundary = Vec::with_capacity(idx.len());
    for &j in &idx {
        let t = j as f64 * dt;
        let q: Vec<C64> = nodes[j].iter().zip(gamma_q).map(|(a, g)| a + g).collect();
        let fit = sine_endpoint_fit(&q)?;
        boundary.push(BoundarySample {
            t,
            left: fit.left,
            right: fit.right,
            left_aux: fit.left_aux,
            right_aux: fit.right_aux,
        });
        times.push(t);
        states.push(SolutionState {
            time: t,
            fourier: FourierState::from_sine(q).with_time(t),
            clamped: None,
            lift: navier_lift_at(spec, t),
        });
    }
    Ok(SolutionRecord {
        family: Family::Navier,
        times,
        states,
        boundary,
        diagnostics: diag,
        basis: None,
    })
}

/// Clamped-basis response of the four Dirichlet data on a uniform grid.
///
/// Left data enter with `iφ'''(0)` (value) and `−iφ''(0)` (slope); right data
/// are the mirror image with the slope sign flipped.
pub fn dirichlet_boundary_grid(
    basis: &ClampedBasis,
    data: &BoundaryData,
    dt: f64,
    steps: usize,
) -> Result<Vec<Vec<C64>>> {
    let k_max = basis.len();
    let omegas = basis.eigenvalues();
    let mut out = vec![vec![ZERO; k_max]; steps + 1];
    let value_w = |k: usize| I * basis.d3_at_zero(k);
    let slope_w = |k: usize| -I * basis.d2_at_zero(k);
    let ops: [(&BoundaryTrace, &dyn Fn(usize) -> C64, f64); 4] = [
        (&data.left, &value_w, 0.0),
        (&data.left_aux, &slope_w, 0.0),
        (&data.right, &value_w, 1.0),
        (&data.right_aux, &slope_w, -1.0),
    ];
    for (h, w, right) in ops {
        if h.is_zero() {
            continue;
        }
        let resp = trace_response_grid(&omegas, h, dt, steps)?;
        for (row, r) in out.iter_mut().zip(resp) {
            for (i, (x, c)) in row.iter_mut().zip(r).enumerate() {
                let k = i + 1;
                let sign = if right == 0.0 { 1.0 } else { right * -parity(k) };
                *x += sign * w(k) * c;
            }
        }
    }
    Ok(out)
}

/// Solve with Dirichlet data.
pub fn picard_dirichlet(spec: &ProblemSpec) -> Result<SolutionRecord> {
    if spec.family != Family::Dirichlet {
        return Err(Error::InvalidInput("picard_dirichlet needs a Dirichlet problem".into()));
    }
    spec.validate()?;
    let n = spec.modes;
    let basis = Arc::new(ClampedBasis::new(n)?);
    let (odd, even) = spec.initial.odd_even(n)?;
    let traces = dirichlet_traces(&odd, &even)?;
    let minus = C64::new(-1.0, 0.0);
    let tilde = BoundaryData {
        left: spec.boundary.left.add(&traces.r1.scaled(minus))?,
        right: spec.boundary.right.add(&traces.r2.scaled(minus))?,
        left_aux: spec.boundary.left_aux.add(&traces.r3.scaled(minus))?,
        right_aux: spec.boundary.right_aux.add(&traces.r4.scaled(minus))?,
    };
    let periodic0 = odd.add(&even)?;
    let weights: Vec<f64> = (1..=n)
        .map(|k| (1.0 + basis.mu(k).powi(2)).powf(spec.s))
        .collect();
    let omegas = basis.eigenvalues();
    let data_norm = spec.data_norm();
    let projector = ClampedProjector::for_basis(&basis);

    let mut t_star = spec.horizon.min(1.0);
    let mut restarts = 0;
    loop {
        let steps = ((t_star / spec.dt).round() as usize).max(1);
        let dt = t_star / steps as f64;
        let v = dirichlet_boundary_grid(&basis, &tilde, dt, steps)?;
        let mut diag;
        let w_nodes;
        if spec.lambda == 0.0 {
            w_nodes = vec![vec![ZERO; n]; steps + 1];
            diag = Diagnostics {
                iterations: 1,
                distances: vec![0.0],
                converged: true,
                ..Default::default()
            };
        } else {
            let ctx = DirichletContext::new(spec, &basis, &projector, &periodic0, &tilde, &v, dt);
            let forcing = |w: &[Vec<C64>]| ctx.forcing(w);
            let gamma_map = |w: &[Vec<C64>]| -> Result<Vec<Vec<C64>>> {
                let f = forcing(w)?;
                let d = convolve_modes_uniform(&omegas, dt, &f);
                Ok(d.into_iter()
                    .map(|dj| dj.into_iter().map(|b| I * b).collect())
                    .collect())
            };
            let init = gamma_map(&vec![vec![ZERO; n]; steps + 1])?;
            let res = picard_loop(init, spec.max_iter, spec.tol, gamma_map, sup_h_metric(&weights))?;
            diag = res.diag;
            if !diag.converged {
                let last = diag.contraction_factors.last().copied().unwrap_or(f64::NAN);
                t_star *= 0.5;
                restarts += 1;
                if t_star < spec.dt {
                    return Err(Error::NoConvergence {
                        dt: spec.dt,
                        data_norm,
                        last_factor: last,
                    });
                }
                continue;
            }
            let resid = ctx.projection_residual(&res.nodes, steps)?;
            if !resid.is_finite() || resid > 0.5 {
                return Err(Error::Projection {
                    residual: resid,
                    limit: 0.5,
                });
            }
            diag.projection_residual = Some(resid);
            diag.mode_ode_residual = ctx.mode_residual(&res.nodes, &omegas)?;
            w_nodes = res.nodes;
        }
        diag.existence_time = t_star;
        diag.restarts = restarts;
        diag.data_norm = data_norm;

        let idx = snapshot_indices(steps, spec.snapshots);
        let mut times = Vec::new();
        let mut states = Vec::new();
        let mut boundary = Vec::new();
        for &j in &idx {
            let t = j as f64 * dt;
            let per = crate::flow::propagate_periodic(&periodic0, t);
            let coeffs: Vec<C64> = v[j].iter().zip(&w_nodes[j]).map(|(a, b)| a + b).collect();
            let [h1, h2, h3, h4] = tilde.at(t);
            let lift = dirichlet_lift_full(h1, h3, h2, h4);
            let fit = clamped_endpoint_fit(&basis, &coeffs)?;
            let u0 = reconstruct(&per, &[0.0, 1.0]);
            let d0 = crate::spectral::reconstruct_derivative(&per, &[0.0, 1.0], 1);
            boundary.push(BoundarySample {
                t,
                left: u0[0] + fit.left,
                right: u0[1] + fit.right,
                left_aux: d0[0] + fit.left_aux,
                right_aux: d0[1] + fit.right_aux,
            });
            times.push(t);
            states.push(SolutionState {
                time: t,
                fourier: per,
                clamped: Some(ClampedState { coeffs, time: t }),
                lift,
            });
        }
        return Ok(SolutionRecord {
            family: Family::Dirichlet,
            times,
            states,
            boundary,
            diagnostics: diag,
            basis: Some(basis),
        });
    }
}

/// Precomputed tables for evaluating the Dirichlet nonlinearity.
struct DirichletContext<'a> {
    spec: &'a ProblemSpec,
    projector: &'a ClampedProjector,
    /// `u_o + u_e + lift + (v − lift coefficients)` at the nodes, per time.
    base: Vec<Vec<C64>>,
}

impl<'a> DirichletContext<'a> {
    fn new(
        spec: &'a ProblemSpec,
        basis: &'a ClampedBasis,
        projector: &'a ClampedProjector,
        periodic0: &FourierState,
        tilde: &BoundaryData,
        v: &[Vec<C64>],
        dt: f64,
    ) -> Self {
        let nodes = projector.nodes().to_vec();
        let n = periodic0.modes();
        // cos/sin tables for the periodic part.
        let trig: Vec<Vec<(f64, f64)>> = (1..=n)
            .map(|k| nodes.iter().map(|&x| (k as f64 * PI * x).sin_cos()).collect())
            .collect();
        let base = v
            .par_iter()
            .enumerate()
            .map(|(j, vj)| {
                let t = j as f64 * dt;
                let per = crate::flow::propagate_periodic(periodic0, t);
                let [h1, h2, h3, h4] = tilde.at(t);
                let lift = dirichlet_lift_full(h1, h3, h2, h4);
                let lc = lift.clamped_coefficients(basis);
                let reg: Vec<C64> = vj.iter().zip(&lc).map(|(a, b)| a - b).collect();
                let mut vals = projector.synthesize(&reg);
                for (i, (val, &x)) in vals.iter_mut().zip(&nodes).enumerate() {
                    let mut p = per.mean() + lift.value(x);
                    for k in 0..n {
                        let (s, c) = trig[k][i];
                        p += per.sine()[k] * s + per.cosine()[k] * c;
                    }
                    *val += p;
                }
                vals
            })
            .collect();
        Self {
            spec,
            projector,
            base,
        }
    }

    fn total(&self, j: usize, w: &[C64]) -> Vec<C64> {
        let mut vals = self.projector.synthesize(w);
        for (a, b) in vals.iter_mut().zip(&self.base[j]) {
            *a += b;
        }
        vals
    }

    fn forcing(&self, w: &[Vec<C64>]) -> Result<Vec<Vec<C64>>> {
        w.par_iter()
            .enumerate()
            .map(|(j, wj)| {
                let mut vals = self.total(j, wj);
                apply_power(&mut vals, self.spec.p, self.spec.lambda)?;
                Ok(self.projector.project(&vals))
            })
            .collect()
    }

    fn projection_residual(&self, w: &[Vec<C64>], steps: usize) -> Result<f64> {
        let mut vals = self.total(steps, &w[steps]);
        apply_power(&mut vals, self.spec.p, self.spec.lambda)?;
        Ok(self.projector.residual(&vals))
    }

    fn mode_residual(&self, w: &[Vec<C64>], omegas: &[f64]) -> Result<f64> {
        let steps = w.len() - 1;
        if steps < 2 {
            return Ok(0.0);
        }
        let dt = self.spec.horizon.min(1.0) / steps as f64;
        let f = self.forcing(w)?;
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for j in 1..steps {
            for (i, &om) in omegas.iter().enumerate() {
                if om * dt > 0.1 {
                    continue;
                }
                let dw = (w[j + 1][i] - w[j - 1][i]) / (2.0 * dt);
                let r = I * dw + om * w[j][i] + f[j][i];
                worst = worst.max(r.norm());
                scale = scale.max(f[j][i].norm()).max((om * w[j][i]).norm());
            }
        }
        Ok(if scale > 0.0 { worst / scale } else { worst })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn homogenization_examples() {
        let mut spec = ProblemSpec::new(Family::Navier);
        let (g, _) = homogenize_navier(&spec).unwrap();
        assert_eq!(g, Cubic::zero());
        spec.boundary.left = BoundaryTrace::constant(c(1.0));
        let (g, sh) = homogenize_navier(&spec).unwrap();
        assert!((g.value(0.0) - 1.0).norm() < 1e-15);
        assert!((g.value(0.5) - 0.5).norm() < 1e-15);
        assert!(g.derivative(0.0, 2).norm() < 1e-15);
        assert!(sh.boundary.left.eval(0.0).norm() < 1e-15);
        let mut spec = ProblemSpec::new(Family::Navier);
        spec.boundary.right_aux = BoundaryTrace::constant(c(6.0));
        let (g, _) = homogenize_navier(&spec).unwrap();
        for x in [0.0, 0.3, 1.0] {
            assert!((g.value(x) - (x * x * x - x)).norm() < 1e-14);
        }
        assert!((g.derivative(1.0, 2) - 6.0).norm() < 1e-14);
    }

    #[test]
    fn validation_messages() {
        let mut spec = ProblemSpec::new(Family::Navier);
        spec.s = 1.5;
        let e = spec.validate().unwrap_err().to_string();
        assert!(e.contains("s=1.5 excluded: s ≠ n+1/2"), "{e}");
        let mut spec = ProblemSpec::new(Family::Dirichlet);
        spec.s = 1.0;
        let e = spec.validate().unwrap_err().to_string();
        assert!(e.contains("Dirichlet requires s > 10/7"), "{e}");
        let mut spec = ProblemSpec::new(Family::Navier);
        spec.s = 0.4;
        assert!(spec.validate().is_err());
        spec.low_regularity = true;
        assert!(spec.validate().is_ok());
        let mut spec = ProblemSpec::new(Family::Navier);
        spec.s = 1.0;
        spec.p = 3.0;
        assert!(spec.validate().unwrap_err().to_string().contains("p−2"));
        spec.p = 4.0;
        assert!(spec.validate().is_ok());
        spec.s = 0.9;
        spec.p = 3.0;
        assert!(spec.validate().is_ok());
    }

    #[test]
    fn nonlinearity_examples() {
        let z = FourierState::zeros(Basis::Sine, 4);
        assert_eq!(nonlinearity(&z, 3.0, 1.0, 1.0).unwrap().l2_norm(), 0.0);
        let st = FourierState::from_sine(vec![c(1.0), c(0.0), c(0.0), c(0.0)]);
        let out = nonlinearity(&st, 4.0, 1.0, 1.0).unwrap();
        let expect = [0.75, 0.0, -0.25, 0.0];
        for (q, e) in out.sine().iter().zip(expect) {
            assert!((q - e).norm() < 1e-14);
        }
    }

    #[test]
    fn non_polynomial_power_against_quadrature() {
        let mut q = vec![c(0.0); 8];
        q[0] = C64::new(0.0, 1.0);
        let st = FourierState::from_sine(q);
        let out = nonlinearity(&st, 3.0, -2.0, 500.0).unwrap();
        let rule = crate::quadrature::CompositeRule::new(0.0, 1.0, 64, 16);
        for k in 1..=8 {
            let kp = k as f64 * PI;
            // −2 i sin|sin| = −2i sin² on (0,1)
            let im = rule.integrate(|x| 2.0 * -2.0 * (PI * x).sin().powi(2) * (kp * x).sin());
            assert!((out.sine()[k - 1] - C64::new(0.0, im)).norm() < 1e-10, "k={k}");
        }
    }

    #[test]
    fn padding_is_exact_for_even_powers() {
        let q: Vec<C64> = (1..=12).map(|k| C64::new(1.0 / k as f64, 0.3 / (k * k) as f64)).collect();
        let st = FourierState::from_sine(q);
        let a = nonlinearity(&st, 4.0, 1.0, 1.0).unwrap();
        let b = nonlinearity(&st, 4.0, 1.0, 2.0).unwrap();
        for (x, y) in a.sine().iter().zip(b.sine()) {
            assert!((x - y).norm() < 1e-12);
        }
        let mixed = FourierState::mixed(c(0.2), vec![c(0.1); 6], vec![c(0.3); 6]);
        let a = nonlinearity(&mixed, 6.0, 1.0, 1.0).unwrap();
        let b = nonlinearity(&mixed, 6.0, 1.0, 2.0).unwrap();
        assert!(a.sub(&b).unwrap().l2_norm() < 1e-12);
    }

    #[test]
    fn overflow_is_reported() {
        let st = FourierState::from_sine(vec![c(1e200); 4]);
        assert_eq!(nonlinearity(&st, 4.0, 1.0, 1.0).unwrap_err(), Error::Overflow);
    }

    #[test]
    fn zero_problem_stays_zero() {
        let mut spec = ProblemSpec::new(Family::Navier);
        spec.modes = 16;
        spec.horizon = 0.01;
        spec.dt = 1e-3;
        let rec = picard_navier(&spec).unwrap();
        assert!(rec.states.iter().all(|s| s.fourier.l2_norm() == 0.0));
        assert_eq!(rec.diagnostics.existence_time, 0.01);
    }

    #[test]
    fn linear_problem_is_one_iteration() {
        let mut spec = ProblemSpec::new(Family::Navier);
        spec.modes = 16;
        spec.s = 0.75;
        spec.lambda = 0.0;
        spec.horizon = 0.01;
        spec.dt = 1e-3;
        spec.initial = InitialData::SineModes(vec![c(0.1), c(0.02)]);
        let rec = picard_navier(&spec).unwrap();
        assert_eq!(rec.diagnostics.iterations, 1);
        let last = rec.states.last().unwrap();
        let expect = 0.1 * cis(PI.powi(4) * last.time);
        assert!((last.fourier.sine()[0] - expect).norm() < 1e-14);
    }

    #[test]
    fn dirichlet_zero_problem() {
        let mut spec = ProblemSpec::new(Family::Dirichlet);
        spec.modes = 12;
        spec.horizon = 0.01;
        spec.dt = 1e-3;
        spec.lambda = 0.0;
        let rec = picard_dirichlet(&spec).unwrap();
        for j in 0..rec.states.len() {
            assert_eq!(rec.l2_norm(j), 0.0);
        }
    }
}
