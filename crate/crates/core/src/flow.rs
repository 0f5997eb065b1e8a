//! Free propagators and Duhamel convolution.
//!
//! Every mode obeys `i α' + ω α = β` with `ω = (kπ)⁴` (sine/cosine bases) or
//! `ω = μ_k⁴` (clamped basis), so
//!
//! ```text
//! α(t) = e^{iωt} α(0) − i ∫₀ᵗ e^{iω(t−τ)} β(τ) dτ.
//! ```
//!
//! [`duhamel`] returns the bare convolution `∫₀ᵗ e^{iω(t−τ)} f(τ) dτ`; callers
//! multiply by the factor their equation needs (`−i` for a source term,
//! `iλ` for the nonlinearity).


use rayon::prelude::*;

use crate::clamped::{ClampedBasis, ClampedState};
use crate::spectral::{Basis, FourierState};
use crate::trace::BoundaryTrace;
use crate::{cis, Error, Result, C64, PI4};

/// Below this value of `|ωΔt|` the integrator weights use Taylor series.
pub const SMALL_PHASE: f64 = 1e-3;

/// `(kπ)⁴`, formed as `k⁴·π⁴` so that it coincides bit for bit with the
/// trace-lattice frequency `n·π⁴` at `n = k⁴`.
#[inline]
pub fn navier_frequency(k: usize) -> f64 {
    (k as f64).powi(4) * PI4
}

/// Phase `e^{i(kπ)⁴t}`.
#[inline]
fn lattice_phase(k: usize, t: f64) -> C64 {
    cis(navier_frequency(k) * t)
}

/// `q_k ↦ e^{i(kπ)⁴t} q_k` on a sine state.
pub fn propagate_navier(state: &FourierState, t: f64) -> Result<FourierState> {
    if state.basis() != Basis::Sine {
        return Err(Error::BasisMismatch {
            expected: Basis::Sine,
            found: state.basis(),
        });
    }
    Ok(propagate_periodic(state, t))
}

/// Multiply `q_k` and `p_k` by `e^{i(kπ)⁴t}`; `p₀` is unchanged.
pub fn propagate_periodic(state: &FourierState, t: f64) -> FourierState {
    let time = state.time() + t;
    state.scale_modes(|k| lattice_phase(k, t)).with_time(time)
}

/// `φ₁(z) = (e^z−1)/z` and `φ₂(z) = (e^z−1−z)/z²` at `z = iθ`.
pub fn phi_functions(theta: f64) -> (C64, C64) {
    let z = C64::new(0.0, theta);
    if theta.abs() < SMALL_PHASE {
        let z2 = z * z;
        let z3 = z2 * z;
        let z4 = z2 * z2;
        let phi1 = 1.0 + z / 2.0 + z2 / 6.0 + z3 / 24.0 + z4 / 120.0;
        let phi2 = 0.5 + z / 6.0 + z2 / 24.0 + z3 / 120.0 + z4 / 720.0;
        (phi1, phi2)
    } else {
        let half = 0.5 * theta;
        let em1 = C64::new(-2.0 * half.sin().powi(2), theta.sin());
        let phi1 = em1 / z;
        let phi2 = (em1 - z) / (z * z);
        (phi1, phi2)
    }
}

/// One step of the piecewise-linear exponential integrator:
/// returns `(e^{iωΔ}, Δ(φ₁−φ₂), Δφ₂)` so that
/// `I(t+Δ) = e^{iωΔ} I(t) + Δ(φ₁−φ₂) f(t) + Δφ₂ f(t+Δ)`.
#[derive(Clone, Copy, Debug)]
pub struct StepWeights {
    pub propagator: C64,
    pub left: C64,
    pub right: C64,
}

impl StepWeights {
    pub fn new(omega: f64, dt: f64) -> Self {
        let theta = omega * dt;
        let (phi1, phi2) = phi_functions(theta);
        Self {
            propagator: cis(theta),
            left: dt * (phi1 - phi2),
            right: dt * phi2,
        }
    }

    #[inline]
    pub fn step(&self, acc: C64, f_left: C64, f_right: C64) -> C64 {
        self.propagator * acc + self.left * f_left + self.right * f_right
    }
}

/// `∫₀ᵗ e^{iω(t−τ)} e^{iντ} dτ`, exact (including resonance `ν = ω`).
///
/// Away from resonance the difference form `(e^{iνt} − e^{iωt})/(i(ν−ω))` is
/// used, so the rounding of a large phase `ωt` is shared by every data
/// frequency and cancels when the terms are summed.
pub fn convolve_exponential(omega: f64, nu: f64, t: f64) -> C64 {
    let theta = (nu - omega) * t;
    if theta.abs() > 1.0 {
        (cis(nu * t) - cis(omega * t)) / C64::new(0.0, nu - omega)
    } else {
        let (phi1, _) = phi_functions(theta);
        cis(omega * t) * t * phi1
    }
}

/// `∫₀ᵗ e^{iω(t−τ)} f(τ) dτ` for the piecewise-linear interpolant of
/// `(times, values)`, at every node.
pub fn convolve_history_all(omega: f64, times: &[f64], values: &[C64]) -> Vec<C64> {
    debug_assert_eq!(times.len(), values.len());
    let mut out = Vec::with_capacity(times.len());
    let mut acc = C64::new(0.0, 0.0);
    out.push(acc);
    let uniform = is_uniform(times);
    let mut w = if uniform && times.len() > 1 {
        Some(StepWeights::new(omega, times[1] - times[0]))
    } else {
        None
    };
    for j in 1..times.len() {
        let weights = match w {
            Some(w) => w,
            None => StepWeights::new(omega, times[j] - times[j - 1]),
        };
        acc = weights.step(acc, values[j - 1], values[j]);
        out.push(acc);
        if !uniform {
            w = None;
        }
    }
    out
}

fn is_uniform(times: &[f64]) -> bool {
    if times.len() < 3 {
        return true;
    }
    let dt = times[1] - times[0];
    times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-12 * dt.abs().max(1e-300) * times.len() as f64)
}

/// As [`convolve_history_all`] but at a single time inside the grid span.
pub fn convolve_history(omega: f64, times: &[f64], values: &[C64], t: f64) -> Result<C64> {
    let (start, end) = (times[0], *times.last().unwrap());
    if !(t >= start && t <= end) {
        return Err(Error::OutOfRange { t, start, end });
    }
    let mut acc = C64::new(0.0, 0.0);
    for j in 1..times.len() {
        if times[j] <= t {
            acc = StepWeights::new(omega, times[j] - times[j - 1]).step(acc, values[j - 1], values[j]);
            if times[j] == t {
                return Ok(acc);
            }
        } else {
            let delta = t - times[j - 1];
            if delta > 0.0 {
                let frac = delta / (times[j] - times[j - 1]);
                let ft = values[j - 1] * (1.0 - frac) + values[j] * frac;
                acc = StepWeights::new(omega, delta).step(acc, values[j - 1], ft);
            }
            return Ok(acc);
        }
    }
    Ok(acc)
}

/// `∫₀ᵗ e^{iω(t−τ)} h(τ) dτ` for a boundary trace: the series part in closed
/// form, the sampled part with the piecewise-linear integrator.
pub fn convolve_trace(omega: f64, h: &BoundaryTrace, t: f64) -> Result<C64> {
    let mut acc: C64 = h
        .terms()
        .iter()
        .map(|(n, a)| a * convolve_exponential(omega, *n as f64 * PI4, t))
        .sum();
    if let Some(s) = h.samples() {
        if t > s.end() + 1e-12 * s.end().abs().max(1.0) || s.start > 0.0 {
            return Err(Error::OutOfRange {
                t,
                start: s.start,
                end: s.end(),
            });
        }
        let times = s.times();
        acc += convolve_history(omega, &times, &s.values, t.min(s.end()))?;
    }
    Ok(acc)
}

/// [`convolve_trace`] on a uniform grid `t_j = j·dt`, `j = 0..=steps`.
pub fn convolve_trace_grid(omega: f64, h: &BoundaryTrace, dt: f64, steps: usize) -> Result<Vec<C64>> {
    let times: Vec<f64> = (0..=steps).map(|j| j as f64 * dt).collect();
    let mut out: Vec<C64> = times
        .iter()
        .map(|&t| {
            h.terms()
                .iter()
                .map(|(n, a)| a * convolve_exponential(omega, *n as f64 * PI4, t))
                .sum()
        })
        .collect();
    if let Some(s) = h.samples() {
        if s.start > 0.0 || times[steps] > s.end() + 1e-9 * dt {
            return Err(Error::OutOfRange {
                t: times[steps],
                start: s.start,
                end: s.end(),
            });
        }
        let values: Vec<C64> = times.iter().map(|&t| s.eval(t)).collect();
        let aligned = (s.step - dt).abs() <= 1e-12 * dt && s.start == 0.0;
        let conv = if aligned {
            convolve_history_all(omega, &times, &values)
        } else {
            let st = s.times();
            times
                .iter()
                .map(|&t| convolve_history(omega, &st, &s.values, t.min(s.end())))
                .collect::<Result<Vec<_>>>()?
        };
        for (o, c) in out.iter_mut().zip(conv) {
            *o += c;
        }
    }
    Ok(out)
}

/// Which free group a forcing history is convolved against.
#[derive(Clone, Copy, Debug)]
pub enum Flow<'a> {
    /// Sine series with `ω_k = (kπ)⁴`.
    Navier,
    /// Sine and cosine series with `ω_k = (kπ)⁴`, mean mode `ω = 0`.
    Periodic,
    /// Clamped basis with `ω_k = μ_k⁴`.
    Dirichlet(&'a ClampedBasis),
}

/// Time-stamped forcing data, all sharing basis and truncation.
#[derive(Clone, Debug)]
pub enum ForcingHistory {
    Fourier { times: Vec<f64>, states: Vec<FourierState> },
    Clamped { times: Vec<f64>, coeffs: Vec<Vec<C64>> },
}

impl ForcingHistory {
    pub fn fourier(times: Vec<f64>, states: Vec<FourierState>) -> Result<Self> {
        validate_grid(&times, states.len())?;
        let (b, n) = (states[0].basis(), states[0].modes());
        if states.iter().any(|s| s.basis() != b || s.modes() != n) {
            return Err(Error::InvalidInput(
                "forcing states must share basis and truncation".into(),
            ));
        }
        Ok(Self::Fourier { times, states })
    }

    pub fn clamped(times: Vec<f64>, coeffs: Vec<Vec<C64>>) -> Result<Self> {
        validate_grid(&times, coeffs.len())?;
        let n = coeffs[0].len();
        if coeffs.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidInput("forcing vectors must share length".into()));
        }
        Ok(Self::Clamped { times, coeffs })
    }

    pub fn times(&self) -> &[f64] {
        match self {
            Self::Fourier { times, .. } | Self::Clamped { times, .. } => times,
        }
    }
}

fn validate_grid(times: &[f64], len: usize) -> Result<()> {
    if times.len() < 2 || times.len() != len {
        return Err(Error::InvalidInput(
            "forcing history needs at least two nodes and one state per node".into(),
        ));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("forcing grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Output of [`duhamel`]: a Fourier state or clamped coefficients.
#[derive(Clone, Debug, PartialEq)]
pub enum DuhamelState {
    Fourier(FourierState),
    Clamped(ClampedState),
}

/// `∫₀ᵗ W(t−τ) f(τ) dτ` mode by mode for the piecewise-linear interpolant
/// of the forcing history.
pub fn duhamel(flow: Flow<'_>, forcing: &ForcingHistory, t: f64) -> Result<DuhamelState> {
    let times = forcing.times();
    let (start, end) = (times[0], *times.last().unwrap());
    if !(t >= start && t <= end) {
        return Err(Error::OutOfRange { t, start, end });
    }
    let shifted: Vec<f64> = times.iter().map(|x| x - start).collect();
    let tt = t - start;
    match (flow, forcing) {
        (Flow::Navier | Flow::Periodic, ForcingHistory::Fourier { states, .. }) => {
            let first = &states[0];
            if matches!(flow, Flow::Navier) && first.basis() != Basis::Sine {
                return Err(Error::BasisMismatch {
                    expected: Basis::Sine,
                    found: first.basis(),
                });
            }
            let n = first.modes();
            let conv = |omega: f64, pick: &dyn Fn(&FourierState) -> C64| -> Result<C64> {
                let vals: Vec<C64> = states.iter().map(pick).collect();
                convolve_history(omega, &shifted, &vals, tt)
            };
            let mean = conv(0.0, &|s| s.mean())?;
            let sine = (1..=n)
                .into_par_iter()
                .map(|k| conv(navier_frequency(k), &|s| s.sine()[k - 1]))
                .collect::<Result<Vec<_>>>()?;
            let cosine = (1..=n)
                .into_par_iter()
                .map(|k| conv(navier_frequency(k), &|s| s.cosine()[k - 1]))
                .collect::<Result<Vec<_>>>()?;
            Ok(DuhamelState::Fourier(
                FourierState::new(first.basis(), mean, cosine, sine, t)?,
            ))
        }
        (Flow::Dirichlet(basis), ForcingHistory::Clamped { coeffs, .. }) => {
            let n = coeffs[0].len();
            if n > basis.len() {
                return Err(Error::InvalidInput(format!(
                    "forcing has {n} clamped modes but the basis only {}",
                    basis.len()
                )));
            }
            let out = (1..=n)
                .into_par_iter()
                .map(|k| {
                    let vals: Vec<C64> = coeffs.iter().map(|c| c[k - 1]).collect();
                    convolve_history(basis.eigenvalue(k), &shifted, &vals, tt)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(DuhamelState::Clamped(ClampedState { coeffs: out, time: t }))
        }
        _ => Err(Error::InvalidInput(
            "forcing history does not match the requested flow".into(),
        )),
    }
}

/// Convolution of a mode history (`values[j][m]` is mode `m` at node `j`)
/// against frequencies `omegas[m]` on a uniform grid, at every node.
pub fn convolve_modes_uniform(omegas: &[f64], dt: f64, values: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let nodes = values.len();
    let modes = omegas.len();
    let columns: Vec<Vec<C64>> = omegas
        .par_iter()
        .enumerate()
        .map(|(m, &omega)| {
            let w = StepWeights::new(omega, dt);
            let mut acc = C64::new(0.0, 0.0);
            let mut col = Vec::with_capacity(nodes);
            col.push(acc);
            for j in 1..nodes {
                acc = w.step(acc, values[j - 1][m], values[j][m]);
                col.push(acc);
            }
            col
        })
        .collect();
    (0..nodes)
        .map(|j| (0..modes).map(|m| columns[m][j]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn navier_examples() {
        let st = FourierState::from_sine(vec![c(1.0), c(0.0)]);
        assert_eq!(propagate_navier(&st, 0.0).unwrap().sine(), st.sine());
        let period = 2.0 / PI.powi(3);
        let out = propagate_navier(&st, period).unwrap();
        assert!((out.sine()[0] - 1.0).norm() < 1e-13);
        let st = FourierState::from_sine(vec![c(0.0), c(1.0)]);
        let out = propagate_navier(&st, 0.1).unwrap();
        assert!((out.sine()[1] - cis((2.0 * PI).powi(4) * 0.1)).norm() < 1e-13);
        assert!((out.sine()[1].norm() - 1.0).abs() < 1e-15);
        let cos = FourierState::from_cosine(c(1.0), vec![c(1.0)]);
        assert!(propagate_navier(&cos, 0.1).is_err());
    }

    #[test]
    fn periodic_examples() {
        let st = FourierState::mixed(c(1.0), vec![c(1.0)], vec![c(1.0)]);
        let t = PI / PI4;
        let out = propagate_periodic(&st, t);
        assert_eq!(out.mean(), c(1.0));
        assert!((out.sine()[0] + 1.0).norm() < 1e-13);
        assert!((out.cosine()[0] + 1.0).norm() < 1e-13);
    }

    #[test]
    fn phi_branches_agree_at_threshold() {
        let below = phi_functions(SMALL_PHASE * (1.0 - 1e-13));
        let above = phi_functions(SMALL_PHASE * (1.0 + 1e-13));
        assert!((below.0 - above.0).norm() < 1e-12);
        assert!((below.1 - above.1).norm() < 1e-12);
    }

    #[test]
    fn constant_forcing_closed_form() {
        let omega = PI4;
        let times: Vec<f64> = (0..=20).map(|j| j as f64 * 0.01).collect();
        let vals = vec![c(1.0); times.len()];
        let got = convolve_history(omega, &times, &vals, 0.2).unwrap();
        let i = C64::new(0.0, 1.0);
        let exact = (cis(omega * 0.2) - 1.0) / (i * omega);
        assert!((got - exact).norm() < 1e-14);
    }

    #[test]
    fn linear_forcing_matches_quadrature() {
        let omega = PI4;
        let times: Vec<f64> = (0..=7).map(|j| j as f64 * 0.1 / 7.0).collect();
        let vals: Vec<C64> = times.iter().map(|&t| c(t)).collect();
        let got = convolve_history(omega, &times, &vals, 0.1).unwrap();
        let rule = crate::quadrature::CompositeRule::new(0.0, 0.1, 200, 16);
        let re = rule.integrate(|s| ((omega * (0.1 - s)).cos()) * s);
        let im = rule.integrate(|s| ((omega * (0.1 - s)).sin()) * s);
        assert!((got - C64::new(re, im)).norm() < 1e-10);
    }

    #[test]
    fn partial_interval_and_range() {
        let times = vec![0.0, 0.5, 1.0];
        let vals = vec![c(0.0), c(0.5), c(1.0)];
        let a = convolve_history(3.0, &times, &vals, 0.75).unwrap();
        let fine: Vec<f64> = (0..=4).map(|j| j as f64 * 0.25).collect();
        let fv: Vec<C64> = fine.iter().map(|&t| c(t)).collect();
        let b = convolve_history(3.0, &fine, &fv, 0.75).unwrap();
        assert!((a - b).norm() < 1e-14);
        assert!(matches!(
            convolve_history(3.0, &times, &vals, 1.5),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn series_convolution_resonant_and_not() {
        let omega = PI4;
        let t = 0.03;
        let resonant = convolve_exponential(omega, omega, t);
        assert!((resonant - t * cis(omega * t)).norm() < 1e-15);
        let nu = 3.0 * PI4;
        let i = C64::new(0.0, 1.0);
        let exact = (cis(nu * t) - cis(omega * t)) / (i * (nu - omega));
        assert!((convolve_exponential(omega, nu, t) - exact).norm() < 1e-14);
    }

    #[test]
    fn duhamel_zero_and_basis_checks() {
        let times = vec![0.0, 0.1, 0.2];
        let states = vec![FourierState::zeros(Basis::Sine, 4); 3];
        let f = ForcingHistory::fourier(times.clone(), states).unwrap();
        match duhamel(Flow::Navier, &f, 0.15).unwrap() {
            DuhamelState::Fourier(s) => assert_eq!(s.l2_norm(), 0.0),
            _ => panic!(),
        }
        assert!(duhamel(Flow::Navier, &f, 0.3).is_err());
        assert!(ForcingHistory::fourier(vec![0.0, 0.0], vec![FourierState::zeros(Basis::Sine, 1); 2]).is_err());
    }

    #[test]
    fn uniform_mode_convolution_matches_scalar() {
        let omegas = [0.0, 10.0, 1e4];
        let dt = 1e-3;
        let values: Vec<Vec<C64>> = (0..50)
            .map(|j| omegas.iter().map(|w| C64::new((j as f64 * 0.1).sin(), *w * 1e-4)).collect())
            .collect();
        let all = convolve_modes_uniform(&omegas, dt, &values);
        let times: Vec<f64> = (0..50).map(|j| j as f64 * dt).collect();
        for (m, &w) in omegas.iter().enumerate() {
            let col: Vec<C64> = values.iter().map(|v| v[m]).collect();
            let s = convolve_history_all(w, &times, &col);
            for j in 0..50 {
                assert!((s[j] - all[j][m]).norm() < 1e-15);
            }
        }
    }
}
