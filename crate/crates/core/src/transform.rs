//! Type-I sine and cosine transforms on the uniform grid `x_j = j/M`.
//!
//! Both transforms are computed from a complex FFT of length `2M` applied to
//! the odd (respectively even) extension of the samples. They double as
//! trapezoid-rule quadratures for `∫₀¹ f sin(kπx)` and `∫₀¹ f cos(kπx)` and
//! as synthesis operators for truncated series.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::C64;

/// Cached FFT plan for a grid with `m` intervals.
#[derive(Clone)]
pub struct Transform {
    m: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Transform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transform").field("m", &self.m).finish()
    }
}

impl Transform {
    /// Plan transforms for the grid `j/m`, `j = 0..=m`.
    ///
    /// # Panics
    /// If `m < 2`.
    pub fn new(m: usize) -> Self {
        assert!(m >= 2, "transform grid needs at least two intervals");
        let fft = FftPlanner::new().plan_fft_forward(2 * m);
        Self { m, fft }
    }

    pub fn intervals(&self) -> usize {
        self.m
    }

    /// `S_k = Σ_{j=1}^{m-1} f_j sin(π j k / m)` for `k = 0..=m`
    /// (entries `0` and `m` vanish).
    ///
    /// `values` holds the `m+1` samples `f_0..f_m`; the endpoint samples are
    /// ignored because the sine kernel vanishes there.
    pub fn dst1(&self, values: &[C64]) -> Vec<C64> {
        let m = self.m;
        assert_eq!(values.len(), m + 1);
        let mut buf = vec![C64::new(0.0, 0.0); 2 * m];
        for j in 1..m {
            buf[j] = values[j];
            buf[2 * m - j] = -values[j];
        }
        self.fft.process(&mut buf);
        // X_k = -2i Σ f_j sin(πjk/m)
        buf.truncate(m + 1);
        for x in buf.iter_mut() {
            *x *= C64::new(0.0, 0.5);
        }
        buf[0] = C64::new(0.0, 0.0);
        buf[m] = C64::new(0.0, 0.0);
        buf
    }

    /// `C_k = ½f_0 + Σ_{j=1}^{m-1} f_j cos(π j k / m) + ½(-1)^k f_m`
    /// for `k = 0..=m`.
    pub fn dct1(&self, values: &[C64]) -> Vec<C64> {
        let m = self.m;
        assert_eq!(values.len(), m + 1);
        let mut buf = vec![C64::new(0.0, 0.0); 2 * m];
        buf[0] = values[0];
        buf[m] = values[m];
        for j in 1..m {
            buf[j] = values[j];
            buf[2 * m - j] = values[j];
        }
        self.fft.process(&mut buf);
        buf.truncate(m + 1);
        for x in buf.iter_mut() {
            *x *= 0.5;
        }
        buf
    }

    /// Evaluate `Σ_{k=1}^{N} q_k sin(kπx_j)` on the grid (`N < m`).
    pub fn synthesize_sine(&self, q: &[C64]) -> Vec<C64> {
        assert!(q.len() < self.m, "too many modes for the grid");
        let mut coeffs = vec![C64::new(0.0, 0.0); self.m + 1];
        coeffs[1..=q.len()].copy_from_slice(q);
        self.dst1(&coeffs)
    }

    /// Evaluate `p_0 + Σ_{k=1}^{N} p_k cos(kπx_j)` on the grid (`N < m`).
    pub fn synthesize_cosine(&self, p0: C64, p: &[C64]) -> Vec<C64> {
        assert!(p.len() < self.m, "too many modes for the grid");
        let mut coeffs = vec![C64::new(0.0, 0.0); self.m + 1];
        coeffs[0] = 2.0 * p0;
        coeffs[1..=p.len()].copy_from_slice(p);
        self.dct1(&coeffs)
    }

    /// Grid points `j/m`.
    pub fn grid(&self) -> Vec<f64> {
        (0..=self.m).map(|j| j as f64 / self.m as f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive_dst(values: &[C64], m: usize) -> Vec<C64> {
        (0..=m)
            .map(|k| {
                (1..m)
                    .map(|j| values[j] * (PI * (j * k) as f64 / m as f64).sin())
                    .sum()
            })
            .collect()
    }

    fn naive_dct(values: &[C64], m: usize) -> Vec<C64> {
        (0..=m)
            .map(|k| {
                let mut acc = 0.5 * values[0] + 0.5 * crate::parity(k) * values[m];
                for j in 1..m {
                    acc += values[j] * (PI * (j * k) as f64 / m as f64).cos();
                }
                acc
            })
            .collect()
    }

    #[test]
    fn fft_transforms_match_naive_sums() {
        let m = 13;
        let values: Vec<C64> = (0..=m)
            .map(|j| C64::new((j as f64 * 0.7).sin(), (j as f64 * 0.3).cos()))
            .collect();
        let t = Transform::new(m);
        for (a, b) in t.dst1(&values).iter().zip(naive_dst(&values, m)) {
            assert!((a - b).norm() < 1e-12);
        }
        for (a, b) in t.dct1(&values).iter().zip(naive_dct(&values, m)) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn synthesis_evaluates_series() {
        let t = Transform::new(16);
        let q = vec![C64::new(1.0, 0.0), C64::new(0.0, 2.0), C64::new(-0.5, 0.0)];
        let vals = t.synthesize_sine(&q);
        for (j, x) in t.grid().iter().enumerate() {
            let direct: C64 = q
                .iter()
                .enumerate()
                .map(|(i, c)| c * (PI * (i + 1) as f64 * x).sin())
                .sum();
            assert!((vals[j] - direct).norm() < 1e-12);
        }
        let p0 = C64::new(0.25, -1.0);
        let vals = t.synthesize_cosine(p0, &q);
        for (j, x) in t.grid().iter().enumerate() {
            let direct: C64 = p0
                + q.iter()
                    .enumerate()
                    .map(|(i, c)| c * (PI * (i + 1) as f64 * x).cos())
                    .sum::<C64>();
            assert!((vals[j] - direct).norm() < 1e-12);
        }
    }
}
