//! Boundary traces `h(t) = Σ_n a_n e^{inπ⁴t}` with an optional sampled part.
//!
//! The series part is stored sparsely because the traces produced by the
//! periodic flow live on the frequencies `k⁴`, far too spread out for a dense
//! coefficient vector. A sampled part, when present, is a piecewise-linear
//! signal on a uniform grid and is added to the series.

use std::collections::BTreeMap;

use crate::{cis, Error, Result, C64, PI4, TRACE_PERIOD};

/// Uniformly sampled signal `values[j] = h(start + j·step)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledTrace {
    pub start: f64,
    pub step: f64,
    pub values: Vec<C64>,
}

impl SampledTrace {
    pub fn new(start: f64, step: f64, values: Vec<C64>) -> Result<Self> {
        if !(step > 0.0) || values.len() < 2 {
            return Err(Error::InvalidInput(
                "sampled trace needs a positive step and at least two samples".into(),
            ));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite trace sample".into()));
        }
        Ok(Self { start, step, values })
    }

    pub fn end(&self) -> f64 {
        self.start + self.step * (self.values.len() - 1) as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.values.len())
            .map(|j| self.start + j as f64 * self.step)
            .collect()
    }

    /// Piecewise-linear interpolant, held constant outside the sampled span.
    pub fn eval(&self, t: f64) -> C64 {
        let u = (t - self.start) / self.step;
        if u <= 0.0 {
            return self.values[0];
        }
        let last = self.values.len() - 1;
        if u >= last as f64 {
            return self.values[last];
        }
        let j = u.floor() as usize;
        let w = u - j as f64;
        self.values[j] * (1.0 - w) + self.values[j + 1] * w
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoundaryTrace {
    terms: Vec<(i64, C64)>,
    samples: Option<SampledTrace>,
}

impl BoundaryTrace {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Series trace; repeated frequencies are summed and exact zeros dropped.
    pub fn from_series<I: IntoIterator<Item = (i64, C64)>>(terms: I) -> Self {
        let mut map: BTreeMap<i64, C64> = BTreeMap::new();
        for (n, a) in terms {
            *map.entry(n).or_default() += a;
        }
        Self {
            terms: map.into_iter().filter(|(_, a)| a.norm_sqr() != 0.0).collect(),
            samples: None,
        }
    }

    pub fn constant(c: C64) -> Self {
        Self::from_series([(0, c)])
    }

    pub fn from_samples(samples: SampledTrace) -> Self {
        Self {
            terms: Vec::new(),
            samples: Some(samples),
        }
    }

    pub fn with_samples(mut self, samples: SampledTrace) -> Self {
        self.samples = Some(samples);
        self
    }

    /// Series terms `(n, a_n)`, sorted by `n`.
    pub fn terms(&self) -> &[(i64, C64)] {
        &self.terms
    }

    pub fn samples(&self) -> Option<&SampledTrace> {
        self.samples.as_ref()
    }

    pub fn has_series(&self) -> bool {
        !self.terms.is_empty() || self.samples.is_none()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
            && self
                .samples
                .as_ref()
                .map_or(true, |s| s.values.iter().all(|v| v.norm_sqr() == 0.0))
    }

    /// Value of the series part alone.
    pub fn series_value(&self, t: f64) -> C64 {
        self.terms
            .iter()
            .map(|(n, a)| a * cis(*n as f64 * PI4 * t))
            .sum()
    }

    /// Time derivative of the series part.
    pub fn series_derivative(&self, t: f64) -> C64 {
        self.terms
            .iter()
            .map(|(n, a)| {
                let nu = *n as f64 * PI4;
                a * C64::new(0.0, nu) * cis(nu * t)
            })
            .sum()
    }

    pub fn eval(&self, t: f64) -> C64 {
        let s = self.samples.as_ref().map_or(C64::new(0.0, 0.0), |s| s.eval(t));
        self.series_value(t) + s
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            terms: self.terms.iter().map(|(n, a)| (*n, a * c)).collect(),
            samples: self.samples.as_ref().map(|s| SampledTrace {
                start: s.start,
                step: s.step,
                values: s.values.iter().map(|v| v * c).collect(),
            }),
        }
        .normalized()
    }

    fn normalized(self) -> Self {
        let samples = self.samples;
        let mut out = Self::from_series(self.terms);
        out.samples = samples;
        out
    }

    /// Sum of two traces. Sampled parts must share their grid.
    pub fn add(&self, other: &BoundaryTrace) -> Result<Self> {
        let samples = match (&self.samples, &other.samples) {
            (None, None) => None,
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (Some(a), Some(b)) => {
                if a.values.len() != b.values.len()
                    || (a.start - b.start).abs() > 1e-15
                    || (a.step - b.step).abs() > 1e-15 * a.step
                {
                    return Err(Error::InvalidInput(
                        "cannot add sampled traces on different grids".into(),
                    ));
                }
                Some(SampledTrace {
                    start: a.start,
                    step: a.step,
                    values: a.values.iter().zip(&b.values).map(|(x, y)| x + y).collect(),
                })
            }
        };
        let mut out = Self::from_series(self.terms.iter().chain(&other.terms).copied());
        out.samples = samples;
        Ok(out)
    }

    /// `h(t) - h(0)`, which satisfies the corner condition.
    pub fn shifted_to_zero(&self) -> Self {
        let h0 = self.eval(0.0);
        let mut out = self.clone();
        out.terms.push((0, -h0));
        out.normalized()
    }

    /// Largest `|n|` in the series part.
    pub fn max_frequency(&self) -> i64 {
        self.terms.iter().map(|(n, _)| n.abs()).max().unwrap_or(0)
    }

    /// Least-squares projection of samples onto frequencies `|n| ≤ max_freq`.
    ///
    /// When the samples cover exactly one period on a uniform grid the normal
    /// equations are diagonal and the projection reduces to a discrete
    /// Fourier sum; otherwise the dense normal equations are solved.
    pub fn fit_samples(samples: &SampledTrace, max_freq: i64) -> Result<Self> {
        let times = samples.times();
        let jn = times.len();
        let dim = (2 * max_freq + 1) as usize;
        if jn < dim {
            return Err(Error::InvalidInput(format!(
                "{jn} samples cannot determine {dim} trace coefficients"
            )));
        }
        let period_grid = ((jn as f64) * samples.step - TRACE_PERIOD).abs() < 1e-9 * TRACE_PERIOD;
        let freqs: Vec<i64> = (-max_freq..=max_freq).collect();
        let terms: Vec<(i64, C64)> = if period_grid {
            freqs
                .iter()
                .map(|&n| {
                    let a: C64 = times
                        .iter()
                        .zip(&samples.values)
                        .map(|(t, v)| v * cis(-(n as f64) * PI4 * t))
                        .sum();
                    (n, a / jn as f64)
                })
                .collect()
        } else {
            let mut gram = vec![vec![C64::new(0.0, 0.0); dim]; dim];
            let mut rhs = vec![C64::new(0.0, 0.0); dim];
            for (t, v) in times.iter().zip(&samples.values) {
                let row: Vec<C64> = freqs.iter().map(|&n| cis(n as f64 * PI4 * t)).collect();
                for a in 0..dim {
                    rhs[a] += row[a].conj() * v;
                    for b in 0..dim {
                        gram[a][b] += row[a].conj() * row[b];
                    }
                }
            }
            let sol = solve_dense(gram, rhs)?;
            freqs.into_iter().zip(sol).collect()
        };
        Ok(Self::from_series(terms))
    }

    /// Max deviation between the series part and the stored samples.
    pub fn projection_residual(&self) -> Option<f64> {
        self.samples.as_ref().map(|s| {
            s.times()
                .iter()
                .zip(&s.values)
                .map(|(t, v)| (self.series_value(*t) - v).norm())
                .fold(0.0, f64::max)
        })
    }
}

/// `(Σ_n (1+n²)^α |a_n|²)^{1/2}` over the series part.
pub fn trace_sobolev_norm(h: &BoundaryTrace, alpha: f64) -> Result<f64> {
    if h.terms.is_empty() && h.samples.is_some() {
        return Err(Error::InvalidInput(
            "trace norm needs a series form; project the samples first".into(),
        ));
    }
    Ok(h.terms
        .iter()
        .map(|(n, a)| (1.0 + (*n as f64).powi(2)).powf(alpha) * a.norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Gaussian elimination with partial pivoting for small dense systems.
pub(crate) fn solve_dense(mut a: Vec<Vec<C64>>, mut b: Vec<C64>) -> Result<Vec<C64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        if a[piv][col].norm() < 1e-300 {
            return Err(Error::InvalidInput("singular least-squares system".into()));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f.norm_sqr() == 0.0 {
                continue;
            }
            for c in col..n {
                let v = a[col][c];
                a[row][c] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in row + 1..n {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}
