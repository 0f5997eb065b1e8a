//! Brute-force multiplicities of the pair map `(k,l) ↦ (k−l, k⁴−l⁴)`.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct Lambda4Report {
    pub k_max: i64,
    /// Largest bucket size over `(ξ,η) ≠ (0,0)`.
    pub max_multiplicity: usize,
    /// A bucket attaining the maximum.
    pub argmax: (i64, i128),
    /// Bucket size → number of buckets of that size, `(0,0)` excluded.
    pub histogram: BTreeMap<usize, usize>,
    /// Size of the diagonal bucket `(0,0)`, reported separately.
    pub diagonal: usize,
}

/// Count pairs `k, l ∈ [−K, K]` by `(k−l, k⁴−l⁴)` in exact integer arithmetic.
pub fn count_lambda4(k_max: i64) -> Result<Lambda4Report> {
    if k_max < 2 {
        return Err(Error::InvalidInput(format!("K ≥ 2 required (got {k_max})")));
    }
    let fourth = |k: i64| -> Result<i128> {
        (k as i128).checked_pow(4).ok_or(Error::CountOverflow { k })
    };
    // k⁴ − l⁴ must fit as well; both terms are non-negative so the gap
    // is bounded by K⁴.
    fourth(k_max)?;
    let powers: Vec<i128> = (-k_max..=k_max).map(fourth).collect::<Result<_>>()?;
    let mut buckets: HashMap<(i64, i128), usize> = HashMap::new();
    for (a, &pa) in powers.iter().enumerate() {
        for (b, &pb) in powers.iter().enumerate() {
            *buckets.entry((a as i64 - b as i64, pa - pb)).or_default() += 1;
        }
    }
    let diagonal = buckets.remove(&(0, 0)).unwrap_or(0);
    let mut histogram = BTreeMap::new();
    let mut best = (0usize, (0i64, 0i128));
    for (key, &count) in &buckets {
        *histogram.entry(count).or_default() += 1;
        if count > best.0 || (count == best.0 && *key < best.1) {
            best = (count, *key);
        }
    }
    Ok(Lambda4Report {
        k_max,
        max_multiplicity: best.0,
        argmax: best.1,
        histogram,
        diagonal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ranges() {
        let r = count_lambda4(3).unwrap();
        assert!(r.max_multiplicity <= 3);
        assert_eq!(r.diagonal, 7);
        let total: usize = r.histogram.iter().map(|(m, c)| m * c).sum();
        assert_eq!(total + r.diagonal, 49);
        assert!(count_lambda4(1).is_err());
    }

    #[test]
    fn multiplicity_matches_cubic_root_count() {
        // For ξ ≠ 0, (l+ξ)⁴ − l⁴ = η is a cubic in l, so an independent count
        // walks l over the range for every bucket found.
        let k = 12i64;
        let r = count_lambda4(k).unwrap();
        let mut best = 0;
        for xi in -2 * k..=2 * k {
            if xi == 0 {
                continue;
            }
            let mut seen: HashMap<i128, usize> = HashMap::new();
            for l in -k..=k {
                let kk = l + xi;
                if kk.abs() > k {
                    continue;
                }
                let eta = (kk as i128).pow(4) - (l as i128).pow(4);
                *seen.entry(eta).or_default() += 1;
            }
            best = best.max(seen.values().copied().max().unwrap_or(0));
        }
        assert_eq!(r.max_multiplicity, best);
        assert!(r.histogram.keys().all(|&m| m <= 3));
    }

    #[test]
    fn overflow_is_detected() {
        assert!(matches!(count_lambda4(i64::MAX / 2), Err(Error::CountOverflow { .. })));
    }
}
