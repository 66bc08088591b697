use nalgebra::SymmetricEigen;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::serialize_f64;
use crate::rng;

use super::SensingMatrix;

/// Largest number of subsets [`ric_exact`] will enumerate by default.
pub const ENUMERATION_CAP: u128 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RicMethod {
    ExactEnumeration { subsets: u128 },
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RicEstimate {
    pub k: usize,
    #[serde(serialize_with = "serialize_f64")]
    pub value: f64,
    pub method: RicMethod,
    pub is_lower_bound: bool,
    /// A subset attaining `value`.
    pub worst_subset: Vec<usize>,
}

/// `max(lambda_max - 1, 1 - lambda_min)` of the Gram matrix of `cols`.
fn subset_deviation(phi: &SensingMatrix, cols: &[usize]) -> f64 {
    let sub = phi.columns(cols);
    let eig = SymmetricEigen::new(sub.transpose() * &sub).eigenvalues;
    let (lo, hi) = eig.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    (hi - 1.0).max(1.0 - lo).max(0.0)
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

fn check_k(phi: &SensingMatrix, k: usize) -> Result<()> {
    if k == 0 || k > phi.n() {
        return Err(Error::invalid(format!("need 1 <= k <= n = {}, got {k}", phi.n())));
    }
    Ok(())
}

/// Advances `idx` to the next `k`-subset of `0..n` in lexicographic order.
fn next_subset(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Ties go to the lexicographically first subset so the result does not
/// depend on scheduling.
fn better(a: (f64, Vec<usize>), b: (f64, Vec<usize>)) -> (f64, Vec<usize>) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// Exact `delta_k` by enumerating every `k`-subset of columns, up to `cap`
/// subsets.
pub fn ric_exact_capped(phi: &SensingMatrix, k: usize, cap: u128) -> Result<RicEstimate> {
    check_k(phi, k)?;
    let n = phi.n();
    let needed = binomial(n, k);
    if needed > cap {
        return Err(Error::EnumerationCap { needed, cap });
    }
    // one task per leading index
    let (value, worst) = (0..=n - k)
        .into_par_iter()
        .map(|first| {
            let mut best = (f64::NEG_INFINITY, Vec::new());
            let mut rest: Vec<usize> = (first + 1..first + k).collect();
            loop {
                let mut cols = Vec::with_capacity(k);
                cols.push(first);
                cols.extend_from_slice(&rest);
                let v = subset_deviation(phi, &cols);
                best = better(best, (v, cols));
                if rest.is_empty() || !next_tail(&mut rest, first + 1, n) {
                    break;
                }
            }
            best
        })
        .reduce(|| (f64::NEG_INFINITY, Vec::new()), better);
    Ok(RicEstimate {
        k,
        value,
        method: RicMethod::ExactEnumeration { subsets: needed },
        is_lower_bound: false,
        worst_subset: worst,
    })
}

/// Next subset of `lo..n` with the length of `tail`.
fn next_tail(tail: &mut [usize], lo: usize, n: usize) -> bool {
    let mut shifted: Vec<usize> = tail.iter().map(|i| i - lo).collect();
    let more = next_subset(&mut shifted, n - lo);
    if more {
        for (t, s) in tail.iter_mut().zip(shifted) {
            *t = s + lo;
        }
    }
    more
}

/// Exact `delta_k` with the default enumeration cap.
pub fn ric_exact(phi: &SensingMatrix, k: usize) -> Result<RicEstimate> {
    ric_exact_capped(phi, k, ENUMERATION_CAP)
}

/// The `k` columns drawn by sample `i`: the first `k` positions of a partial
/// Fisher-Yates shuffle driven by stream `i` of `seed`. Subsets for `k` are
/// prefixes of those for `k + 1`.
pub fn sample_subset(n: usize, k: usize, seed: u64, i: u64) -> Vec<usize> {
    use rand::Rng as _;
    let mut rng = rng::seeded_stream(seed, i);
    let mut perm: Vec<usize> = (0..n).collect();
    for j in 0..k {
        let r = rng.random_range(j..n);
        perm.swap(j, r);
    }
    perm.truncate(k);
    perm
}

/// Lower bound on `delta_k` from `samples` random `k`-subsets.
pub fn ric_monte_carlo(phi: &SensingMatrix, k: usize, samples: u64, seed: u64) -> Result<RicEstimate> {
    check_k(phi, k)?;
    if samples == 0 {
        return Err(Error::invalid("samples must be at least 1"));
    }
    let (value, worst) = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut cols = sample_subset(phi.n(), k, seed, i);
            cols.sort_unstable();
            (subset_deviation(phi, &cols), cols)
        })
        .reduce(|| (f64::NEG_INFINITY, Vec::new()), better);
    Ok(RicEstimate {
        k,
        value,
        method: RicMethod::MonteCarlo { samples, seed },
        is_lower_bound: true,
        worst_subset: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn identity(n: usize) -> SensingMatrix {
        SensingMatrix::from_matrix(nalgebra::DMatrix::identity(n, n)).unwrap()
    }

    #[test]
    fn identity_has_zero_ric() {
        assert_eq!(ric_exact(&identity(2), 1).unwrap().value, 0.0);
        assert_abs_diff_eq!(ric_exact(&identity(2), 2).unwrap().value, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ric_monte_carlo(&identity(5), 3, 20, 1).unwrap().value, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn parallel_unit_columns() {
        let phi = SensingMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let est = ric_exact(&phi, 2).unwrap();
        assert_abs_diff_eq!(est.value, 1.0, epsilon = 1e-12);
        assert!(!est.is_lower_bound);
    }

    #[test]
    fn enumeration_order_and_count() {
        let mut idx = vec![0, 1];
        let mut count = 1;
        while next_subset(&mut idx, 5) {
            count += 1;
        }
        assert_eq!(count, binomial(5, 2));
        assert_eq!(binomial(40, 3), 9880);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn cap_enforced() {
        let phi = SensingMatrix::gaussian(10, 60, 3).unwrap();
        assert!(matches!(ric_exact_capped(&phi, 5, 1000), Err(Error::EnumerationCap { .. })));
    }

    #[test]
    fn subsets_nest_in_k() {
        for i in 0..10 {
            let a = sample_subset(12, 3, 7, i);
            let b = sample_subset(12, 4, 7, i);
            assert_eq!(a[..], b[..3]);
        }
    }

    #[test]
    fn monte_carlo_below_exact() {
        let phi = SensingMatrix::gaussian(6, 12, 11).unwrap();
        for k in 1..=3 {
            let exact = ric_exact(&phi, k).unwrap().value;
            let mc = ric_monte_carlo(&phi, k, 50, 2).unwrap().value;
            assert!(mc <= exact + 1e-12);
        }
    }
}
