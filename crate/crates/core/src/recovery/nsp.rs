use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::{serialize_f64, serialize_opt_f64_vec};
use crate::rng;
use crate::scalar::QExponent;

use super::nullspace::{null_space_basis, NullSpaceBasis};
use super::partition::tau_only;
use super::SensingMatrix;

/// Steps of the local search that refines the worst sample.
const LOCAL_STEPS: usize = 400;

/// Outcome of probing the null space property on a fixed `T0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NspReport {
    /// Largest `tau` found; infinite when some null vector vanishes off `T0`.
    #[serde(serialize_with = "serialize_f64")]
    pub max_tau: f64,
    /// `max_tau < 1`. Evidence only, unless `exact` is set.
    pub holds_probably: bool,
    pub null_dim: usize,
    /// The verdict is exact: `d <= 1`, or a null vector inside `T0` exists.
    pub exact: bool,
    /// Null vector attaining `max_tau`.
    #[serde(serialize_with = "serialize_opt_f64_vec")]
    pub witness: Option<Vec<f64>>,
}

fn normalize(mut c: Vec<f64>) -> Vec<f64> {
    let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        c.iter_mut().for_each(|x| *x /= norm);
    }
    c
}

fn score(basis: &NullSpaceBasis, c: &[f64], in_t0: &[bool], q: f64) -> f64 {
    tau_only(&basis.combine(c), in_t0, q).unwrap_or(f64::INFINITY)
}

/// Keeps the larger score; ties keep the earlier candidate.
fn keep_max(a: (f64, usize, Vec<f64>), b: (f64, usize, Vec<f64>)) -> (f64, usize, Vec<f64>) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// Searches `Null(Phi)` for a vector with `||h_T0||_q >= ||h_T0^c||_q`.
///
/// Candidates are the basis vectors, the projections of the coordinate
/// vectors of `T0`, and `samples` random unit coefficient vectors; the
/// best one is then refined by a seeded local search. With a null space of
/// dimension one the single direction is checked exactly.
pub fn nsp_check(phi: &SensingMatrix, t0: &[usize], q: QExponent, samples: u64, seed: u64) -> Result<NspReport> {
    let n = phi.n();
    let mut in_t0 = vec![false; n];
    for &i in t0 {
        if i >= n {
            return Err(Error::invalid(format!("index {i} out of range for n = {n}")));
        }
        in_t0[i] = true;
    }
    let q = q.value();
    let basis = null_space_basis(phi);
    let d = basis.dim();
    if d == 0 {
        return Ok(NspReport { max_tau: 0.0, holds_probably: true, null_dim: 0, exact: true, witness: None });
    }
    // a null vector supported inside T0 has infinite tau
    if !t0.is_empty() {
        let inner = null_space_basis(&SensingMatrix::from_matrix(phi.columns(t0))?);
        if inner.dim() > 0 {
            let mut h = vec![0.0; n];
            for (k, &i) in t0.iter().enumerate() {
                h[i] = inner.matrix()[(k, 0)];
            }
            return Ok(NspReport {
                max_tau: f64::INFINITY,
                holds_probably: false,
                null_dim: d,
                exact: true,
                witness: Some(h),
            });
        }
    }
    if d == 1 {
        let v = basis.vector(0);
        let max_tau = score(&basis, &[1.0], &in_t0, q);
        return Ok(NspReport {
            max_tau,
            holds_probably: max_tau < 1.0,
            null_dim: 1,
            exact: true,
            witness: Some(v),
        });
    }

    let mut fixed: Vec<Vec<f64>> = (0..d)
        .map(|j| {
            let mut c = vec![0.0; d];
            c[j] = 1.0;
            c
        })
        .collect();
    for &i in t0 {
        let row: Vec<f64> = basis.matrix().row(i).iter().copied().collect();
        if row.iter().any(|x| *x != 0.0) {
            fixed.push(normalize(row));
        }
    }
    let offset = fixed.len();
    let best_fixed = fixed
        .into_iter()
        .enumerate()
        .map(|(i, c)| (score(&basis, &c, &in_t0, q), i, c))
        .fold((f64::NEG_INFINITY, usize::MAX, Vec::new()), keep_max);
    let best_random = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut r = rng::seeded_stream(seed, s);
            let c = normalize((0..d).map(|_| r.sample::<f64, _>(StandardNormal)).collect());
            (score(&basis, &c, &in_t0, q), offset + s as usize, c)
        })
        .reduce(|| (f64::NEG_INFINITY, usize::MAX, Vec::new()), keep_max);
    let (mut best, _, mut c) = keep_max(best_fixed, best_random);

    if best.is_finite() {
        let mut r = rng::seeded_stream(seed, u64::MAX);
        let mut step = 0.5;
        let mut misses = 0;
        for _ in 0..LOCAL_STEPS {
            let trial = normalize(c.iter().map(|x| x + step * r.sample::<f64, _>(StandardNormal)).collect());
            let s = score(&basis, &trial, &in_t0, q);
            if s > best {
                best = s;
                c = trial;
                misses = 0;
            } else {
                misses += 1;
                if misses == 20 {
                    step *= 0.5;
                    misses = 0;
                }
            }
        }
    }
    Ok(NspReport {
        max_tau: best,
        holds_probably: best < 1.0,
        null_dim: d,
        exact: false,
        witness: Some(basis.combine(&c)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn one_dimensional_exact() {
        let phi = SensingMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let r = nsp_check(&phi, &[0], QExponent::new(1.0).unwrap(), 10, 0).unwrap();
        assert!(r.exact);
        assert_abs_diff_eq!(r.max_tau, 1.0, epsilon = 1e-12);
        assert!(!r.holds_probably);
    }

    #[test]
    fn trivial_null_space() {
        let phi = SensingMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let r = nsp_check(&phi, &[0], QExponent::new(0.5).unwrap(), 10, 0).unwrap();
        assert_eq!((r.max_tau, r.holds_probably, r.null_dim), (0.0, true, 0));
    }

    #[test]
    fn null_vector_supported_on_t0() {
        // columns 0 and 1 are equal, so e0 - e1 is a null vector inside T0
        let phi = SensingMatrix::from_rows(&[vec![1.0, 1.0, 0.0, 1.0], vec![0.0, 0.0, 1.0, 1.0]]).unwrap();
        let r = nsp_check(&phi, &[0, 1], QExponent::new(0.5).unwrap(), 100, 3).unwrap();
        assert!(r.max_tau.is_infinite());
        assert!(!r.holds_probably && r.exact);
        let w = r.witness.unwrap();
        assert!(w[2] == 0.0 && w[3] == 0.0 && w[0] != 0.0);
    }

    #[test]
    fn deterministic() {
        let phi = SensingMatrix::gaussian(8, 16, 4).unwrap();
        let q = QExponent::new(0.5).unwrap();
        let a = nsp_check(&phi, &[1, 5], q, 500, 9).unwrap();
        let b = nsp_check(&phi, &[1, 5], q, 500, 9).unwrap();
        assert_eq!(a, b);
    }
}
