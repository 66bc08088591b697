use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::serialize_f64;
use crate::rng;
use crate::scalar::{lemma3_check, QExponent};

/// Outcome of [`lemma3_sweep`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma3Sweep {
    pub trials: u64,
    pub violations: u64,
    /// Smallest `rhs - lhs` seen.
    #[serde(serialize_with = "serialize_f64")]
    pub min_slack: f64,
    /// Trial index of the first violation.
    pub first_violation: Option<u64>,
}

/// The random vector of trial `i`: length uniform in `n_range`, entries
/// standard normal, each zeroed with probability 1/4.
pub fn lemma3_vector(n_range: (usize, usize), seed: u64, i: u64) -> Vec<f64> {
    let mut r = rng::seeded_stream(seed, i);
    let n = r.random_range(n_range.0..=n_range.1);
    (0..n)
        .map(|_| {
            let v: f64 = r.sample(StandardNormal);
            if r.random_bool(0.25) {
                0.0
            } else {
                v
            }
        })
        .collect()
}

/// Checks the converse Cauchy-Schwarz inequality on `trials` seeded random
/// vectors. Trial `i` uses `q_values[i % len]`.
pub fn lemma3_sweep(trials: u64, n_range: (usize, usize), q_values: &[f64], seed: u64) -> Result<Lemma3Sweep> {
    if !(1 <= n_range.0 && n_range.0 <= n_range.1) {
        return Err(Error::invalid(format!("bad length range {n_range:?}")));
    }
    if q_values.is_empty() {
        return Err(Error::invalid("q_values must be nonempty"));
    }
    let qs = q_values.iter().map(|&q| QExponent::new(q)).collect::<Result<Vec<_>>>()?;
    let checks = (0..trials)
        .into_par_iter()
        .map(|i| {
            let x = lemma3_vector(n_range, seed, i);
            lemma3_check(&x, qs[(i % qs.len() as u64) as usize])
        })
        .collect::<Result<Vec<_>>>()?;
    let first_violation = checks.iter().position(|c| !c.holds).map(|i| i as u64);
    Ok(Lemma3Sweep {
        trials,
        violations: checks.iter().filter(|c| !c.holds).count() as u64,
        min_slack: checks.iter().map(|c| c.rhs - c.lhs).fold(f64::INFINITY, f64::min),
        first_violation,
    })
}
