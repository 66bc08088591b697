use std::fmt::Write as _;

use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::sig17;
use crate::rng;
use crate::scalar::QExponent;

use super::irls::{irls_lq, IrlsOptions};
use super::ric::sample_subset;
use super::{MatrixSource, SensingMatrix};

/// Relative `l2` error at or below which a recovery counts as exact.
pub const SUCCESS_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    #[default]
    Gaussian,
    Bernoulli,
}

impl Ensemble {
    fn source(self, seed: u64) -> MatrixSource {
        match self {
            Ensemble::Gaussian => MatrixSource::Gaussian { seed },
            Ensemble::Bernoulli => MatrixSource::Bernoulli { seed },
        }
    }
}

/// A sensing matrix, a `k`-sparse signal with standard normal nonzeros on
/// a uniformly random support, and its measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub phi: SensingMatrix,
    pub x: Vec<f64>,
    pub support: Vec<usize>,
    pub b: Vec<f64>,
}

/// The instance for `seed`: the matrix uses `seed` directly, the signal
/// stream 1 of the same key.
pub fn sparse_instance(m: usize, n: usize, k: usize, ensemble: Ensemble, seed: u64) -> Result<Instance> {
    if k > n {
        return Err(Error::invalid(format!("sparsity {k} exceeds n = {n}")));
    }
    let phi = SensingMatrix::generate(m, n, ensemble.source(seed))?;
    let mut support = sample_subset(n, k, seed, 1);
    support.sort_unstable();
    let mut r = rng::seeded_stream(seed, 2);
    let mut x = vec![0.0; n];
    for &i in &support {
        x[i] = r.sample(StandardNormal);
    }
    let b = phi.apply(&x)?;
    Ok(Instance { phi, x, support, b })
}

pub fn relative_error(x_hat: &[f64], x: &[f64]) -> f64 {
    let diff: f64 = x_hat.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
    let norm: f64 = x.iter().map(|v| v * v).sum();
    if norm == 0.0 {
        diff.sqrt()
    } else {
        (diff / norm).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseConfig {
    pub m: usize,
    pub n: usize,
    pub k_values: Vec<usize>,
    pub q_values: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    #[serde(default)]
    pub ensemble: Ensemble,
}

impl PhaseConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0 < self.m && self.m < self.n) {
            return Err(Error::invalid(format!("need 0 < m < n, got m = {}, n = {}", self.m, self.n)));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.k_values.is_empty() || self.q_values.is_empty() {
            return Err(Error::invalid("k_values and q_values must be nonempty"));
        }
        if let Some(k) = self.k_values.iter().find(|&&k| k == 0 || k > self.n) {
            return Err(Error::invalid(format!("sparsity {k} outside 1..={}", self.n)));
        }
        for &q in &self.q_values {
            QExponent::new(q)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PhaseRow {
    pub k: usize,
    pub q_index: usize,
    pub success_count: u64,
    pub trials: u64,
}

/// Success counts of IRLS recovery for every `(k, q)`. Trial `j` uses seed
/// `seed + j`, shared across `k` and `q`.
pub fn phase_transition(cfg: &PhaseConfig, opts: &IrlsOptions) -> Result<Vec<PhaseRow>> {
    cfg.validate()?;
    let qs: Vec<QExponent> = cfg.q_values.iter().map(|&q| QExponent::new(q)).collect::<Result<_>>()?;
    let jobs: Vec<(usize, u64)> = cfg
        .k_values
        .iter()
        .flat_map(|&k| (0..cfg.trials).map(move |j| (k, j)))
        .collect();
    let outcomes: Vec<Vec<bool>> = jobs
        .par_iter()
        .map(|&(k, j)| {
            let inst = sparse_instance(cfg.m, cfg.n, k, cfg.ensemble, cfg.seed.wrapping_add(j))?;
            qs.iter()
                .map(|&q| {
                    let r = irls_lq(&inst.phi, &inst.b, q, opts)?;
                    Ok(relative_error(&r.x_hat, &inst.x) <= SUCCESS_TOL)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (ki, &k) in cfg.k_values.iter().enumerate() {
        let slice = &outcomes[ki * cfg.trials as usize..(ki + 1) * cfg.trials as usize];
        for qi in 0..qs.len() {
            let success_count = slice.iter().filter(|o| o[qi]).count() as u64;
            rows.push(PhaseRow { k, q_index: qi, success_count, trials: cfg.trials });
        }
    }
    Ok(rows)
}

/// CSV with header `k,q,success_count,trials`.
pub fn phase_csv(cfg: &PhaseConfig, rows: &[PhaseRow]) -> String {
    let mut out = String::from("k,q,success_count,trials\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.k, sig17(cfg.q_values[r.q_index]), r.success_count, r.trials);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_is_reproducible() {
        let a = sparse_instance(10, 20, 3, Ensemble::Gaussian, 5).unwrap();
        let b = sparse_instance(10, 20, 3, Ensemble::Gaussian, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.support.len(), 3);
        assert_eq!(a.x.iter().filter(|v| **v != 0.0).count(), 3);
    }

    #[test]
    fn config_validation() {
        let mut cfg = PhaseConfig { m: 8, n: 16, k_values: vec![1], q_values: vec![0.5], trials: 2, seed: 0, ensemble: Ensemble::Gaussian };
        assert!(cfg.validate().is_ok());
        cfg.q_values = vec![1.5];
        assert!(cfg.validate().is_err());
        cfg.q_values = vec![0.5];
        cfg.k_values = vec![17];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn easy_regime_and_csv() {
        let cfg = PhaseConfig { m: 16, n: 32, k_values: vec![1], q_values: vec![0.5, 1.0], trials: 5, seed: 3, ensemble: Ensemble::Gaussian };
        let rows = phase_transition(&cfg, &IrlsOptions::default()).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.success_count == 5));
        let csv = phase_csv(&cfg, &rows);
        assert!(csv.starts_with("k,q,success_count,trials\n1,0.50000000000000000,5,5\n"));
    }
}
