use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::serialize_f64;
use crate::scalar::{quasi_norm, quasi_norm_pow, QExponent};

/// Blocks `T0, T1, T2, ...` of `{0, .., n-1}`: `T0` is given, the rest sort
/// the complement by descending magnitude of a vector, `k` per block (the
/// last one may be short). Ties keep index order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportPartition {
    pub k: usize,
    pub blocks: Vec<Vec<usize>>,
}

impl SupportPartition {
    pub fn new(h: &[f64], t0: &[usize], k: usize) -> Result<Self> {
        let n = h.len();
        if k == 0 {
            return Err(Error::invalid("block size must be positive"));
        }
        let mut in_t0 = vec![false; n];
        for &i in t0 {
            if i >= n {
                return Err(Error::invalid(format!("index {i} out of range for n = {n}")));
            }
            if in_t0[i] {
                return Err(Error::invalid(format!("index {i} repeated in T0")));
            }
            in_t0[i] = true;
        }
        let mut rest: Vec<usize> = (0..n).filter(|&i| !in_t0[i]).collect();
        rest.sort_by(|&a, &b| h[b].abs().total_cmp(&h[a].abs()).then(a.cmp(&b)));
        let mut blocks = vec![t0.to_vec()];
        blocks.extend(rest.chunks(k).map(<[usize]>::to_vec));
        Ok(SupportPartition { k, blocks })
    }

    pub fn t0(&self) -> &[usize] {
        &self.blocks[0]
    }

    /// `T1, T2, ...`.
    pub fn tail(&self) -> &[Vec<usize>] {
        &self.blocks[1..]
    }

    /// Entries of `h` on `block`.
    pub fn restrict(h: &[f64], block: &[usize]) -> Vec<f64> {
        block.iter().map(|&i| h[i]).collect()
    }

    /// Entries of `h` on every block after `T0`.
    pub fn complement(&self, h: &[f64]) -> Vec<f64> {
        self.tail().iter().flat_map(|b| b.iter().map(|&i| h[i])).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauStats {
    /// `||h_T0||_q / ||h_T0^c||_q`.
    #[serde(serialize_with = "serialize_f64")]
    pub tau: f64,
    /// `t` with `||h_T1||_q^q = t sum_{i>=1} ||h_Ti||_q^q`.
    #[serde(serialize_with = "serialize_f64")]
    pub t_ratio: f64,
    pub partition: SupportPartition,
}

/// `tau` and `t` of `h` relative to `t0`, with blocks of size `k`.
pub fn tau_ratio_blocks(h: &[f64], t0: &[usize], k: usize, q: QExponent) -> Result<TauStats> {
    let partition = SupportPartition::new(h, t0, k)?;
    let off = partition.complement(h);
    let denom_pow = quasi_norm_pow(&off, q)?;
    if denom_pow == 0.0 {
        return Err(Error::ExcludedCase);
    }
    let tau = quasi_norm(&SupportPartition::restrict(h, partition.t0()), q)? / quasi_norm(&off, q)?;
    let t1 = SupportPartition::restrict(h, &partition.tail()[0]);
    let t_ratio = quasi_norm_pow(&t1, q)? / denom_pow;
    Ok(TauStats { tau, t_ratio, partition })
}

/// `tau` and `t` with block size `|T0|`.
pub fn tau_ratio(h: &[f64], t0: &[usize], q: QExponent) -> Result<TauStats> {
    tau_ratio_blocks(h, t0, t0.len().max(1), q)
}

/// `tau` alone; `None` when `h` vanishes off `t0`.
pub(crate) fn tau_only(h: &[f64], in_t0: &[bool], q: f64) -> Option<f64> {
    let (mut a, mut b) = (0.0, 0.0);
    for (v, &inside) in h.iter().zip(in_t0) {
        let p = if q == 1.0 { v.abs() } else { v.abs().powf(q) };
        if inside {
            a += p;
        } else {
            b += p;
        }
    }
    (b > 0.0).then(|| (a / b).powf(1.0 / q))
}
