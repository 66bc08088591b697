use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::serialize_f64;
use crate::scalar::{pq, quasi_norm, quasi_norm_pow, InequalityCheck, QExponent};

use super::partition::SupportPartition;
use super::SensingMatrix;

/// Both sides of each block inequality on one concrete vector. Every check
/// is stored as `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    #[serde(serialize_with = "serialize_f64")]
    pub t_ratio: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub tau: f64,
    /// `sum_{i>=2} ||h_Ti||_2^2 <= (1-t) t^{(2-q)/q} S^{2/q} / k^{(2-q)/q}`
    /// with `S = sum_{i>=1} ||h_Ti||_q^q`.
    pub tail_energy: InequalityCheck,
    /// `sum_{i>=2} ||h_Ti||_2 <= (1 + (p_q-1) t^{1/q}) S^{1/q} / k^{1/q-1/2}`.
    pub tail_norm_sum: InequalityCheck,
    /// `||Phi sum_{i>=2} h_Ti||^2 <= ((1-t) t^{(2-q)/q} + delta (1 + (p_q-1) t^{1/q})^2) S^{2/q} / k^{2/q-1}`;
    /// present when a matrix and `delta` are supplied.
    pub tail_image: Option<InequalityCheck>,
    /// `(tau^2 + t^{2/q}) S^{2/q} / k^{2/q-1} <= ||h_T0||^2 + ||h_T1||^2`.
    pub head_energy: InequalityCheck,
    /// `(1 - delta) ||h_T0 + h_T1||^2 <= ||Phi (h_T0 + h_T1)||^2`; present
    /// when a matrix and `delta` are supplied.
    pub head_image: Option<InequalityCheck>,
}

impl AuditReport {
    /// Checks that hold for every vector regardless of the RIC estimate.
    pub fn deterministic_ok(&self) -> bool {
        self.tail_energy.holds && self.tail_norm_sum.holds && self.head_energy.holds
    }
}

fn energy(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn image_energy(phi: &SensingMatrix, h: &[f64], blocks: &[Vec<usize>]) -> Result<f64> {
    let mut x = vec![0.0; h.len()];
    for b in blocks {
        for &i in b {
            x[i] = h[i];
        }
    }
    Ok(energy(&phi.apply(&x)?))
}

/// Evaluates the block inequalities bounding `tau` on `h` with blocks of
/// size `k` after `T0`. `phi` and `delta` (an estimate of `delta_2k`) enable
/// the two matrix-dependent checks; an estimate that is too small may make
/// those fail.
pub fn block_bound_audit(
    h: &[f64],
    t0: &[usize],
    k: usize,
    q: QExponent,
    phi: Option<(&SensingMatrix, f64)>,
) -> Result<AuditReport> {
    let qv = q.strictly_below_one()?;
    if t0.len() > k {
        return Err(Error::invalid(format!("|T0| = {} exceeds block size {k}", t0.len())));
    }
    let part = SupportPartition::new(h, t0, k)?;
    let off = part.complement(h);
    let s = quasi_norm_pow(&off, q)?;
    if s == 0.0 {
        return Err(Error::ExcludedCase);
    }
    let head: Vec<f64> = SupportPartition::restrict(h, part.t0());
    let t1: Vec<f64> = SupportPartition::restrict(h, &part.tail()[0]);
    let t = quasi_norm_pow(&t1, q)? / s;
    let tau = quasi_norm(&head, q)? / s.powf(1.0 / qv);
    let kf = k as f64;
    let s1 = s.powf(1.0 / qv);
    let s2 = s1 * s1;
    let later = &part.tail()[1..];

    let tail_e: f64 = later.iter().map(|b| energy(&SupportPartition::restrict(h, b))).sum();
    let decay = (1.0 - t) * t.powf((2.0 - qv) / qv);
    let tail_energy = InequalityCheck::new(tail_e, decay * s2 / kf.powf((2.0 - qv) / qv));

    let tail_n: f64 = later.iter().map(|b| energy(&SupportPartition::restrict(h, b)).sqrt()).sum();
    let lead = 1.0 + (pq(q) - 1.0) * t.powf(1.0 / qv);
    let tail_norm_sum = InequalityCheck::new(tail_n, lead * s1 / kf.powf(1.0 / qv - 0.5));

    let scale = kf.powf(2.0 / qv - 1.0);
    let head_energy = InequalityCheck::new(
        (tau * tau + t.powf(2.0 / qv)) * s2 / scale,
        energy(&head) + energy(&t1),
    );

    let (tail_image, head_image) = match phi {
        None => (None, None),
        Some((phi, delta)) => {
            if phi.n() != h.len() {
                return Err(Error::invalid("matrix and vector sizes differ"));
            }
            let tail_img = image_energy(phi, h, later)?;
            let tail_image = InequalityCheck::new(tail_img, (decay + delta * lead * lead) * s2 / scale);
            let head_blocks = [part.t0().to_vec(), part.tail()[0].clone()];
            let head_img = image_energy(phi, h, &head_blocks)?;
            let head_image = InequalityCheck::new((1.0 - delta) * (energy(&head) + energy(&t1)), head_img);
            (Some(tail_image), Some(head_image))
        }
    };
    Ok(AuditReport { t_ratio: t, tau, tail_energy, tail_norm_sum, tail_image, head_energy, head_image })
}
