//! Drivers composing the analytic exclusions with mesh verification into a
//! single claim over `(0, 1] x (0, q_max]`.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::{serialize_f64, serialize_opt_f64};
use crate::scalar::{QExponent, RicParam, B_DERIVATIVE_RANGE};

use super::bound::t_ceiling;
use super::boundary::{large_t_region_check, small_t_region_bound};
use super::mesh::{certificate_from, clip_to_ceiling, scan, RegionOutcome};
use super::{AnalyticCover, Certificate, Mode, PartitionSpec, Verdict, VerifyOptions};

/// Largest `q` certified at `delta = 1/2` by the default partitions.
pub const THEOREM7_Q_MAX: f64 = 0.9181;
/// RIC value at which the full range `q in (0, 1]` is certified.
pub const THEOREM9_DELTA: f64 = 0.4931;

/// Below this `q` the small-`t` exclusion alone covers every `t`.
const Q_ANALYTIC: f64 = 0.17;
/// Sample size per axis of the large-`t` probe.
const LARGE_T_PROBE: usize = 100;
/// Lower end of the `q` lattice searched by [`search_qmax`].
const SEARCH_Q_LO: f64 = Q_ANALYTIC;

/// `(q_lo, q_hi, t_step, q_step)` of the default strips.
const STRIPS: [(f64, f64, f64, f64); 3] = [
    (0.17, 0.9172, 1e-4, 1e-4),
    (0.9172, 0.91809, 1e-5, 1e-5),
    (0.91809, 0.9181, 1e-6, 1e-5),
];
/// Steps of the strip appended above `0.9181` when `q_max` exceeds it.
const EXTENSION_STEPS: (f64, f64) = (1e-5, 1e-4);
/// `(q_lo, q_hi, t_step, q_step)` of the strips covering `[0.9181, 1]`.
const UPPER_STRIPS: [(f64, f64, f64, f64); 2] = [(0.9181, 0.9992, 1e-4, 1e-4), (0.9992, 1.0, 1e-5, 1e-5)];

/// Default mesh partitions for a claim up to `q_max`, covering
/// `[t_start, 1/(2 - delta)] x [0.17, q_max]`.
pub fn default_partitions(delta: RicParam, q_max: QExponent, t_start: f64, mode: Mode) -> Result<Vec<PartitionSpec>> {
    let q_max = q_max.value();
    let t_hi = t_ceiling(delta, mode);
    let mut strips: Vec<(f64, f64, f64, f64)> = STRIPS.to_vec();
    if q_max > THEOREM7_Q_MAX {
        strips.push((THEOREM7_Q_MAX, q_max, EXTENSION_STEPS.0, EXTENSION_STEPS.1));
    }
    strips
        .into_iter()
        .filter(|&(lo, _, _, _)| lo < q_max)
        .map(|(lo, hi, dt, dq)| PartitionSpec::new((t_start, t_hi), (lo, hi.min(q_max)), dt, dq))
        .collect()
}

/// Checks that the partitions cover `[t_lo, t_hi] x [q_lo, q_hi]`.
fn check_coverage(parts: &[PartitionSpec], t: (f64, f64), q: (f64, f64)) -> Result<()> {
    let mut ts = vec![t.0, t.1];
    let mut qs = vec![q.0, q.1];
    for p in parts {
        ts.extend([p.t_lo, p.t_hi]);
        qs.extend([p.q_lo, p.q_hi]);
    }
    let cuts = |v: &mut Vec<f64>, lo: f64, hi: f64| {
        v.retain(|x| (lo..=hi).contains(x));
        v.sort_by(f64::total_cmp);
        v.dedup();
    };
    cuts(&mut ts, t.0, t.1);
    cuts(&mut qs, q.0, q.1);
    for qw in qs.windows(2) {
        for tw in ts.windows(2) {
            let covered = parts
                .iter()
                .any(|p| p.t_lo <= tw[0] && tw[1] <= p.t_hi && p.q_lo <= qw[0] && qw[1] <= p.q_hi);
            if !covered {
                return Err(Error::CoverageGap(format!(
                    "[{}, {}] x [{}, {}] is not covered by any partition",
                    tw[0], tw[1], qw[0], qw[1]
                )));
            }
        }
    }
    Ok(())
}

fn require_half(delta: RicParam) -> Result<()> {
    if delta.value() > 0.5 {
        return Err(Error::Hypothesis(format!("needs delta <= 1/2, got {}", delta.value())));
    }
    Ok(())
}

struct Composite {
    partitions: Vec<PartitionSpec>,
    outcome: RegionOutcome,
    analytic: AnalyticCover,
}

fn theorem7_parts(
    delta: RicParam,
    q_max: QExponent,
    opts: &VerifyOptions,
    partitions: Option<Vec<PartitionSpec>>,
) -> Result<Composite> {
    require_half(delta)?;
    let q = q_max.value();
    if q > B_DERIVATIVE_RANGE.1 {
        return Err(Error::domain(format!(
            "q_max = {q} exceeds {}, where B is certified decreasing",
            B_DERIVATIVE_RANGE.1
        )));
    }
    if !large_t_region_check(delta, LARGE_T_PROBE)? {
        return Err(Error::Numerical("large-t probe failed".into()));
    }
    let ceiling = t_ceiling(delta, opts.mode);
    let q_analytic = q.min(Q_ANALYTIC);
    let b_analytic = small_t_region_bound(QExponent::new(q_analytic)?)?;
    if b_analytic <= ceiling {
        return Err(Error::CoverageGap(format!(
            "B({q_analytic}) >= {b_analytic} does not reach 1/(2 - delta) = {ceiling}"
        )));
    }
    let b_lo = small_t_region_bound(q_max)?;
    let analytic = AnalyticCover {
        large_t_above: ceiling,
        small_t_below: Some(b_lo),
        q_analytic_up_to: Some(q_analytic),
        boundary_decreasing_up_to: Some(q),
    };
    if q <= Q_ANALYTIC {
        return Ok(Composite { partitions: Vec::new(), outcome: RegionOutcome::default(), analytic });
    }
    let parts = match partitions {
        Some(p) => p,
        None => default_partitions(delta, q_max, (b_lo * 1e4).floor() / 1e4, opts.mode)?,
    };
    let clipped = parts
        .iter()
        .map(|p| clip_to_ceiling(p, delta, opts.mode))
        .collect::<Result<Vec<_>>>()?;
    check_coverage(&clipped, (b_lo.min(ceiling), ceiling), (Q_ANALYTIC, q))?;
    let outcome = scan_all(&clipped, delta, opts)?;
    Ok(Composite { partitions: clipped, outcome, analytic })
}

fn scan_all(parts: &[PartitionSpec], delta: RicParam, opts: &VerifyOptions) -> Result<RegionOutcome> {
    let mut total = RegionOutcome::default();
    for p in parts {
        total.absorb(scan(p, delta, opts)?.1);
    }
    Ok(total)
}

fn finish(claim: String, delta: RicParam, c: Composite, opts: &VerifyOptions, start: Instant) -> Certificate {
    let mut cert = certificate_from(claim, delta, c.partitions, &c.outcome, opts);
    cert.analytic = Some(c.analytic);
    cert.set_duration(start.elapsed());
    cert
}

/// Certifies `r(t, q, delta) < 1` for all `t in (0, 1]`, `q in (0, q_max]`.
///
/// Large `t` is excluded analytically, small `t` through the certified
/// lower bound of `B(q_max)`, and the remaining rectangle
/// `[B(q_max), 1/(2 - delta)] x [0.17, q_max]` is meshed with `partitions`
/// (or the defaults). Uncovered parts of that rectangle are an error.
pub fn theorem7_driver(
    delta: RicParam,
    q_max: QExponent,
    opts: &VerifyOptions,
    partitions: Option<Vec<PartitionSpec>>,
) -> Result<Certificate> {
    let start = Instant::now();
    let c = theorem7_parts(delta, q_max, opts, partitions)?;
    let claim = format!(
        "r(t, q, {}) < 1 for all t in (0, 1] and q in (0, {}]",
        delta.value(),
        q_max.value()
    );
    Ok(finish(claim, delta, c, opts, start))
}

/// Certifies `r(t, q, delta) < 1` for all `t in (0, 1]` and `q in (0, 1]`:
/// the sub-driver up to `0.9181`, then two strips up to `q = 1` inclusive.
pub fn theorem9_driver(delta: RicParam, opts: &VerifyOptions) -> Result<Certificate> {
    let start = Instant::now();
    let mut c = theorem7_parts(delta, QExponent::new(THEOREM7_Q_MAX)?, opts, None)?;
    let t_hi = t_ceiling(delta, opts.mode);
    let upper = UPPER_STRIPS
        .iter()
        .map(|&(lo, hi, dt, dq)| PartitionSpec::new((0.0, t_hi), (lo, hi), dt, dq))
        .collect::<Result<Vec<_>>>()?;
    c.outcome.absorb(scan_all(&upper, delta, opts)?);
    c.partitions.extend(upper);
    c.analytic.boundary_decreasing_up_to = Some(THEOREM7_Q_MAX);
    let claim = format!("r(t, q, {}) < 1 for all t in (0, 1] and q in (0, 1]", delta.value());
    Ok(finish(claim, delta, c, opts, start))
}

/// Meshes the listed partitions at `delta` and reports them as one claim.
pub fn verify_partitions(parts: &[PartitionSpec], delta: RicParam, opts: &VerifyOptions) -> Result<Certificate> {
    let start = Instant::now();
    let clipped = parts
        .iter()
        .map(|p| clip_to_ceiling(p, delta, opts.mode))
        .collect::<Result<Vec<_>>>()?;
    let outcome = scan_all(&clipped, delta, opts)?;
    let claim = format!("r(t, q, {}) < 1 on {} partition(s)", delta.value(), clipped.len());
    let mut cert = certificate_from(claim, delta, clipped, &outcome, opts);
    cert.set_duration(start.elapsed());
    Ok(cert)
}

/// Result of [`search_qmax`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QmaxSearch {
    #[serde(serialize_with = "serialize_f64")]
    pub delta: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub precision: f64,
    /// Largest lattice point certified.
    #[serde(serialize_with = "serialize_f64")]
    pub q_certified: f64,
    /// Next lattice point, which was not certified; `None` when the top of
    /// the searched range is certified.
    #[serde(serialize_with = "serialize_opt_f64")]
    pub q_failed: Option<f64>,
    pub failed_verdict: Option<Verdict>,
    pub runs: u32,
}

/// Binary search over `q = j * precision` for the largest value certified
/// by [`theorem7_driver`] with default partitions. The lattice runs from
/// `0.17` (certified without meshing) to `0.99`.
pub fn search_qmax(delta: RicParam, precision: f64, opts: &VerifyOptions) -> Result<QmaxSearch> {
    require_half(delta)?;
    if !(precision >= 1e-5 && precision <= 0.1) {
        return Err(Error::invalid(format!("precision must lie in [1e-5, 0.1], got {precision}")));
    }
    let scale = (1.0 / precision).round();
    let at = |j: f64| j / scale;
    let mut runs = 0;
    let mut verdict_at = |j: f64| -> Result<Verdict> {
        runs += 1;
        Ok(theorem7_driver(delta, QExponent::new(at(j))?, opts, None)?.verdict)
    };
    let mut lo = (SEARCH_Q_LO * scale).ceil();
    let mut hi = (B_DERIVATIVE_RANGE.1 * scale).floor();
    let top = verdict_at(hi)?;
    let (q_failed, failed_verdict) = if top == Verdict::Certified {
        lo = hi;
        (None, None)
    } else {
        let mut failed = top;
        while hi - lo > 1.0 {
            let mid = ((lo + hi) / 2.0).floor();
            match verdict_at(mid)? {
                Verdict::Certified => lo = mid,
                v => {
                    hi = mid;
                    failed = v;
                }
            }
        }
        (Some(at(hi)), Some(failed))
    };
    Ok(QmaxSearch {
        delta: delta.value(),
        precision,
        q_certified: at(lo),
        q_failed,
        failed_verdict,
        runs,
    })
}
