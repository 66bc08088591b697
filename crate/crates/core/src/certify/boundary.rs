//! Analytic parts of the covering argument: the boundary `B(q)` below which
//! `r < 1`, and the large-`t` region beyond `1/(2 - delta)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::{serialize_f64, serialize_f64_pair};
use crate::interval::Interval;
use crate::real::Real;
use crate::scalar::{generic, QExponent, RicParam, B_DERIVATIVE_RANGE};

use super::axis;

/// Mesh width used when certifying `B` decreasing.
pub const BOUNDARY_STEP: f64 = 0.01;

/// Where the small-`q` brace estimate hands over to the derivative bound.
const SPLIT_Q: f64 = B_DERIVATIVE_RANGE.0;

/// Outcome of certifying `B` strictly decreasing on a range of `q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryReport {
    #[serde(serialize_with = "serialize_f64")]
    pub q_lo: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub q_hi: f64,
    pub cells: u64,
    /// Largest upper bound of the sign factor over all cells.
    #[serde(serialize_with = "serialize_f64")]
    pub worst_factor: f64,
    #[serde(serialize_with = "serialize_f64_pair")]
    pub worst_cell: (f64, f64),
    pub decreasing: bool,
}

fn cell_factor(q_lo: f64, q_hi: f64) -> f64 {
    let (lo, hi) = (Interval::point(q_lo), Interval::point(q_hi));
    if q_hi <= SPLIT_Q {
        generic::small_q_brace_bound(lo, hi, q_lo == 0.0).hi()
    } else {
        generic::boundary_b_derivative_bound(lo, hi).hi()
    }
}

/// Certifies `B` strictly decreasing on `[q_lo, q_hi]` with outward-rounded
/// corner bounds on a mesh of width `step`.
///
/// Cells inside `(0, 0.3]` use the small-`q` estimate, the rest use the
/// derivative bound; a cell straddling `0.3` is split there. `q_lo = 0`
/// is accepted and treated through the limit `p_0 = 1`.
pub fn verify_boundary_decreasing(q_lo: f64, q_hi: f64, step: f64) -> Result<BoundaryReport> {
    if !(0.0 <= q_lo && q_lo < q_hi) {
        return Err(Error::domain(format!("need 0 <= q_lo < q_hi, got [{q_lo}, {q_hi}]")));
    }
    if q_hi > B_DERIVATIVE_RANGE.1 {
        return Err(Error::domain(format!(
            "q_hi = {q_hi} exceeds {}, the end of the certified range",
            B_DERIVATIVE_RANGE.1
        )));
    }
    if !(step > 0.0) {
        return Err(Error::invalid(format!("step must be positive, got {step}")));
    }
    let grid = axis(q_lo, q_hi, step);
    let mut cells = Vec::with_capacity(grid.len());
    for w in grid.windows(2) {
        if w[0] < SPLIT_Q && SPLIT_Q < w[1] {
            cells.push((w[0], SPLIT_Q));
            cells.push((SPLIT_Q, w[1]));
        } else {
            cells.push((w[0], w[1]));
        }
    }
    let mut worst = (f64::NEG_INFINITY, cells[0]);
    for &(a, b) in &cells {
        let f = cell_factor(a, b);
        if f > worst.0 || f.is_nan() {
            worst = (f, (a, b));
        }
    }
    Ok(BoundaryReport {
        q_lo,
        q_hi,
        cells: cells.len() as u64,
        worst_factor: worst.0,
        worst_cell: worst.1,
        decreasing: worst.0 < 0.0,
    })
}

/// Outward-rounded enclosure of `B(q)`.
pub fn boundary_enclosure(q: QExponent) -> Result<Interval> {
    let q = q.strictly_below_one()?;
    Ok(generic::boundary_b(Interval::point(q)))
}

/// Certified lower bound of `B` over `(0, q_max]`: `B` is first certified
/// decreasing there, then the lower end of an enclosure of `B(q_max)` is
/// returned. For `q <= q_max`, `delta <= 1/2` and `t` up to this value,
/// `r(t, q, delta) < 1`.
pub fn small_t_region_bound(q_max: QExponent) -> Result<f64> {
    let q = q_max.strictly_below_one()?;
    let report = verify_boundary_decreasing(0.0, q, BOUNDARY_STEP)?;
    if !report.decreasing {
        return Err(Error::Hypothesis(format!(
            "B not certified decreasing on (0, {q}]: factor bound {} on [{}, {}]",
            report.worst_factor, report.worst_cell.0, report.worst_cell.1
        )));
    }
    Ok(boundary_enclosure(q_max)?.lo())
}

/// Probes the large-`t` exclusion on a `grid x grid` sample of
/// `(1/(2 - delta), 1] x (0, 1)`.
///
/// At each point the two signs driving the argument are checked:
/// `(1/t - 2 + delta) t^{2/q} <= 0` and `a (2 + a) <= 0` with
/// `a = (p_q - 1) t^{1/q}`, together with `r <= 2 delta`. The analytic
/// argument then covers the whole region.
pub fn large_t_region_check(delta: RicParam, grid: usize) -> Result<bool> {
    let d = delta.value();
    if d > 0.5 {
        return Err(Error::Hypothesis(format!("large-t exclusion needs delta <= 1/2, got {d}")));
    }
    let n = grid.max(1);
    let c = delta.t_ceiling();
    for i in 0..n {
        let t = c + (1.0 - c) * (i + 1) as f64 / n as f64;
        for j in 0..n {
            let q = (j + 1) as f64 / (n + 1) as f64;
            let (e1, _, e2) = generic::exponents(q);
            let a = (generic::pq(q) - 1.0) * t.pow_pos(e1);
            let tail = (1.0 / t - 2.0 + d) * t.pow_pos(e2);
            let r = generic::r(t, q, d);
            if tail > 0.0 || a * (2.0 + a) > 0.0 || r > 2.0 * d + 1e-15 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
