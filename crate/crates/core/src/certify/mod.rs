//! Certified mesh verification of `r(t, q, delta) < 1`.
//!
//! Over a cell `[t_lo, t_hi] x [q_lo, q_hi]` with `t_hi <= 1/(2 - delta)` the
//! three pieces of `r` are monotone in a way that bounds the cell maximum by
//! `r1(t_lo, q_lo) + r2(t_hi, q_hi) + r3(t_lo, q_hi)`. A region is certified
//! when every cell bound is below one; cells that fail are quartered up to a
//! refinement budget, and cells that still fail are sampled for a witness.
//!
//! The theorem drivers in [`driver`] combine the mesh with the two analytic
//! exclusions: large `t` (beyond `1/(2 - delta)`) and small `t` (below the
//! boundary `B(q_max)`, valid once `B` is certified decreasing).

mod bound;
pub mod boundary;
pub mod driver;
pub mod job;
mod mesh;

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{serialize_f64, serialize_opt_f64};

pub use bound::{cell_enclosure, cell_upper_bound, t_ceiling};
pub use boundary::{
    boundary_enclosure, large_t_region_check, small_t_region_bound, verify_boundary_decreasing,
    BoundaryReport, BOUNDARY_STEP,
};
pub use driver::{
    default_partitions, search_qmax, theorem7_driver, theorem9_driver, verify_partitions, QmaxSearch,
    THEOREM7_Q_MAX, THEOREM9_DELTA,
};
pub use job::JobConfig;
pub use mesh::verify_region;

/// Schema tag written into every certificate.
pub const CERTIFICATE_SCHEMA: &str = "certificate_v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Round-to-nearest binary64 evaluation.
    #[default]
    Float,
    /// Outward-rounded interval evaluation; bounds are rigorous.
    Interval,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Float => "float",
            Mode::Interval => "interval",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "float" => Ok(Mode::Float),
            "interval" => Ok(Mode::Interval),
            other => Err(Error::invalid(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Certified,
    Refuted,
    Inconclusive,
}

impl Verdict {
    /// Combines verdicts of sub-regions of one claim.
    pub fn merge(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Refuted, _) | (_, Refuted) => Refuted,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Certified,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Certified => "certified",
            Verdict::Refuted => "refuted",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// A rectangle `[t_lo, t_hi] x [q_lo, q_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    #[serde(serialize_with = "serialize_f64")]
    pub t_lo: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub t_hi: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub q_lo: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub q_hi: f64,
}

impl Cell {
    pub fn new(t_lo: f64, t_hi: f64, q_lo: f64, q_hi: f64) -> Result<Self> {
        let cell = Cell { t_lo, t_hi, q_lo, q_hi };
        cell.validate()?;
        Ok(cell)
    }

    /// The single point `(t, q)`.
    pub fn point(t: f64, q: f64) -> Result<Self> {
        Cell::new(t, t, q, q)
    }

    pub fn validate(&self) -> Result<()> {
        let Cell { t_lo, t_hi, q_lo, q_hi } = *self;
        if !(0.0 <= t_lo && t_lo <= t_hi && t_hi <= 1.0) {
            return Err(Error::domain(format!("bad t range [{t_lo}, {t_hi}]")));
        }
        if !(0.0 < q_lo && q_lo <= q_hi && q_hi <= 1.0) {
            return Err(Error::domain(format!("bad q range [{q_lo}, {q_hi}]")));
        }
        Ok(())
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.t_lo + self.t_hi), 0.5 * (self.q_lo + self.q_hi))
    }

    /// The four children obtained by halving both sides, in scan order
    /// (q-major, then t).
    pub fn quarter(&self) -> [Cell; 4] {
        let (tm, qm) = self.center();
        let Cell { t_lo, t_hi, q_lo, q_hi } = *self;
        [
            Cell { t_lo, t_hi: tm, q_lo, q_hi: qm },
            Cell { t_lo: tm, t_hi, q_lo, q_hi: qm },
            Cell { t_lo, t_hi: tm, q_lo: qm, q_hi },
            Cell { t_lo: tm, t_hi, q_lo: qm, q_hi },
        ]
    }

    /// Corners and center, the points sampled when looking for a witness.
    pub fn sample_points(&self) -> [(f64, f64); 5] {
        let Cell { t_lo, t_hi, q_lo, q_hi } = *self;
        [(t_lo, q_lo), (t_hi, q_lo), (t_lo, q_hi), (t_hi, q_hi), self.center()]
    }
}

/// A gridded rectangle. Grid lines sit at `lo + i * step`; a trailing partial
/// cell closes the range at `hi` and is verified like any other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionSpec {
    #[serde(serialize_with = "serialize_f64")]
    pub t_lo: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub t_hi: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub q_lo: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub q_hi: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub t_step: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub q_step: f64,
}

impl PartitionSpec {
    pub fn new(t: (f64, f64), q: (f64, f64), t_step: f64, q_step: f64) -> Result<Self> {
        let spec = PartitionSpec { t_lo: t.0, t_hi: t.1, q_lo: q.0, q_hi: q.1, t_step, q_step };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_step > 0.0 && self.q_step > 0.0) {
            return Err(Error::invalid(format!(
                "steps must be positive (t_step = {}, q_step = {})",
                self.t_step, self.q_step
            )));
        }
        Cell::new(self.t_lo, self.t_hi, self.q_lo, self.q_hi).map(|_| ())
    }

    pub fn t_grid(&self) -> Vec<f64> {
        axis(self.t_lo, self.t_hi, self.t_step)
    }

    pub fn q_grid(&self) -> Vec<f64> {
        axis(self.q_lo, self.q_hi, self.q_step)
    }

    pub fn cell_count(&self) -> u64 {
        axis_cells(self.t_lo, self.t_hi, self.t_step) * axis_cells(self.q_lo, self.q_hi, self.q_step)
    }
}

fn axis_cells(lo: f64, hi: f64, step: f64) -> u64 {
    // tolerate representation noise in (hi - lo)/step
    (((hi - lo) / step) - 1e-6).ceil().max(1.0) as u64
}

/// Grid points `lo, lo + step, ..., hi`; a zero-width range yields `[lo, lo]`.
pub(crate) fn axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = axis_cells(lo, hi, step) as usize;
    let mut pts: Vec<f64> = (0..n).map(|i| lo + i as f64 * step).collect();
    pts.push(hi);
    pts
}

/// A concrete point where `r >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(serialize_with = "serialize_f64")]
    pub t: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub q: f64,
    /// Lower end of the evaluation of `r` at `(t, q)` (the float value in
    /// float mode).
    #[serde(serialize_with = "serialize_f64")]
    pub r: f64,
}

/// Parts of the claim discharged without meshing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticCover {
    /// `r < 1` for every `t` above this value and every `q`.
    #[serde(serialize_with = "serialize_f64")]
    pub large_t_above: f64,
    /// `r < 1` for `t` below this certified lower bound of `B(q_max)`.
    #[serde(serialize_with = "serialize_opt_f64")]
    pub small_t_below: Option<f64>,
    /// `q` up to which the small-`t` boundary already exceeds the large-`t`
    /// threshold, so no mesh is needed.
    #[serde(serialize_with = "serialize_opt_f64")]
    pub q_analytic_up_to: Option<f64>,
    /// Range on which `B` was certified strictly decreasing.
    #[serde(serialize_with = "serialize_opt_f64")]
    pub boundary_decreasing_up_to: Option<f64>,
}

/// Record of one verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub verdict: Verdict,
    /// The statement this certificate is about.
    pub claim: String,
    #[serde(serialize_with = "serialize_f64")]
    pub delta: f64,
    pub partitions: Vec<PartitionSpec>,
    pub cells_checked: u64,
    /// Leaf cells produced by adaptive refinement.
    pub cells_refined: u64,
    #[serde(serialize_with = "serialize_f64")]
    pub worst_bound: f64,
    pub worst_cell: Option<Cell>,
    pub witness: Option<Witness>,
    pub mode: Mode,
    /// Ulps of outward inflation per operation (interval mode only).
    pub inflation_ulps: Option<u32>,
    pub refine_budget: u32,
    pub analytic: Option<AnalyticCover>,
    #[serde(serialize_with = "serialize_f64")]
    pub duration: f64,
    pub tool_version: String,
}

impl Certificate {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cert: Certificate = serde_json::from_str(s)?;
        if cert.schema != CERTIFICATE_SCHEMA {
            return Err(Error::invalid(format!("unknown certificate schema {:?}", cert.schema)));
        }
        Ok(cert)
    }

    /// JSON with the run-dependent fields (`duration`, `tool_version`)
    /// blanked, for reproducibility comparisons.
    pub fn canonical_json(&self) -> Result<String> {
        let mut c = self.clone();
        c.duration = 0.0;
        c.tool_version = String::new();
        c.to_json()
    }

    pub(crate) fn set_duration(&mut self, d: Duration) {
        self.duration = d.as_secs_f64();
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub mode: Mode,
    /// Extra levels of quartering applied to failing cells.
    pub refine_budget: u32,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { mode: Mode::Float, refine_budget: 3, workers: None }
    }
}

impl VerifyOptions {
    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    /// Runs `f` on a pool with the configured number of workers.
    pub(crate) fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.workers {
            None => Ok(f()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build()
                    .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
                Ok(pool.install(f))
            }
        }
    }
}
