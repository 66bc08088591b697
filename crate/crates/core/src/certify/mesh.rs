use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interval::{Interval, INFLATION_ULPS};
use crate::scalar::RicParam;
use crate::TOOL_VERSION;

use super::bound::{check_hypothesis, corner_sum, point_value, t_ceiling, Enclosure, RowConsts};
use super::{Cell, Certificate, Mode, PartitionSpec, Verdict, VerifyOptions, Witness, CERTIFICATE_SCHEMA};

/// Target number of cells handled by one parallel task.
const CELLS_PER_TASK: usize = 100_000;

/// Outcome of scanning one region, before it is wrapped in a certificate.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RegionOutcome {
    pub cells: u64,
    pub refined: u64,
    pub worst_bound: f64,
    pub worst_cell: Option<Cell>,
    pub witness: Option<Witness>,
    pub unresolved: u64,
}

impl Default for RegionOutcome {
    fn default() -> Self {
        RegionOutcome {
            cells: 0,
            refined: 0,
            worst_bound: f64::NEG_INFINITY,
            worst_cell: None,
            witness: None,
            unresolved: 0,
        }
    }
}

impl RegionOutcome {
    pub fn verdict(&self) -> Verdict {
        if self.witness.is_some() {
            Verdict::Refuted
        } else if self.unresolved > 0 {
            Verdict::Inconclusive
        } else {
            Verdict::Certified
        }
    }

    /// Folds `later` (a region scanned after `self`) into `self`. Ties keep
    /// the earlier worst cell and the earlier witness.
    pub fn absorb(&mut self, later: RegionOutcome) {
        self.cells += later.cells;
        self.refined += later.refined;
        self.unresolved += later.unresolved;
        if later.worst_bound > self.worst_bound || (self.worst_cell.is_none() && later.worst_cell.is_some()) {
            self.worst_bound = later.worst_bound;
            self.worst_cell = later.worst_cell;
        }
        if self.witness.is_none() {
            self.witness = later.witness;
        }
    }

    fn observe(&mut self, bound: f64, cell: Cell) {
        // NaN counts as worst so it cannot hide
        if bound > self.worst_bound || (bound.is_nan() && !self.worst_bound.is_nan()) || self.worst_cell.is_none() {
            self.worst_bound = bound;
            self.worst_cell = Some(cell);
        }
    }
}

struct Refinement {
    worst_bound: f64,
    worst_cell: Cell,
    leaves: u64,
    witness: Option<Witness>,
    unresolved: u64,
}

fn find_witness<R: Enclosure>(cell: &Cell, delta: R) -> Option<Witness> {
    cell.sample_points().into_iter().find_map(|(t, q)| {
        let r = point_value::<R>(t, q, delta).lower();
        (r >= 1.0).then_some(Witness { t, q, r })
    })
}

/// Quarters a failing cell `levels` times (depth-first, scan order).
fn refine<R: Enclosure>(cell: Cell, bound: f64, levels: u32, delta: R, witness_delta: R) -> Refinement {
    if levels == 0 {
        let witness = find_witness(&cell, witness_delta);
        let unresolved = u64::from(witness.is_none());
        return Refinement { worst_bound: bound, worst_cell: cell, leaves: 0, witness, unresolved };
    }
    let mut out = Refinement {
        worst_bound: f64::NEG_INFINITY,
        worst_cell: cell,
        leaves: 0,
        witness: None,
        unresolved: 0,
    };
    for child in cell.quarter() {
        let b = corner_sum::<R>(&child, delta).upper();
        let sub = if b < 1.0 {
            Refinement { worst_bound: b, worst_cell: child, leaves: 1, witness: None, unresolved: 0 }
        } else {
            let mut r = refine(child, b, levels - 1, delta, witness_delta);
            r.leaves = r.leaves.max(1);
            r
        };
        if sub.worst_bound > out.worst_bound || sub.worst_bound.is_nan() {
            out.worst_bound = sub.worst_bound;
            out.worst_cell = sub.worst_cell;
        }
        out.leaves += sub.leaves;
        out.unresolved += sub.unresolved;
        if out.witness.is_none() {
            out.witness = sub.witness;
        }
    }
    out
}

fn scan_rows<R: Enclosure>(
    t_grid: &[f64],
    t_data: &[R::TData],
    q_grid: &[f64],
    rows: std::ops::Range<usize>,
    delta: R,
    witness_delta: R,
    budget: u32,
) -> RegionOutcome {
    let mut out = RegionOutcome::default();
    let n_t = t_grid.len() - 1;
    for j in rows {
        let (q_lo, q_hi) = (q_grid[j], q_grid[j + 1]);
        let consts = RowConsts::<R>::new(q_lo, q_hi);
        for i in 0..n_t {
            let b = consts
                .corner_sum((t_grid[i], t_data[i]), (t_grid[i + 1], t_data[i + 1]), delta)
                .upper();
            out.cells += 1;
            let cell = Cell { t_lo: t_grid[i], t_hi: t_grid[i + 1], q_lo, q_hi };
            if b < 1.0 {
                out.observe(b, cell);
                continue;
            }
            if out.witness.is_some() {
                // already refuted; skip further refinement work in this task
                out.observe(b, cell);
                continue;
            }
            let r = refine(cell, b, budget, delta, witness_delta);
            out.refined += r.leaves;
            out.unresolved += r.unresolved;
            out.observe(r.worst_bound, r.worst_cell);
            out.witness = r.witness;
        }
    }
    out
}

fn scan_region<R: Enclosure>(spec: &PartitionSpec, delta: R, witness_delta: R, budget: u32) -> RegionOutcome {
    let t_grid = spec.t_grid();
    let q_grid = spec.q_grid();
    let t_data: Vec<R::TData> = t_grid.par_iter().map(|&t| R::tdata(t)).collect();
    let n_rows = q_grid.len() - 1;
    let rows_per_task = (CELLS_PER_TASK / (t_grid.len() - 1)).max(1);
    let chunks: Vec<std::ops::Range<usize>> = (0..n_rows)
        .step_by(rows_per_task)
        .map(|s| s..(s + rows_per_task).min(n_rows))
        .collect();
    let parts: Vec<RegionOutcome> = chunks
        .into_par_iter()
        .map(|rows| scan_rows::<R>(&t_grid, &t_data, &q_grid, rows, delta, witness_delta, budget))
        .collect();
    parts.into_iter().fold(RegionOutcome::default(), |mut acc, p| {
        acc.absorb(p);
        acc
    })
}

/// Clips `spec` at `t = 1/(2 - delta)` when it overshoots by at most one
/// `t`-step; larger overshoots are an error.
pub(crate) fn clip_to_ceiling(spec: &PartitionSpec, delta: RicParam, mode: Mode) -> Result<PartitionSpec> {
    spec.validate()?;
    let ceiling = t_ceiling(delta, mode);
    let mut s = *spec;
    if s.t_lo >= ceiling {
        return Err(Error::BoundInvalid(format!(
            "region starts at t = {} beyond 1/(2 - delta) = {ceiling}",
            s.t_lo
        )));
    }
    if s.t_hi > ceiling {
        if s.t_hi - ceiling > s.t_step {
            return Err(Error::BoundInvalid(format!(
                "region reaches t = {} which escapes 1/(2 - delta) = {ceiling} by more than one step",
                s.t_hi
            )));
        }
        s.t_hi = ceiling;
    }
    Ok(s)
}

pub(crate) fn scan(spec: &PartitionSpec, delta: RicParam, opts: &VerifyOptions) -> Result<(PartitionSpec, RegionOutcome)> {
    let spec = clip_to_ceiling(spec, delta, opts.mode)?;
    check_hypothesis(
        &Cell { t_lo: spec.t_lo, t_hi: spec.t_hi, q_lo: spec.q_lo, q_hi: spec.q_hi },
        delta,
        opts.mode,
    )?;
    let d = delta.value();
    let outcome = opts.install(|| match opts.mode {
        Mode::Float => scan_region::<f64>(&spec, d, d, opts.refine_budget),
        Mode::Interval => {
            scan_region::<Interval>(&spec, Interval::delta(d), Interval::point(d), opts.refine_budget)
        }
    })?;
    Ok((spec, outcome))
}

pub(crate) fn certificate_from(
    claim: String,
    delta: RicParam,
    partitions: Vec<PartitionSpec>,
    outcome: &RegionOutcome,
    opts: &VerifyOptions,
) -> Certificate {
    Certificate {
        schema: CERTIFICATE_SCHEMA.to_string(),
        verdict: outcome.verdict(),
        claim,
        delta: delta.value(),
        partitions,
        cells_checked: outcome.cells,
        cells_refined: outcome.refined,
        worst_bound: outcome.worst_bound,
        worst_cell: outcome.worst_cell,
        witness: outcome.witness,
        mode: opts.mode,
        inflation_ulps: (opts.mode == Mode::Interval).then_some(INFLATION_ULPS),
        refine_budget: opts.refine_budget,
        analytic: None,
        duration: 0.0,
        tool_version: TOOL_VERSION.to_string(),
    }
}

/// Scans every cell of `spec` (clipped at `t = 1/(2 - delta)` when it
/// overshoots by at most one step) and refines failing cells.
///
/// The verdict is `certified` when every final cell bound is below one,
/// `refuted` when a sampled point of a minimal failing cell has `r >= 1`,
/// and `inconclusive` otherwise. Results do not depend on the worker count.
pub fn verify_region(spec: &PartitionSpec, delta: RicParam, opts: &VerifyOptions) -> Result<Certificate> {
    let start = Instant::now();
    let (clipped, outcome) = scan(spec, delta, opts)?;
    let claim = format!(
        "r(t, q, {}) < 1 on [{}, {}] x [{}, {}]",
        delta.value(),
        clipped.t_lo,
        clipped.t_hi,
        clipped.q_lo,
        clipped.q_hi
    );
    let mut cert = certificate_from(claim, delta, vec![clipped], &outcome, opts);
    cert.set_duration(start.elapsed());
    Ok(cert)
}
