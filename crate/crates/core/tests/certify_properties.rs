mod common;

use common::{boundary_oracle, r_oracle};
use lqcert::certify::{
    boundary_enclosure, cell_enclosure, cell_upper_bound, large_t_region_check, small_t_region_bound,
    t_ceiling, theorem7_driver, verify_boundary_decreasing, verify_region, Certificate,
};
use lqcert::{Cell, Error, Mode, PartitionSpec, QExponent, RicParam, Verdict, VerifyOptions};
use proptest::prelude::*;

fn d(v: f64) -> RicParam {
    RicParam::new(v).unwrap()
}

/// A cell inside `[0, 1/(2-delta)] x (0, 1)` from unit-square coordinates.
fn cell_in(delta: f64, a: f64, b: f64, c: f64, e: f64) -> Cell {
    let ceil = 1.0 / (2.0 - delta);
    let (t0, t1) = (a.min(b) * ceil, a.max(b) * ceil);
    let (q0, q1) = (0.02 + 0.97 * c.min(e), 0.02 + 0.97 * c.max(e));
    Cell::new(t0, t1, q0, q1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn corner_bound_dominates_samples(
        delta in 0.05f64..0.95, a in 0.0f64..=1.0, b in 0.0f64..=1.0, c in 0.0f64..=1.0, e in 0.0f64..=1.0,
        s in prop::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 16),
    ) {
        let cell = cell_in(delta, a, b, c, e);
        let bound = cell_upper_bound(&cell, d(delta), Mode::Float).unwrap();
        let ibound = cell_upper_bound(&cell, d(delta), Mode::Interval).unwrap();
        prop_assert!(ibound >= bound);
        for (u, v) in s {
            let t = cell.t_lo + u * (cell.t_hi - cell.t_lo);
            let q = cell.q_lo + v * (cell.q_hi - cell.q_lo);
            let rv = if t == 0.0 { 2.0 * delta } else { r_oracle(t, q, delta) };
            prop_assert!(rv <= bound + 1e-12, "r({t}, {q}) = {rv} > {bound}");
            prop_assert!(rv <= ibound + 1e-12);
        }
    }

    #[test]
    fn point_enclosure_contains_float_value(delta in 0.05f64..0.95, u in 0.0f64..=1.0, q in 0.02f64..0.99) {
        let t = u / (2.0 - delta);
        let cell = Cell::point(t, q).unwrap();
        let enc = cell_enclosure(&cell, d(delta)).unwrap();
        let rv = lqcert::scalar::generic::r(t, q, delta);
        prop_assert!(enc.lo() <= rv + 1e-14 && rv - 1e-14 <= enc.hi(), "{rv} not in {enc}");
        prop_assert!(enc.width() < 1e-12);
    }
}

#[test]
fn cells_past_the_ceiling_rejected() {
    let ceil = 1.0 / 1.5;
    let cell = Cell::new(0.5, ceil + 1e-9, 0.5, 0.6).unwrap();
    assert!(matches!(cell_upper_bound(&cell, d(0.5), Mode::Float), Err(Error::BoundInvalid(_))));
    assert!(t_ceiling(d(0.5), Mode::Interval) >= ceil);
}

#[test]
fn refinement_never_hurts() {
    let spec = PartitionSpec::new((0.03, 0.1), (0.9, 0.915), 2e-3, 2e-3).unwrap();
    let mut prev: Option<Certificate> = None;
    let mut verdicts = Vec::new();
    for budget in 0..=6 {
        let opts = VerifyOptions { refine_budget: budget, ..VerifyOptions::default() };
        let cert = verify_region(&spec, d(0.5), &opts).unwrap();
        if let Some(p) = &prev {
            assert!(cert.worst_bound <= p.worst_bound, "budget {budget}");
            if p.verdict == Verdict::Certified {
                assert_eq!(cert.verdict, Verdict::Certified);
            }
        }
        verdicts.push(cert.verdict);
        prev = Some(cert);
    }
    assert_eq!(verdicts[0], Verdict::Inconclusive, "{verdicts:?}");
    assert_eq!(verdicts[6], Verdict::Certified, "{verdicts:?}");
}

#[test]
fn worker_count_does_not_change_certificates() {
    let spec = PartitionSpec::new((0.0105, 0.6), (0.5, 0.56), 1e-3, 1e-3).unwrap();
    for mode in [Mode::Float, Mode::Interval] {
        let base = VerifyOptions::default().with_mode(mode);
        let one = verify_region(&spec, d(0.5), &base.with_workers(1)).unwrap();
        let four = verify_region(&spec, d(0.5), &base.with_workers(4)).unwrap();
        assert_eq!(one.canonical_json().unwrap(), four.canonical_json().unwrap());
    }
    let refuting = PartitionSpec::new((0.05, 0.08), (0.9181, 0.9183), 1e-4, 1e-4).unwrap();
    let opts = VerifyOptions::default();
    let one = verify_region(&refuting, d(0.5), &opts.with_workers(1)).unwrap();
    let four = verify_region(&refuting, d(0.5), &opts.with_workers(4)).unwrap();
    assert_eq!(one.verdict, Verdict::Refuted);
    assert_eq!(one.canonical_json().unwrap(), four.canonical_json().unwrap());
}

#[test]
fn certificate_json_round_trip() {
    let spec = PartitionSpec::new((0.1, 0.2), (0.3, 0.4), 0.01, 0.01).unwrap();
    let cert = verify_region(&spec, d(0.45), &VerifyOptions::default().with_mode(Mode::Interval)).unwrap();
    let text = cert.to_json().unwrap();
    let back = Certificate::from_json(&text).unwrap();
    assert_eq!(back, cert);
    assert_eq!(back.to_json().unwrap(), text);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["verdict", "delta", "partitions", "cells_checked", "worst_bound", "worst_cell", "mode", "duration", "tool_version"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["schema"], "certificate_v1");
    assert!(Certificate::from_json(&text.replace("certificate_v1", "certificate_v0")).is_err());
}

#[test]
fn driver_rejects_gaps() {
    let parts = vec![PartitionSpec::new((0.6, 0.6667), (0.17, 0.9181), 1e-2, 1e-2).unwrap()];
    let err = theorem7_driver(d(0.5), QExponent::new(0.9181).unwrap(), &VerifyOptions::default(), Some(parts));
    assert!(matches!(err, Err(Error::CoverageGap(_))));
}

#[test]
fn boundary_facts() {
    let rep = verify_boundary_decreasing(0.01, 0.99, 0.01).unwrap();
    assert!(rep.decreasing && rep.worst_factor < 0.0);
    for q in [0.05, 0.17, 0.5, 0.9181, 0.98] {
        let enc = boundary_enclosure(QExponent::new(q).unwrap()).unwrap();
        assert!(enc.contains(boundary_oracle(q)) || (enc.mid() - boundary_oracle(q)).abs() < 1e-14);
        let lo = small_t_region_bound(QExponent::new(q).unwrap()).unwrap();
        assert!(lo <= boundary_oracle(q) + 1e-15 && lo > boundary_oracle(q) - 1e-12);
    }
    assert!(large_t_region_check(d(0.5), 200).unwrap());
    assert!(large_t_region_check(d(0.4931), 200).unwrap());
    assert!(matches!(large_t_region_check(d(0.6), 200), Err(Error::Hypothesis(_))));
}
