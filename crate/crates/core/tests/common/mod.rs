//! Independent oracles shared by the integration tests. Nothing here calls
//! the closed forms under test.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// `p_q` through plain power calls.
pub fn pq_oracle(q: f64) -> f64 {
    let h = q / 2.0;
    h.powf(q / (2.0 - q)) - h.powf(2.0 / (2.0 - q))
}

/// `r(t, q, delta)` expanded term by term with plain power calls.
pub fn r_oracle(t: f64, q: f64, delta: f64) -> f64 {
    let p = pq_oracle(q);
    let u = t.powf(1.0 / q);
    2.0 * delta + 2.0 * (p - 1.0) * u * delta + (p - 1.0) * (p - 1.0) * u * u * delta + t.powf(2.0 / q - 1.0)
        - (2.0 - delta) * u * u
}

/// `B(q)` through plain power calls.
pub fn boundary_oracle(q: f64) -> f64 {
    ((1.0 - pq_oracle(q)) / (2.0 - q)).powf(q / (1.0 - q))
}

/// Grid maximum of `sqrt(r) - r^{1/q} / n^{1/q-1/2}` over `[1, n]`.
pub fn max_gap_brute(n: usize, q: f64, resolution: f64) -> f64 {
    let nf = n as f64;
    let scale = nf.powf(1.0 / q - 0.5);
    let steps = ((nf - 1.0) / resolution).round() as usize;
    (0..=steps)
        .map(|i| {
            let r = 1.0 + i as f64 * resolution;
            r.sqrt() - r.powf(1.0 / q) / scale
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Sparsest solution of `a x = b` with at most `k_max` nonzeros, by support
/// enumeration. Returns the support size and one minimizer.
pub fn l0_oracle(a: &DMatrix<f64>, b: &[f64], k_max: usize, rel_tol: f64) -> Option<(usize, Vec<f64>)> {
    let bv = DVector::from_column_slice(b);
    let b_norm = bv.norm();
    if b_norm == 0.0 {
        return Some((0, vec![0.0; a.ncols()]));
    }
    for s in 1..=k_max {
        for cols in subsets(a.ncols(), s) {
            let sub = a.select_columns(&cols);
            let z = sub.clone().svd(true, true).solve(&bv, 1e-12).ok()?;
            if (&sub * &z - &bv).norm() <= rel_tol * b_norm {
                let mut x = vec![0.0; a.ncols()];
                for (j, &c) in cols.iter().enumerate() {
                    x[c] = z[j];
                }
                return Some((s, x));
            }
        }
    }
    None
}

/// `delta_k` by brute force over column subsets, with eigenvalues from the
/// characteristic polynomial for `k <= 2`.
pub fn ric_brute(a: &DMatrix<f64>, k: usize) -> f64 {
    assert!(k <= 2);
    let mut worst = 0.0f64;
    for cols in subsets(a.ncols(), k) {
        let (lo, hi) = if k == 1 {
            let g = a.column(cols[0]).norm_squared();
            (g, g)
        } else {
            let (u, v) = (a.column(cols[0]), a.column(cols[1]));
            let (g11, g22, g12) = (u.norm_squared(), v.norm_squared(), u.dot(&v));
            let mean = 0.5 * (g11 + g22);
            let rad = (0.25 * (g11 - g22).powi(2) + g12 * g12).sqrt();
            (mean - rad, mean + rad)
        };
        worst = worst.max((hi - 1.0).max(1.0 - lo));
    }
    worst
}
