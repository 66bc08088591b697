use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::{serialize_f64, serialize_f64_vec};
use crate::scalar::QExponent;

use super::SensingMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrlsOptions {
    pub eps_start: f64,
    /// `eps` is multiplied by this when a stage settles.
    pub eps_factor: f64,
    pub eps_min: f64,
    /// Relative change below which a stage has settled.
    pub change_tol: f64,
    pub max_inner: usize,
    /// Support threshold relative to `max |x_i|`.
    pub support_rel: f64,
    /// Relative residual accepted as feasible.
    pub feas_tol: f64,
}

impl Default for IrlsOptions {
    fn default() -> Self {
        IrlsOptions {
            eps_start: 1.0,
            eps_factor: 0.1,
            eps_min: 1e-9,
            change_tol: 1e-3,
            max_inner: 200,
            support_rel: 1e-6,
            feas_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryResult {
    #[serde(serialize_with = "serialize_f64_vec")]
    pub x_hat: Vec<f64>,
    /// `||Phi x_hat - b||_2`.
    #[serde(serialize_with = "serialize_f64")]
    pub residual: f64,
    pub support: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
    /// `||x_hat||_q^q`.
    #[serde(serialize_with = "serialize_f64")]
    pub objective: f64,
    /// Smoothed objective `sum (x_i^2 + eps)^{q/2}` after every iteration,
    /// evaluated with the `eps` of that iteration.
    #[serde(skip)]
    pub smoothed_trace: Vec<f64>,
}

fn smoothed(x: &DVector<f64>, eps: f64, q: f64) -> f64 {
    x.iter().map(|v| (v * v + eps).powf(q / 2.0)).sum()
}

fn objective(x: &[f64], q: f64) -> f64 {
    x.iter().filter(|v| **v != 0.0).map(|v| v.abs().powf(q)).sum()
}

/// Solves `A y = b` for symmetric positive semidefinite `A`, falling back
/// to a pseudo-inverse.
fn spd_solve(a: DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    if let Some(ch) = a.clone().cholesky() {
        return Ok(ch.solve(b));
    }
    a.svd(true, true)
        .solve(b, 1e-14)
        .map_err(|e| Error::Numerical(e.to_string()))
}

fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    a.clone()
        .svd(true, true)
        .solve(b, 1e-12)
        .map_err(|e| Error::Numerical(e.to_string()))
}

fn support_of(x: &[f64], rel: f64) -> Vec<usize> {
    let max = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if max == 0.0 {
        return Vec::new();
    }
    (0..x.len()).filter(|&i| x[i].abs() > rel * max).collect()
}

/// Least squares on the `s` largest entries of `x` for the smallest `s`
/// that is feasible; kept only if it does not raise `||x||_q^q`.
fn polish(
    phi: &SensingMatrix,
    b: &DVector<f64>,
    x: &DVector<f64>,
    q: f64,
    opts: &IrlsOptions,
) -> Result<Option<DVector<f64>>> {
    let a = phi.entries();
    let b_norm = b.norm();
    let mut order: Vec<usize> = (0..x.len()).filter(|&i| x[i] != 0.0).collect();
    order.sort_by(|&i, &j| x[j].abs().total_cmp(&x[i].abs()).then(i.cmp(&j)));
    order.truncate(a.nrows());
    let current = objective(x.as_slice(), q);
    for s in 1..=order.len() {
        let cols = &order[..s];
        let z = least_squares(&phi.columns(cols), b)?;
        let mut candidate = DVector::zeros(x.len());
        for (k, &i) in cols.iter().enumerate() {
            candidate[i] = z[k];
        }
        if (a * &candidate - b).norm() <= opts.feas_tol * b_norm {
            let better = objective(candidate.as_slice(), q) <= current * (1.0 + 1e-12);
            return Ok(better.then_some(candidate));
        }
    }
    Ok(None)
}

/// Minimizes `||x||_q` subject to `Phi x = b` by iteratively reweighted
/// least squares.
///
/// Each iteration solves `min sum w_i x_i^2` s.t. `Phi x = b` with
/// `w_i = (x_i^2 + eps)^{q/2 - 1}` through the `m x m` system
/// `Phi W^{-1} Phi^T y = b`, `x = W^{-1} Phi^T y`. `eps` shrinks by
/// `eps_factor` whenever the relative change drops below `change_tol`,
/// down to `eps_min`. The final iterate is then replaced by the least-squares
/// fit on its fewest leading entries that is feasible, when that fit has a
/// smaller objective.
pub fn irls_lq(phi: &SensingMatrix, b: &[f64], q: QExponent, opts: &IrlsOptions) -> Result<RecoveryResult> {
    let q = q.value();
    if b.len() != phi.m() {
        return Err(Error::invalid(format!("b has length {}, expected {}", b.len(), phi.m())));
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("b has non-finite entries"));
    }
    let a = phi.entries();
    let n = phi.n();
    let bv = DVector::from_column_slice(b);
    let b_norm = bv.norm();
    if b_norm == 0.0 {
        return Ok(RecoveryResult {
            x_hat: vec![0.0; n],
            residual: 0.0,
            support: Vec::new(),
            iterations: 0,
            converged: true,
            objective: 0.0,
            smoothed_trace: Vec::new(),
        });
    }
    let feasible = |x: &DVector<f64>| (a * x - &bv).norm() <= opts.feas_tol * b_norm;

    let mut x = least_squares(a, &bv)?;
    if !feasible(&x) {
        return Err(Error::Infeasible((a * &x - &bv).norm() / b_norm));
    }
    let at = a.transpose();
    let mut eps = opts.eps_start;
    let mut iterations = 0;
    let mut trace = Vec::new();
    let mut best = (objective(x.as_slice(), q), x.clone());
    let converged = loop {
        let mut settled = false;
        for _ in 0..opts.max_inner {
            let inv_w = x.map(|v| (v * v + eps).powf(1.0 - q / 2.0));
            let scaled_at = DMatrix::from_fn(n, a.nrows(), |i, j| inv_w[i] * at[(i, j)]);
            let y = spd_solve(a * &scaled_at, &bv)?;
            let next = &scaled_at * y;
            let change = (&next - &x).norm() / x.norm().max(f64::MIN_POSITIVE);
            x = next;
            iterations += 1;
            trace.push(smoothed(&x, eps, q));
            if feasible(&x) {
                let obj = objective(x.as_slice(), q);
                if obj < best.0 {
                    best = (obj, x.clone());
                }
            }
            if change < opts.change_tol {
                settled = true;
                break;
            }
        }
        if eps <= opts.eps_min {
            break settled;
        }
        eps = (eps * opts.eps_factor).max(opts.eps_min);
    };
    if !converged || !feasible(&x) {
        x = best.1;
    }

    if let Some(p) = polish(phi, &bv, &x, q, opts)? {
        x = p;
    }
    let x_hat: Vec<f64> = x.iter().copied().collect();
    Ok(RecoveryResult {
        residual: (a * &x - &bv).norm(),
        support: support_of(&x_hat, opts.support_rel),
        objective: objective(&x_hat, q),
        x_hat,
        iterations,
        converged,
        smoothed_trace: trace,
    })
}
