use nalgebra::{DMatrix, DVector};

use super::SensingMatrix;

/// Orthonormal basis of `Null(Phi)`, one vector per column.
#[derive(Debug, Clone, PartialEq)]
pub struct NullSpaceBasis {
    basis: DMatrix<f64>,
}

impl NullSpaceBasis {
    /// Dimension `d = n - rank(Phi)`.
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn n(&self) -> usize {
        self.basis.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn vector(&self, j: usize) -> Vec<f64> {
        self.basis.column(j).iter().copied().collect()
    }

    /// `sum_j c_j v_j`.
    pub fn combine(&self, coeffs: &[f64]) -> Vec<f64> {
        (&self.basis * DVector::from_column_slice(coeffs)).as_slice().to_vec()
    }
}

/// Null space from the SVD of `Phi^T` padded with zero columns to a square
/// matrix: left singular vectors with (numerically) zero singular value span
/// the orthogonal complement of the row space. Each vector is signed so its
/// largest-magnitude entry is positive.
pub fn null_space_basis(phi: &SensingMatrix) -> NullSpaceBasis {
    let (m, n) = (phi.m(), phi.n());
    let mut padded = DMatrix::zeros(n, n.max(m));
    padded.view_mut((0, 0), (n, m)).copy_from(&phi.entries().transpose());
    let svd = padded.svd(true, false);
    let u = svd.u.expect("requested U");
    let sigma = &svd.singular_values;
    let smax = sigma.iter().copied().fold(0.0, f64::max);
    let tol = (n.max(m) as f64) * smax * f64::EPSILON;
    let cols: Vec<DVector<f64>> = (0..sigma.len())
        .filter(|&j| sigma[j] <= tol)
        .map(|j| {
            let mut v = u.column(j).into_owned();
            let pivot = v.iter().copied().fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
            if pivot < 0.0 {
                v.neg_mut();
            }
            v
        })
        .collect();
    let basis = if cols.is_empty() { DMatrix::zeros(n, 0) } else { DMatrix::from_columns(&cols) };
    NullSpaceBasis { basis }
}
