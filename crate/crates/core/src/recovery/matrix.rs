use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::sig17;
use crate::rng;

/// How a sensing matrix was produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MatrixSource {
    /// I.i.d. `N(0, 1/m)` entries.
    Gaussian { seed: u64 },
    /// I.i.d. `+-1/sqrt(m)` entries.
    Bernoulli { seed: u64 },
    /// Read from a matrix file.
    File { path: String },
    /// Built in memory.
    Explicit,
}

/// A dense `m x n` real matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingMatrix {
    entries: DMatrix<f64>,
    source: MatrixSource,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    m: usize,
    n: usize,
}

impl SensingMatrix {
    /// Seeded random ensemble with `0 < m < n`.
    pub fn generate(m: usize, n: usize, source: MatrixSource) -> Result<Self> {
        if !(0 < m && m < n) {
            return Err(Error::invalid(format!("need 0 < m < n, got m = {m}, n = {n}")));
        }
        let scale = 1.0 / (m as f64).sqrt();
        let entries = match source {
            MatrixSource::Gaussian { seed } => {
                let mut rng = rng::seeded(seed);
                DMatrix::from_fn(m, n, |_, _| scale * rng.sample::<f64, _>(StandardNormal))
            }
            MatrixSource::Bernoulli { seed } => {
                let mut rng = rng::seeded(seed);
                DMatrix::from_fn(m, n, |_, _| if rng.random::<bool>() { scale } else { -scale })
            }
            _ => return Err(Error::invalid("generate needs a random ensemble")),
        };
        Self::with_source(entries, source)
    }

    pub fn gaussian(m: usize, n: usize, seed: u64) -> Result<Self> {
        Self::generate(m, n, MatrixSource::Gaussian { seed })
    }

    /// Wraps an explicit matrix. Any shape is accepted here; only
    /// [`SensingMatrix::generate`] insists on `m < n`.
    pub fn from_matrix(entries: DMatrix<f64>) -> Result<Self> {
        Self::with_source(entries, MatrixSource::Explicit)
    }

    /// Builds from row slices.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("rows have different lengths"));
        }
        Self::from_matrix(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
    }

    fn with_source(entries: DMatrix<f64>, source: MatrixSource) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::invalid("matrix has no entries"));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("matrix has non-finite entries"));
        }
        Ok(SensingMatrix { entries, source })
    }

    pub fn m(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn source(&self) -> &MatrixSource {
        &self.source
    }

    /// `Phi x`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n() {
            return Err(Error::invalid(format!("vector has length {}, expected {}", x.len(), self.n())));
        }
        Ok((&self.entries * DVector::from_column_slice(x)).as_slice().to_vec())
    }

    /// Columns `cols` of `Phi`, in the given order.
    pub fn columns(&self, cols: &[usize]) -> DMatrix<f64> {
        self.entries.select_columns(cols)
    }

    /// Indices of identically zero columns.
    pub fn zero_columns(&self) -> Vec<usize> {
        (0..self.n()).filter(|&j| self.entries.column(j).iter().all(|v| *v == 0.0)).collect()
    }

    /// Serializes to the matrix file format: a JSON header line
    /// `{"m":..,"n":..}` followed by one CSV line per row.
    pub fn to_file_string(&self) -> String {
        let mut out = serde_json::to_string(&Header { m: self.m(), n: self.n() }).expect("header");
        out.push('\n');
        for row in self.entries.row_iter() {
            let line: Vec<String> = row.iter().map(|v| sig17(*v)).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_file_string())?;
        Ok(())
    }

    pub fn read_from(reader: impl Read, origin: &str) -> Result<Self> {
        let mut lines = BufReader::new(reader).lines();
        let header = lines.next().ok_or_else(|| Error::invalid("empty matrix file"))??;
        let Header { m, n } = serde_json::from_str(header.trim())?;
        let mut data = Vec::with_capacity(m * n);
        let mut rows = 0;
        for (i, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: Vec<f64> = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::invalid(format!("row {}: {e}", i + 1)))?;
            if row.len() != n {
                return Err(Error::invalid(format!("row {} has {} entries, expected {n}", i + 1, row.len())));
            }
            data.extend(row);
            rows += 1;
        }
        if rows != m {
            return Err(Error::invalid(format!("found {rows} rows, header says {m}")));
        }
        let entries = DMatrix::from_row_slice(m, n, &data);
        Self::with_source(entries, MatrixSource::File { path: origin.to_string() })
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_from(f, &path.display().to_string())
    }
}
