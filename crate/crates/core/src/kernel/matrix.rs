use serde::Serialize;

use crate::error::{Error, Result};

use super::TreeppParams;

/// Symmetric `n x n` Gram matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelMatrix {
    n: usize,
    entries: Vec<f64>,
    normalized: bool,
    params: Option<TreeppParams>,
}

impl KernelMatrix {
    pub fn new(n: usize, entries: Vec<f64>, normalized: bool) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        Ok(KernelMatrix {
            n,
            entries,
            normalized,
            params: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], normalized: bool) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::new(n, entries, normalized)
    }

    /// Exact conversion of integer counts; values above 2^53 lose precision.
    pub fn from_counts(n: usize, counts: &[u64]) -> Result<Self> {
        Self::new(n, counts.iter().map(|&c| c as f64).collect(), false)
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        KernelMatrix {
            n,
            entries,
            normalized: true,
            params: None,
        }
    }

    pub fn with_params(mut self, params: TreeppParams) -> Self {
        self.params = Some(params);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn params(&self) -> Option<TreeppParams> {
        self.params
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.n.max(1)).take(self.n)
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Principal submatrix on `indices` (rows and columns alike).
    pub fn select(&self, indices: &[usize]) -> KernelMatrix {
        let m = indices.len();
        let mut entries = Vec::with_capacity(m * m);
        for &i in indices {
            let row = self.row(i);
            entries.extend(indices.iter().map(|&j| row[j]));
        }
        KernelMatrix {
            n: m,
            entries,
            normalized: self.normalized,
            params: self.params,
        }
    }

    /// Rows `rows`, columns `cols`.
    pub fn cross(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<f64>> {
        rows.iter()
            .map(|&i| {
                let row = self.row(i);
                cols.iter().map(|&j| row[j]).collect()
            })
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Elementwise sum; the result keeps `self`'s params.
    pub fn add(&self, other: &KernelMatrix) -> Result<KernelMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(KernelMatrix {
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
            normalized: false,
            params: self.params,
        })
    }
}

/// Cosine normalization `K(i,j) / sqrt(K(i,i) K(j,j))` with an exact unit diagonal.
pub fn normalize_matrix(m: &KernelMatrix) -> Result<KernelMatrix> {
    let n = m.n();
    let diag = m.diagonal();
    for (index, &value) in diag.iter().enumerate() {
        if value.is_nan() || value <= 0.0 {
            return Err(Error::NonPositiveDiagonal { index, value });
        }
    }
    let roots: Vec<f64> = diag.iter().map(|d| d.sqrt()).collect();
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        entries[i * n + i] = 1.0;
        for j in 0..i {
            let v = m.get(i, j) / (roots[i] * roots[j]);
            entries[i * n + j] = v;
            entries[j * n + i] = v;
        }
    }
    Ok(KernelMatrix {
        n,
        entries,
        normalized: true,
        params: m.params().map(|p| TreeppParams { normalize: true, ..p }),
    })
}
