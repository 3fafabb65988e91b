//! Sparse matrices in triplet form with a compiled CSR kernel.

use crate::error::{Error, Result};
use crate::linalg::{DenseVector, LinearOperator};

/// A sparse matrix built from `(row, col, value)` triplets. Construction
/// validates that indices are in range and that no `(row, col)` position is
/// repeated; application uses a compressed row layout.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    // CSR storage
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let mut sorted: Vec<&(usize, usize, f64)> = triplets.iter().collect();
        for &&(r, c, _) in &sorted {
            if r >= rows || c >= cols {
                return Err(Error::InvalidSparseMatrix(format!(
                    "index ({r}, {c}) out of range for a {rows}x{cols} matrix"
                )));
            }
        }
        sorted.sort_by_key(|&&(r, c, _)| (r, c));
        for pair in sorted.windows(2) {
            if pair[0].0 == pair[1].0 && pair[0].1 == pair[1].1 {
                return Err(Error::InvalidSparseMatrix(format!(
                    "duplicate entry at ({}, {})",
                    pair[0].0, pair[0].1
                )));
            }
        }

        let mut row_ptr = vec![0usize; rows + 1];
        for &&(r, _, _) in &sorted {
            row_ptr[r + 1] += 1;
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values = Vec::with_capacity(sorted.len());
        for &&(_, c, v) in &sorted {
            col_idx.push(c);
            values.push(v);
        }
        Ok(Self { rows, cols, row_ptr, col_idx, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Iterate the stored entries of one row as `(col, value)`.
    pub fn row_entries(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.col_idx[k], self.values[k]))
    }

    /// Iterate stored entries as `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1])
                .map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    pub fn to_dense_row_major(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.rows * self.cols];
        for (r, c, v) in self.triplets() {
            out[r * self.cols + c] = v;
        }
        out
    }
}

impl LinearOperator for SparseMatrix {
    fn domain_dim(&self) -> usize {
        self.cols
    }

    fn range_dim(&self) -> usize {
        self.rows
    }

    fn forward(&self, v: &DenseVector) -> DenseVector {
        debug_assert_eq!(v.dim(), self.cols);
        let x = v.as_slice();
        let mut out = vec![0.0; self.rows];
        for r in 0..self.rows {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            out[r] = acc;
        }
        DenseVector::new(out)
    }

    fn adjoint(&self, v: &DenseVector) -> DenseVector {
        debug_assert_eq!(v.dim(), self.rows);
        let y = v.as_slice();
        let mut out = vec![0.0; self.cols];
        for r in 0..self.rows {
            let s = y[r];
            if s == 0.0 {
                continue;
            }
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                out[self.col_idx[k]] += self.values[k] * s;
            }
        }
        DenseVector::new(out)
    }

    fn nnz(&self) -> usize {
        self.values.len()
    }
}
