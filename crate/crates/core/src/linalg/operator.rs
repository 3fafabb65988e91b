//! Bounded linear operators with forward and adjoint application.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::DenseVector;

/// A bounded linear map `R^p -> R^q` together with its adjoint.
///
/// `forward` and `adjoint` may assume correctly sized inputs; the checked
/// entry points [`apply`] and [`apply_adjoint`] validate dimensions first.
/// Implementations must satisfy `<L x, y> = <x, L* y>`.
pub trait LinearOperator: Send + Sync {
    /// Dimension p of the domain (input of `forward`).
    fn domain_dim(&self) -> usize;
    /// Dimension q of the range (output of `forward`).
    fn range_dim(&self) -> usize;
    fn forward(&self, v: &DenseVector) -> DenseVector;
    fn adjoint(&self, v: &DenseVector) -> DenseVector;

    /// Number of stored nonzeros, when meaningful; dense fallback is p*q.
    /// Used by cost models to price one operator application.
    fn nnz(&self) -> usize {
        self.domain_dim() * self.range_dim()
    }
}

/// Shared handle to a linear operator.
pub type OperatorHandle = Arc<dyn LinearOperator>;

/// Checked forward application: errors on dimension mismatch.
pub fn apply(op: &dyn LinearOperator, v: &DenseVector) -> Result<DenseVector> {
    if v.dim() != op.domain_dim() {
        return Err(Error::DimensionMismatch {
            expected: op.domain_dim(),
            got: v.dim(),
            context: "linear operator forward application",
        });
    }
    Ok(op.forward(v))
}

/// Checked adjoint application: errors on dimension mismatch.
pub fn apply_adjoint(op: &dyn LinearOperator, v: &DenseVector) -> Result<DenseVector> {
    if v.dim() != op.range_dim() {
        return Err(Error::DimensionMismatch {
            expected: op.range_dim(),
            got: v.dim(),
            context: "linear operator adjoint application",
        });
    }
    Ok(op.adjoint(v))
}

/// The zero map `R^p -> R^q`.
#[derive(Debug, Clone)]
pub struct ZeroOperator {
    pub domain: usize,
    pub range: usize,
}

impl LinearOperator for ZeroOperator {
    fn domain_dim(&self) -> usize {
        self.domain
    }
    fn range_dim(&self) -> usize {
        self.range
    }
    fn forward(&self, _v: &DenseVector) -> DenseVector {
        DenseVector::zeros(self.range)
    }
    fn adjoint(&self, _v: &DenseVector) -> DenseVector {
        DenseVector::zeros(self.domain)
    }
    fn nnz(&self) -> usize {
        0
    }
}

/// The identity on `R^d`.
#[derive(Debug, Clone)]
pub struct IdentityOperator {
    pub dim: usize,
}

impl LinearOperator for IdentityOperator {
    fn domain_dim(&self) -> usize {
        self.dim
    }
    fn range_dim(&self) -> usize {
        self.dim
    }
    fn forward(&self, v: &DenseVector) -> DenseVector {
        v.clone()
    }
    fn adjoint(&self, v: &DenseVector) -> DenseVector {
        v.clone()
    }
    fn nnz(&self) -> usize {
        self.dim
    }
}

/// A diagonal map, self-adjoint by construction.
#[derive(Debug, Clone)]
pub struct DiagonalOperator {
    diag: Vec<f64>,
}

impl DiagonalOperator {
    pub fn new(diag: Vec<f64>) -> Self {
        Self { diag }
    }
}

impl LinearOperator for DiagonalOperator {
    fn domain_dim(&self) -> usize {
        self.diag.len()
    }
    fn range_dim(&self) -> usize {
        self.diag.len()
    }
    fn forward(&self, v: &DenseVector) -> DenseVector {
        DenseVector::new(
            self.diag
                .iter()
                .zip(v.as_slice())
                .map(|(d, x)| d * x)
                .collect(),
        )
    }
    fn adjoint(&self, v: &DenseVector) -> DenseVector {
        self.forward(v)
    }
    fn nnz(&self) -> usize {
        self.diag.len()
    }
}

/// A dense row-major matrix operator; convenient for small test problems.
#[derive(Debug, Clone)]
pub struct DenseMatrixOperator {
    rows: usize,
    cols: usize,
    data: Vec<f64>, // row-major
}

impl DenseMatrixOperator {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn entry(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }
}

impl LinearOperator for DenseMatrixOperator {
    fn domain_dim(&self) -> usize {
        self.cols
    }
    fn range_dim(&self) -> usize {
        self.rows
    }
    fn forward(&self, v: &DenseVector) -> DenseVector {
        let mut out = vec![0.0; self.rows];
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            out[r] = row.iter().zip(v.as_slice()).map(|(a, x)| a * x).sum();
        }
        DenseVector::new(out)
    }
    fn adjoint(&self, v: &DenseVector) -> DenseVector {
        let mut out = vec![0.0; self.cols];
        for r in 0..self.rows {
            let s = v[r];
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * s;
            }
        }
        DenseVector::new(out)
    }
}

/// Wraps an operator and counts forward/adjoint applications. Clones of the
/// wrapping `Arc` share the counters, so a solver handed this operator can be
/// audited from outside the run.
pub struct CountingOperator {
    inner: OperatorHandle,
    forward_count: AtomicU64,
    adjoint_count: AtomicU64,
}

impl CountingOperator {
    pub fn wrap(inner: OperatorHandle) -> Arc<Self> {
        Arc::new(Self {
            inner,
            forward_count: AtomicU64::new(0),
            adjoint_count: AtomicU64::new(0),
        })
    }

    pub fn forward_count(&self) -> u64 {
        self.forward_count.load(Ordering::Relaxed)
    }

    pub fn adjoint_count(&self) -> u64 {
        self.adjoint_count.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.forward_count.store(0, Ordering::Relaxed);
        self.adjoint_count.store(0, Ordering::Relaxed);
    }
}

impl LinearOperator for CountingOperator {
    fn domain_dim(&self) -> usize {
        self.inner.domain_dim()
    }
    fn range_dim(&self) -> usize {
        self.inner.range_dim()
    }
    fn forward(&self, v: &DenseVector) -> DenseVector {
        self.forward_count.fetch_add(1, Ordering::Relaxed);
        self.inner.forward(v)
    }
    fn adjoint(&self, v: &DenseVector) -> DenseVector {
        self.adjoint_count.fetch_add(1, Ordering::Relaxed);
        self.inner.adjoint(v)
    }
    fn nnz(&self) -> usize {
        self.inner.nnz()
    }
}

/// Checks `<L x, y> = <x, L* y>` on seeded sample pairs. Returns the largest
/// normalized defect observed; well-formed operators stay below 1e-10.
pub fn adjoint_defect(op: &dyn LinearOperator, samples: usize, seed: u64) -> f64 {
    let mut rng = crate::util::SplitMix64::new(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = DenseVector::new((0..op.domain_dim()).map(|_| rng.uniform(-1.0, 1.0)).collect());
        let y = DenseVector::new((0..op.range_dim()).map(|_| rng.uniform(-1.0, 1.0)).collect());
        let lhs = op.forward(&x).dot(&y);
        let rhs = x.dot(&op.adjoint(&y));
        let defect = (lhs - rhs).abs() / (1.0 + x.norm() * y.norm());
        worst = worst.max(defect);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_apply() {
        let op = IdentityOperator { dim: 2 };
        let v = DenseVector::new(vec![1.0, 2.0]);
        assert_eq!(apply(&op, &v).unwrap().as_slice(), &[1.0, 2.0]);
    }

    #[test]
    fn zero_apply() {
        let op = ZeroOperator { domain: 3, range: 2 };
        let v = DenseVector::new(vec![1.0, -4.0, 2.5]);
        assert_eq!(apply(&op, &v).unwrap().as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn diagonal_apply() {
        let op = DiagonalOperator::new(vec![3.0, 1.0]);
        let v = DenseVector::new(vec![1.0, 1.0]);
        assert_eq!(apply(&op, &v).unwrap().as_slice(), &[3.0, 1.0]);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let op = IdentityOperator { dim: 2 };
        let v = DenseVector::new(vec![1.0, 2.0, 3.0]);
        assert!(apply(&op, &v).is_err());
        assert!(apply_adjoint(&op, &v).is_err());
    }

    #[test]
    fn counting_operator_counts() {
        let inner: OperatorHandle = Arc::new(IdentityOperator { dim: 2 });
        let counted = CountingOperator::wrap(inner);
        let v = DenseVector::new(vec![1.0, 2.0]);
        counted.forward(&v);
        counted.forward(&v);
        counted.adjoint(&v);
        assert_eq!(counted.forward_count(), 2);
        assert_eq!(counted.adjoint_count(), 1);
        counted.reset();
        assert_eq!(counted.forward_count(), 0);
    }

    #[test]
    fn dense_matrix_adjoint_consistency() {
        let op = DenseMatrixOperator::new(3, 2, vec![1.0, -2.0, 0.5, 4.0, -1.0, 3.0]);
        assert!(adjoint_defect(&op, 50, 11) < 1e-12);
    }
}
