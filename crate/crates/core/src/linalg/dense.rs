//! Dense vectors and the handful of BLAS-1 style kernels the solvers need.

use std::ops::{Index, IndexMut};

/// A dense real vector. This is the iterate type of every solver in the
/// crate; all produced results are expected to stay finite, which the
/// engines check at their boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector {
    entries: Vec<f64>,
}

impl DenseVector {
    pub fn new(entries: Vec<f64>) -> Self {
        Self { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { entries: vec![0.0; dim] }
    }

    pub fn ones(dim: usize) -> Self {
        Self { entries: vec![1.0; dim] }
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        Self { entries: vec![value; dim] }
    }

    /// Standard basis vector e_i.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v[i] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.entries
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.entries.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|x| x.is_finite())
    }

    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.entries.iter().map(|x| s * x).collect())
    }

    pub fn scale_in_place(&mut self, s: f64) {
        for x in &mut self.entries {
            *x *= s;
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// self + s * other.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + s * b)
                .collect(),
        )
    }

    /// self += s * other.
    pub fn axpy_in_place(&mut self, s: f64, other: &Self) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += s * b;
        }
    }

    /// Affine combination sum_i weights[i] * columns[i]. Weights and columns
    /// must have equal length and the columns a common dimension.
    pub fn combination<'a, I>(weights: &[f64], columns: I) -> Self
    where
        I: IntoIterator<Item = &'a DenseVector>,
    {
        let mut iter = columns.into_iter();
        let first = iter.next().expect("combination of zero columns");
        let mut acc = first.scale(weights[0]);
        for (w, col) in weights[1..].iter().zip(iter) {
            acc.axpy_in_place(*w, col);
        }
        acc
    }

    /// Concatenate two vectors (primal-dual stacking helper).
    pub fn stacked(a: &Self, b: &Self) -> Self {
        let mut entries = Vec::with_capacity(a.dim() + b.dim());
        entries.extend_from_slice(a.as_slice());
        entries.extend_from_slice(b.as_slice());
        Self::new(entries)
    }

    /// Split a stacked vector back into its two blocks.
    pub fn split(&self, first_dim: usize) -> (Self, Self) {
        assert!(first_dim <= self.dim());
        (
            Self::new(self.entries[..first_dim].to_vec()),
            Self::new(self.entries[first_dim..].to_vec()),
        )
    }
}

impl Index<usize> for DenseVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.entries[i]
    }
}

impl IndexMut<usize> for DenseVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.entries[i]
    }
}

impl From<Vec<f64>> for DenseVector {
    fn from(entries: Vec<f64>) -> Self {
        Self::new(entries)
    }
}

impl From<&[f64]> for DenseVector {
    fn from(entries: &[f64]) -> Self {
        Self::new(entries.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_and_norms() {
        let a = DenseVector::new(vec![3.0, 4.0]);
        assert_eq!(a.norm_sq(), 25.0);
        assert_eq!(a.norm(), 5.0);
        let b = DenseVector::new(vec![-1.0, 2.0]);
        assert_eq!(a.dot(&b), 5.0);
    }

    #[test]
    fn combination_matches_manual() {
        let cols = [
            DenseVector::new(vec![1.0, 0.0]),
            DenseVector::new(vec![0.0, 2.0]),
            DenseVector::new(vec![1.0, 1.0]),
        ];
        let c = DenseVector::combination(&[0.5, 0.25, 0.25], cols.iter());
        assert_eq!(c.as_slice(), &[0.75, 0.75]);
    }

    #[test]
    fn stack_and_split_roundtrip() {
        let a = DenseVector::new(vec![1.0, 2.0]);
        let b = DenseVector::new(vec![3.0]);
        let s = DenseVector::stacked(&a, &b);
        let (a2, b2) = s.split(2);
        assert_eq!(a, a2);
        assert_eq!(b, b2);
    }
}
