//! The regularized, affinely constrained least squares that produces
//! extrapolation weights:
//!
//! ```text
//! minimize  ||R a||^2 + xi * ||R^T R||_F * ||a||^2   subject to  1^T a = 1
//! ```
//!
//! The window is small (m + 1 columns with m at most a few tens), so the
//! Gram matrix `G = R^T R` is assembled directly and the KKT system
//!
//! ```text
//! [ G + xi ||G||_F I   -1 ] [ a  ]   [ 0 ]
//! [ 1^T                 0 ] [ nu ] = [ 1 ]
//! ```
//!
//! is solved densely. The augmented system stays nonsingular whenever the
//! residual differences have full rank, even when `G` itself is singular
//! (always the case once the window exceeds the space dimension), which the
//! reduced normal-equation route `G z = 1` cannot handle.

use crate::error::{Error, Result};
use crate::linalg::DenseVector;

/// Weights of the affine combination, summing to one. `degenerate` is set
/// when the solve fell back to `a = e_last` (pure most-recent iterate)
/// because the system was singular or the normalizer vanished.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtrapolationWeights {
    pub alpha: Vec<f64>,
    pub degenerate: bool,
}

impl ExtrapolationWeights {
    fn fallback(len: usize) -> Self {
        let mut alpha = vec![0.0; len];
        alpha[len - 1] = 1.0;
        Self { alpha, degenerate: true }
    }
}

/// Symmetric Gram window maintained incrementally as residual columns enter
/// and leave a sliding history. Entries for retained column pairs are reused
/// exactly, so only the dot products against the newest column are computed
/// per push.
#[derive(Debug, Clone, Default)]
pub struct GramWindow {
    size: usize,
    // Row-major size x size, symmetric.
    data: Vec<f64>,
}

impl GramWindow {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size + j]
    }

    /// Appends a column whose dot products with every retained column
    /// (including itself, last) are `dots`.
    pub fn push(&mut self, dots: &[f64]) {
        let n = self.size;
        assert_eq!(dots.len(), n + 1);
        let mut next = vec![0.0; (n + 1) * (n + 1)];
        for i in 0..n {
            for j in 0..n {
                next[i * (n + 1) + j] = self.data[i * n + j];
            }
        }
        for i in 0..=n {
            next[i * (n + 1) + n] = dots[i];
            next[n * (n + 1) + i] = dots[i];
        }
        self.size = n + 1;
        self.data = next;
    }

    /// Drops the oldest column (first row/column).
    pub fn evict_oldest(&mut self) {
        let n = self.size;
        assert!(n >= 1);
        let mut next = vec![0.0; (n - 1) * (n - 1)];
        for i in 1..n {
            for j in 1..n {
                next[(i - 1) * (n - 1) + (j - 1)] = self.data[i * n + j];
            }
        }
        self.size = n - 1;
        self.data = next;
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Solves the constrained extrapolation least squares given residual columns.
/// `xi` must be finite and nonnegative. Singular or degenerate systems are
/// not errors: they produce the `e_last` fallback with the flag set.
pub fn solve_extrapolation_weights(
    columns: &[&DenseVector],
    xi: f64,
) -> Result<ExtrapolationWeights> {
    if columns.is_empty() {
        return Err(Error::InvalidParameter {
            name: "columns",
            message: "need at least one residual column".into(),
        });
    }
    if !xi.is_finite() || xi < 0.0 {
        return Err(Error::InvalidParameter {
            name: "xi",
            message: format!("must be finite and nonnegative, got {xi}"),
        });
    }
    let mut gram = GramWindow::new();
    for (k, col) in columns.iter().enumerate() {
        let dots: Vec<f64> = columns[..=k].iter().map(|c| c.dot(col)).collect();
        gram.push(&dots);
    }
    Ok(solve_extrapolation_weights_from_gram(&gram, xi))
}

/// Gram-side entry point used by the solvers, which maintain the window
/// incrementally. Infallible: degenerate systems take the fallback path.
pub fn solve_extrapolation_weights_from_gram(gram: &GramWindow, xi: f64) -> ExtrapolationWeights {
    let n = gram.size();
    if n == 1 {
        // The constraint pins the single weight.
        return ExtrapolationWeights { alpha: vec![1.0], degenerate: false };
    }
    let ridge = xi * gram.frobenius_norm();
    // Row-equilibrated KKT assembly: the stationarity rows are divided by
    // the Gram's magnitude so the pivoting never has to mix the O(||r||^2)
    // block with the O(1) constraint row.
    let scale = gram
        .as_slice()
        .iter()
        .fold(ridge.abs(), |acc, &v| acc.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return ExtrapolationWeights::fallback(n);
    }
    let dim = n + 1;
    let mut kkt = vec![0.0; dim * dim];
    for i in 0..n {
        for j in 0..n {
            kkt[i * dim + j] = gram.entry(i, j) / scale;
        }
        kkt[i * dim + i] += ridge / scale;
        kkt[i * dim + n] = -1.0 / scale;
        kkt[n * dim + i] = 1.0;
    }
    let mut rhs = vec![0.0; dim];
    rhs[n] = 1.0;
    let solution = match solve_dense(&mut kkt, &mut rhs, dim) {
        Ok(s) => s,
        Err(_) => return ExtrapolationWeights::fallback(n),
    };
    let sum: f64 = solution[..n].iter().sum();
    if solution[..n].iter().any(|v| !v.is_finite()) || (sum - 1.0).abs() > 1e-8 {
        return ExtrapolationWeights::fallback(n);
    }
    // The elimination satisfies the constraint row to solver precision;
    // dividing by the sum pins it exactly.
    let alpha: Vec<f64> = solution[..n].iter().map(|v| v / sum).collect();
    ExtrapolationWeights { alpha, degenerate: false }
}

/// Dense solve of a general square system by Gaussian elimination with
/// partial pivoting. Kept separate from the Cholesky route above so the
/// quasi-Newton cross-check does not share a factorization path with the
/// constrained least squares it validates.
pub(crate) fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Result<Vec<f64>> {
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col * n + col].abs();
        for r in (col + 1)..n {
            let cand = a[r * n + col].abs();
            if cand > best {
                best = cand;
                pivot = r;
            }
        }
        if best < 1e-300 || !best.is_finite() {
            return Err(Error::SingularSystem("gaussian elimination pivot vanished"));
        }
        if pivot != col {
            for c in 0..n {
                a.swap(col * n + c, pivot * n + c);
            }
            b.swap(col, pivot);
        }
        let d = a[col * n + col];
        for r in (col + 1)..n {
            let f = a[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r * n + c] -= f * a[col * n + c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for c in (i + 1)..n {
            s -= a[i * n + c] * x[c];
        }
        x[i] = s / a[i * n + i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_column_forces_unit_weight() {
        let col = DenseVector::new(vec![2.0, -3.0]);
        let w = solve_extrapolation_weights(&[&col], 0.7).unwrap();
        assert_eq!(w.alpha, vec![1.0]);
        assert!(!w.degenerate);
    }

    #[test]
    fn orthonormal_columns_split_evenly() {
        // minimize a0^2 + a1^2 s.t. a0 + a1 = 1 has the unique solution
        // (0.5, 0.5); solved independently by symmetry of the KKT system.
        let e1 = DenseVector::new(vec![1.0, 0.0]);
        let e2 = DenseVector::new(vec![0.0, 1.0]);
        let w = solve_extrapolation_weights(&[&e1, &e2], 0.0).unwrap();
        assert!((w.alpha[0] - 0.5).abs() < 1e-14);
        assert!((w.alpha[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn regularized_two_column_case() {
        // R = [2 e1, e2], xi = 0.1: G = diag(4, 1), ||G||_F = sqrt(17).
        // KKT: (G + 0.1*sqrt(17) I) z = 1, a = z / sum(z). Expected weights
        // computed from the closed form a0 = (1 + r) / (5 + 2 r), r = ridge.
        let r = 0.1 * 17f64.sqrt();
        let expected0 = (1.0 + r) / (5.0 + 2.0 * r);
        let c1 = DenseVector::new(vec![2.0, 0.0]);
        let c2 = DenseVector::new(vec![0.0, 1.0]);
        let w = solve_extrapolation_weights(&[&c1, &c2], 0.1).unwrap();
        assert!((w.alpha[0] - expected0).abs() < 1e-12, "alpha0 = {}", w.alpha[0]);
        assert!((w.alpha[0] - 0.2425).abs() < 5e-4);
        assert!((w.alpha[1] - 0.7575).abs() < 5e-4);
        assert!(((w.alpha[0] + w.alpha[1]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_columns_fall_back_degenerately() {
        let z = DenseVector::zeros(3);
        let w = solve_extrapolation_weights(&[&z, &z], 0.0).unwrap();
        assert!(w.degenerate);
        assert_eq!(w.alpha, vec![0.0, 1.0]);
    }

    #[test]
    fn gram_window_tracks_direct_assembly() {
        let cols = [
            DenseVector::new(vec![1.0, 2.0, 0.0]),
            DenseVector::new(vec![-1.0, 0.5, 3.0]),
            DenseVector::new(vec![0.0, 0.0, 1.0]),
            DenseVector::new(vec![2.0, -1.0, 1.0]),
        ];
        let mut gram = GramWindow::new();
        let cap = 2; // keep at most 3 columns
        let mut window: Vec<&DenseVector> = Vec::new();
        for col in &cols {
            if window.len() == cap + 1 {
                window.remove(0);
                gram.evict_oldest();
            }
            window.push(col);
            let dots: Vec<f64> = window.iter().map(|c| c.dot(col)).collect();
            gram.push(&dots);
            for (i, a) in window.iter().enumerate() {
                for (j, b) in window.iter().enumerate() {
                    assert!((gram.entry(i, j) - a.dot(b)).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn dense_ge_solves_a_known_system() {
        let mut a = vec![2.0, 1.0, 1.0, 4.0];
        let mut b = vec![5.0, 6.0];
        let x = solve_dense(&mut a, &mut b, 2).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!((x[1] - 1.0).abs() < 1e-12);
    }
}
