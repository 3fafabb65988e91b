//! Spectral-norm estimation by power iteration on L*L.

use crate::error::{Error, Result};
use crate::linalg::{DenseVector, LinearOperator};
use crate::util::SplitMix64;

pub const DEFAULT_POWER_TOL: f64 = 1e-9;
pub const DEFAULT_POWER_MAX_ITERS: usize = 10_000;

/// Result of a power-iteration run. `converged` is false when the iteration
/// hit `max_iters` before the eigenvalue estimate stabilized; `value` is then
/// the best estimate seen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralNormEstimate {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Estimates `||L||` (largest singular value) by power iteration on `L*L`
/// with a deterministic seeded start vector (all ones plus seeded jitter).
///
/// A zero operator yields 0. Non-convergence within `max_iters` is not an
/// error: the best estimate is returned with `converged = false`.
pub fn estimate_spectral_norm(
    op: &dyn LinearOperator,
    tol: f64,
    max_iters: usize,
    seed: u64,
) -> Result<SpectralNormEstimate> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            message: format!("must be positive, got {tol}"),
        });
    }
    let dim = op.domain_dim();
    if dim == 0 || op.range_dim() == 0 {
        return Ok(SpectralNormEstimate { value: 0.0, converged: true, iterations: 0 });
    }

    let mut rng = SplitMix64::new(seed);
    let mut v = DenseVector::new((0..dim).map(|_| 1.0 + 0.01 * rng.uniform(-1.0, 1.0)).collect());
    let norm0 = v.norm();
    v.scale_in_place(1.0 / norm0);

    let mut eig_prev = f64::NAN;
    for k in 1..=max_iters {
        let w = op.adjoint(&op.forward(&v)); // L*L v
        let eig = v.dot(&w); // Rayleigh quotient for unit v
        let wnorm = w.norm();
        if wnorm == 0.0 {
            // v is in the null space; with the jittered start this only
            // happens for the zero operator.
            return Ok(SpectralNormEstimate { value: 0.0, converged: true, iterations: k });
        }
        if eig_prev.is_finite() && (eig - eig_prev).abs() <= tol * eig.abs() {
            return Ok(SpectralNormEstimate {
                value: eig.max(0.0).sqrt(),
                converged: true,
                iterations: k,
            });
        }
        eig_prev = eig;
        v = w.scale(1.0 / wnorm);
    }
    Ok(SpectralNormEstimate {
        value: eig_prev.max(0.0).sqrt(),
        converged: false,
        iterations: max_iters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::operator::{DiagonalOperator, IdentityOperator, ZeroOperator};

    #[test]
    fn identity_has_unit_norm() {
        let op = IdentityOperator { dim: 3 };
        let est = estimate_spectral_norm(&op, 1e-12, 1000, 1).unwrap();
        assert!(est.converged);
        assert!((est.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn diagonal_norm_is_max_abs() {
        let op = DiagonalOperator::new(vec![3.0, 1.0]);
        let est = estimate_spectral_norm(&op, 1e-12, 10_000, 1).unwrap();
        assert!((est.value - 3.0).abs() < 1e-8);
    }

    #[test]
    fn zero_operator_returns_zero() {
        let op = ZeroOperator { domain: 4, range: 2 };
        let est = estimate_spectral_norm(&op, 1e-9, 100, 1).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(est.converged);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let op = DiagonalOperator::new(vec![2.0, 5.0, 0.5]);
        let a = estimate_spectral_norm(&op, 1e-10, 1000, 42).unwrap();
        let b = estimate_spectral_norm(&op, 1e-10, 1000, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        let op = IdentityOperator { dim: 2 };
        assert!(estimate_spectral_norm(&op, 0.0, 10, 1).is_err());
    }
}
