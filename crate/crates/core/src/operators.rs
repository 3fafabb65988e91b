//! Resolvent and cocoercive building blocks: the l1 prox that leaves the
//! bias coordinate untouched, the resolvent of the hinge-sum conjugate, and
//! the SVM objective evaluator used for diagnostics.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::DenseVector;
use crate::svm::SvmDataset;

/// A resolvent-type operator `v, step -> J_{step*A}(v)`. Resolvents of
/// maximally monotone operators are firmly nonexpansive, which downstream
/// engines rely on but do not re-check per call.
#[derive(Clone)]
pub struct ResolventOperator {
    eval: Arc<dyn Fn(&DenseVector, f64) -> DenseVector + Send + Sync>,
    descriptor: &'static str,
}

impl ResolventOperator {
    pub fn new(
        descriptor: &'static str,
        eval: impl Fn(&DenseVector, f64) -> DenseVector + Send + Sync + 'static,
    ) -> Self {
        Self { eval: Arc::new(eval), descriptor }
    }

    /// The identity resolvent (A = 0).
    pub fn identity() -> Self {
        Self::new("identity", |v, _| v.clone())
    }

    pub fn evaluate(&self, v: &DenseVector, step: f64) -> DenseVector {
        (self.eval)(v, step)
    }

    pub fn descriptor(&self) -> &'static str {
        self.descriptor
    }
}

impl std::fmt::Debug for ResolventOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ResolventOperator").field("descriptor", &self.descriptor).finish()
    }
}

/// A single-valued cocoercive operator together with its modulus parameter
/// `beta` (the operator is 1/beta-cocoercive). `beta = 0` encodes the zero
/// operator, the case exercised by every benchmark problem here.
#[derive(Clone)]
pub struct CocoerciveOperator {
    eval: Arc<dyn Fn(&DenseVector) -> DenseVector + Send + Sync>,
    beta: f64,
}

impl CocoerciveOperator {
    pub fn new(beta: f64, eval: impl Fn(&DenseVector) -> DenseVector + Send + Sync + 'static) -> Self {
        assert!(beta >= 0.0, "cocoercivity parameter must be nonnegative");
        Self { eval: Arc::new(eval), beta }
    }

    pub fn zero(dim: usize) -> Self {
        Self { eval: Arc::new(move |_| DenseVector::zeros(dim)), beta: 0.0 }
    }

    pub fn evaluate(&self, v: &DenseVector) -> DenseVector {
        (self.eval)(v)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl std::fmt::Debug for CocoerciveOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CocoerciveOperator").field("beta", &self.beta).finish()
    }
}

/// Soft-thresholds every component except the last one, which passes through
/// unchanged. This is the prox of `theta * ||w||_1` for a variable laid out
/// as `(w, b)` with an unregularized trailing bias `b`.
pub fn prox_l1_skip_last(v: &DenseVector, theta: f64) -> Result<DenseVector> {
    if !(theta >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "theta",
            message: format!("soft-threshold level must be nonnegative, got {theta}"),
        });
    }
    let n = v.dim();
    assert!(n >= 1, "prox needs at least the bias coordinate");
    let mut out = Vec::with_capacity(n);
    for (i, &x) in v.iter().enumerate() {
        if i + 1 == n {
            out.push(x);
        } else {
            out.push(soft_threshold(x, theta));
        }
    }
    Ok(DenseVector::new(out))
}

#[inline]
fn soft_threshold(x: f64, theta: f64) -> f64 {
    if x > theta {
        x - theta
    } else if x < -theta {
        x + theta
    } else {
        0.0
    }
}

/// Resolvent of `sigma * B^{-1}` for `B` the subdifferential of the hinge sum
/// `f(y) = sum_i max(0, 1 - y_i)`. Its conjugate is `f*(mu) = sum_i mu_i` on
/// the box `[-1, 0]^N`, so the resolvent is the component-wise clip of
/// `v - sigma` to that box.
pub fn resolvent_hinge_conjugate(v: &DenseVector, sigma: f64) -> Result<DenseVector> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter {
            name: "sigma",
            message: format!("dual step must be positive, got {sigma}"),
        });
    }
    Ok(DenseVector::new(v.iter().map(|&x| (x - sigma).clamp(-1.0, 0.0)).collect()))
}

/// Exact l1-regularized SVM objective
/// `sum_i max(0, 1 - phi_i (w^T theta_i + b)) + delta * ||w||_1`,
/// used for diagnostics and divergence detection only.
pub fn objective_value(w: &DenseVector, b: f64, dataset: &SvmDataset, delta: f64) -> f64 {
    let margins = dataset.margins(w, b);
    objective_from_margins(margins.as_slice(), w, delta)
}

/// Same objective, with the signed margins `phi_i (w^T theta_i + b)` already
/// available (e.g. from a cached design-matrix image).
pub fn objective_from_margins(margins: &[f64], w: &DenseVector, delta: f64) -> f64 {
    let hinge: f64 = margins.iter().map(|&m| (1.0 - m).max(0.0)).sum();
    let l1: f64 = w.iter().map(|x| x.abs()).sum();
    hinge + delta * l1
}
