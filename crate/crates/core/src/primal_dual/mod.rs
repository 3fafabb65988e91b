//! Primal-dual machinery: the block metric, the Chambolle-Pock step, the
//! Gauss-Seidel resolvent pair, the Lyapunov diagnostic, and the full
//! primal-dual solver loop with recursive operator-image caching.
//!
//! The underlying inclusion couples a primal operator A, a dual operator
//! B^{-1}, and a bounded linear map L through the block operator
//! `[[A, L*], [-L, B^{-1}]]`; convergence is measured in the metric
//! `M = [[I, -tau L*], [-tau L, (tau/sigma) I]]`, strictly positive whenever
//! `sigma tau ||L||^2 < 1`.

mod runner;

pub use runner::{
    run_pd_dwifob, EvalMode, PdDwifobConfig, PdIterationView, PdRunOptions, PdRunResult,
};

use crate::error::{Error, Result};
use crate::linalg::{DenseVector, OperatorHandle};
use crate::operators::{CocoerciveOperator, ResolventOperator};

/// A primal-dual pair (x, mu).
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalDualPoint {
    pub x: DenseVector,
    pub mu: DenseVector,
}

impl PrimalDualPoint {
    pub fn new(x: DenseVector, mu: DenseVector) -> Self {
        Self { x, mu }
    }

    pub fn zeros(primal_dim: usize, dual_dim: usize) -> Self {
        Self { x: DenseVector::zeros(primal_dim), mu: DenseVector::zeros(dual_dim) }
    }

    pub fn constant(primal_dim: usize, dual_dim: usize, value: f64) -> Self {
        Self {
            x: DenseVector::constant(primal_dim, value),
            mu: DenseVector::constant(dual_dim, value),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.mu.is_finite()
    }
}

/// The primal-dual metric; construction enforces strict positivity.
#[derive(Clone)]
pub struct PdMetric {
    tau: f64,
    sigma: f64,
    l: OperatorHandle,
    norm_l: f64,
}

impl PdMetric {
    pub fn new(tau: f64, sigma: f64, l: OperatorHandle, norm_l: f64) -> Result<Self> {
        if !(tau > 0.0) || !(sigma > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tau/sigma",
                message: format!("step sizes must be positive, got tau={tau}, sigma={sigma}"),
            });
        }
        if !(norm_l >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "norm_l",
                message: format!("operator norm must be nonnegative, got {norm_l}"),
            });
        }
        let product = sigma * tau * norm_l * norm_l;
        if !(product < 1.0) {
            return Err(Error::InvalidParameter {
                name: "sigma*tau*||L||^2",
                message: format!("must be < 1 for a strictly positive metric, got {product}"),
            });
        }
        Ok(Self { tau, sigma, l, norm_l })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn operator(&self) -> &OperatorHandle {
        &self.l
    }

    pub fn norm_l(&self) -> f64 {
        self.norm_l
    }

    /// sigma * tau * ||L||^2, strictly below one by construction.
    pub fn contraction_product(&self) -> f64 {
        self.sigma * self.tau * self.norm_l * self.norm_l
    }

    /// Metric norm square given the precomputed image `L u_x`; may come out
    /// slightly negative under cached-image drift, callers clamp.
    pub fn norm_sq_with_image(
        &self,
        u_x: &DenseVector,
        u_mu: &DenseVector,
        l_u_x: &DenseVector,
    ) -> f64 {
        pd_metric_norm_sq(u_x, u_mu, l_u_x, self.tau, self.sigma)
    }

    /// Metric norm square with a fresh operator application.
    pub fn norm_sq_direct(&self, u_x: &DenseVector, u_mu: &DenseVector) -> f64 {
        let l_u_x = self.l.forward(u_x);
        pd_metric_norm_sq(u_x, u_mu, &l_u_x, self.tau, self.sigma)
    }

    /// Metric distance square between two points, fresh applications.
    pub fn distance_sq_direct(&self, a: &PrimalDualPoint, b: &PrimalDualPoint) -> f64 {
        self.norm_sq_direct(&a.x.sub(&b.x), &a.mu.sub(&b.mu)).max(0.0)
    }
}

impl std::fmt::Debug for PdMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PdMetric")
            .field("tau", &self.tau)
            .field("sigma", &self.sigma)
            .field("norm_l", &self.norm_l)
            .finish()
    }
}

/// The block-metric norm square evaluated without applying the operator:
/// `||u_x||^2 + (tau/sigma) ||u_mu||^2 - 2 tau <u_mu, L u_x>`.
pub fn pd_metric_norm_sq(
    u_x: &DenseVector,
    u_mu: &DenseVector,
    l_u_x: &DenseVector,
    tau: f64,
    sigma: f64,
) -> f64 {
    u_x.norm_sq() + (tau / sigma) * u_mu.norm_sq() - 2.0 * tau * u_mu.dot(l_u_x)
}

/// A problem in primal-dual form: resolvents of A and B^{-1}, the coupling
/// operator, and an optional cocoercive forward term on the primal block.
#[derive(Clone)]
pub struct PdProblem {
    pub l: OperatorHandle,
    /// `(v, tau) -> J_{tau A}(v)`.
    pub primal_resolvent: ResolventOperator,
    /// `(v, sigma) -> J_{sigma B^{-1}}(v)`.
    pub dual_resolvent: ResolventOperator,
    /// Cocoercive forward operator on the primal block; `None` means zero.
    pub forward: Option<CocoerciveOperator>,
}

impl PdProblem {
    pub fn beta(&self) -> f64 {
        self.forward.as_ref().map(|c| c.beta()).unwrap_or(0.0)
    }

    pub fn primal_dim(&self) -> usize {
        self.l.domain_dim()
    }

    pub fn dual_dim(&self) -> usize {
        self.l.range_dim()
    }
}

/// `2 a - b` componentwise; shared by every code path that forms the
/// reflected point so their float routes agree bitwise.
pub(crate) fn reflect(a: &DenseVector, b: &DenseVector) -> DenseVector {
    debug_assert_eq!(a.dim(), b.dim());
    DenseVector::new(a.iter().zip(b.iter()).map(|(x, y)| 2.0 * x - y).collect())
}

/// The Gauss-Seidel resolvent pair
/// `p_x = J_{tau A}(x - tau L* mu - tau C x)`,
/// `p_mu = J_{sigma B^{-1}}(mu + sigma L (2 p_x - x))`,
/// which is exactly the `(M + tau Ablk)^{-1} (M - tau Cblk)` evaluation of the
/// block inclusion under the primal-dual metric.
pub fn pd_resolvent_pair(
    z_hat: &PrimalDualPoint,
    forward: Option<&CocoerciveOperator>,
    problem_primal: &ResolventOperator,
    problem_dual: &ResolventOperator,
    metric: &PdMetric,
) -> (DenseVector, DenseVector) {
    let tau = metric.tau();
    let sigma = metric.sigma();
    let adj = metric.operator().adjoint(&z_hat.mu);
    let mut v1 = z_hat.x.axpy(-tau, &adj);
    if let Some(c) = forward {
        v1.axpy_in_place(-tau, &c.evaluate(&z_hat.x));
    }
    let p_x = problem_primal.evaluate(&v1, tau);
    let reflected = reflect(&p_x, &z_hat.x);
    let v2 = z_hat.mu.axpy(sigma, &metric.operator().forward(&reflected));
    let p_mu = problem_dual.evaluate(&v2, sigma);
    (p_x, p_mu)
}

/// One Chambolle-Pock iteration:
/// `x+ = J_{tau A}(x - tau L* mu)`, `mu+ = J_{sigma B^{-1}}(mu + sigma L (2 x+ - x))`.
pub fn cp_step(
    z: &PrimalDualPoint,
    primal_resolvent: &ResolventOperator,
    dual_resolvent: &ResolventOperator,
    metric: &PdMetric,
) -> PrimalDualPoint {
    let (x, mu) = pd_resolvent_pair(z, None, primal_resolvent, dual_resolvent, metric);
    PrimalDualPoint::new(x, mu)
}

/// [`cp_step`] that additionally tracks `L x` across iterations without an
/// extra operator application, recovering `L x+ = (L(2x+ - x) + L x) / 2`
/// from the image already computed inside the dual update. Benchmark loops
/// use this to price convergence diagnostics fairly.
pub fn cp_step_with_image(
    z: &PrimalDualPoint,
    l_x: &DenseVector,
    primal_resolvent: &ResolventOperator,
    dual_resolvent: &ResolventOperator,
    metric: &PdMetric,
) -> (PrimalDualPoint, DenseVector) {
    let tau = metric.tau();
    let sigma = metric.sigma();
    let adj = metric.operator().adjoint(&z.mu);
    let v1 = z.x.axpy(-tau, &adj);
    let p_x = primal_resolvent.evaluate(&v1, tau);
    let reflected = reflect(&p_x, &z.x);
    let l_reflected = metric.operator().forward(&reflected);
    let v2 = z.mu.axpy(sigma, &l_reflected);
    let p_mu = dual_resolvent.evaluate(&v2, sigma);
    let l_x_next =
        DenseVector::new(l_reflected.iter().zip(l_x.iter()).map(|(a, b)| 0.5 * (a + b)).collect());
    (PrimalDualPoint::new(p_x, p_mu), l_x_next)
}

/// The monitored quantity
/// `V_n = ||z_{n+1} - z*||_M^2
///        + lambda (2 - lambda) || p - z + (lambda - 1)/(2 - lambda) u ||_M^2`,
/// evaluated with direct operator applications. Non-increasing along exact
/// runs; cached-image runs may violate it through accumulated error.
#[allow(clippy::too_many_arguments)]
pub fn lyapunov_v(
    z_next: &PrimalDualPoint,
    p: &PrimalDualPoint,
    z: &PrimalDualPoint,
    u: &PrimalDualPoint,
    reference: &PrimalDualPoint,
    lambda: f64,
    metric: &PdMetric,
) -> Result<f64> {
    if lambda == 2.0 {
        return Err(Error::InvalidParameter {
            name: "lambda",
            message: "inner coefficient (lambda - 1)/(2 - lambda) undefined at lambda = 2".into(),
        });
    }
    let first = metric
        .norm_sq_direct(&z_next.x.sub(&reference.x), &z_next.mu.sub(&reference.mu))
        .max(0.0);
    let coef = (lambda - 1.0) / (2.0 - lambda);
    let wx = if coef == 0.0 { p.x.sub(&z.x) } else { p.x.sub(&z.x).axpy(coef, &u.x) };
    let wmu = if coef == 0.0 { p.mu.sub(&z.mu) } else { p.mu.sub(&z.mu).axpy(coef, &u.mu) };
    let second = metric.norm_sq_direct(&wx, &wmu).max(0.0);
    Ok(first + lambda * (2.0 - lambda) * second)
}
