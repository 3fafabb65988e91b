//! The forward-backward engine with deviations.
//!
//! Each iteration takes a resolvent step from the extrapolated point
//! `y_n = x_n + u_n`, relaxes it into `x_{n+1}`, and then admits a deviation
//! `u_{n+1}` whose metric norm is capped by the iteration-dependent budget
//!
//! ```text
//! l_n^2 = lambda_n (4 - 2 lambda_n - gamma_n beta)(4 - 2 lambda_{n+1} - gamma_{n+1} beta)
//!         / (4 lambda_{n+1})
//!         * || p_n - x_n + (2 lambda_n + gamma_n beta - 2)/(4 - 2 lambda_n - gamma_n beta) u_n ||_M^2
//! ```
//!
//! Deviations are proposed by a pluggable policy; the engine enforces
//! `||u_{n+1}||_M^2 <= zeta_n^2 l_n^2` no matter what the policy returns.

use crate::error::{Error, Result};
use crate::linalg::{DenseVector, OperatorHandle};
use crate::operators::{CocoerciveOperator, ResolventOperator};

/// Per-iteration parameters. The engine reads one step ahead
/// (`gamma(n + 1)`, `lambda(n + 1)`) when evaluating the deviation budget.
pub trait ParameterSchedule {
    /// Margin of the parameter bounds; must lie in (0, min(1, 4/(3 + beta))).
    fn epsilon(&self) -> f64;
    /// Cocoercivity parameter of the forward operator (0 for none).
    fn beta(&self) -> f64;
    fn gamma(&self, n: usize) -> f64;
    fn lambda(&self, n: usize) -> f64;
    fn zeta(&self, n: usize) -> f64;
}

/// Constant parameters, the configuration used by every experiment here.
#[derive(Debug, Clone)]
pub struct ConstantSchedule {
    pub epsilon: f64,
    pub beta: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub zeta: f64,
}

impl ConstantSchedule {
    /// Picks a valid margin automatically from the constants: the largest
    /// epsilon that keeps all three bounds satisfiable, halved for slack.
    pub fn with_auto_epsilon(gamma: f64, lambda: f64, zeta: f64, beta: f64) -> Self {
        let cap = 1f64.min(4.0 / (3.0 + beta));
        let mut eps = cap
            .min(1.0 - zeta)
            .min(gamma)
            .min(2.0 * (2.0 - gamma * beta / 2.0 - lambda))
            .min(lambda);
        if beta > 0.0 {
            eps = eps.min((4.0 - gamma * beta) / 3.0);
        }
        // Stay strictly inside the open interval (0, cap); infeasible
        // constants produce a nonpositive value that validation flags.
        let epsilon = (eps * 0.5).min(cap * 0.999_999);
        Self { epsilon, beta, gamma, lambda, zeta }
    }
}

impl ParameterSchedule for ConstantSchedule {
    fn epsilon(&self) -> f64 {
        self.epsilon
    }
    fn beta(&self) -> f64 {
        self.beta
    }
    fn gamma(&self, _n: usize) -> f64 {
        self.gamma
    }
    fn lambda(&self, _n: usize) -> f64 {
        self.lambda
    }
    fn zeta(&self, _n: usize) -> f64 {
        self.zeta
    }
}

/// One bound violation found by [`validate_params`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterViolation {
    /// Iteration index, or `None` for the epsilon range itself.
    pub n: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for ParameterViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.n {
            Some(n) => write!(f, "n = {}: {}", n, self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

/// Checks the parameter bounds for `n = 0..=horizon`:
/// `0 <= zeta_n <= 1 - eps`, `eps <= gamma_n <= (4 - 3 eps)/beta`
/// (upper bound vacuous for `beta = 0`), and
/// `eps <= lambda_n <= 2 - gamma_n beta / 2 - eps / 2`.
pub fn validate_params(
    schedule: &dyn ParameterSchedule,
    horizon: usize,
) -> Vec<ParameterViolation> {
    let mut violations = Vec::new();
    let eps = schedule.epsilon();
    let beta = schedule.beta();
    let eps_cap = 1f64.min(4.0 / (3.0 + beta));
    if !(eps > 0.0) || eps >= eps_cap {
        violations.push(ParameterViolation {
            n: None,
            message: format!("epsilon = {eps} outside (0, min(1, 4/(3 + beta))) = (0, {eps_cap})"),
        });
    }
    if beta < 0.0 {
        violations.push(ParameterViolation {
            n: None,
            message: format!("beta = {beta} must be nonnegative"),
        });
    }
    for n in 0..=horizon {
        let zeta = schedule.zeta(n);
        let gamma = schedule.gamma(n);
        let lambda = schedule.lambda(n);
        if !(0.0..=1.0 - eps).contains(&zeta) {
            violations.push(ParameterViolation {
                n: Some(n),
                message: format!("zeta = {zeta} outside [0, 1 - eps] = [0, {}]", 1.0 - eps),
            });
        }
        let gamma_hi = if beta > 0.0 { (4.0 - 3.0 * eps) / beta } else { f64::INFINITY };
        if !(gamma >= eps && gamma <= gamma_hi) {
            violations.push(ParameterViolation {
                n: Some(n),
                message: format!("gamma = {gamma} outside [eps, (4 - 3 eps)/beta] = [{eps}, {gamma_hi}]"),
            });
        }
        let lambda_hi = 2.0 - gamma * beta / 2.0 - eps / 2.0;
        if !(lambda >= eps && lambda <= lambda_hi) {
            violations.push(ParameterViolation {
                n: Some(n),
                message: format!("lambda = {lambda} outside [eps, {lambda_hi}]"),
            });
        }
    }
    violations
}

/// Metric access: inner products and squared norms only. Engines never need
/// the raw operator `M`, only these two evaluations.
pub trait Metric {
    fn inner(&self, u: &DenseVector, v: &DenseVector) -> f64;
    fn norm_sq(&self, u: &DenseVector) -> f64;
}

/// The Euclidean metric (M = I).
#[derive(Debug, Clone, Default)]
pub struct EuclideanMetric;

impl Metric for EuclideanMetric {
    fn inner(&self, u: &DenseVector, v: &DenseVector) -> f64 {
        u.dot(v)
    }
    fn norm_sq(&self, u: &DenseVector) -> f64 {
        u.dot(u)
    }
}

/// Metric induced by an explicit strongly positive operator M.
#[derive(Clone)]
pub struct OperatorMetric {
    m: OperatorHandle,
}

impl OperatorMetric {
    pub fn new(m: OperatorHandle) -> Self {
        Self { m }
    }
}

impl Metric for OperatorMetric {
    fn inner(&self, u: &DenseVector, v: &DenseVector) -> f64 {
        u.dot(&self.m.forward(v))
    }
    fn norm_sq(&self, u: &DenseVector) -> f64 {
        self.inner(u, u)
    }
}

/// Samples the metric on seeded vectors and reports the smallest observed
/// ratio `||u||_M^2 / ||u||^2` and the largest symmetry defect. A strongly
/// positive, self-adjoint metric keeps the first positive and the second
/// near zero.
pub fn sample_metric_positivity(
    metric: &dyn Metric,
    dim: usize,
    samples: usize,
    seed: u64,
) -> (f64, f64) {
    let mut rng = crate::util::SplitMix64::new(seed);
    let mut min_ratio = f64::INFINITY;
    let mut max_asym: f64 = 0.0;
    for _ in 0..samples {
        let u = DenseVector::new((0..dim).map(|_| rng.uniform(-1.0, 1.0)).collect());
        let v = DenseVector::new((0..dim).map(|_| rng.uniform(-1.0, 1.0)).collect());
        let nsq = u.norm_sq();
        if nsq > 0.0 {
            min_ratio = min_ratio.min(metric.norm_sq(&u) / nsq);
        }
        let asym = (metric.inner(&u, &v) - metric.inner(&v, &u)).abs()
            / (1.0 + u.norm() * v.norm());
        max_asym = max_asym.max(asym);
    }
    (min_ratio, max_asym)
}

/// State after iteration n: `y_n = x_n + u_n` always holds.
#[derive(Debug, Clone)]
pub struct FbState {
    pub n: usize,
    pub x: DenseVector,
    pub y: DenseVector,
    pub u: DenseVector,
    /// Resolvent point of the iteration that produced this state (p_{n-1});
    /// zero-initialized at n = 0.
    pub p: DenseVector,
}

/// A deviation candidate. `norm_m_sq` may carry the proposer's algebraically
/// known metric norm of the vector (e.g. a rescaled direction whose norm is
/// known exactly); the engine then avoids recomputing it. `is_zero` marks an
/// exactly zero vector.
#[derive(Debug, Clone)]
pub struct Deviation {
    pub vector: DenseVector,
    pub norm_m_sq: Option<f64>,
    pub is_zero: bool,
}

impl Deviation {
    pub fn zero(dim: usize) -> Self {
        Self { vector: DenseVector::zeros(dim), norm_m_sq: Some(0.0), is_zero: true }
    }
}

/// Everything a policy may look at when proposing the next deviation.
pub struct DeviationContext<'a> {
    pub n: usize,
    pub x: &'a DenseVector,
    pub x_next: &'a DenseVector,
    pub y: &'a DenseVector,
    pub p: &'a DenseVector,
    pub u: &'a DenseVector,
    /// The budget l_n^2 (nonnegative).
    pub budget_sq: f64,
    pub zeta: f64,
    pub metric: &'a dyn Metric,
}

/// Proposes deviation candidates. The engine, not the policy, guarantees the
/// norm condition: any candidate exceeding the budget is scaled back onto it.
pub trait DeviationPolicy {
    fn propose(&mut self, ctx: &DeviationContext<'_>) -> Deviation;
}

/// Always returns zero deviations: the engine reduces to plain relaxed
/// forward-backward splitting.
#[derive(Debug, Clone, Default)]
pub struct ZeroDeviations;

impl DeviationPolicy for ZeroDeviations {
    fn propose(&mut self, ctx: &DeviationContext<'_>) -> Deviation {
        Deviation::zero(ctx.x.dim())
    }
}

/// Momentum candidate `x_{n+1} - x_n`; the engine caps it to the budget.
#[derive(Debug, Clone, Default)]
pub struct MomentumPolicy;

impl DeviationPolicy for MomentumPolicy {
    fn propose(&mut self, ctx: &DeviationContext<'_>) -> Deviation {
        let dir = ctx.x_next.sub(ctx.x);
        if dir.as_slice().iter().all(|&v| v == 0.0) {
            return Deviation::zero(dir.dim());
        }
        Deviation { vector: dir, norm_m_sq: None, is_zero: false }
    }
}

/// One forward-backward step: `p_n = (M + gamma A)^{-1}(M - gamma C)(y_n)`
/// followed by the relaxation `x_{n+1} = x_n + lambda (p_n - y_n)`.
///
/// The resolvent must implement the M-composed evaluation
/// `w -> (M + gamma A)^{-1}(M w)` for the metric in use, and the forward
/// operator must return the M-preconditioned image of C. For the Euclidean
/// metric these are the ordinary resolvent and the operator itself.
pub fn fb_step(
    state: &FbState,
    resolvent: &ResolventOperator,
    forward: &CocoerciveOperator,
    gamma_n: f64,
    lambda_n: f64,
) -> (DenseVector, DenseVector) {
    let cy = forward.evaluate(&state.y);
    let p = resolvent.evaluate(&state.y.axpy(-gamma_n, &cy), gamma_n);
    let x_next = state.x.axpy(lambda_n, &p.sub(&state.y));
    (p, x_next)
}

/// Evaluates the squared deviation budget `l_n^2`. Tiny negative floating
/// results are clamped to zero; parameter combinations that void the formula
/// (`4 - 2 lambda - gamma beta <= 0`) are rejected.
pub fn deviation_budget(
    p: &DenseVector,
    x: &DenseVector,
    u: &DenseVector,
    metric: &dyn Metric,
    gamma_n: f64,
    gamma_next: f64,
    lambda_n: f64,
    lambda_next: f64,
    beta: f64,
) -> Result<f64> {
    let denom_n = 4.0 - 2.0 * lambda_n - gamma_n * beta;
    let denom_next = 4.0 - 2.0 * lambda_next - gamma_next * beta;
    if !(denom_n > 0.0) || !(denom_next > 0.0) || !(lambda_next > 0.0) {
        return Err(Error::InvalidParameter {
            name: "lambda/gamma/beta",
            message: format!(
                "budget undefined: 4 - 2 lambda - gamma beta must stay positive \
                 (got {denom_n} at n, {denom_next} at n+1)"
            ),
        });
    }
    let lead = lambda_n * denom_n * denom_next / (4.0 * lambda_next);
    let coef = (2.0 * lambda_n + gamma_n * beta - 2.0) / denom_n;
    let inner = if coef == 0.0 { p.sub(x) } else { p.sub(x).axpy(coef, u) };
    Ok((lead * metric.norm_sq(&inner)).max(0.0))
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// The caller's stopping rule fired.
    Converged,
    /// The iteration cap was reached first.
    MaxIters,
    /// The residual blew past the divergence threshold (acceleration runs).
    Diverged,
    /// An iterate became non-finite.
    NanAbort,
}

/// Options for [`run_fb_with_deviations`].
pub struct FbRunOptions<'a> {
    pub max_iters: usize,
    /// Called after each iteration with the new state and the iteration's
    /// budget/deviation diagnostics; returning `true` stops the run with
    /// status `Converged`.
    pub stop: Option<&'a mut dyn FnMut(&FbState, &FbDiagnostics) -> bool>,
    /// Collect the full state trace (small problems only).
    pub collect_trace: bool,
}

impl Default for FbRunOptions<'_> {
    fn default() -> Self {
        Self { max_iters: 1000, stop: None, collect_trace: false }
    }
}

/// Per-iteration diagnostics handed to the stopping callback.
#[derive(Debug, Clone, Copy)]
pub struct FbDiagnostics {
    pub budget_sq: f64,
    pub deviation_norm_m_sq: f64,
    pub zeta: f64,
}

/// Result of a deviation-engine run.
#[derive(Debug)]
pub struct FbRunResult {
    pub state: FbState,
    pub status: RunStatus,
    pub iterations: usize,
    pub trace: Vec<FbState>,
}

/// Runs the full engine. After the engine admits each deviation the norm
/// condition `||u_{n+1}||_M^2 <= zeta_n^2 l_n^2` holds; this is asserted in
/// debug builds.
pub fn run_fb_with_deviations(
    resolvent: &ResolventOperator,
    forward: &CocoerciveOperator,
    x0: DenseVector,
    policy: &mut dyn DeviationPolicy,
    schedule: &dyn ParameterSchedule,
    metric: &dyn Metric,
    mut options: FbRunOptions<'_>,
) -> Result<FbRunResult> {
    let dim = x0.dim();
    let mut state = FbState {
        n: 0,
        y: x0.clone(),
        u: DenseVector::zeros(dim),
        p: DenseVector::zeros(dim),
        x: x0,
    };
    let beta = schedule.beta();
    let mut trace = Vec::new();
    if options.collect_trace {
        trace.push(state.clone());
    }

    for n in 0..options.max_iters {
        let gamma_n = schedule.gamma(n);
        let lambda_n = schedule.lambda(n);
        let zeta_n = schedule.zeta(n);
        let (p, x_next) = fb_step(&state, resolvent, forward, gamma_n, lambda_n);
        if !x_next.is_finite() {
            return Err(Error::NonFinite { iteration: n, context: "relaxed iterate" });
        }

        let budget_sq = deviation_budget(
            &p,
            &state.x,
            &state.u,
            metric,
            gamma_n,
            schedule.gamma(n + 1),
            lambda_n,
            schedule.lambda(n + 1),
            beta,
        )?;

        let ctx = DeviationContext {
            n,
            x: &state.x,
            x_next: &x_next,
            y: &state.y,
            p: &p,
            u: &state.u,
            budget_sq,
            zeta: zeta_n,
            metric,
        };
        let candidate = policy.propose(&ctx);
        let bound = zeta_n * zeta_n * budget_sq;
        let (u_next, u_norm_sq) = admit_deviation(candidate, bound, metric);
        debug_assert!(
            u_norm_sq <= bound + 1e-12,
            "norm condition violated: {u_norm_sq} > {bound}"
        );

        let y_next = x_next.add(&u_next);
        state = FbState { n: n + 1, x: x_next, y: y_next, u: u_next, p };
        if options.collect_trace {
            trace.push(state.clone());
        }
        let diag = FbDiagnostics { budget_sq, deviation_norm_m_sq: u_norm_sq, zeta: zeta_n };
        if let Some(stop) = options.stop.as_deref_mut() {
            if stop(&state, &diag) {
                let iterations = state.n;
                return Ok(FbRunResult { state, status: RunStatus::Converged, iterations, trace });
            }
        }
    }
    let iterations = state.n;
    Ok(FbRunResult { state, status: RunStatus::MaxIters, iterations, trace })
}

/// Enforces the norm condition on a candidate: zero stays zero, candidates
/// within budget pass through, anything else is scaled back onto the bound.
/// Returns the admitted deviation and its squared metric norm (the exact
/// bound value on the scaled branch, since the vector is constructed to sit
/// on it).
fn admit_deviation(
    candidate: Deviation,
    bound: f64,
    metric: &dyn Metric,
) -> (DenseVector, f64) {
    if candidate.is_zero || bound == 0.0 {
        let dim = candidate.vector.dim();
        return (DenseVector::zeros(dim), 0.0);
    }
    let norm_sq = candidate
        .norm_m_sq
        .unwrap_or_else(|| metric.norm_sq(&candidate.vector).max(0.0));
    if norm_sq <= bound {
        return (candidate.vector, norm_sq);
    }
    let scale = (bound / norm_sq).sqrt();
    (candidate.vector.scale(scale), bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{CocoerciveOperator, ResolventOperator};

    fn experiment_schedule() -> ConstantSchedule {
        ConstantSchedule::with_auto_epsilon(1.0, 1.0, 0.99, 0.0)
    }

    #[test]
    fn experimental_parameters_validate() {
        // zeta = 0.99, lambda = 1, beta = 0, gamma = tau.
        let s = ConstantSchedule { epsilon: 0.01, beta: 0.0, gamma: 1.0, lambda: 1.0, zeta: 0.99 };
        assert!(validate_params(&s, 100).is_empty());
        let auto = experiment_schedule();
        assert!(validate_params(&auto, 100).is_empty());
    }

    #[test]
    fn lambda_above_bound_is_flagged() {
        let s = ConstantSchedule { epsilon: 0.01, beta: 0.0, gamma: 1.0, lambda: 2.1, zeta: 0.5 };
        let v = validate_params(&s, 3);
        assert!(v.iter().any(|v| v.message.contains("lambda")));
    }

    #[test]
    fn zeta_equal_one_is_flagged() {
        let s = ConstantSchedule { epsilon: 0.01, beta: 0.0, gamma: 1.0, lambda: 1.0, zeta: 1.0 };
        let v = validate_params(&s, 3);
        assert!(v.iter().any(|v| v.message.contains("zeta")));
    }

    #[test]
    fn bad_epsilon_is_flagged() {
        let s = ConstantSchedule { epsilon: 0.0, beta: 0.0, gamma: 1.0, lambda: 1.0, zeta: 0.5 };
        let v = validate_params(&s, 0);
        assert!(v.iter().any(|v| v.n.is_none()));
    }

    #[test]
    fn budget_at_experimental_settings_is_plain_norm() {
        // lambda = lambda+ = 1, beta = 0: leading factor 1 and inner
        // coefficient 0, so the budget is exactly ||p - x||_M^2.
        let p = DenseVector::new(vec![2.0, -1.0]);
        let x = DenseVector::new(vec![0.5, 0.5]);
        let u = DenseVector::new(vec![10.0, 10.0]); // must not contribute
        let b = deviation_budget(&p, &x, &u, &EuclideanMetric, 1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(b, p.sub(&x).norm_sq());
    }

    #[test]
    fn budget_quarter_case() {
        // u = 0, lambda = lambda+ = 1.5, beta = 0: coefficient
        // 1.5 * 1 * 1 / 6 = 0.25 (verified by direct decimal evaluation).
        let p = DenseVector::new(vec![3.0]);
        let x = DenseVector::new(vec![1.0]);
        let u = DenseVector::zeros(1);
        let b = deviation_budget(&p, &x, &u, &EuclideanMetric, 0.7, 0.7, 1.5, 1.5, 0.0).unwrap();
        assert!((b - 0.25 * 4.0).abs() < 1e-14);
    }

    #[test]
    fn budget_rejects_vanishing_denominator() {
        let p = DenseVector::new(vec![1.0]);
        let x = DenseVector::zeros(1);
        let u = DenseVector::zeros(1);
        // lambda at the boundary 2 - gamma beta / 2 makes the factor vanish.
        let err = deviation_budget(&p, &x, &u, &EuclideanMetric, 1.0, 1.0, 2.0, 2.0, 0.0);
        assert!(err.is_err());
    }

    fn shrinkage_problem() -> (ResolventOperator, CocoerciveOperator) {
        // A = Id (so J_{gamma A} = 1/(1+gamma) scaling), C = 0: iterates
        // contract geometrically to the unique zero at the origin.
        let resolvent = ResolventOperator::new("scaling", |v: &DenseVector, g: f64| {
            v.scale(1.0 / (1.0 + g))
        });
        (resolvent, CocoerciveOperator::zero(2))
    }

    #[test]
    fn zero_policy_contracts_to_zero() {
        let (res, fwd) = shrinkage_problem();
        let schedule = experiment_schedule();
        let mut policy = ZeroDeviations;
        let run = run_fb_with_deviations(
            &res,
            &fwd,
            DenseVector::new(vec![4.0, -2.0]),
            &mut policy,
            &schedule,
            &EuclideanMetric,
            FbRunOptions { max_iters: 200, ..Default::default() },
        )
        .unwrap();
        assert_eq!(run.status, RunStatus::MaxIters);
        assert!(run.state.x.norm() < 1e-12);
    }

    #[test]
    fn fixed_point_is_stationary() {
        let (res, fwd) = shrinkage_problem();
        let schedule = experiment_schedule();
        let mut policy = MomentumPolicy;
        let run = run_fb_with_deviations(
            &res,
            &fwd,
            DenseVector::zeros(2),
            &mut policy,
            &schedule,
            &EuclideanMetric,
            FbRunOptions { max_iters: 50, collect_trace: true, ..Default::default() },
        )
        .unwrap();
        for s in &run.trace {
            assert_eq!(s.x.as_slice(), &[0.0, 0.0]);
        }
    }

    #[test]
    fn lambda_zero_keeps_x_fixed() {
        let (res, fwd) = shrinkage_problem();
        let state = FbState {
            n: 0,
            x: DenseVector::new(vec![1.0, 1.0]),
            y: DenseVector::new(vec![1.0, 1.0]),
            u: DenseVector::zeros(2),
            p: DenseVector::zeros(2),
        };
        let (_, x_next) = fb_step(&state, &res, &fwd, 1.0, 0.0);
        assert_eq!(x_next.as_slice(), state.x.as_slice());
    }

    #[test]
    fn identity_resolvent_returns_y() {
        let res = ResolventOperator::identity();
        let fwd = CocoerciveOperator::zero(2);
        let state = FbState {
            n: 0,
            x: DenseVector::new(vec![0.3, -0.7]),
            y: DenseVector::new(vec![0.3, -0.7]),
            u: DenseVector::zeros(2),
            p: DenseVector::zeros(2),
        };
        let (p, _) = fb_step(&state, &res, &fwd, 0.5, 1.0);
        assert_eq!(p.as_slice(), state.y.as_slice());
    }

    #[test]
    fn norm_condition_holds_for_aggressive_policy() {
        // A policy that proposes a huge vector must get capped.
        struct Huge;
        impl DeviationPolicy for Huge {
            fn propose(&mut self, ctx: &DeviationContext<'_>) -> Deviation {
                Deviation {
                    vector: DenseVector::constant(ctx.x.dim(), 1e6),
                    norm_m_sq: None,
                    is_zero: false,
                }
            }
        }
        let (res, fwd) = shrinkage_problem();
        let schedule = experiment_schedule();
        let mut policy = Huge;
        let mut worst: f64 = 0.0;
        let mut stop = |_: &FbState, d: &FbDiagnostics| {
            worst = worst.max(d.deviation_norm_m_sq - d.zeta * d.zeta * d.budget_sq);
            false
        };
        run_fb_with_deviations(
            &res,
            &fwd,
            DenseVector::new(vec![5.0, 5.0]),
            &mut policy,
            &schedule,
            &EuclideanMetric,
            FbRunOptions { max_iters: 100, stop: Some(&mut stop), ..Default::default() },
        )
        .unwrap();
        assert!(worst <= 1e-12, "worst slack violation {worst}");
    }

    #[test]
    fn y_equals_x_plus_u_along_the_run() {
        let (res, fwd) = shrinkage_problem();
        let schedule = experiment_schedule();
        let mut policy = MomentumPolicy;
        let run = run_fb_with_deviations(
            &res,
            &fwd,
            DenseVector::new(vec![2.0, 1.0]),
            &mut policy,
            &schedule,
            &EuclideanMetric,
            FbRunOptions { max_iters: 60, collect_trace: true, ..Default::default() },
        )
        .unwrap();
        for s in &run.trace {
            assert_eq!(s.y.as_slice(), s.x.add(&s.u).as_slice());
        }
    }

    #[test]
    fn zero_zeta_matches_plain_relaxed_fb_bitwise() {
        let (res, fwd) = shrinkage_problem();
        let schedule = ConstantSchedule::with_auto_epsilon(0.8, 1.3, 0.0, 0.0);
        let x0 = DenseVector::new(vec![3.0, -1.5]);
        let mut policy = MomentumPolicy; // irrelevant: zeta = 0 zeroes it
        let run = run_fb_with_deviations(
            &res,
            &fwd,
            x0.clone(),
            &mut policy,
            &schedule,
            &EuclideanMetric,
            FbRunOptions { max_iters: 40, collect_trace: true, ..Default::default() },
        )
        .unwrap();

        // Plain relaxed FB, identical arithmetic.
        let mut x = x0;
        for s in run.trace.iter().skip(1) {
            let cy = fwd.evaluate(&x);
            let p = res.evaluate(&x.axpy(-0.8, &cy), 0.8);
            x = x.axpy(1.3, &p.sub(&x));
            assert_eq!(s.x.as_slice(), x.as_slice());
        }
    }

    #[test]
    fn metric_positivity_sampler() {
        let (min_ratio, asym) = sample_metric_positivity(&EuclideanMetric, 5, 100, 3);
        assert!((min_ratio - 1.0).abs() < 1e-12);
        assert!(asym < 1e-15);
    }
}
