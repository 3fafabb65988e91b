//! The dynamically weighted inertial forward-backward scheme: deviations are
//! affine combinations of recent iterates, weighted by a regularized
//! residual least squares and rescaled onto the deviation budget.
//!
//! Residual convention for this scheme: `r_j = x_{j+1} - y_j`, stored with
//! snapshot `x_{j+1}` (the iterate entering the linear combination).

use crate::error::Result;
use crate::fb::{
    run_fb_with_deviations, Deviation, DeviationContext, DeviationPolicy, FbRunOptions,
    FbRunResult, Metric, ParameterSchedule,
};
use crate::linalg::{DenseVector, ExtrapolationWeights};
use crate::anderson::ResidualHistory;
use crate::operators::{CocoerciveOperator, ResolventOperator};

/// Configuration of the deviation scheme.
#[derive(Debug, Clone)]
pub struct DwifobConfig {
    /// History depth m >= 1; the window holds up to m + 1 pairs.
    pub memory: usize,
    /// Tikhonov regularization of the inner least squares.
    pub xi: f64,
    /// The scaling regularizer in the deviation rescale denominator.
    /// Distinct from the parameter-bound margin epsilon; experiments use 0.
    pub eps_scale: f64,
}

impl DwifobConfig {
    pub fn new(memory: usize, xi: f64) -> Self {
        Self { memory, xi, eps_scale: 0.0 }
    }
}

/// The unscaled candidate deviation
/// `u_hat_{n+1} = x_{n+1} - sum_i alpha_i x_{n - m_n + i + 1}`,
/// with weights from the history's least squares. A degenerate solve yields
/// the zero candidate (the fallback weights select the latest snapshot,
/// which is `x_{n+1}` itself).
pub fn dwifob_candidate(
    history: &ResidualHistory,
    x_next: &DenseVector,
    xi: f64,
) -> (DenseVector, ExtrapolationWeights) {
    let weights = history.solve_weights(xi);
    let combo = DenseVector::combination(&weights.alpha, history.snapshots());
    (x_next.sub(&combo), weights)
}

/// Rescales a candidate onto the budget:
/// `u = zeta |l| u_hat / (eps_scale + ||u_hat||_M)`.
///
/// With `eps_scale = 0` and a vanishing candidate norm the quotient is
/// undefined; the zero deviation is returned instead. The deviation carries
/// its metric norm in the algebraic form `zeta^2 l^2 t^2` with
/// `t = ||u_hat||_M / (eps_scale + ||u_hat||_M) <= 1`, which keeps the norm
/// condition exact in floating point.
pub fn scale_deviation(
    candidate: DenseVector,
    budget_sq: f64,
    zeta: f64,
    eps_scale: f64,
    metric: &dyn Metric,
) -> Deviation {
    debug_assert!(budget_sq >= 0.0);
    let norm_m = metric.norm_sq(&candidate).max(0.0).sqrt();
    scale_deviation_with_norm(candidate, norm_m, budget_sq, zeta, eps_scale)
}

/// Same as [`scale_deviation`] with the candidate's metric norm already
/// known (e.g. from cached operator images).
pub fn scale_deviation_with_norm(
    candidate: DenseVector,
    candidate_norm_m: f64,
    budget_sq: f64,
    zeta: f64,
    eps_scale: f64,
) -> Deviation {
    let denom = eps_scale + candidate_norm_m;
    if denom == 0.0 || zeta == 0.0 || budget_sq == 0.0 {
        return Deviation::zero(candidate.dim());
    }
    let ell = budget_sq.sqrt();
    let factor = zeta * ell / denom;
    let t = candidate_norm_m / denom;
    let norm_sq = zeta * zeta * budget_sq * (t * t);
    Deviation { vector: candidate.scale(factor), norm_m_sq: Some(norm_sq), is_zero: false }
}

/// Deviation policy implementing the scheme: push the residual
/// `r_n = x_{n+1} - y_n` with snapshot `x_{n+1}`, take the weighted-history
/// candidate, and rescale it onto the budget.
pub struct DwifobPolicy {
    config: DwifobConfig,
    history: ResidualHistory,
    /// Set when the most recent least squares fell back degenerately.
    pub last_degenerate: bool,
}

impl DwifobPolicy {
    pub fn new(config: DwifobConfig) -> Self {
        let history = ResidualHistory::new(config.memory);
        Self { config, history, last_degenerate: false }
    }
}

impl DeviationPolicy for DwifobPolicy {
    fn propose(&mut self, ctx: &DeviationContext<'_>) -> Deviation {
        let residual = ctx.x_next.sub(ctx.y);
        self.history
            .push(residual, ctx.x_next.clone())
            .expect("history dimensions fixed per run");
        if ctx.zeta == 0.0 {
            // Deviations disabled this iteration; keep the history current
            // but skip the solve.
            self.last_degenerate = false;
            return Deviation::zero(ctx.x_next.dim());
        }
        let (candidate, weights) = dwifob_candidate(&self.history, ctx.x_next, self.config.xi);
        self.last_degenerate = weights.degenerate;
        scale_deviation(candidate, ctx.budget_sq, ctx.zeta, self.config.eps_scale, ctx.metric)
    }
}

/// Runs the full scheme on a problem given by its resolvent and forward
/// operator. The norm condition holds at every iteration by construction of
/// the scaling; the underlying engine asserts it in debug builds.
pub fn run_dwifob(
    resolvent: &ResolventOperator,
    forward: &CocoerciveOperator,
    x0: DenseVector,
    config: DwifobConfig,
    schedule: &dyn ParameterSchedule,
    metric: &dyn Metric,
    options: FbRunOptions<'_>,
) -> Result<FbRunResult> {
    let mut policy = DwifobPolicy::new(config);
    run_fb_with_deviations(resolvent, forward, x0, &mut policy, schedule, metric, options)
}
