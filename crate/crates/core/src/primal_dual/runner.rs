//! The primal-dual solver loop with dynamically weighted inertial
//! deviations.
//!
//! Two evaluation modes are supported. In `Recursive` mode the operator L is
//! applied exactly once per iteration (to the primal resolvent point) and
//! its adjoint once (to the extrapolated dual point); every other required
//! image — of the relaxed iterate, the candidate deviation, and the
//! extrapolated point — is maintained by the linear update relations
//!
//! ```text
//! L x_{n+1}     = L x_n + lambda (L p_x - L xh)
//! L uhat_{n+1}  = L x_{n+1} - sum_i alpha_i L x_{n-m+i+1}
//! L xh_{n+1}    = L x_{n+1} + s L uhat_{n+1}
//! ```
//!
//! which costs one ring of dual-sized vectors (window + 3 live images).
//! All metric norms are then evaluated through the block formula without
//! touching L. In `Direct` mode every image and norm is recomputed from
//! scratch; this is slower but free of accumulated cache error.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::fb::{ConstantSchedule, ParameterSchedule, RunStatus};
use crate::linalg::{
    solve_extrapolation_weights_from_gram, DenseVector, GramWindow,
};
use crate::primal_dual::{pd_resolvent_pair, PdMetric, PdProblem, PrimalDualPoint};

/// How operator images and metric norms are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Recursive,
    Direct,
}

/// Deviation configuration for the primal-dual loop. The step-size pair
/// lives in the metric; `lambda` and `zeta` follow the engine's parameter
/// bounds with `gamma` pinned to `tau`.
#[derive(Debug, Clone)]
pub struct PdDwifobConfig {
    pub memory: usize,
    pub xi: f64,
    pub eps_scale: f64,
    pub lambda: f64,
    pub zeta: f64,
}

impl PdDwifobConfig {
    pub fn new(memory: usize, xi: f64) -> Self {
        Self { memory, xi, eps_scale: 0.0, lambda: 1.0, zeta: 0.99 }
    }

    /// The Chambolle-Pock regime: no deviations, unit relaxation.
    pub fn chambolle_pock() -> Self {
        Self { memory: 1, xi: 0.0, eps_scale: 0.0, lambda: 1.0, zeta: 0.0 }
    }

    pub(crate) fn schedule(&self, tau: f64, beta: f64) -> ConstantSchedule {
        ConstantSchedule::with_auto_epsilon(tau, self.lambda, self.zeta, beta)
    }
}

/// Per-iteration view handed to the observer. Index `n` is the iteration
/// that produced `x_{n+1}`; `l_x` is the image of the new iterate (cached in
/// recursive mode, freshly applied in direct mode).
pub struct PdIterationView<'a> {
    pub n: usize,
    pub x: &'a DenseVector,
    pub mu: &'a DenseVector,
    pub l_x: &'a DenseVector,
    pub p_x: &'a DenseVector,
    pub p_mu: &'a DenseVector,
    pub u_x: &'a DenseVector,
    pub u_mu: &'a DenseVector,
    /// Squared metric norm of the admitted deviation, in its algebraic form.
    pub deviation_norm_m_sq: f64,
    /// The squared budget l_n^2.
    pub budget_sq: f64,
    pub zeta: f64,
    pub lambda: f64,
    /// Lyapunov value; present when a reference point was supplied.
    pub v_n: Option<f64>,
    pub degenerate_ls: bool,
    /// Relative drift of the cached iterate image, on audit iterations.
    pub cache_drift: Option<f64>,
    pub metric: &'a PdMetric,
}

impl PdIterationView<'_> {
    /// Squared metric distance to a reference point whose primal image
    /// `L x_ref` has been precomputed. Uses the iterate image carried by the
    /// view, so it never applies the operator.
    pub fn distance_sq_to(&self, reference: &PrimalDualPoint, l_x_ref: &DenseVector) -> f64 {
        let dx = self.x.sub(&reference.x);
        let dmu = self.mu.sub(&reference.mu);
        let dlx = self.l_x.sub(l_x_ref);
        self.metric.norm_sq_with_image(&dx, &dmu, &dlx).max(0.0)
    }
}

/// Options for [`run_pd_dwifob`].
pub struct PdRunOptions<'a> {
    pub mode: EvalMode,
    pub max_iters: usize,
    /// Reference solution; enables the per-iteration Lyapunov value.
    pub reference: Option<&'a PrimalDualPoint>,
    /// Audit period for the recursive cache (`None` disables). Each audit
    /// applies L once more, so leave this off in timing runs.
    pub audit_every: Option<usize>,
    /// Drift level (relative) above which an audit raises the warning flag.
    pub drift_warn_threshold: f64,
    /// Called after every iteration; returning `true` stops the run with
    /// status `Converged`.
    pub observer: Option<&'a mut dyn FnMut(&PdIterationView<'_>) -> bool>,
}

impl Default for PdRunOptions<'_> {
    fn default() -> Self {
        Self {
            mode: EvalMode::Recursive,
            max_iters: 1000,
            reference: None,
            audit_every: None,
            drift_warn_threshold: 1e-6,
            observer: None,
        }
    }
}

/// Outcome of a primal-dual run.
#[derive(Debug)]
pub struct PdRunResult {
    pub point: PrimalDualPoint,
    pub status: RunStatus,
    pub iterations: usize,
    /// Largest relative drift seen by cache audits (0 when never audited).
    pub max_cache_drift: f64,
    /// Number of audits that exceeded the warning threshold.
    pub drift_warnings: usize,
}

/// Sliding window of primal-dual residual pairs, iterate snapshots, and (in
/// recursive mode) the snapshots' operator images, with the residual Gram
/// matrix maintained incrementally.
struct PdHistory {
    capacity: usize, // memory m; holds up to m + 1 entries
    res_x: VecDeque<DenseVector>,
    res_mu: VecDeque<DenseVector>,
    snap_x: VecDeque<DenseVector>,
    snap_mu: VecDeque<DenseVector>,
    snap_lx: VecDeque<DenseVector>,
    gram: GramWindow,
}

impl PdHistory {
    fn new(capacity: usize) -> Self {
        Self {
            capacity,
            res_x: VecDeque::new(),
            res_mu: VecDeque::new(),
            snap_x: VecDeque::new(),
            snap_mu: VecDeque::new(),
            snap_lx: VecDeque::new(),
            gram: GramWindow::new(),
        }
    }

    fn push(
        &mut self,
        res_x: DenseVector,
        res_mu: DenseVector,
        snap_x: DenseVector,
        snap_mu: DenseVector,
        snap_lx: Option<DenseVector>,
    ) {
        if self.res_x.len() == self.capacity + 1 {
            self.res_x.pop_front();
            self.res_mu.pop_front();
            self.snap_x.pop_front();
            self.snap_mu.pop_front();
            if !self.snap_lx.is_empty() {
                self.snap_lx.pop_front();
            }
            self.gram.evict_oldest();
        }
        let mut dots: Vec<f64> = self
            .res_x
            .iter()
            .zip(&self.res_mu)
            .map(|(rx, rmu)| rx.dot(&res_x) + rmu.dot(&res_mu))
            .collect();
        dots.push(res_x.dot(&res_x) + res_mu.dot(&res_mu));
        self.gram.push(&dots);
        self.res_x.push_back(res_x);
        self.res_mu.push_back(res_mu);
        self.snap_x.push_back(snap_x);
        self.snap_mu.push_back(snap_mu);
        if let Some(lx) = snap_lx {
            self.snap_lx.push_back(lx);
        }
    }
}

/// Runs the primal-dual scheme. Parameter bounds (with `gamma` pinned to
/// `tau`) are validated up front; the norm condition holds at every
/// iteration by construction of the deviation scaling.
pub fn run_pd_dwifob(
    problem: &PdProblem,
    config: &PdDwifobConfig,
    metric: &PdMetric,
    z0: PrimalDualPoint,
    mut options: PdRunOptions<'_>,
) -> Result<PdRunResult> {
    if config.memory < 1 {
        return Err(Error::InvalidParameter {
            name: "memory",
            message: "history depth must be at least 1".into(),
        });
    }
    let beta = problem.beta();
    let tau = metric.tau();
    let sigma = metric.sigma();
    let schedule = config.schedule(tau, beta);
    let violations = crate::fb::validate_params(&schedule, 1);
    if let Some(v) = violations.first() {
        return Err(Error::InvalidParameter {
            name: "schedule",
            message: format!("parameter bounds violated: {v}"),
        });
    }

    let recursive = options.mode == EvalMode::Recursive;
    let l = metric.operator().clone();

    let mut x = z0.x;
    let mut mu = z0.mu;
    let mut xh = x.clone();
    let mut muh = mu.clone();
    let mut ux = DenseVector::zeros(x.dim());
    let mut umu = DenseVector::zeros(mu.dim());
    let mut u_is_zero = true;
    // Live images (recursive mode): L x_n, L xh_n, L u_{x,n}.
    let mut lx = l.forward(&x);
    let mut lxh = lx.clone();
    let mut lux = DenseVector::zeros(mu.dim());

    let mut history = PdHistory::new(config.memory);
    let l_x_ref = options.reference.map(|r| l.forward(&r.x));

    let mut max_drift: f64 = 0.0;
    let mut drift_warnings = 0usize;

    for n in 0..options.max_iters {
        let lambda = schedule.lambda(n);
        let lambda_next = schedule.lambda(n + 1);
        let zeta = schedule.zeta(n);

        // Resolvent pair. Recursive mode fuses the evaluation to reuse the
        // fresh image L p_x; direct mode uses the plain pair.
        let (p_x, p_mu, lpx) = if recursive {
            let adj = l.adjoint(&muh);
            let mut v1 = xh.axpy(-tau, &adj);
            if let Some(c) = &problem.forward {
                v1.axpy_in_place(-tau, &c.evaluate(&xh));
            }
            let p_x = problem.primal_resolvent.evaluate(&v1, tau);
            let lpx = l.forward(&p_x);
            let v2 = DenseVector::new(
                muh.iter()
                    .zip(lpx.iter().zip(lxh.iter()))
                    .map(|(m, (lp, lh))| m + sigma * (2.0 * lp - lh))
                    .collect(),
            );
            let p_mu = problem.dual_resolvent.evaluate(&v2, sigma);
            (p_x, p_mu, Some(lpx))
        } else {
            let z_hat = PrimalDualPoint::new(xh.clone(), muh.clone());
            let (p_x, p_mu) = pd_resolvent_pair(
                &z_hat,
                problem.forward.as_ref(),
                &problem.primal_resolvent,
                &problem.dual_resolvent,
                metric,
            );
            (p_x, p_mu, None)
        };

        // Relaxation. At lambda = 1 with a zero deviation the update is
        // exactly the resolvent point; taking it directly keeps this regime
        // bitwise identical to the plain primal-dual iteration.
        let (x_next, mu_next) = if lambda == 1.0 && u_is_zero {
            (p_x.clone(), p_mu.clone())
        } else {
            (x.axpy(lambda, &p_x.sub(&xh)), mu.axpy(lambda, &p_mu.sub(&muh)))
        };
        if !x_next.is_finite() || !mu_next.is_finite() {
            return Err(Error::NonFinite { iteration: n, context: "primal-dual iterate" });
        }

        let lx_next = if recursive {
            let lpx = lpx.as_ref().expect("recursive mode computes L p_x");
            if lambda == 1.0 && u_is_zero {
                lpx.clone()
            } else {
                DenseVector::new(
                    lx.iter()
                        .zip(lpx.iter().zip(lxh.iter()))
                        .map(|(a, (lp, lh))| a + lambda * (lp - lh))
                        .collect(),
                )
            }
        } else {
            l.forward(&x_next)
        };

        // Budget l_n^2; with gamma pinned to tau.
        let denom = 4.0 - 2.0 * lambda - tau * beta;
        let denom_next = 4.0 - 2.0 * lambda_next - tau * beta;
        debug_assert!(denom > 0.0 && denom_next > 0.0);
        let lead = lambda * denom * denom_next / (4.0 * lambda_next);
        let coef = (2.0 * lambda + tau * beta - 2.0) / denom;
        let wx = if u_is_zero || coef == 0.0 { p_x.sub(&x) } else { p_x.sub(&x).axpy(coef, &ux) };
        let wmu =
            if u_is_zero || coef == 0.0 { p_mu.sub(&mu) } else { p_mu.sub(&mu).axpy(coef, &umu) };
        let w_norm_sq = if recursive {
            let lpx = lpx.as_ref().unwrap();
            let lwx = if u_is_zero || coef == 0.0 {
                lpx.sub(&lx)
            } else {
                lpx.sub(&lx).axpy(coef, &lux)
            };
            metric.norm_sq_with_image(&wx, &wmu, &lwx).max(0.0)
        } else {
            metric.norm_sq_direct(&wx, &wmu).max(0.0)
        };
        let budget_sq = (lead * w_norm_sq).max(0.0);

        // Push the residual pair r_n = (x_{n+1} - xh_n, mu_{n+1} - muh_n)
        // with snapshot (x_{n+1}, mu_{n+1}).
        history.push(
            x_next.sub(&xh),
            mu_next.sub(&muh),
            x_next.clone(),
            mu_next.clone(),
            if recursive { Some(lx_next.clone()) } else { None },
        );

        // Deviation. zeta = 0 disables it for this iteration (the history
        // stays current either way).
        let mut degenerate = false;
        let bound = zeta * zeta * budget_sq;
        let (u_next_x, u_next_mu, lu_next, u_norm_sq, u_next_zero) = if zeta == 0.0 {
            (
                DenseVector::zeros(x.dim()),
                DenseVector::zeros(mu.dim()),
                if recursive { Some(DenseVector::zeros(mu.dim())) } else { None },
                0.0,
                true,
            )
        } else {
            let weights = solve_extrapolation_weights_from_gram(&history.gram, config.xi);
            degenerate = weights.degenerate;
            let combo_x = DenseVector::combination(&weights.alpha, history.snap_x.iter());
            let combo_mu = DenseVector::combination(&weights.alpha, history.snap_mu.iter());
            let uhat_x = x_next.sub(&combo_x);
            let uhat_mu = mu_next.sub(&combo_mu);
            let (uhat_norm_sq, l_uhat) = if recursive {
                let combo_lx = DenseVector::combination(&weights.alpha, history.snap_lx.iter());
                let l_uhat = lx_next.sub(&combo_lx);
                (metric.norm_sq_with_image(&uhat_x, &uhat_mu, &l_uhat).max(0.0), Some(l_uhat))
            } else {
                (metric.norm_sq_direct(&uhat_x, &uhat_mu).max(0.0), None)
            };
            let uhat_norm = uhat_norm_sq.sqrt();
            let scale_denom = config.eps_scale + uhat_norm;
            if scale_denom == 0.0 || budget_sq == 0.0 {
                (
                    DenseVector::zeros(x.dim()),
                    DenseVector::zeros(mu.dim()),
                    if recursive { Some(DenseVector::zeros(mu.dim())) } else { None },
                    0.0,
                    true,
                )
            } else {
                let factor = zeta * budget_sq.sqrt() / scale_denom;
                let t = uhat_norm / scale_denom;
                let norm_sq = bound * (t * t);
                (
                    uhat_x.scale(factor),
                    uhat_mu.scale(factor),
                    l_uhat.map(|v| v.scale(factor)),
                    norm_sq,
                    false,
                )
            }
        };
        debug_assert!(
            u_norm_sq <= bound + 1e-12,
            "norm condition violated at n = {n}: {u_norm_sq} > {bound}"
        );

        // Lyapunov value against the reference, when available. The second
        // term reuses the budget's inner vector whenever the coefficients
        // coincide (always true for beta = 0).
        let v_n = match (&options.reference, &l_x_ref) {
            (Some(reference), Some(lref)) if lambda != 2.0 => {
                let dx = x_next.sub(&reference.x);
                let dmu = mu_next.sub(&reference.mu);
                let first = if recursive {
                    let dlx = lx_next.sub(lref);
                    metric.norm_sq_with_image(&dx, &dmu, &dlx).max(0.0)
                } else {
                    metric.norm_sq_direct(&dx, &dmu).max(0.0)
                };
                let coef_v = (lambda - 1.0) / (2.0 - lambda);
                let second = if coef_v == coef || u_is_zero {
                    w_norm_sq
                } else {
                    let vx = p_x.sub(&x).axpy(coef_v, &ux);
                    let vmu = p_mu.sub(&mu).axpy(coef_v, &umu);
                    if recursive {
                        let lpx = lpx.as_ref().unwrap();
                        let lvx = lpx.sub(&lx).axpy(coef_v, &lux);
                        metric.norm_sq_with_image(&vx, &vmu, &lvx).max(0.0)
                    } else {
                        metric.norm_sq_direct(&vx, &vmu).max(0.0)
                    }
                };
                Some(first + lambda * (2.0 - lambda) * second)
            }
            _ => None,
        };

        // Cache audit (recursive mode only).
        let cache_drift = match options.audit_every {
            Some(k) if recursive && k > 0 && (n + 1) % k == 0 => {
                let direct = l.forward(&x_next);
                let drift = lx_next.sub(&direct).norm() / (1.0 + direct.norm());
                max_drift = max_drift.max(drift);
                if drift > options.drift_warn_threshold {
                    drift_warnings += 1;
                }
                Some(drift)
            }
            _ => None,
        };

        // Extrapolated point for the next iteration.
        let (xh_next, muh_next, lxh_next) = if u_next_zero {
            (x_next.clone(), mu_next.clone(), if recursive { Some(lx_next.clone()) } else { None })
        } else {
            (
                x_next.add(&u_next_x),
                mu_next.add(&u_next_mu),
                if recursive {
                    Some(lx_next.add(lu_next.as_ref().unwrap()))
                } else {
                    None
                },
            )
        };

        let stop = {
            let view = PdIterationView {
                n,
                x: &x_next,
                mu: &mu_next,
                l_x: &lx_next,
                p_x: &p_x,
                p_mu: &p_mu,
                u_x: &u_next_x,
                u_mu: &u_next_mu,
                deviation_norm_m_sq: u_norm_sq,
                budget_sq,
                zeta,
                lambda,
                v_n,
                degenerate_ls: degenerate,
                cache_drift,
                metric,
            };
            options.observer.as_deref_mut().map(|f| f(&view)).unwrap_or(false)
        };

        x = x_next;
        mu = mu_next;
        xh = xh_next;
        muh = muh_next;
        ux = u_next_x;
        umu = u_next_mu;
        u_is_zero = u_next_zero;
        lx = lx_next;
        if recursive {
            lxh = lxh_next.unwrap();
            lux = lu_next.unwrap();
        }

        if stop {
            return Ok(PdRunResult {
                point: PrimalDualPoint::new(x, mu),
                status: RunStatus::Converged,
                iterations: n + 1,
                max_cache_drift: max_drift,
                drift_warnings,
            });
        }
    }
    let iterations = options.max_iters;
    Ok(PdRunResult {
        point: PrimalDualPoint::new(x, mu),
        status: RunStatus::MaxIters,
        iterations,
        max_cache_drift: max_drift,
        drift_warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{DenseMatrixOperator, OperatorHandle};
    use crate::operators::ResolventOperator;
    use crate::primal_dual::cp_step;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn shrink_problem(op: DenseMatrixOperator) -> (PdProblem, f64) {
        let norm = crate::linalg::estimate_spectral_norm(&op, 1e-12, 50_000, 3).unwrap().value;
        let l: OperatorHandle = Arc::new(op);
        let problem = PdProblem {
            l,
            primal_resolvent: ResolventOperator::new("shrink", |v: &DenseVector, t: f64| {
                v.scale(1.0 / (1.0 + t))
            }),
            dual_resolvent: ResolventOperator::new("shrink", |v: &DenseVector, s: f64| {
                v.scale(1.0 / (1.0 + s))
            }),
            forward: None,
        };
        (problem, norm)
    }

    fn random_problem(seed: u64, rows: usize, cols: usize) -> (PdProblem, PdMetric) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<f64> = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (problem, norm) = shrink_problem(DenseMatrixOperator::new(rows, cols, data));
        let metric =
            PdMetric::new(0.99 / norm, 0.99 / norm, problem.l.clone(), norm).unwrap();
        (problem, metric)
    }

    #[test]
    fn cp_regime_matches_cp_step_bitwise_direct_mode() {
        let (problem, metric) = random_problem(3, 4, 3);
        let config = PdDwifobConfig::chambolle_pock();
        let mut trace: Vec<PrimalDualPoint> = Vec::new();
        let mut observer = |view: &PdIterationView<'_>| {
            trace.push(PrimalDualPoint::new(view.x.clone(), view.mu.clone()));
            false
        };
        let z0 = PrimalDualPoint::constant(3, 4, 0.5);
        run_pd_dwifob(
            &problem,
            &config,
            &metric,
            z0.clone(),
            PdRunOptions {
                mode: EvalMode::Direct,
                max_iters: 200,
                observer: Some(&mut observer),
                ..Default::default()
            },
        )
        .unwrap();

        let mut z = z0;
        for got in &trace {
            z = cp_step(&z, &problem.primal_resolvent, &problem.dual_resolvent, &metric);
            assert_eq!(z.x.as_slice(), got.x.as_slice());
            assert_eq!(z.mu.as_slice(), got.mu.as_slice());
        }
    }

    #[test]
    fn recursive_and_direct_traces_agree() {
        let (problem, metric) = random_problem(7, 5, 4);
        let config = PdDwifobConfig::new(3, 1e-5);
        let run = |mode: EvalMode| {
            let mut pts = Vec::new();
            let mut obs = |view: &PdIterationView<'_>| {
                pts.push(PrimalDualPoint::new(view.x.clone(), view.mu.clone()));
                false
            };
            run_pd_dwifob(
                &problem,
                &config,
                &metric,
                PrimalDualPoint::constant(4, 5, 1.0),
                PdRunOptions {
                    mode,
                    max_iters: 200,
                    observer: Some(&mut obs),
                    ..Default::default()
                },
            )
            .unwrap();
            pts
        };
        let rec = run(EvalMode::Recursive);
        let dir = run(EvalMode::Direct);
        for (a, b) in rec.iter().zip(&dir) {
            let dist = metric.distance_sq_direct(a, b).sqrt();
            let scale = 1.0 + metric.distance_sq_direct(b, &PrimalDualPoint::zeros(4, 5)).sqrt();
            assert!(dist <= 1e-6 * scale, "modes drifted apart: {dist}");
        }
    }

    #[test]
    fn norm_condition_holds_every_iteration() {
        let (problem, metric) = random_problem(11, 4, 4);
        let config = PdDwifobConfig::new(4, 1e-6);
        let mut worst = f64::NEG_INFINITY;
        let mut obs = |view: &PdIterationView<'_>| {
            worst = worst
                .max(view.deviation_norm_m_sq - view.zeta * view.zeta * view.budget_sq);
            false
        };
        run_pd_dwifob(
            &problem,
            &config,
            &metric,
            PrimalDualPoint::constant(4, 4, 2.0),
            PdRunOptions {
                mode: EvalMode::Recursive,
                max_iters: 500,
                observer: Some(&mut obs),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(worst <= 1e-12, "slack violation {worst}");
    }

    #[test]
    fn audit_reports_negligible_drift_on_short_runs() {
        let (problem, metric) = random_problem(13, 4, 3);
        let config = PdDwifobConfig::new(2, 1e-5);
        let result = run_pd_dwifob(
            &problem,
            &config,
            &metric,
            PrimalDualPoint::constant(3, 4, 1.0),
            PdRunOptions {
                mode: EvalMode::Recursive,
                max_iters: 300,
                audit_every: Some(10),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(result.drift_warnings, 0);
        assert!(result.max_cache_drift < 1e-10);
    }

    #[test]
    fn rejects_invalid_parameters() {
        let (problem, metric) = random_problem(17, 3, 3);
        let mut config = PdDwifobConfig::new(2, 1e-5);
        config.zeta = 1.0; // violates zeta <= 1 - eps
        let err = run_pd_dwifob(
            &problem,
            &config,
            &metric,
            PrimalDualPoint::zeros(3, 3),
            PdRunOptions::default(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn observer_stop_reports_converged() {
        let (problem, metric) = random_problem(19, 3, 3);
        let config = PdDwifobConfig::new(2, 1e-5);
        let mut obs = |view: &PdIterationView<'_>| view.n >= 4;
        let result = run_pd_dwifob(
            &problem,
            &config,
            &metric,
            PrimalDualPoint::constant(3, 3, 1.0),
            PdRunOptions {
                max_iters: 100,
                observer: Some(&mut obs),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(result.status, RunStatus::Converged);
        assert_eq!(result.iterations, 5);
    }
}
