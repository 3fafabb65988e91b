//! Residual-history management and regularized Anderson extrapolation for
//! fixed-point iterations, plus the equivalent quasi-Newton form used to
//! cross-check the constrained least-squares route.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::fb::RunStatus;
use crate::linalg::{
    solve_dense, solve_extrapolation_weights_from_gram, DenseVector, ExtrapolationWeights,
    GramWindow,
};

/// Sliding window of the `min(m, n) + 1` most recent residual vectors and
/// iterate snapshots, oldest first. The Euclidean Gram matrix of the stored
/// residuals is maintained incrementally: entries between retained columns
/// are reused exactly, only dot products against the newest column are
/// computed on push.
#[derive(Debug, Clone)]
pub struct ResidualHistory {
    memory: usize,
    residuals: VecDeque<DenseVector>,
    snapshots: VecDeque<DenseVector>,
    gram: GramWindow,
}

impl ResidualHistory {
    /// `memory` is the m of the window; the history holds up to m + 1 pairs.
    pub fn new(memory: usize) -> Self {
        assert!(memory >= 1, "memory must be at least 1");
        Self {
            memory,
            residuals: VecDeque::with_capacity(memory + 2),
            snapshots: VecDeque::with_capacity(memory + 2),
            gram: GramWindow::new(),
        }
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn len(&self) -> usize {
        self.residuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residuals.is_empty()
    }

    /// Appends a (residual, snapshot) pair, evicting the oldest pair once
    /// more than m + 1 are held.
    pub fn push(&mut self, residual: DenseVector, snapshot: DenseVector) -> Result<()> {
        if let Some(first) = self.residuals.front() {
            if residual.dim() != first.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    got: residual.dim(),
                    context: "residual pushed into history",
                });
            }
        }
        if self.residuals.len() == self.memory + 1 {
            self.residuals.pop_front();
            self.snapshots.pop_front();
            self.gram.evict_oldest();
        }
        let mut dots: Vec<f64> = self.residuals.iter().map(|r| r.dot(&residual)).collect();
        dots.push(residual.dot(&residual));
        self.gram.push(&dots);
        self.residuals.push_back(residual);
        self.snapshots.push_back(snapshot);
        Ok(())
    }

    pub fn residuals(&self) -> impl Iterator<Item = &DenseVector> {
        self.residuals.iter()
    }

    pub fn snapshots(&self) -> impl Iterator<Item = &DenseVector> {
        self.snapshots.iter()
    }

    pub fn latest_snapshot(&self) -> Option<&DenseVector> {
        self.snapshots.back()
    }

    pub fn latest_residual(&self) -> Option<&DenseVector> {
        self.residuals.back()
    }

    pub fn gram(&self) -> &GramWindow {
        &self.gram
    }

    /// Solves the window's regularized constrained least squares.
    pub fn solve_weights(&self, xi: f64) -> ExtrapolationWeights {
        solve_extrapolation_weights_from_gram(&self.gram, xi)
    }
}

/// One extrapolation step: pushes `r_n = y_n - t_output` with snapshot
/// `t_output`, solves for the weights, and returns the weighted combination
/// of retained snapshots. A degenerate least squares falls back to the most
/// recent snapshot (flagged in the returned weights).
pub fn raa_step(
    history: &mut ResidualHistory,
    y: &DenseVector,
    t_output: &DenseVector,
    xi: f64,
) -> Result<(DenseVector, ExtrapolationWeights)> {
    let residual = y.sub(t_output);
    history.push(residual, t_output.clone())?;
    let weights = history.solve_weights(xi);
    let y_next = DenseVector::combination(&weights.alpha, history.snapshots());
    Ok((y_next, weights))
}

/// Options for [`run_raa`].
#[derive(Debug, Clone)]
pub struct RaaOptions {
    pub memory: usize,
    pub xi: f64,
    pub max_iters: usize,
    /// Stop once the fixed-point residual norm drops below this.
    pub residual_tol: f64,
    /// Abort with a divergence flag once
    /// `||r_n|| > divergence_factor * (1 + ||r_0||)`. This threshold is a
    /// practical guard, recorded in the result rather than raised as an
    /// error: divergence is a normal outcome for this scheme.
    pub divergence_factor: f64,
}

impl Default for RaaOptions {
    fn default() -> Self {
        Self {
            memory: 5,
            xi: 1e-5,
            max_iters: 1000,
            residual_tol: 0.0,
            divergence_factor: 1e8,
        }
    }
}

/// Snapshot of one acceleration iteration, handed to the observer.
#[derive(Debug)]
pub struct RaaIterationView<'a> {
    pub n: usize,
    /// The fixed-point map output x_n = T(y_n).
    pub x: &'a DenseVector,
    /// The extrapolated next input y_{n+1}.
    pub y_next: &'a DenseVector,
    pub residual_norm: f64,
    pub degenerate_ls: bool,
}

/// Result of an accelerated fixed-point run.
#[derive(Debug)]
pub struct RaaRunResult {
    /// Last fixed-point map output.
    pub x: DenseVector,
    pub status: RunStatus,
    pub iterations: usize,
    pub final_residual_norm: f64,
}

/// Runs regularized Anderson acceleration on the fixed-point map `t`.
/// No convergence is guaranteed; blow-ups are reported via
/// `RunStatus::Diverged`, non-finite iterates via `RunStatus::NanAbort`.
pub fn run_raa<T>(
    t: T,
    y0: DenseVector,
    options: &RaaOptions,
    mut observer: Option<&mut dyn FnMut(&RaaIterationView<'_>) -> bool>,
) -> Result<RaaRunResult>
where
    T: Fn(&DenseVector) -> DenseVector,
{
    let mut history = ResidualHistory::new(options.memory);
    let mut y = y0;
    let mut r0_norm: Option<f64> = None;
    let mut last_x = y.clone();
    let mut last_res = f64::INFINITY;
    for n in 0..options.max_iters {
        let x = t(&y);
        if !x.is_finite() {
            return Ok(RaaRunResult {
                x: last_x,
                status: RunStatus::NanAbort,
                iterations: n,
                final_residual_norm: last_res,
            });
        }
        let residual_norm = y.sub(&x).norm();
        let r0 = *r0_norm.get_or_insert(residual_norm);
        last_res = residual_norm;
        if residual_norm > options.divergence_factor * (1.0 + r0) {
            return Ok(RaaRunResult {
                x,
                status: RunStatus::Diverged,
                iterations: n + 1,
                final_residual_norm: residual_norm,
            });
        }
        let (y_next, weights) = raa_step(&mut history, &y, &x, options.xi)?;
        let view = RaaIterationView {
            n,
            x: &x,
            y_next: &y_next,
            residual_norm,
            degenerate_ls: weights.degenerate,
        };
        let stop_requested = observer.as_deref_mut().map(|f| f(&view)).unwrap_or(false);
        last_x = x;
        if stop_requested || residual_norm <= options.residual_tol {
            return Ok(RaaRunResult {
                x: last_x,
                status: RunStatus::Converged,
                iterations: n + 1,
                final_residual_norm: residual_norm,
            });
        }
        y = y_next;
    }
    Ok(RaaRunResult {
        x: last_x,
        status: RunStatus::MaxIters,
        iterations: options.max_iters,
        final_residual_norm: last_res,
    })
}

/// Cumulative-sum change of variables from affine weights `alpha` (length
/// m + 1, summing to one) to the unconstrained coordinates `omega`
/// (length m).
pub fn alpha_to_omega(alpha: &[f64]) -> Vec<f64> {
    let m = alpha.len() - 1;
    let mut omega = Vec::with_capacity(m);
    let mut acc = 0.0;
    for a in &alpha[..m] {
        acc += a;
        omega.push(acc);
    }
    omega
}

/// Inverse of [`alpha_to_omega`]: differences of `omega`, closed by the
/// affine constraint.
pub fn omega_to_alpha(omega: &[f64]) -> Vec<f64> {
    let m = omega.len();
    let mut alpha = Vec::with_capacity(m + 1);
    for i in 0..m {
        if i == 0 {
            alpha.push(omega[0]);
        } else {
            alpha.push(omega[i] - omega[i - 1]);
        }
    }
    let last = if m == 0 { 1.0 } else { 1.0 - omega[m - 1] };
    alpha.push(last);
    alpha
}

/// The quasi-Newton form of the unregularized extrapolation:
/// `y_{n+1} = y_n - G_n r_n` with
/// `G_n = Id + (DY - DR)(DR^T DR)^{-1} DR^T`, where `DR` and `DY` hold
/// successive differences of residuals and inputs. Exists only while `DR`
/// has full column rank; rank-deficient windows are declined. Used as an
/// equivalence oracle against [`raa_step`] with `xi = 0`.
pub fn quasi_newton_extrapolate(history: &ResidualHistory) -> Result<DenseVector> {
    let w = history.len();
    if w < 2 {
        return Err(Error::InvalidParameter {
            name: "history",
            message: "quasi-Newton form needs at least two stored pairs".into(),
        });
    }
    let residuals: Vec<&DenseVector> = history.residuals().collect();
    let snapshots: Vec<&DenseVector> = history.snapshots().collect();
    // RAA convention: r_j = y_j - x_j with snapshot x_j, so y_j = x_j + r_j.
    let inputs: Vec<DenseVector> = snapshots
        .iter()
        .zip(&residuals)
        .map(|(x, r)| x.add(r))
        .collect();
    let k = w - 1;
    let dr: Vec<DenseVector> = (0..k).map(|i| residuals[i + 1].sub(residuals[i])).collect();
    let dy: Vec<DenseVector> = (0..k).map(|i| inputs[i + 1].sub(&inputs[i])).collect();
    let r_n = residuals[w - 1];

    // Normal equations (DR^T DR) omega = DR^T r_n, solved by plain Gaussian
    // elimination; a vanishing pivot means rank deficiency and the oracle
    // declines.
    let mut gram = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            gram[i * k + j] = dr[i].dot(&dr[j]);
        }
    }
    let mut rhs: Vec<f64> = dr.iter().map(|c| c.dot(r_n)).collect();
    let scale = gram.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if scale == 0.0 {
        return Err(Error::RankDeficient);
    }
    let omega = solve_dense(&mut gram, &mut rhs, k).map_err(|_| Error::RankDeficient)?;
    if omega.iter().any(|v| !v.is_finite()) {
        return Err(Error::RankDeficient);
    }

    // y_next = y_n - r_n - (DY - DR) omega = x_n - (DY - DR) omega.
    let mut y_next = snapshots[w - 1].clone();
    for i in 0..k {
        let diff = dy[i].sub(&dr[i]);
        y_next.axpy_in_place(-omega[i], &diff);
    }
    Ok(y_next)
}
