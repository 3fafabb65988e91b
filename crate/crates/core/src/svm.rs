//! LIBSVM-format ingestion, design-matrix construction, assembly of the
//! l1-regularized SVM problem in primal-dual form, and high-accuracy
//! reference solutions with an on-disk cache.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{DenseVector, OperatorHandle, SparseMatrix};
use crate::operators::{prox_l1_skip_last, resolvent_hinge_conjugate, ResolventOperator};
use crate::primal_dual::{cp_step, PdMetric, PdProblem, PrimalDualPoint};

/// A binary classification dataset: sparse feature rows and +-1 labels.
#[derive(Debug, Clone)]
pub struct SvmDataset {
    theta: SparseMatrix, // N x d
    phi: Vec<i8>,        // +-1
}

impl SvmDataset {
    pub fn new(theta: SparseMatrix, phi: Vec<i8>) -> Result<Self> {
        if theta.rows() != phi.len() {
            return Err(Error::DimensionMismatch {
                expected: theta.rows(),
                got: phi.len(),
                context: "label count vs feature rows",
            });
        }
        if theta.rows() == 0 || theta.cols() == 0 {
            return Err(Error::InvalidParameter {
                name: "dataset",
                message: "need at least one sample and one feature".into(),
            });
        }
        if phi.iter().any(|&p| p != 1 && p != -1) {
            return Err(Error::InvalidParameter {
                name: "labels",
                message: "labels must be normalized to +-1".into(),
            });
        }
        Ok(Self { theta, phi })
    }

    pub fn samples(&self) -> usize {
        self.theta.rows()
    }

    pub fn features(&self) -> usize {
        self.theta.cols()
    }

    pub fn label(&self, i: usize) -> i8 {
        self.phi[i]
    }

    pub fn labels(&self) -> &[i8] {
        &self.phi
    }

    pub fn feature_matrix(&self) -> &SparseMatrix {
        &self.theta
    }

    pub fn feature_row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.theta.row_entries(i)
    }

    /// Signed margins `phi_i (w^T theta_i + b)` for all samples.
    pub fn margins(&self, w: &DenseVector, b: f64) -> DenseVector {
        assert_eq!(w.dim(), self.features());
        let mut out = Vec::with_capacity(self.samples());
        for i in 0..self.samples() {
            let mut acc = b;
            for (j, v) in self.feature_row(i) {
                acc += v * w[j];
            }
            out.push(self.phi[i] as f64 * acc);
        }
        DenseVector::new(out)
    }
}

/// Parses LIBSVM text: one sample per line, `label idx:val idx:val ...`
/// with 1-based strictly ascending indices; `#` starts a comment. The two
/// distinct numeric labels are mapped to -1 (smaller) and +1 (larger);
/// a single-class file maps positives to +1 and the rest to -1. The feature
/// dimension is the largest index seen.
pub fn parse_libsvm<R: Read>(mut input: R) -> Result<SvmDataset> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;

    let mut raw_labels: Vec<(f64, usize)> = Vec::new(); // (label, line number)
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut max_index = 0usize;

    for (lineno, raw_line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let mut tokens = line.split_whitespace();
        let Some(label_tok) = tokens.next() else { continue };
        let label: f64 = label_tok.parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("malformed label token '{label_tok}'"),
        })?;
        if !label.is_finite() {
            return Err(Error::Parse {
                line: lineno,
                message: format!("non-finite label '{label_tok}'"),
            });
        }
        let mut row: Vec<(usize, f64)> = Vec::new();
        let mut prev_index = 0usize;
        for tok in tokens {
            let (idx_str, val_str) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: lineno,
                message: format!("malformed feature token '{tok}' (expected idx:val)"),
            })?;
            let idx: usize = idx_str.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("malformed feature index '{idx_str}'"),
            })?;
            let val: f64 = val_str.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("malformed feature value '{val_str}'"),
            })?;
            if idx == 0 {
                return Err(Error::Parse {
                    line: lineno,
                    message: "feature indices are 1-based".into(),
                });
            }
            if idx <= prev_index {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("feature indices must be ascending ({prev_index} then {idx})"),
                });
            }
            prev_index = idx;
            max_index = max_index.max(idx);
            row.push((idx - 1, val));
        }
        raw_labels.push((label, lineno));
        rows.push(row);
    }

    if rows.is_empty() || max_index == 0 {
        return Err(Error::Parse {
            line: 0,
            message: "no samples with features found".into(),
        });
    }

    // Collect distinct labels, erroring at the line introducing a third.
    let mut classes: Vec<f64> = Vec::new();
    for &(label, lineno) in &raw_labels {
        if !classes.iter().any(|&c| c == label) {
            classes.push(label);
            if classes.len() > 2 {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("more than two label classes (third is {label})"),
                });
            }
        }
    }
    classes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let to_sign = |label: f64| -> i8 {
        if classes.len() == 2 {
            if label == classes[0] { -1 } else { 1 }
        } else if label > 0.0 {
            1
        } else {
            -1
        }
    };

    let mut triplets = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        for &(c, v) in row {
            triplets.push((r, c, v));
        }
    }
    let theta = SparseMatrix::from_triplets(rows.len(), max_index, &triplets)
        .map_err(|e| Error::Parse { line: 0, message: e.to_string() })?;
    let phi: Vec<i8> = raw_labels.iter().map(|&(l, _)| to_sign(l)).collect();
    SvmDataset::new(theta, phi)
}

/// Writes a dataset back to LIBSVM text with exactly round-tripping float
/// formatting. Zero entries are omitted (they are not stored).
pub fn serialize_libsvm(dataset: &SvmDataset) -> String {
    let mut out = String::new();
    for i in 0..dataset.samples() {
        if dataset.label(i) > 0 {
            out.push_str("+1");
        } else {
            out.push_str("-1");
        }
        for (j, v) in dataset.feature_row(i) {
            out.push(' ');
            out.push_str(&format!("{}:{}", j + 1, v));
        }
        out.push('\n');
    }
    out
}

/// Content hash of a dataset (first 16 hex chars of SHA-256 over the
/// canonical serialization); keys the reference cache.
pub fn dataset_hash(dataset: &SvmDataset) -> String {
    let mut hasher = Sha256::new();
    hasher.update(serialize_libsvm(dataset).as_bytes());
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// The design operator with one row `phi_i [theta_i^T, 1]` per sample: an
/// N x (d + 1) sparse matrix whose last column is the label-signed bias.
pub fn build_design_matrix(dataset: &SvmDataset) -> Result<SparseMatrix> {
    let n = dataset.samples();
    let d = dataset.features();
    let mut triplets = Vec::new();
    for i in 0..n {
        let sign = dataset.label(i) as f64;
        for (j, v) in dataset.feature_row(i) {
            triplets.push((i, j, sign * v));
        }
        triplets.push((i, d, sign));
    }
    SparseMatrix::from_triplets(n, d + 1, &triplets)
}

/// The assembled l1-regularized SVM problem `min f(Lx) + g(x)` with
/// `f` the hinge sum, `g = delta ||w||_1` (bias unregularized, stored last),
/// and `L` the design operator.
#[derive(Clone)]
pub struct SvmProblem {
    pub dataset: Arc<SvmDataset>,
    pub delta: f64,
    pub l: OperatorHandle,
}

impl SvmProblem {
    pub fn primal_dim(&self) -> usize {
        self.dataset.features() + 1
    }

    pub fn dual_dim(&self) -> usize {
        self.dataset.samples()
    }

    /// Primal-dual form: A = the l1 subdifferential (bias skipped),
    /// B^{-1} resolvent = the hinge-conjugate resolvent, C = 0.
    pub fn to_pd_problem(&self) -> PdProblem {
        let delta = self.delta;
        PdProblem {
            l: self.l.clone(),
            primal_resolvent: ResolventOperator::new("l1-skip-bias", move |v, t| {
                prox_l1_skip_last(v, t * delta).expect("nonnegative threshold")
            }),
            dual_resolvent: ResolventOperator::new("hinge-conjugate", |v, s| {
                resolvent_hinge_conjugate(v, s).expect("positive dual step")
            }),
            forward: None,
        }
    }
}

/// Wires a dataset and regularization level into the primal-dual problem.
pub fn assemble_problem(dataset: SvmDataset, delta: f64) -> Result<SvmProblem> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            message: format!("regularization level must be positive, got {delta}"),
        });
    }
    let design = build_design_matrix(&dataset)?;
    Ok(SvmProblem { dataset: Arc::new(dataset), delta, l: Arc::new(design) })
}

/// A high-accuracy solution produced by the plain primal-dual iteration run
/// to (or as close as floating point allows to) successive-difference norms
/// of 1e-15 in both blocks.
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    pub point: PrimalDualPoint,
    pub iterations: u64,
    pub achieved_dx: f64,
    pub achieved_dmu: f64,
    /// True when the iteration cap stopped the run before the target.
    pub hit_cap: bool,
    pub loaded_from_cache: bool,
}

/// Options for the reference computation.
#[derive(Debug, Clone)]
pub struct ReferenceOptions {
    /// Successive-difference target for both blocks.
    pub tol: f64,
    pub max_iters: u64,
    /// Cache directory; `None` disables persistence.
    pub cache_dir: Option<PathBuf>,
}

impl Default for ReferenceOptions {
    fn default() -> Self {
        Self { tol: 1e-15, max_iters: 10_000_000, cache_dir: None }
    }
}

/// Computes (or loads) the reference solution for a problem at the given
/// step sizes, starting from the origin. Cached on disk keyed by
/// (dataset hash, delta, tau, sigma).
pub fn compute_reference_solution(
    problem: &SvmProblem,
    metric: &PdMetric,
    options: &ReferenceOptions,
) -> Result<ReferenceSolution> {
    let key = cache_key(problem, metric);
    if let Some(dir) = &options.cache_dir {
        let path = dir.join(&key);
        if path.exists() {
            let mut reference = read_reference(&path, problem.primal_dim(), problem.dual_dim())?;
            reference.loaded_from_cache = true;
            return Ok(reference);
        }
    }

    let pd = problem.to_pd_problem();
    let mut z = PrimalDualPoint::zeros(problem.primal_dim(), problem.dual_dim());
    let mut dx = f64::INFINITY;
    let mut dmu = f64::INFINITY;
    let mut iterations = 0u64;
    let mut hit_cap = true;
    // Stagnation guard: the iteration is monotone enough that once the
    // successive differences stop shrinking across a long window the float
    // limit is reached and waiting longer cannot help.
    let mut window_best = f64::INFINITY;
    let mut prev_window_best = f64::INFINITY;
    const WINDOW: u64 = 10_000;

    while iterations < options.max_iters {
        let z_next = cp_step(&z, &pd.primal_resolvent, &pd.dual_resolvent, metric);
        iterations += 1;
        dx = z_next.x.sub(&z.x).norm();
        dmu = z_next.mu.sub(&z.mu).norm();
        z = z_next;
        if dx <= options.tol && dmu <= options.tol {
            hit_cap = false;
            break;
        }
        let step = dx.max(dmu);
        window_best = window_best.min(step);
        if iterations % WINDOW == 0 {
            if window_best >= prev_window_best && window_best <= 1e-12 {
                // Float-limit plateau.
                hit_cap = false;
                break;
            }
            prev_window_best = window_best;
            window_best = f64::INFINITY;
        }
    }

    let reference = ReferenceSolution {
        point: z,
        iterations,
        achieved_dx: dx,
        achieved_dmu: dmu,
        hit_cap,
        loaded_from_cache: false,
    };
    if let Some(dir) = &options.cache_dir {
        std::fs::create_dir_all(dir)?;
        write_reference_atomic(&dir.join(&key), &reference)?;
    }
    Ok(reference)
}

fn cache_key(problem: &SvmProblem, metric: &PdMetric) -> String {
    format!(
        "ref-{}-{:016x}-{:016x}-{:016x}.txt",
        dataset_hash(&problem.dataset),
        problem.delta.to_bits(),
        metric.tau().to_bits(),
        metric.sigma().to_bits()
    )
}

/// Cache file layout (text, one record per line):
/// ```text
/// svm-reference v1
/// dims <primal_dim> <dual_dim>
/// iterations <n>
/// achieved <dx> <dmu>
/// hit_cap <0|1>
/// x <primal_dim floats>
/// mu <dual_dim floats>
/// ```
/// Floats are written with shortest round-trip formatting, so reloading and
/// rewriting reproduces the file byte for byte.
fn write_reference_atomic(path: &Path, reference: &ReferenceSolution) -> Result<()> {
    let mut body = String::new();
    body.push_str("svm-reference v1\n");
    body.push_str(&format!(
        "dims {} {}\n",
        reference.point.x.dim(),
        reference.point.mu.dim()
    ));
    body.push_str(&format!("iterations {}\n", reference.iterations));
    body.push_str(&format!(
        "achieved {} {}\n",
        reference.achieved_dx, reference.achieved_dmu
    ));
    body.push_str(&format!("hit_cap {}\n", u8::from(reference.hit_cap)));
    push_vector_line(&mut body, "x", &reference.point.x);
    push_vector_line(&mut body, "mu", &reference.point.mu);

    // Write-to-temp plus atomic rename keeps concurrent writers safe:
    // readers only ever observe complete files, and identical keys produce
    // identical bytes anyway.
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    std::fs::write(&tmp, body)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn push_vector_line(body: &mut String, tag: &str, v: &DenseVector) {
    body.push_str(tag);
    for x in v.iter() {
        body.push(' ');
        body.push_str(&format!("{x}"));
    }
    body.push('\n');
}

fn read_reference(path: &Path, primal_dim: usize, dual_dim: usize) -> Result<ReferenceSolution> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let mut expect = |prefix: &str| -> Result<(usize, String)> {
        let (i, line) = lines.next().ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("reference cache truncated before '{prefix}'"),
        })?;
        let rest = line.strip_prefix(prefix).ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected '{prefix}' record"),
        })?;
        Ok((i + 1, rest.trim().to_string()))
    };

    let (_, version) = expect("svm-reference ")?;
    if version != "v1" {
        return Err(Error::Parse { line: 1, message: format!("unknown version '{version}'") });
    }
    let (line, dims) = expect("dims ")?;
    let mut it = dims.split_whitespace();
    let p: usize = parse_field(it.next(), line)?;
    let q: usize = parse_field(it.next(), line)?;
    if p != primal_dim || q != dual_dim {
        return Err(Error::Parse {
            line,
            message: format!("cached dims {p}x{q} do not match problem {primal_dim}x{dual_dim}"),
        });
    }
    let (line, iters) = expect("iterations ")?;
    let iterations: u64 = parse_field(Some(&iters), line)?;
    let (line, achieved) = expect("achieved ")?;
    let mut it = achieved.split_whitespace();
    let dx: f64 = parse_field(it.next(), line)?;
    let dmu: f64 = parse_field(it.next(), line)?;
    let (line, cap) = expect("hit_cap ")?;
    let hit_cap: u8 = parse_field(Some(&cap), line)?;
    let (line, xs) = expect("x")?;
    let x = parse_vector(&xs, primal_dim, line)?;
    let (line, mus) = expect("mu")?;
    let mu = parse_vector(&mus, dual_dim, line)?;

    Ok(ReferenceSolution {
        point: PrimalDualPoint::new(x, mu),
        iterations,
        achieved_dx: dx,
        achieved_dmu: dmu,
        hit_cap: hit_cap != 0,
        loaded_from_cache: false,
    })
}

fn parse_field<T: std::str::FromStr>(tok: Option<&str>, line: usize) -> Result<T> {
    tok.and_then(|t| t.parse().ok()).ok_or_else(|| Error::Parse {
        line,
        message: "malformed numeric field in reference cache".into(),
    })
}

fn parse_vector(s: &str, dim: usize, line: usize) -> Result<DenseVector> {
    let vals: Vec<f64> = s
        .split_whitespace()
        .map(|t| t.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse { line, message: "malformed vector entry".into() })?;
    if vals.len() != dim {
        return Err(Error::Parse {
            line,
            message: format!("expected {dim} entries, found {}", vals.len()),
        });
    }
    Ok(DenseVector::new(vals))
}

/// Largest componentwise distance of the point to the optimality conditions:
/// `-(L* mu)_i` must lie in the l1 subdifferential at `w_i` (bias component
/// zero), and `mu_i` in the hinge subdifferential at `(L x)_i`. Each
/// condition is measured as Euclidean distance to the corresponding monotone
/// graph, so the result is 0 exactly at a solution.
pub fn optimality_residual(problem: &SvmProblem, point: &PrimalDualPoint) -> f64 {
    let delta = problem.delta;
    let d = problem.dataset.features();
    let grad = problem.l.adjoint(&point.mu); // L* mu
    let mut worst: f64 = 0.0;
    for i in 0..d {
        worst = worst.max(dist_to_scaled_sign_graph(point.x[i], -grad[i], delta));
    }
    worst = worst.max(grad[d].abs()); // unregularized bias: stationarity

    let margins = problem.l.forward(&point.x);
    for i in 0..problem.dataset.samples() {
        worst = worst.max(dist_to_hinge_subdiff_graph(margins[i], point.mu[i]));
    }
    worst
}

/// Distance from `(w, g)` to the graph of `delta * d|.|`: the polyline
/// `{(w, -delta): w <= 0} + {0} x [-delta, delta] + {(w, delta): w >= 0}`.
fn dist_to_scaled_sign_graph(w: f64, g: f64, delta: f64) -> f64 {
    let d_neg = if w <= 0.0 { (g + delta).abs() } else { (w.powi(2) + (g + delta).powi(2)).sqrt() };
    let d_mid = {
        let excess = (g.abs() - delta).max(0.0);
        (w.powi(2) + excess.powi(2)).sqrt()
    };
    let d_pos = if w >= 0.0 { (g - delta).abs() } else { (w.powi(2) + (g - delta).powi(2)).sqrt() };
    d_neg.min(d_mid).min(d_pos)
}

/// Distance from `(y, mu)` to the graph of the subdifferential of
/// `max(0, 1 - y)`: `{(y, -1): y <= 1} + {1} x [-1, 0] + {(y, 0): y >= 1}`.
fn dist_to_hinge_subdiff_graph(y: f64, mu: f64) -> f64 {
    let t = y - 1.0;
    let d_left = if t <= 0.0 { (mu + 1.0).abs() } else { (t.powi(2) + (mu + 1.0).powi(2)).sqrt() };
    let d_mid = {
        let excess = if mu > 0.0 {
            mu
        } else if mu < -1.0 {
            -1.0 - mu
        } else {
            0.0
        };
        (t.powi(2) + excess.powi(2)).sqrt()
    };
    let d_right = if t >= 0.0 { mu.abs() } else { (t.powi(2) + mu.powi(2)).sqrt() };
    d_left.min(d_mid).min(d_right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{estimate_spectral_norm, LinearOperator};

    #[test]
    fn parses_a_basic_line() {
        let ds = parse_libsvm("+1 1:0.5 3:-2.0\n".as_bytes()).unwrap();
        assert_eq!(ds.samples(), 1);
        assert_eq!(ds.features(), 3);
        assert_eq!(ds.label(0), 1);
        let row: Vec<_> = ds.feature_row(0).collect();
        assert_eq!(row, vec![(0, 0.5), (2, -2.0)]);
    }

    #[test]
    fn parses_comments_and_blank_lines() {
        let text = "# header comment\n+1 1:1.0  # trailing comment\n\n-1 2:2.0\n";
        let ds = parse_libsvm(text.as_bytes()).unwrap();
        assert_eq!(ds.samples(), 2);
        assert_eq!(ds.features(), 2);
        assert_eq!(ds.labels(), &[1, -1]);
    }

    #[test]
    fn maps_arbitrary_binary_labels() {
        // Smaller class maps to -1, larger to +1 (the {2, 4} convention of
        // several public files).
        let text = "2 1:1.0\n4 1:2.0\n2 2:0.5\n";
        let ds = parse_libsvm(text.as_bytes()).unwrap();
        assert_eq!(ds.labels(), &[-1, 1, -1]);
    }

    #[test]
    fn rejects_bad_input_with_line_numbers() {
        let err = parse_libsvm("+1 1:1.0\n-1 3:1.0 2:2.0\n".as_bytes()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other}"),
        }
        let err = parse_libsvm("+1 1:abc\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_libsvm("1 1:1\n2 1:1\n3 1:1\n".as_bytes()).unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("two label classes"));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn serialization_roundtrips_numerically() {
        let text = "+1 1:0.1 2:-3.25 5:1e-7\n-1 3:42\n";
        let ds = parse_libsvm(text.as_bytes()).unwrap();
        let ser = serialize_libsvm(&ds);
        let ds2 = parse_libsvm(ser.as_bytes()).unwrap();
        assert_eq!(ds.labels(), ds2.labels());
        assert_eq!(ds.features(), ds2.features());
        for i in 0..ds.samples() {
            let a: Vec<_> = ds.feature_row(i).collect();
            let b: Vec<_> = ds2.feature_row(i).collect();
            assert_eq!(a, b);
        }
        assert_eq!(dataset_hash(&ds), dataset_hash(&ds2));
    }

    #[test]
    fn design_matrix_rows_are_signed_and_biased() {
        let ds = parse_libsvm("-1 1:2.0 2:3.0\n".as_bytes()).unwrap();
        let l = build_design_matrix(&ds).unwrap();
        assert_eq!(l.rows(), 1);
        assert_eq!(l.cols(), 3);
        let dense = l.to_dense_row_major();
        assert_eq!(dense, vec![-2.0, -3.0, -1.0]);
    }

    #[test]
    fn design_matrix_two_sample_example() {
        let ds = parse_libsvm("+1 1:1.0\n-1 2:1.0\n".as_bytes()).unwrap();
        let l = build_design_matrix(&ds).unwrap();
        let dense = l.to_dense_row_major();
        assert_eq!(dense, vec![1.0, 0.0, 1.0, 0.0, -1.0, -1.0]);
    }

    #[test]
    fn design_matrix_is_adjoint_consistent() {
        let ds = parse_libsvm("+1 1:0.5 3:1.5\n-1 2:-1.0\n+1 1:2.0 2:1.0 3:-0.5\n".as_bytes())
            .unwrap();
        let l = build_design_matrix(&ds).unwrap();
        assert!(crate::linalg::operator::adjoint_defect(&l, 50, 5) < 1e-12);
    }

    #[test]
    fn margins_match_design_matrix_application() {
        let ds =
            parse_libsvm("+1 1:0.5 3:1.5\n-1 2:-1.0\n".as_bytes()).unwrap();
        let l = build_design_matrix(&ds).unwrap();
        let w = DenseVector::new(vec![1.0, -2.0, 0.5]);
        let b = 0.25;
        let margins = ds.margins(&w, b);
        let x = DenseVector::new(vec![1.0, -2.0, 0.5, 0.25]);
        let lx = l.forward(&x);
        for (a, b) in margins.iter().zip(lx.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    fn tiny_problem(delta: f64) -> (SvmProblem, PdMetric) {
        let text = "+1 1:1.0 2:0.5\n-1 1:-0.5 2:0.25\n+1 2:1.5\n-1 1:1.0 2:-1.0\n";
        let ds = parse_libsvm(text.as_bytes()).unwrap();
        let problem = assemble_problem(ds, delta).unwrap();
        let norm = estimate_spectral_norm(problem.l.as_ref(), 1e-12, 50_000, 7).unwrap().value;
        let metric =
            PdMetric::new(0.99 / norm, 0.99 / norm, problem.l.clone(), norm).unwrap();
        (problem, metric)
    }

    #[test]
    fn reference_satisfies_optimality_conditions() {
        let (problem, metric) = tiny_problem(0.4);
        let reference = compute_reference_solution(
            &problem,
            &metric,
            &ReferenceOptions { max_iters: 2_000_000, ..Default::default() },
        )
        .unwrap();
        assert!(!reference.hit_cap);
        let residual = optimality_residual(&problem, &reference.point);
        assert!(residual < 1e-10, "optimality residual {residual}");
    }

    #[test]
    fn dominant_regularizer_zeroes_the_weights() {
        // One sample, huge delta: w* = 0 is forced; the bias adjusts freely.
        let ds = parse_libsvm("+1 1:1.0\n".as_bytes()).unwrap();
        let problem = assemble_problem(ds, 50.0).unwrap();
        let norm = estimate_spectral_norm(problem.l.as_ref(), 1e-12, 50_000, 7).unwrap().value;
        let metric = PdMetric::new(0.99 / norm, 0.99 / norm, problem.l.clone(), norm).unwrap();
        let reference =
            compute_reference_solution(&problem, &metric, &ReferenceOptions::default()).unwrap();
        assert!(reference.point.x[0].abs() < 1e-12, "w = {}", reference.point.x[0]);
        assert!(optimality_residual(&problem, &reference.point) < 1e-10);
    }

    #[test]
    fn reference_cache_roundtrips_identically() {
        let (problem, metric) = tiny_problem(0.4);
        let dir = std::env::temp_dir().join(format!("svmref-test-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let options = ReferenceOptions {
            cache_dir: Some(dir.clone()),
            max_iters: 2_000_000,
            ..Default::default()
        };
        let first = compute_reference_solution(&problem, &metric, &options).unwrap();
        assert!(!first.loaded_from_cache);
        let key_path = std::fs::read_dir(&dir).unwrap().next().unwrap().unwrap().path();
        let bytes_before = std::fs::read(&key_path).unwrap();

        let second = compute_reference_solution(&problem, &metric, &options).unwrap();
        assert!(second.loaded_from_cache);
        assert_eq!(first.point, second.point);

        // Rewriting the loaded reference must reproduce identical bytes.
        write_reference_atomic(&key_path, &second).unwrap();
        let bytes_after = std::fs::read(&key_path).unwrap();
        assert_eq!(bytes_before, bytes_after);
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn reference_is_a_fixed_point() {
        let (problem, metric) = tiny_problem(0.4);
        let reference =
            compute_reference_solution(&problem, &metric, &ReferenceOptions::default()).unwrap();
        let pd = problem.to_pd_problem();
        let next = cp_step(&reference.point, &pd.primal_resolvent, &pd.dual_resolvent, &metric);
        let dx = next.x.sub(&reference.point.x).norm();
        let dmu = next.mu.sub(&reference.point.mu).norm();
        assert!(dx <= 1e-15f64.max(reference.achieved_dx * 1.5), "dx = {dx}");
        assert!(dmu <= 1e-15f64.max(reference.achieved_dmu * 1.5), "dmu = {dmu}");
    }

    #[test]
    fn graph_distances_vanish_only_on_the_graphs() {
        assert_eq!(dist_to_scaled_sign_graph(1.0, 0.5, 0.5), 0.0);
        assert_eq!(dist_to_scaled_sign_graph(0.0, 0.3, 0.5), 0.0);
        assert!(dist_to_scaled_sign_graph(1.0, 0.0, 0.5) > 0.4);
        assert_eq!(dist_to_hinge_subdiff_graph(0.5, -1.0), 0.0);
        assert_eq!(dist_to_hinge_subdiff_graph(1.0, -0.4), 0.0);
        assert_eq!(dist_to_hinge_subdiff_graph(2.0, 0.0), 0.0);
        assert!(dist_to_hinge_subdiff_graph(2.0, -1.0) > 0.9);
    }
}
