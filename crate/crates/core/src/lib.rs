//! A monotone-inclusion solver library built around forward-backward
//! splitting with deviations: a safeguarded inertial scheme whose deviation
//! directions come from Anderson-style residual extrapolation, together with
//! its primal-dual variant, the Chambolle-Pock baseline, regularized
//! Anderson acceleration, and an l1-regularized SVM problem layer for
//! benchmarking.
//!
//! Module map:
//! - [`linalg`]: vectors, sparse/linear operators, power iteration, the
//!   constrained extrapolation least squares.
//! - [`operators`]: proximal building blocks (l1 with unregularized bias,
//!   hinge conjugate) and objective evaluation.
//! - [`fb`]: the generic deviation engine, parameter validation, metrics.
//! - [`anderson`]: residual history, regularized Anderson acceleration, the
//!   quasi-Newton equivalent form.
//! - [`dwifob`]: the dynamically weighted inertial deviation policy and the
//!   single-space solver loop.
//! - [`primal_dual`]: the block metric, Chambolle-Pock, the primal-dual
//!   solver with recursive operator-image caching, Lyapunov diagnostics.
//! - [`svm`]: LIBSVM parsing, problem assembly, reference solutions.
//! - [`synthetic`]: seeded stand-in datasets with the benchmark shapes.

pub mod anderson;
pub mod dwifob;
pub mod error;
pub mod fb;
pub mod linalg;
pub mod operators;
pub mod primal_dual;
pub mod svm;
pub mod synthetic;

mod util;

pub use error::{Error, Result};
