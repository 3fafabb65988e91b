//! Vectors, linear operators, spectral-norm estimation, and the small
//! constrained least-squares solver shared by the extrapolation schemes.

mod dense;
pub mod operator;
mod power;
mod sparse;
mod weights;

pub use dense::DenseVector;
pub use operator::{
    apply, apply_adjoint, CountingOperator, DenseMatrixOperator, DiagonalOperator,
    IdentityOperator, LinearOperator, OperatorHandle, ZeroOperator,
};
pub use power::{
    estimate_spectral_norm, SpectralNormEstimate, DEFAULT_POWER_MAX_ITERS, DEFAULT_POWER_TOL,
};
pub use sparse::SparseMatrix;
pub use weights::{
    solve_extrapolation_weights, solve_extrapolation_weights_from_gram, ExtrapolationWeights,
    GramWindow,
};

pub(crate) use weights::solve_dense;
