//! Dense linear algebra over `f64` and exact rationals.

pub mod eigen;
pub mod lp;
pub mod matrix;
pub mod rational;
pub mod svd;

use thiserror::Error;

pub use eigen::{lambda_min, psd_part, sym_eigen, sym_eigen_unchecked, SymEigen};
pub use lp::{rational_lp, LpOutcome, Sense};
pub use matrix::{dot, norm2, Mat, Matrix, RatMat, Scalar};
pub use num_rational::BigRational as Rational;
pub use rational::{exact_rank, format_rational, parse_rational, rational_nullspace, to_f64};
pub use svd::{nullspace_basis, numeric_rank, orthonormalize, range_basis, right_svd_rank};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not symmetric (relative residual {residual:.3e})")]
    NotSymmetric { residual: f64 },
    #[error("{0}")]
    Parse(String),
}

/// Default rank tolerance τ = 1e-7 · max(1, max|λ|) · n for PSD rank decisions.
pub fn default_rank_tol(max_abs_eig: f64, n: usize) -> f64 {
    1e-7 * max_abs_eig.max(1.0) * n.max(1) as f64
}

/// Number of eigenvalues of a symmetric matrix with |λ| above the absolute threshold `tol`.
pub fn sym_rank_abs(a: &Mat, tol: f64) -> usize {
    if a.rows() == 0 {
        return 0;
    }
    sym_eigen_unchecked(a).eigenvalues.iter().filter(|v| v.abs() > tol).count()
}
