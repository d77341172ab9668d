//! Symmetric eigensolver (cyclic Jacobi with threshold sweeps).

use super::matrix::Mat;
use super::NumericsError;

const MAX_SWEEPS: usize = 100;
const SYMMETRY_TOL: f64 = 1e-12;
const OFF_DIAG_STOP: f64 = 1e-13;

/// Spectral decomposition A = QΛQᵀ with eigenvalues sorted in descending order.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, matching `eigenvalues`.
    pub eigenvectors: Mat,
}

impl SymEigen {
    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Columns whose eigenvalue satisfies `keep`.
    pub fn vectors_where(&self, keep: impl Fn(f64) -> bool) -> Mat {
        let idx: Vec<usize> =
            (0..self.eigenvalues.len()).filter(|&i| keep(self.eigenvalues[i])).collect();
        self.eigenvectors.columns(&idx)
    }

    pub fn reconstruct(&self) -> Mat {
        let q = &self.eigenvectors;
        let lam = Mat::diag(&self.eigenvalues);
        &(q * &lam) * &q.transpose()
    }
}

/// Eigendecomposition of a symmetric matrix.
///
/// The input is rejected when its relative symmetry residual exceeds 1e-12; the
/// symmetric part is decomposed otherwise.
pub fn sym_eigen(a: &Mat) -> Result<SymEigen, NumericsError> {
    if !a.is_square() {
        return Err(NumericsError::Shape(format!("eigen input is {}x{}", a.rows(), a.cols())));
    }
    let residual = a.symmetry_residual();
    if residual > SYMMETRY_TOL {
        return Err(NumericsError::NotSymmetric { residual });
    }
    Ok(jacobi(&a.symmetrize()))
}

/// Eigendecomposition of the symmetric part of `a`, skipping the symmetry check.
pub fn sym_eigen_unchecked(a: &Mat) -> SymEigen {
    jacobi(&a.symmetrize())
}

fn off_diag_frobenius(a: &Mat) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

fn jacobi(input: &Mat) -> SymEigen {
    let n = input.rows();
    let mut a = input.clone();
    let mut q = Mat::identity(n);
    let scale = input.frobenius();
    let stop = OFF_DIAG_STOP * scale;

    for sweep in 0..MAX_SWEEPS {
        let off = off_diag_frobenius(&a);
        if off <= stop || off == 0.0 {
            break;
        }
        // threshold: skip tiny rotations during the first sweeps
        let threshold = if sweep < 3 { 0.2 * off / (n * n) as f64 } else { 0.0 };
        for p in 0..n {
            for r in p + 1..n {
                let apr = a[(p, r)];
                if apr.abs() <= threshold || apr == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let arr = a[(r, r)];
                let theta = (arr - app) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akr = a[(k, r)];
                    a[(k, p)] = c * akp - s * akr;
                    a[(k, r)] = s * akp + c * akr;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let ark = a[(r, k)];
                    a[(p, k)] = c * apk - s * ark;
                    a[(r, k)] = s * apk + c * ark;
                }
                a[(p, r)] = 0.0;
                a[(r, p)] = 0.0;
                for k in 0..n {
                    let qkp = q[(k, p)];
                    let qkr = q[(k, r)];
                    q[(k, p)] = c * qkp - s * qkr;
                    q[(k, r)] = s * qkp + c * qkr;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].partial_cmp(&a[(i, i)]).unwrap_or(std::cmp::Ordering::Equal));
    SymEigen {
        eigenvalues: order.iter().map(|&i| a[(i, i)]).collect(),
        eigenvectors: q.columns(&order),
    }
}

/// Smallest eigenvalue of the symmetric part of `a` (0 for an empty matrix).
pub fn lambda_min(a: &Mat) -> f64 {
    if a.rows() == 0 {
        return 0.0;
    }
    sym_eigen_unchecked(a).min()
}

/// Projection onto the PSD cone: clip negative eigenvalues.
pub fn psd_part(a: &Mat) -> Mat {
    let e = sym_eigen_unchecked(a);
    let clipped: Vec<f64> = e.eigenvalues.iter().map(|v| v.max(0.0)).collect();
    let q = &e.eigenvectors;
    &(q * &Mat::diag(&clipped)) * &q.transpose()
}

/// Cholesky factor L (lower) with A = LLᵀ, or `None` if A is not numerically PD.
pub fn cholesky(a: &Mat) -> Option<Mat> {
    let n = a.rows();
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

/// Solve LLᵀx = b given the Cholesky factor.
pub fn cholesky_solve(l: &Mat, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[(i, k)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[(k, i)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    y
}

/// Inverse of a lower-triangular matrix.
pub fn lower_inverse(l: &Mat) -> Mat {
    let n = l.rows();
    let mut inv = Mat::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = 1.0 / l[(j, j)];
        for i in j + 1..n {
            let mut s = 0.0;
            for k in j..i {
                s -= l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = s / l[(i, i)];
        }
    }
    inv
}
