//! Rank and kernel computations via one-sided (Hestenes) Jacobi SVD.

use super::matrix::{dot, Mat};

const MAX_SWEEPS: usize = 80;

/// Singular values and right singular vectors of an m×n matrix.
#[derive(Clone, Debug)]
pub struct RightSvd {
    /// Singular values, descending.
    pub sigma: Vec<f64>,
    /// n×n orthogonal matrix, columns aligned with `sigma`.
    pub v: Mat,
}

pub fn right_svd(a: &Mat) -> RightSvd {
    let (m, n) = a.shape();
    // columns of a as separate vectors
    let mut u: Vec<Vec<f64>> = (0..n).map(|j| a.col(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();

    // columns this small are numerically zero; rotating them only churns
    let negligible = 1e-32 * u.iter().map(|c| dot(c, c)).sum::<f64>();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&u[p], &u[p]);
                let beta = dot(&u[q], &u[q]);
                if alpha.min(beta) <= negligible {
                    continue;
                }
                let gamma = dot(&u[p], &u[q]);
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..m {
                    let (up, uq) = (u[p][k], u[q][k]);
                    u[p][k] = c * up - s * uq;
                    u[q][k] = s * up + c * uq;
                }
                for k in 0..n {
                    let (vp, vq) = (v[p][k], v[q][k]);
                    v[p][k] = c * vp - s * vq;
                    v[q][k] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = u.iter().map(|c| dot(c, c).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));
    let mut vm = Mat::zeros(n, n);
    for (col, &j) in order.iter().enumerate() {
        vm.set_col(col, &v[j]);
    }
    RightSvd { sigma: order.iter().map(|&j| norms[j]).collect(), v: vm }
}

/// Singular values, descending.
pub fn singular_values(a: &Mat) -> Vec<f64> {
    if a.rows() < a.cols() {
        return singular_values(&a.transpose());
    }
    let s = right_svd(a).sigma;
    // a wide matrix has at most `rows` nonzero singular values
    s.into_iter().take(a.rows().min(a.cols())).collect()
}

/// Number of singular values exceeding `tol·σ_max`; 0 for the zero matrix.
pub fn numeric_rank(a: &Mat, tol: f64) -> usize {
    assert!(tol > 0.0, "rank tolerance must be positive");
    if a.rows() == 0 || a.cols() == 0 {
        return 0;
    }
    let s = singular_values(a);
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > tol * smax).count()
}

/// Numerical rank (relative cutoff `tol`) together with the right singular vectors.
pub fn right_svd_rank(a: &Mat, tol: f64) -> (usize, Mat) {
    let svd = right_svd(a);
    let keep = a.rows().min(a.cols());
    let smax = svd.sigma.first().copied().unwrap_or(0.0);
    let rank = if smax == 0.0 { 0 } else { svd.sigma.iter().take(keep).filter(|&&s| s > tol * smax).count() };
    (rank, svd.v)
}

/// Orthonormal basis (as columns) of the numerical kernel of `a`.
///
/// Column count is `cols(a) − numeric_rank(a, tol)`.
pub fn nullspace_basis(a: &Mat, tol: f64) -> Mat {
    assert!(tol > 0.0, "rank tolerance must be positive");
    let n = a.cols();
    if a.rows() == 0 {
        return Mat::identity(n);
    }
    let (rank, v) = right_svd_rank(a, tol);
    let idx: Vec<usize> = (rank..n).collect();
    v.columns(&idx)
}

/// Orthonormal basis of the column space, with the numerical rank decided by `tol`.
pub fn range_basis(a: &Mat, tol: f64) -> Mat {
    let at = a.transpose();
    let rank = numeric_rank(&at, tol);
    let svd = right_svd(&at);
    let idx: Vec<usize> = (0..rank).collect();
    svd.v.columns(&idx)
}

/// Orthonormalize the columns of `a` (modified Gram–Schmidt with reorthogonalization),
/// dropping columns that are numerically dependent.
pub fn orthonormalize(a: &Mat, tol: f64) -> Mat {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for j in 0..a.cols() {
        let mut c = a.col(j);
        let n0 = dot(&c, &c).sqrt();
        if n0 == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for b in &basis {
                let p = dot(&c, b);
                for (x, y) in c.iter_mut().zip(b) {
                    *x -= p * y;
                }
            }
        }
        let nrm = dot(&c, &c).sqrt();
        if nrm > tol * n0 {
            basis.push(c.iter().map(|x| x / nrm).collect());
        }
    }
    let mut out = Mat::zeros(a.rows(), basis.len());
    for (j, b) in basis.iter().enumerate() {
        out.set_col(j, b);
    }
    out
}

/// Least-squares solution of min ‖Ax − b‖ with minimum norm (pseudo-inverse via SVD).
pub fn lstsq(a: &Mat, b: &[f64], tol: f64) -> Vec<f64> {
    let svd = right_svd(a);
    let n = a.cols();
    let av = a * &svd.v;
    let smax = svd.sigma.first().copied().unwrap_or(0.0);
    let mut x = vec![0.0; n];
    for (j, &s) in svd.sigma.iter().enumerate() {
        if smax == 0.0 || s <= tol * smax {
            continue;
        }
        // u_j = A v_j / σ_j
        let coef = (0..a.rows()).map(|i| av[(i, j)] * b[i]).sum::<f64>() / (s * s);
        for k in 0..n {
            x[k] += coef * svd.v[(k, j)];
        }
    }
    x
}
