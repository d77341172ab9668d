//! Lindenstrauss map between centered Gram matrices and distance matrices.

use crate::numerics::{Mat, Matrix, Scalar};

/// K(X)ᵢⱼ = Xᵢᵢ + Xⱼⱼ − 2Xᵢⱼ.
pub fn k_map<T: Scalar>(x: &Matrix<T>) -> Matrix<T> {
    let n = x.rows();
    let two = T::from_int(2);
    Matrix::from_fn(n, n, |i, j| x[(i, i)].clone() + x[(j, j)].clone() - two.clone() * x[(i, j)].clone())
}

/// Adjoint K*(D) = 2(Diag(De) − D).
pub fn k_adjoint<T: Scalar>(d: &Matrix<T>) -> Matrix<T> {
    let n = d.rows();
    let two = T::from_int(2);
    let row_sums: Vec<T> = (0..n).map(|i| d.row(i).iter().cloned().fold(T::zero(), |a, b| a + b)).collect();
    Matrix::from_fn(n, n, |i, j| {
        let diag = if i == j { row_sums[i].clone() } else { T::zero() };
        two.clone() * (diag - d[(i, j)].clone())
    })
}

/// Centering projector J = I − eeᵀ/n.
pub fn centering<T: Scalar>(n: usize) -> Matrix<T> {
    let inv = T::one() / T::from_int(n as i64);
    Matrix::from_fn(n, n, |i, j| if i == j { T::one() - inv.clone() } else { -inv.clone() })
}

/// D with its diagonal zeroed.
pub fn off_diag<T: Scalar>(d: &Matrix<T>) -> Matrix<T> {
    Matrix::from_fn(d.rows(), d.cols(), |i, j| if i == j { T::zero() } else { d[(i, j)].clone() })
}

/// Pseudoinverse K†(D) = −½ J offDiag(D) J.
pub fn k_pinv<T: Scalar>(d: &Matrix<T>) -> Matrix<T> {
    let n = d.rows();
    if n == 0 {
        return d.clone();
    }
    let j = centering::<T>(n);
    let half = T::one() / T::from_int(2);
    (&(&j * &off_diag(d)) * &j).scale(&-half)
}

/// Orthonormal basis U (n × (n−1)) of e⊥: the trailing columns of the Householder
/// reflection exchanging e₁ and e/√n.
pub fn centered_basis(n: usize) -> Mat {
    if n <= 1 {
        return Mat::zeros(n, 0);
    }
    let s = 1.0 / (n as f64).sqrt();
    let mut w = vec![s; n];
    w[0] -= 1.0;
    let ww: f64 = w.iter().map(|v| v * v).sum();
    Mat::from_fn(n, n - 1, |i, j| {
        let col = j + 1;
        let id = if i == col { 1.0 } else { 0.0 };
        id - 2.0 * w[i] * w[col] / ww
    })
}

/// Pull a functional on distance matrices back to the reduced Gram space: Uᵀ K*(A) U.
pub fn edm_lower(a: &Mat) -> Mat {
    let u = centered_basis(a.rows());
    &(&u.transpose() * &k_adjoint(a)) * &u
}

/// Distance matrix of the reduced Gram matrix Y: K(U Y Uᵀ).
pub fn edm_from_reduced(y: &Mat) -> Mat {
    let u = centered_basis(y.rows() + 1);
    k_map(&(&(&u * y) * &u.transpose()))
}

/// Reduced Gram coordinates Y = Uᵀ X U of a (centered) Gram matrix X.
pub fn reduce_gram(x: &Mat) -> Mat {
    let u = centered_basis(x.rows());
    &(&u.transpose() * x) * &u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::int;
    use crate::numerics::{RatMat, Rational};

    #[test]
    fn k_examples() {
        assert_eq!(k_map(&Mat::zeros(2, 2)), Mat::zeros(2, 2));
        assert_eq!(k_map(&Mat::identity(2)), Mat::from_rows(&[vec![0.0, 2.0], vec![2.0, 0.0]]));
        assert_eq!(k_map(&Mat::from_fn(3, 3, |_, _| 1.0)), Mat::zeros(3, 3));
    }

    #[test]
    fn adjoint_examples() {
        let d = Mat::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(k_adjoint(&d), Mat::from_rows(&[vec![2.0, -2.0], vec![-2.0, 2.0]]));
        assert_eq!(k_adjoint(&Mat::identity(2)), Mat::zeros(2, 2));
    }

    #[test]
    fn pinv_example_exact() {
        let d = RatMat::from_rows(&[vec![int(0), int(2)], vec![int(2), int(0)]]);
        let half = Rational::new(1.into(), 2.into());
        let expect = RatMat::from_rows(&[vec![half.clone(), -half.clone()], vec![-half.clone(), half]]);
        assert_eq!(k_pinv(&d), expect);
    }

    #[test]
    fn centered_basis_is_orthonormal_and_centered() {
        for n in 1..=7 {
            let u = centered_basis(n);
            assert_eq!(u.shape(), (n, n.saturating_sub(1)));
            assert!((&(&u.transpose() * &u) - &Mat::identity(n - 1)).max_abs() < 1e-14);
            for j in 0..u.cols() {
                assert!(u.col(j).iter().sum::<f64>().abs() < 1e-14);
            }
        }
    }

    #[test]
    fn lowering_matches_distance_functional() {
        let y = Mat::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]);
        let d = edm_from_reduced(&y);
        let mut a = Mat::zeros(3, 3);
        a[(0, 2)] = 0.5;
        a[(2, 0)] = 0.5;
        assert!((edm_lower(&a).inner(&y) - d[(0, 2)]).abs() < 1e-13);
    }
}
