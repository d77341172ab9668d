//! Linear maximization over a trace-normalized slice of a linearly parametrized cone.
//!
//! The slice is {c : W(c) = Σ cⱼWⱼ ⪰ 0, z(c) = Σ cⱼzⱼ ≥ 0, tr W(c) + Σ z(c) ≤ 1} and the
//! objective is ⟨P, W(c)⟩ + ⟨p, z(c)⟩. It is posed as the dual of an SDP whose primal
//! carries the Slater point certifying an empty slice.

use crate::numerics::{dot, right_svd_rank, sym_eigen_unchecked, Mat};

use super::{solve, SdpError, SdpProblem, SdpSolution, SdpStatus};

/// Relative singular-value cutoff for dropping dependent parameter directions.
const PARAM_RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Slice {
    /// Order of the matrix part (may be 0).
    pub order: usize,
    pub mats: Vec<Mat>,
    /// Linear (nonnegative) parts, each of common length; empty when absent.
    pub lin: Vec<Vec<f64>>,
    /// A known element (Y, y) of the dual cone orthogonal to every (W(c), z(c)).
    pub orth: Option<(Mat, Vec<f64>)>,
}

#[derive(Clone, Debug)]
pub struct SliceOptimum {
    pub value: f64,
    /// Coefficients c in the caller's parametrization.
    pub coeffs: Vec<f64>,
    pub w: Mat,
    pub z: Vec<f64>,
    /// Conditioning of the Slater point (X + I, z + 1) read off the primal; meaningful
    /// when the objective is the normalization itself and the optimum is 0.
    pub margin: f64,
    pub status: SdpStatus,
    pub solution: Option<SdpSolution>,
}

impl Slice {
    pub fn new(order: usize, mats: Vec<Mat>, lin: Vec<Vec<f64>>) -> Self {
        Slice { order, mats, lin, orth: None }
    }

    /// Attach a known (Y, y) ⪰ 0 with ⟨Y, W(c)⟩ + ⟨y, z(c)⟩ = 0 for all c. Its range is
    /// cut exactly before any solve.
    pub fn with_orthogonal(mut self, y_mat: Mat, y_lin: Vec<f64>) -> Self {
        self.orth = Some((y_mat, y_lin));
        self
    }

    pub fn params(&self) -> usize {
        self.mats.len().max(self.lin.len())
    }

    pub fn lin_len(&self) -> usize {
        self.lin.first().map_or(0, |v| v.len())
    }

    fn mat(&self, j: usize) -> Mat {
        self.mats.get(j).cloned().unwrap_or_else(|| Mat::zeros(self.order, self.order))
    }

    fn linv(&self, j: usize) -> Vec<f64> {
        self.lin.get(j).cloned().unwrap_or_else(|| vec![0.0; self.lin_len()])
    }

    /// W(c) and z(c).
    pub fn eval(&self, c: &[f64]) -> (Mat, Vec<f64>) {
        let mut w = Mat::zeros(self.order, self.order);
        let mut z = vec![0.0; self.lin_len()];
        for (j, &cj) in c.iter().enumerate() {
            if cj == 0.0 {
                continue;
            }
            w = &w + &self.mat(j).scale(&cj);
            for (zk, v) in z.iter_mut().zip(self.linv(j)) {
                *zk += cj * v;
            }
        }
        (w.symmetrize(), z)
    }

    /// Largest norm of a single generator (W_j, z_j).
    pub fn unit_scale(&self) -> f64 {
        (0..self.params()).map(|j| self.mat(j).frobenius() + crate::numerics::norm2(&self.linv(j))).fold(0.0, f64::max)
    }

    /// Orthonormal basis R (q × q') of the directions c with (W(c), z(c)) ≠ 0.
    pub fn injective_basis(&self) -> Mat {
        let q = self.params();
        let dim = self.order * (self.order + 1) / 2 + self.lin_len();
        let phi = Mat::from_fn(dim, q, |row, j| {
            let mut col = self.mat(j).symmetrize().svec();
            col.extend(self.linv(j));
            col[row]
        });
        let (rank, v) = right_svd_rank(&phi, PARAM_RANK_TOL);
        let idx: Vec<usize> = (0..rank).collect();
        v.columns(&idx)
    }
}

/// Maximize ⟨P, W⟩ + ⟨p, z⟩ over the slice.
pub fn max_linear_over_slice(slice: &Slice, p_mat: &Mat, p_vec: &[f64]) -> Result<SliceOptimum, SdpError> {
    let q = slice.params();
    let r = slice.order;
    let plen = slice.lin_len();
    let basis = slice.injective_basis();
    let q2 = basis.cols();
    if q2 == 0 {
        return Ok(SliceOptimum {
            value: 0.0,
            coeffs: vec![0.0; q],
            w: Mat::zeros(r, r),
            z: vec![0.0; plen],
            margin: 1.0,
            status: SdpStatus::Optimal,
            solution: None,
        });
    }
    let reduced: Vec<(Mat, Vec<f64>)> = (0..q2).map(|k| slice.eval(&basis.col(k))).collect();

    let a: Vec<Mat> = reduced.iter().map(|(w, _)| -w).collect();
    let b: Vec<f64> = reduced.iter().map(|(w, z)| p_mat.inner(w) + dot(p_vec, z)).collect();
    let g = Mat::from_fn(q2, plen + 1, |j, k| {
        let (w, z) = &reduced[j];
        if k < plen {
            -z[k]
        } else {
            w.trace() + z.iter().sum::<f64>()
        }
    });
    let mut c_z = vec![0.0; plen + 1];
    c_z[plen] = 1.0;
    let prob = SdpProblem::new(r, a, b, Mat::zeros(r, r)).with_nonneg(g, c_z);
    let sol = solve(&prob)?;

    let coeffs = basis.matvec(&sol.y);
    let (w, z) = slice.eval(&coeffs);
    let value = p_mat.inner(&w) + dot(p_vec, &z);
    let margin = slater_margin(&sol.x, &sol.z[..plen]);
    Ok(SliceOptimum { value, coeffs, w, z, margin, status: sol.status, solution: Some(sol) })
}

fn slater_margin(x: &Mat, z: &[f64]) -> f64 {
    let shifted = &(x.symmetrize()) + &Mat::identity(x.rows());
    let e = sym_eigen_unchecked(&shifted);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    if x.rows() > 0 {
        lo = e.min();
        hi = e.max();
    }
    for v in z {
        lo = lo.min(v + 1.0);
        hi = hi.max(v + 1.0);
    }
    if hi <= 0.0 || !lo.is_finite() {
        return 1.0;
    }
    (lo / hi).max(0.0)
}

/// Maximize ⟨P, Vᵀ𝒜*(v)V⟩ over v ⊥ b with Vᵀ𝒜*(v)V ⪰ 0 and trace ≤ 1.
///
/// Returns the optimum, the multiplier v, and W = Vᵀ𝒜*(v)V.
pub fn max_linear_over_face(basis: &Mat, a: &[Mat], b: &[f64], p_mat: &Mat) -> Result<(f64, Vec<f64>, Mat), SdpError> {
    let m = a.len();
    let bt = Mat::from_rows(&[b.to_vec()]);
    let nb = if b.iter().all(|v| *v == 0.0) { Mat::identity(m) } else { crate::numerics::nullspace_basis(&bt, 1e-12) };
    let lowered: Vec<Mat> = a.iter().map(|ai| &(&basis.transpose() * ai) * basis).collect();
    let mats: Vec<Mat> = (0..nb.cols())
        .map(|j| {
            let mut w = Mat::zeros(basis.cols(), basis.cols());
            for (i, li) in lowered.iter().enumerate() {
                if nb[(i, j)] != 0.0 {
                    w = &w + &li.scale(&nb[(i, j)]);
                }
            }
            w
        })
        .collect();
    let slice = Slice::new(basis.cols(), mats, Vec::new());
    let opt = max_linear_over_slice(&slice, p_mat, &[])?;
    let v = nb.matvec(&opt.coeffs);
    Ok((opt.value, v, opt.w))
}
