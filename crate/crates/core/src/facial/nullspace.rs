//! Facial reduction of {X̂ + 𝒩(y) ⪰ 0} in nullspace form.
//!
//! At a face V the exposers are the Ω ⊥ X̂, Ω ⊥ range(𝒩) with VᵀΩV ⪰ 0 and VᵀΩV ≠ 0.
//! Optional sign functionals Cₗ add ⟨Ω, Cₗ⟩ ≥ 0 while coordinate l is still in the face.

use crate::numerics::{default_rank_tol, nullspace_basis, sym_eigen_unchecked, Mat};
use crate::sdp::{max_rank_element, MaxRankOutcome, Slice};

use super::FacialError;

#[derive(Clone, Debug, PartialEq)]
pub struct NullspaceReduction {
    /// Ω₁, Ω₂, … in the ambient order of X̂, each trace-normalized on its face.
    pub exposers: Vec<Mat>,
    /// ⟨Ωₖ, Cₗ⟩ for every sign functional.
    pub sign_values: Vec<Vec<f64>>,
    /// Face basis after each step.
    pub faces: Vec<Mat>,
    /// Sign functionals still active after each step.
    pub supports: Vec<Vec<usize>>,
    /// Margin of every auxiliary decision, the final one last.
    pub margins: Vec<f64>,
    /// No decision rested on an uncertified numeric cut.
    pub certified: bool,
}

/// Exposer sequence of {X̂ + Σ yₖBₖ ⪰ 0}.
pub fn nullspace_reduce(x_hat: &Mat, basis: &[Mat]) -> Result<Vec<Mat>, FacialError> {
    Ok(nullspace_reduce_signed(x_hat, basis, &[])?.exposers)
}

pub fn nullspace_reduce_signed(x_hat: &Mat, basis: &[Mat], signs: &[Mat]) -> Result<NullspaceReduction, FacialError> {
    let n = x_hat.rows();
    if !x_hat.is_square() || basis.iter().chain(signs).any(|b| b.shape() != (n, n)) {
        return Err(FacialError::Invalid("nullspace data must be square matrices of one order".into()));
    }
    if x_hat.symmetry_residual() > 1e-10 || crate::numerics::lambda_min(&x_hat.symmetrize()) < -1e-8 * (1.0 + x_hat.max_abs()) {
        return Err(FacialError::Invalid("X̂ must be symmetric positive semidefinite".into()));
    }

    // Ω ranges over the orthogonal complement of span{X̂, B₁, …}
    let rows: Vec<Vec<f64>> = std::iter::once(x_hat)
        .chain(basis)
        .map(|m| {
            let v = m.symmetrize().svec();
            let norm = crate::numerics::norm2(&v);
            if norm > 0.0 {
                v.iter().map(|x| x / norm).collect()
            } else {
                v
            }
        })
        .collect();
    let dim = n * (n + 1) / 2;
    let comp = nullspace_basis(&Mat::from_rows(&rows), 1e-10);
    let space: Vec<Mat> = (0..comp.cols()).map(|j| Mat::smat(n, &comp.col(j))).collect();
    debug_assert!(comp.rows() == dim);

    let mut face = Mat::identity(n);
    let mut support: Vec<usize> = (0..signs.len()).collect();
    let mut out = NullspaceReduction {
        exposers: Vec::new(),
        sign_values: Vec::new(),
        faces: Vec::new(),
        supports: Vec::new(),
        margins: Vec::new(),
        certified: true,
    };
    for _ in 0..=n + signs.len() {
        let ft = face.transpose();
        let mats: Vec<Mat> = space.iter().map(|s| (&(&ft * s) * &face).symmetrize()).collect();
        let lin: Vec<Vec<f64>> = if support.is_empty() {
            Vec::new()
        } else {
            space.iter().map(|s| support.iter().map(|&l| s.inner(&signs[l])).collect()).collect()
        };
        // X̂ lies in every face of the sequence and is orthogonal to every candidate
        let x_face = (&(&ft * x_hat) * &face).symmetrize();
        let slice = Slice::new(face.cols(), mats, lin).with_orthogonal(x_face, vec![0.0; support.len()]);
        let mr = max_rank_element(&slice)?;
        out.margins.push(mr.margin);
        out.certified &= mr.numeric_cuts == 0;
        if mr.outcome == MaxRankOutcome::Trivial {
            return Ok(out);
        }
        let scale = mr.w.trace() + mr.z.iter().sum::<f64>();
        let mut omega = Mat::zeros(n, n);
        for (c, s) in mr.coeffs.iter().zip(&space) {
            omega = &omega + &s.scale(&(c / scale));
        }
        let omega = omega.symmetrize();
        let values: Vec<f64> = signs.iter().map(|c| omega.inner(c)).collect();
        let r = face.cols();
        let tau = default_rank_tol(1.0, r.max(support.len()).max(1));
        let kernel_tol = if mr.margin > 0.0 { tau.min(0.5 * mr.margin) } else { tau }.max(1e-11);
        let w = (&(&ft * &omega) * &face).symmetrize();
        let e = sym_eigen_unchecked(&w);
        let next = &face * &e.vectors_where(|l| l.abs() <= kernel_tol);
        let next_support: Vec<usize> = support.iter().copied().filter(|&l| values[l] <= kernel_tol).collect();
        if next.cols() == r && next_support.len() == support.len() {
            return Err(FacialError::Invalid("nullspace exposer did not reduce the face".into()));
        }
        out.exposers.push(omega);
        out.sign_values.push(values);
        out.faces.push(next.clone());
        out.supports.push(next_support.clone());
        face = next;
        support = next_support;
    }
    Err(FacialError::Invalid("nullspace reduction exceeded the cone dimension".into()))
}
