use crate::cones::{expose, face_dim, Element, FaceRep};
use crate::numerics::{default_rank_tol, nullspace_basis, Mat};
use crate::sdp::{max_rank_element_with, primal_interior_point, MaxRankOutcome, SdpProblem, SdpStatus, Slice, STALL_ACCEPT};

use super::exact;
use super::system::{Lowered, Mode};
use super::{CertStep, Certificate, ConicSystem, FacialError, SingularityReport, Tolerances};

/// A reducing direction found by the auxiliary problem.
#[derive(Clone, Debug, PartialEq)]
pub struct Exposer {
    pub v: Element,
    pub z: Element,
    /// Smallest positive eigenvalue (or entry) of the normalized exposer on the face.
    pub margin: f64,
    /// False when the rank decision rested on an uncertified numeric cut.
    pub certified: bool,
    /// Threshold for reading the kernel of Z on the face.
    pub kernel_tol: f64,
}

pub(crate) enum Decision {
    Expose(Exposer),
    Done { margin: f64, certified: bool },
}

/// Any valid exposer at `face`, or None if the restricted system is strictly feasible.
///
/// Exact mode returns the first single-coordinate exposer; float mode has no cheaper
/// route than the maximal-rank one.
pub fn auxiliary_step(sys: &ConicSystem, face: &FaceRep) -> Result<Option<Exposer>, FacialError> {
    sys.check()?;
    if sys.mode == Mode::Exact {
        return exact::any_exposer(sys, face);
    }
    max_rank_exposing(sys, face)
}

/// A maximal-rank exposer at `face` (relative interior of the exposer slice).
pub fn max_rank_exposing(sys: &ConicSystem, face: &FaceRep) -> Result<Option<Exposer>, FacialError> {
    sys.check()?;
    if sys.mode == Mode::Exact {
        return exact::max_support_exposer(sys, face);
    }
    let low = sys.lowered()?;
    let (basis, support) = low.layout.face_parts(face)?;
    Ok(match float_decision(&low, &basis, &support, &Tolerances::default())? {
        Decision::Expose(e) => Some(e),
        Decision::Done { .. } => None,
    })
}

/// Parameters v ⊥ b as columns.
fn orthogonal_multipliers(b: &[f64]) -> Mat {
    if b.iter().all(|x| *x == 0.0) {
        return Mat::identity(b.len());
    }
    nullspace_basis(&Mat::from_rows(&[b.to_vec()]), 1e-12)
}

pub(crate) fn float_decision(low: &Lowered, basis: &Mat, support: &[usize], tol: &Tolerances) -> Result<Decision, FacialError> {
    let nb = orthogonal_multipliers(&low.b);
    let q = nb.cols();
    let bt = basis.transpose();
    let mut mats = Vec::with_capacity(q);
    let mut lins = Vec::with_capacity(q);
    for j in 0..q {
        let (w, z) = low.adjoint(&nb.col(j));
        mats.push((&(&bt * &w) * basis).symmetrize());
        lins.push(support.iter().map(|&k| z[k]).collect::<Vec<_>>());
    }
    let mut slice = Slice::new(basis.cols(), mats, if support.is_empty() { Vec::new() } else { lins });
    if let Some((pw, pz)) = &low.point {
        let on_face = (&(&bt * pw) * basis).symmetrize();
        slice = slice.with_orthogonal(on_face, support.iter().map(|&k| pz[k]).collect());
    }
    let mr = max_rank_element_with(&slice, tol.aux)?;
    let certified = mr.numeric_cuts == 0;
    if mr.outcome == MaxRankOutcome::Trivial {
        return Ok(Decision::Done { margin: mr.margin, certified });
    }
    let mut v = nb.matvec(&mr.coeffs);
    let scale = mr.w.trace() + mr.z.iter().sum::<f64>();
    for x in v.iter_mut() {
        *x /= scale;
    }
    let (w, z) = low.adjoint(&v);
    let r = basis.cols();
    let tau = default_rank_tol(1.0, r.max(support.len()).max(1));
    let kernel_tol = if mr.margin > 0.0 { tau.min(0.5 * mr.margin) } else { tau }.max(1e-11);
    Ok(Decision::Expose(Exposer {
        v: Element::Vector(v),
        z: low.layout.assemble(&w, &z),
        margin: mr.margin,
        certified,
        kernel_tol,
    }))
}

pub fn facial_reduction(sys: &ConicSystem) -> Result<SingularityReport, FacialError> {
    facial_reduction_with(sys, &Tolerances::default())
}

pub fn facial_reduction_with(sys: &ConicSystem, tol: &Tolerances) -> Result<SingularityReport, FacialError> {
    sys.check()?;
    if sys.mode == Mode::Exact {
        return exact::reduce(sys, tol);
    }
    let low = sys.lowered()?;
    let mut face = sys.cone.whole_face();
    let mut steps: Vec<CertStep> = Vec::new();
    let mut margins = Vec::new();
    let mut certified = true;
    let fail = |steps: &[CertStep], reason: String| FacialError::NumericalFailure {
        partial: Certificate { steps: steps.to_vec() },
        reason,
    };
    for _ in 0..=sys.cone.dim() {
        let (basis, support) = low.layout.face_parts(&face)?;
        let decision = float_decision(&low, &basis, &support, tol).map_err(|e| fail(&steps, e.to_string()))?;
        match decision {
            Decision::Done { margin, certified: c } => {
                margins.push(margin);
                certified &= c;
                let witness = feasible_point_on_face(&low, &basis, &support).map_err(|e| match e {
                    FacialError::Infeasible => FacialError::Infeasible,
                    other => fail(&steps, other.to_string()),
                })?;
                let sd = steps.len();
                let exact = certified && margin >= tol.exact_margin;
                return Ok(SingularityReport {
                    sd,
                    minimal_face: face,
                    certificate: Certificate { steps },
                    strictly_feasible: sd == 0,
                    tolerances: *tol,
                    margins,
                    exact,
                    exact_arithmetic: false,
                    witness: Some(witness),
                });
            }
            Decision::Expose(e) => {
                margins.push(e.margin);
                certified &= e.certified;
                let next = expose(&sys.cone, &face, &e.z, e.kernel_tol).map_err(|err| fail(&steps, err.to_string()))?;
                if face_dim(&sys.cone, &next)? >= face_dim(&sys.cone, &face)? {
                    return Err(fail(&steps, "exposing step did not reduce the face".into()));
                }
                steps.push(CertStep { v: e.v, z: e.z, face: next.clone(), tol: e.kernel_tol });
                face = next;
            }
        }
    }
    Err(fail(&steps, "step count exceeded the cone dimension".into()))
}

/// Singularity degree of face(b, ℳ(K)) in ℳ(K), computed through the preimage.
pub fn sd_of_image_face(sys: &ConicSystem) -> Result<usize, FacialError> {
    Ok(facial_reduction(sys)?.sd)
}

/// A point of the face satisfying the constraints (the trace-minimal one), or
/// `Infeasible`.
/// Primal residual at which the witness iteration stops; the iterate is still interior.
const INTERIOR_TOL: f64 = 1e-12;

fn feasible_point_on_face(low: &Lowered, basis: &Mat, support: &[usize]) -> Result<Element, FacialError> {
    let r = basis.cols();
    let p = support.len();
    let m = low.m();
    let bt = basis.transpose();
    let g: Vec<Mat> = low.mats.iter().map(|a| (&(&bt * a) * basis).symmetrize()).collect();
    let l: Vec<Vec<f64>> = low.lins.iter().map(|z| support.iter().map(|&k| z[k]).collect()).collect();
    let dim = r * (r + 1) / 2 + p;

    // independent combinations Qᵀℳ of the restricted functionals
    let phi_t = Mat::from_fn(dim, m, |k, i| {
        let sv = g[i].svec();
        if k < sv.len() {
            sv[k]
        } else {
            l[i][k - sv.len()]
        }
    });
    let svd = crate::numerics::svd::right_svd(&phi_t);
    let smax = svd.sigma.first().copied().unwrap_or(0.0);
    let k = if smax == 0.0 { 0 } else { svd.sigma.iter().take(dim.min(m)).filter(|&&s| s > 1e-10 * smax).count() };
    let idx: Vec<usize> = (0..k).collect();
    let q = svd.v.columns(&idx);
    let b = &low.b;
    let bq = q.transpose().matvec(b);
    let back = q.matvec(&bq);
    let bnorm = crate::numerics::norm2(b);
    let resid = crate::numerics::norm2(&b.iter().zip(&back).map(|(x, y)| x - y).collect::<Vec<_>>());
    if resid > 1e-8 * (1.0 + bnorm) {
        return Err(FacialError::Infeasible);
    }
    let embed = |rr: &Mat, zz: &[f64]| {
        let x = (&(basis * rr) * &bt).symmetrize();
        let mut z = vec![0.0; low.layout.lin_len];
        for (t, &kk) in support.iter().enumerate() {
            z[kk] = zz[t];
        }
        low.layout.assemble(&x, &z)
    };
    if k == 0 {
        return Ok(embed(&Mat::identity(r), &vec![1.0; p]));
    }
    let a: Vec<Mat> = (0..k)
        .map(|j| {
            let mut acc = Mat::zeros(r, r);
            for (i, gi) in g.iter().enumerate() {
                acc = &acc + &gi.scale(&q[(i, j)]);
            }
            acc
        })
        .collect();
    let gz = Mat::from_fn(k, p, |j, t| (0..m).map(|i| q[(i, j)] * l[i][t]).sum());
    let prob = SdpProblem::new(r, a, bq, Mat::zeros(r, r)).with_nonneg(gz, vec![0.0; p]);
    let sol = primal_interior_point(&prob, INTERIOR_TOL)?;
    let stalled = sol.status == SdpStatus::NumericalFailure && sol.residuals.primal <= STALL_ACCEPT && sol.residuals.dual <= STALL_ACCEPT;
    match sol.status {
        SdpStatus::Optimal => {}
        SdpStatus::PrimalInfeasible => return Err(FacialError::Infeasible),
        _ if stalled => {}
        other => return Err(FacialError::Invalid(format!("feasibility solve on the minimal face ended with {other:?}"))),
    }
    // minimal-norm correction onto the affine constraint set
    let mut xs = sol.x.symmetrize().svec();
    xs.extend_from_slice(&sol.z);
    let fitted = phi_t.transpose().matvec(&xs);
    let resid: Vec<f64> = b.iter().zip(&fitted).map(|(x, y)| x - y).collect();
    let delta = crate::numerics::svd::lstsq(&phi_t.transpose(), &resid, 1e-10);
    for (x, d) in xs.iter_mut().zip(&delta) {
        *x += d;
    }
    let nsv = r * (r + 1) / 2;
    Ok(embed(&Mat::smat(r, &xs[..nsv]), &xs[nsv..]))
}
