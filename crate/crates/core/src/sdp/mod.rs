//! Dense primal-dual interior-point solver for small SDPs with a nonnegative block.
//!
//! Primal:  min ⟨C,X⟩ + c_zᵀz   s.t. ⟨Aᵢ,X⟩ + (Gz)ᵢ = bᵢ,  X ⪰ 0, z ≥ 0
//! Dual:    max bᵀy             s.t. C − Σ yᵢAᵢ = S ⪰ 0,  c_z − Gᵀy = s ≥ 0
//!
//! Infeasible-start Mehrotra predictor-corrector with the HKM direction.

pub mod maxrank;
pub mod slice;

use thiserror::Error;

use crate::numerics::eigen::{cholesky, cholesky_solve, lower_inverse};
use crate::numerics::{dot, lambda_min, norm2, numeric_rank, Mat};

pub use maxrank::{max_rank_element, max_rank_element_with, MaxRank, MaxRankOutcome};
pub use slice::{max_linear_over_face, max_linear_over_slice, Slice, SliceOptimum};

pub const FEAS_TOL: f64 = 1e-8;
pub const MAX_ITERS: usize = 100;
/// Residual level at which a stalled solve is still usable.
pub const STALL_ACCEPT: f64 = 1e-6;
const STEP_FRACTION: f64 = 0.98;
const SCHUR_REG: f64 = 1e-12;
const REFINE_STEPS: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SdpError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("constraint functionals are linearly dependent (rank {rank} < {m})")]
    RankDeficient { rank: usize, m: usize },
}

#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub n: usize,
    pub a: Vec<Mat>,
    pub b: Vec<f64>,
    pub c: Mat,
    /// m×p coefficients of the nonnegative variables (p may be 0).
    pub g: Mat,
    pub c_z: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    /// `y` holds a normalized Farkas ray: bᵀy = 1, −Σ yᵢAᵢ ⪰ 0, −Gᵀy ≥ 0.
    PrimalInfeasible,
    /// `x`, `z` hold a normalized improving ray: ⟨C,X⟩ + c_zᵀz = −1, 𝒜(X) + Gz = 0.
    DualInfeasible,
    NumericalFailure,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub x: Mat,
    pub z: Vec<f64>,
    pub y: Vec<f64>,
    pub s: Mat,
    pub s_z: Vec<f64>,
    pub primal_obj: f64,
    pub dual_obj: f64,
    /// Relative residuals at the returned iterate.
    pub residuals: Residuals,
    pub iterations: usize,
}

impl SdpProblem {
    pub fn new(n: usize, a: Vec<Mat>, b: Vec<f64>, c: Mat) -> Self {
        let m = a.len();
        SdpProblem { n, a, b, c, g: Mat::zeros(m, 0), c_z: Vec::new() }
    }

    pub fn with_nonneg(mut self, g: Mat, c_z: Vec<f64>) -> Self {
        self.g = g;
        self.c_z = c_z;
        self
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn p(&self) -> usize {
        self.c_z.len()
    }

    pub fn check(&self) -> Result<(), SdpError> {
        let (n, m, p) = (self.n, self.m(), self.p());
        if self.b.len() != m || self.c.shape() != (n, n) || self.g.shape() != (m, p) {
            return Err(SdpError::Shape(format!(
                "n={n}, m={m}, p={p}, |b|={}, C {:?}, G {:?}",
                self.b.len(),
                self.c.shape(),
                self.g.shape()
            )));
        }
        if let Some(bad) = self.a.iter().find(|a| a.shape() != (n, n)) {
            return Err(SdpError::Shape(format!("constraint matrix {:?}, expected order {n}", bad.shape())));
        }
        if m > 0 {
            let rows: Vec<Vec<f64>> = (0..m)
                .map(|i| {
                    let mut r = self.a[i].symmetrize().svec();
                    r.extend_from_slice(self.g.row(i));
                    r
                })
                .collect();
            let rank = numeric_rank(&Mat::from_rows(&rows), 1e-10);
            if rank < m {
                return Err(SdpError::RankDeficient { rank, m });
            }
        }
        Ok(())
    }

    /// 𝒜(X)ᵢ = ⟨Aᵢ, X⟩.
    pub fn apply(&self, x: &Mat) -> Vec<f64> {
        self.a.iter().map(|a| a.inner(x)).collect()
    }

    /// 𝒜*(y) = Σ yᵢAᵢ.
    pub fn adjoint(&self, y: &[f64]) -> Mat {
        let mut out = Mat::zeros(self.n, self.n);
        for (a, &yi) in self.a.iter().zip(y) {
            if yi != 0.0 {
                out = &out + &a.scale(&yi);
            }
        }
        out
    }

    fn g_mul(&self, z: &[f64]) -> Vec<f64> {
        self.g.matvec(z)
    }

    fn gt_mul(&self, y: &[f64]) -> Vec<f64> {
        self.g.transpose().matvec(y)
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn axpy(x: &[f64], alpha: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a + alpha * b).collect()
}

/// Largest α ≤ 1 keeping X + αΔX ⪰ 0, times the boundary fraction.
fn psd_step(x: &Mat, dx: &Mat) -> Option<f64> {
    if x.rows() == 0 {
        return Some(1.0);
    }
    let l = cholesky(x)?;
    let li = lower_inverse(&l);
    let m = &(&li * dx) * &li.transpose();
    let lmin = lambda_min(&m);
    Some(if lmin >= 0.0 { 1.0 } else { (-STEP_FRACTION / lmin).min(1.0) })
}

fn vec_step(z: &[f64], dz: &[f64]) -> f64 {
    let mut alpha: f64 = 1.0;
    for (&v, &d) in z.iter().zip(dz) {
        if d < 0.0 {
            alpha = alpha.min(STEP_FRACTION * -v / d);
        }
    }
    alpha
}

struct Iterate {
    x: Mat,
    z: Vec<f64>,
    y: Vec<f64>,
    s: Mat,
    s_z: Vec<f64>,
}

struct Direction {
    dx: Mat,
    dz: Vec<f64>,
    dy: Vec<f64>,
    ds: Mat,
    dsz: Vec<f64>,
}

pub fn solve(prob: &SdpProblem) -> Result<SdpSolution, SdpError> {
    solve_to(prob, FEAS_TOL)
}

/// As [`solve`] but stopping at relative residuals and gap `tol`.
pub fn solve_to(prob: &SdpProblem, tol: f64) -> Result<SdpSolution, SdpError> {
    run(prob, |r| r.primal <= tol && r.dual <= tol && r.gap <= tol)
}

/// Run the interior-point iteration only until the primal residual is at most `tol`.
///
/// The returned X (status Optimal) is then an interior point of the cone, feasible up to
/// `tol`; the objective only steers the path.
pub fn primal_interior_point(prob: &SdpProblem, tol: f64) -> Result<SdpSolution, SdpError> {
    run(prob, |r| r.primal <= tol)
}

fn run(prob: &SdpProblem, done: impl Fn(&Residuals) -> bool) -> Result<SdpSolution, SdpError> {
    prob.check()?;
    let (n, m, p) = (prob.n, prob.m(), prob.p());
    let b_inf = prob.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let c_inf = prob.c.max_abs().max(prob.c_z.iter().fold(0.0f64, |a, v| a.max(v.abs())));
    let init = 1.0f64.max(b_inf).max(c_inf);
    let mut it = Iterate {
        x: Mat::identity(n).scale(&init),
        z: vec![init; p],
        y: vec![0.0; m],
        s: Mat::identity(n).scale(&init),
        s_z: vec![init; p],
    };
    let b_norm = norm2(&prob.b);
    let c_norm = prob.c.frobenius() + norm2(&prob.c_z);
    let order = (n + p).max(1) as f64;

    let mut last = None;
    for iter in 0..MAX_ITERS {
        let rp = sub(&sub(&prob.b, &prob.apply(&it.x)), &prob.g_mul(&it.z));
        let rd = &(&prob.c - &prob.adjoint(&it.y)) - &it.s;
        let rdz = sub(&sub(&prob.c_z, &prob.gt_mul(&it.y)), &it.s_z);
        let pobj = prob.c.inner(&it.x) + dot(&prob.c_z, &it.z);
        let dobj = dot(&prob.b, &it.y);
        let residuals = Residuals {
            primal: norm2(&rp) / (1.0 + b_norm),
            dual: (rd.frobenius() + norm2(&rdz)) / (1.0 + c_norm),
            gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
        };
        let finish = |status, it: Iterate, residuals| SdpSolution {
            status,
            x: it.x,
            z: it.z,
            y: it.y,
            s: it.s,
            s_z: it.s_z,
            primal_obj: pobj,
            dual_obj: dobj,
            residuals,
            iterations: iter,
        };
        if done(&residuals) {
            return Ok(finish(SdpStatus::Optimal, it, residuals));
        }
        if let Some(ray) = farkas_dual_ray(prob, &it.y, dobj) {
            let mut it = it;
            it.y = ray;
            return Ok(finish(SdpStatus::PrimalInfeasible, it, residuals));
        }
        if let Some((xr, zr)) = improving_primal_ray(prob, &it.x, &it.z, pobj) {
            let mut it = it;
            it.x = xr;
            it.z = zr;
            return Ok(finish(SdpStatus::DualInfeasible, it, residuals));
        }
        if !(pobj.is_finite() && dobj.is_finite()) || it.x.max_abs() > 1e15 || it.s.max_abs() > 1e15 {
            return Ok(finish(SdpStatus::NumericalFailure, it, residuals));
        }

        let mu = (it.x.inner(&it.s) + dot(&it.z, &it.s_z)) / order;
        let Some(newton) = NewtonSystem::new(prob, &it) else {
            return Ok(finish(SdpStatus::NumericalFailure, it, residuals));
        };

        // predictor
        let xs = &it.x * &it.s;
        let rc_aff = -&xs;
        let rcz_aff: Vec<f64> = it.z.iter().zip(&it.s_z).map(|(a, b)| -a * b).collect();
        let aff = newton.direction(prob, &it, &rp, &rd, &rdz, &rc_aff, &rcz_aff);
        let (Some(ap), Some(ad)) = (step_primal(&it, &aff), step_dual(&it, &aff)) else {
            return Ok(finish(SdpStatus::NumericalFailure, it, residuals));
        };
        let x_aff = &it.x + &aff.dx.scale(&ap);
        let s_aff = &it.s + &aff.ds.scale(&ad);
        let z_aff = axpy(&it.z, ap, &aff.dz);
        let sz_aff = axpy(&it.s_z, ad, &aff.dsz);
        let mu_aff = (x_aff.inner(&s_aff) + dot(&z_aff, &sz_aff)) / order;
        let sigma = if mu > 0.0 { (mu_aff / mu).max(0.0).min(1.0).powi(3) } else { 0.0 };

        // corrector
        let mut rc = &Mat::identity(n).scale(&(sigma * mu)) - &xs;
        rc = &rc - &(&aff.dx * &aff.ds);
        let rcz: Vec<f64> = (0..p)
            .map(|k| sigma * mu - it.z[k] * it.s_z[k] - aff.dz[k] * aff.dsz[k])
            .collect();
        let dir = newton.direction(prob, &it, &rp, &rd, &rdz, &rc, &rcz);
        let (Some(ap), Some(ad)) = (step_primal(&it, &dir), step_dual(&it, &dir)) else {
            return Ok(finish(SdpStatus::NumericalFailure, it, residuals));
        };
        it.x = (&it.x + &dir.dx.scale(&ap)).symmetrize();
        it.z = axpy(&it.z, ap, &dir.dz);
        it.y = axpy(&it.y, ad, &dir.dy);
        it.s = (&it.s + &dir.ds.scale(&ad)).symmetrize();
        it.s_z = axpy(&it.s_z, ad, &dir.dsz);
        last = Some(residuals);
    }
    let rp = sub(&sub(&prob.b, &prob.apply(&it.x)), &prob.g_mul(&it.z));
    let pobj = prob.c.inner(&it.x) + dot(&prob.c_z, &it.z);
    let dobj = dot(&prob.b, &it.y);
    let mut residuals = last.unwrap_or_default();
    residuals.primal = norm2(&rp) / (1.0 + b_norm);
    Ok(SdpSolution {
        status: SdpStatus::NumericalFailure,
        x: it.x,
        z: it.z,
        y: it.y,
        s: it.s,
        s_z: it.s_z,
        primal_obj: pobj,
        dual_obj: dobj,
        residuals,
        iterations: MAX_ITERS,
    })
}

fn step_primal(it: &Iterate, d: &Direction) -> Option<f64> {
    Some(psd_step(&it.x, &d.dx)?.min(vec_step(&it.z, &d.dz)))
}

fn step_dual(it: &Iterate, d: &Direction) -> Option<f64> {
    Some(psd_step(&it.s, &d.ds)?.min(vec_step(&it.s_z, &d.dsz)))
}

/// y/bᵀy when it certifies primal infeasibility within tolerance.
fn farkas_dual_ray(prob: &SdpProblem, y: &[f64], dobj: f64) -> Option<Vec<f64>> {
    if !(dobj > 0.0) {
        return None;
    }
    let ray: Vec<f64> = y.iter().map(|v| v / dobj).collect();
    let t = -&prob.adjoint(&ray);
    let tz = prob.gt_mul(&ray);
    let viol = (-lambda_min(&t)).max(tz.iter().fold(0.0f64, |a, v| a.max(*v))).max(0.0);
    (viol <= FEAS_TOL).then_some(ray)
}

/// (X, z)/(−objective) when it certifies dual infeasibility within tolerance.
fn improving_primal_ray(prob: &SdpProblem, x: &Mat, z: &[f64], pobj: f64) -> Option<(Mat, Vec<f64>)> {
    if !(pobj < 0.0) {
        return None;
    }
    let scale = -1.0 / pobj;
    let xr = x.scale(&scale);
    let zr: Vec<f64> = z.iter().map(|v| v * scale).collect();
    let r = axpy(&prob.apply(&xr), 1.0, &prob.g_mul(&zr));
    (norm2(&r) <= FEAS_TOL).then_some((xr, zr))
}

struct NewtonSystem {
    s_inv: Mat,
    /// Unregularized Schur matrix, for refining solves against the regularized factor.
    schur: Mat,
    schur_chol: Mat,
    ratio: Vec<f64>,
}

impl NewtonSystem {
    fn new(prob: &SdpProblem, it: &Iterate) -> Option<Self> {
        let (n, m, p) = (prob.n, prob.m(), prob.p());
        let s_inv = if n == 0 {
            Mat::zeros(0, 0)
        } else {
            let l = cholesky(&it.s)?;
            let li = lower_inverse(&l);
            (&li.transpose() * &li).symmetrize()
        };
        let ratio: Vec<f64> = (0..p).map(|k| it.z[k] / it.s_z[k]).collect();
        let mut schur = Mat::zeros(m, m);
        for j in 0..m {
            let bj = &(&it.x * &prob.a[j]) * &s_inv;
            for i in 0..=j {
                let mut v = prob.a[i].inner(&bj.transpose());
                for k in 0..p {
                    v += prob.g[(i, k)] * ratio[k] * prob.g[(j, k)];
                }
                schur[(i, j)] = v;
            }
        }
        // tr(AᵢXAⱼS⁻¹) is symmetric in (i, j)
        for j in 0..m {
            for i in 0..j {
                schur[(j, i)] = schur[(i, j)];
            }
        }
        let dmax = schur.diagonal().into_iter().fold(1.0f64, f64::max);
        let mut reg = schur.clone();
        for i in 0..m {
            reg[(i, i)] += SCHUR_REG * dmax;
        }
        let schur_chol = cholesky(&reg)?;
        Some(NewtonSystem { s_inv, schur, schur_chol, ratio })
    }

    /// Solve with the regularized factor, then refine against the exact Schur matrix;
    /// near the optimum its condition number grows like 1/μ and the regularization alone
    /// would bias dy enough to stall the primal residual.
    fn solve_schur(&self, rhs: &[f64]) -> Vec<f64> {
        let mut dy = cholesky_solve(&self.schur_chol, rhs);
        let scale = norm2(rhs);
        for _ in 0..REFINE_STEPS {
            let r = sub(rhs, &self.schur.matvec(&dy));
            if norm2(&r) <= 1e-15 * scale {
                break;
            }
            dy = axpy(&dy, 1.0, &cholesky_solve(&self.schur_chol, &r));
        }
        dy
    }

    #[allow(clippy::too_many_arguments)]
    fn direction(
        &self,
        prob: &SdpProblem,
        it: &Iterate,
        rp: &[f64],
        rd: &Mat,
        rdz: &[f64],
        rc: &Mat,
        rcz: &[f64],
    ) -> Direction {
        let p = prob.p();
        let t = (&(rc - &(&it.x * rd)) * &self.s_inv).symmetrize();
        let wz: Vec<f64> = (0..p).map(|k| rcz[k] / it.s_z[k] - self.ratio[k] * rdz[k]).collect();
        let rhs = sub(&sub(rp, &prob.apply(&t)), &prob.g_mul(&wz));
        let dy = self.solve_schur(&rhs);
        let ds = rd - &prob.adjoint(&dy);
        let dsz = sub(rdz, &prob.gt_mul(&dy));
        let dx = (&(rc - &(&it.x * &ds)) * &self.s_inv).symmetrize();
        let dz: Vec<f64> = (0..p).map(|k| (rcz[k] - it.z[k] * dsz[k]) / it.s_z[k]).collect();
        Direction { dx, dz, dy, ds, dsz }
    }
}
