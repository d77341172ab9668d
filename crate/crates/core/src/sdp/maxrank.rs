//! Maximum-rank element of L ∩ (𝒮₊ʳ × ℝ₊ᵖ) for a linear subspace L.
//!
//! A single trace-normalized linear maximization lands on the boundary of the slice
//! and, when the slice itself is degenerate, the interior-point iterates converge too
//! slowly for rank decisions. Instead the subspace is reduced level by level:
//!
//! 0. a known element Y ∈ L⊥ ∩ K supplied with the slice has its range cut first;
//! 1. a coordinate whose diagonal entry vanishes on all of L forces its whole row to
//!    vanish on L ∩ K, and a kernel common to all of L is dropped; these cuts are exact,
//!    with no solver involved;
//! 2. one or two remaining parameters are decided from eigenvalues (a line search on
//!    the concave λ_min in the two-parameter case) when the spectrum is clearly split;
//! 3. otherwise `max λ s.t. W ⪰ λI, z ≥ λ, tr W + Σz = 1, (W, z) ∈ L` is solved. It has
//!    Slater points on both sides, so λ* is reliable: λ* > 0 means L meets the interior,
//!    λ* < 0 means L ∩ K = {0}, and λ* ≈ 0 yields a primal Y ∈ L⊥ ∩ K whose range is cut.

use crate::numerics::svd::right_svd;
use crate::numerics::{dot, norm2, nullspace_basis, sym_eigen_unchecked, Mat};

use super::slice::Slice;
use super::{solve_to, SdpError, SdpProblem, SdpStatus};

/// Decision threshold for λ* (the trace-normalized smallest eigenvalue).
pub const LAMBDA_TOL: f64 = 1e-7;
/// Entries below this (relative to the largest entry of the data) count as structural zeros.
const STRUCTURAL_ZERO: f64 = 1e-13;
/// Relative eigenvalue threshold for the range of a cutting element Y.
const CUT_RANGE_TOL: f64 = 1e-3;
/// Singular-value threshold for the parameter directions compatible with a numeric cut.
const CUT_NULL_TOL: f64 = 1e-4;
/// Separation between cut and kept singular values.
const CUT_GAP: f64 = 100.0;
/// Largest residual of a stalled normalized solve that still yields a (widened) decision.
const STALL_LIMIT: f64 = 1e-3;
/// Target accuracy of the normalized solves; kernel estimates from Y are only as good as
/// the square root of the duality gap.
const NORMALIZED_TOL: f64 = 1e-13;
/// Parameter directions acting below this fraction of the data scale count as zero.
const INJECTIVE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaxRankOutcome {
    /// A nonzero element of maximal rank was found.
    Found,
    /// L ∩ K = {0}.
    Trivial,
}

#[derive(Clone, Debug)]
pub struct MaxRank {
    pub outcome: MaxRankOutcome,
    /// Coefficients in the caller's parametrization (zero when trivial).
    pub coeffs: Vec<f64>,
    pub w: Mat,
    pub z: Vec<f64>,
    /// Found: smallest positive eigenvalue / entry of the normalized element on its support.
    /// Trivial: −λ* of the deciding solve (1 when L was reduced to {0} structurally).
    /// Zero whenever a numeric cut was taken: the rank is then a best effort, not certified.
    pub margin: f64,
    /// λ* of the first well-posed solve, if one was needed.
    pub top_lambda: Option<f64>,
    pub exact_cuts: usize,
    pub numeric_cuts: usize,
}

struct Level {
    /// Original parameters as columns: c = basis · c'.
    basis: Mat,
    /// Orthonormal basis of the surviving matrix coordinates.
    face: Mat,
    /// Surviving linear coordinates.
    support: Vec<usize>,
}

impl Level {
    fn reduced(&self, slice: &Slice, j: usize) -> (Mat, Vec<f64>) {
        let (w, z) = slice.eval(&self.basis.col(j));
        let wr = (&(&self.face.transpose() * &w) * &self.face).symmetrize();
        (wr, self.support.iter().map(|&k| z[k]).collect())
    }

    fn all_reduced(&self, slice: &Slice) -> Vec<(Mat, Vec<f64>)> {
        (0..self.basis.cols()).map(|j| self.reduced(slice, j)).collect()
    }

    /// Keep only parameter directions `keep` (columns in current coordinates).
    fn restrict(&mut self, keep: &Mat) {
        self.basis = &self.basis * keep;
    }

    /// Drop parameter directions that act trivially on the current face.
    fn make_injective(&mut self, slice: &Slice) {
        let red = self.all_reduced(slice);
        let r = self.face.cols();
        let dim = r * (r + 1) / 2 + self.support.len();
        if dim == 0 || red.is_empty() {
            self.basis = Mat::zeros(self.basis.rows(), 0);
            return;
        }
        let phi = Mat::from_fn(dim, red.len(), |row, j| {
            let mut col = red[j].0.svec();
            col.extend_from_slice(&red[j].1);
            col[row]
        });
        // the basis columns are orthonormal, so singular values compare with the unit scale
        // of the original parameters
        let svd = right_svd(&phi);
        let floor = INJECTIVE_TOL * svd.sigma.first().copied().unwrap_or(0.0).max(slice.unit_scale());
        let rank = svd.sigma.iter().take(dim.min(red.len())).filter(|&&s| s > floor).count();
        let idx: Vec<usize> = (0..rank).collect();
        self.basis = &self.basis * &svd.v.columns(&idx);
    }
}

fn trivial(q: usize, slice: &Slice, margin: f64, top: Option<f64>, exact: usize, numeric: usize) -> MaxRank {
    let margin = if numeric > 0 { 0.0 } else { margin };
    MaxRank {
        outcome: MaxRankOutcome::Trivial,
        coeffs: vec![0.0; q],
        w: Mat::zeros(slice.order, slice.order),
        z: vec![0.0; slice.lin_len()],
        margin,
        top_lambda: top,
        exact_cuts: exact,
        numeric_cuts: numeric,
    }
}

/// Maximum-rank element of the slice's cone, with diagnostics.
pub fn max_rank_element(slice: &Slice) -> Result<MaxRank, SdpError> {
    max_rank_element_with(slice, LAMBDA_TOL)
}

/// As [`max_rank_element`] with an explicit decision threshold for λ*.
pub fn max_rank_element_with(slice: &Slice, lambda_tol: f64) -> Result<MaxRank, SdpError> {
    let q = slice.params();
    let mut level = Level {
        basis: Mat::identity(q),
        face: Mat::identity(slice.order),
        support: (0..slice.lin_len()).collect(),
    };
    let (mut exact_cuts, mut numeric_cuts) = (0, 0);
    let mut top_lambda = None;
    let mut cut_error = 0.0f64;
    let max_levels = slice.order + slice.lin_len() + 2;

    if let Some((y_mat, y_lin)) = &slice.orth {
        check_orthogonal(slice, y_mat, y_lin)?;
        if cut_by_known_element(&mut level, slice, y_mat, y_lin) {
            exact_cuts += 1;
        }
    }

    for _ in 0..max_levels {
        level.make_injective(slice);
        loop {
            if let Some(k) = structural_zero_coordinate(&level, slice) {
                cut_matrix_coordinate(&mut level, slice, k);
            } else if !cut_common_kernel(&mut level, slice) {
                break;
            }
            level.make_injective(slice);
            exact_cuts += 1;
        }
        let r = level.face.cols();
        let p = level.support.len();
        if level.basis.cols() == 0 || r + p == 0 {
            return Ok(trivial(q, slice, 1.0, top_lambda, exact_cuts, numeric_cuts));
        }
        let red = level.all_reduced(slice);
        let tau: Vec<f64> = red.iter().map(|(w, z)| w.trace() + z.iter().sum::<f64>()).collect();
        let tau_norm = dot(&tau, &tau).sqrt();
        if tau_norm <= 1e-12 {
            // every element of L has zero trace, so only 0 is in the cone
            return Ok(trivial(q, slice, 1.0, top_lambda, exact_cuts, numeric_cuts));
        }

        let decided = match red.len() {
            1 => single_direction(&red[0]),
            2 => pencil_decision(&red, &tau),
            _ => None,
        };
        // one and two parameters are decided from spectra, without a solver
        match decided {
            Some(Single::Found { local, margin }) => {
                let coeffs = level.basis.matvec(&local);
                let (w, z) = slice.eval(&coeffs);
                return Ok(MaxRank {
                    outcome: MaxRankOutcome::Found,
                    coeffs,
                    w,
                    z,
                    margin: if numeric_cuts > 0 { 0.0 } else { margin },
                    top_lambda,
                    exact_cuts,
                    numeric_cuts,
                });
            }
            Some(Single::Trivial { margin }) => return Ok(trivial(q, slice, margin, top_lambda, exact_cuts, numeric_cuts)),
            None => {}
        }

        let solved = solve_normalized(&red, &tau, r, p)?;
        let lambda = solved.lambda;
        top_lambda.get_or_insert(lambda);
        // A range error δ in a numeric cut leaves a residual of order δ² on the kept
        // directions but perturbs their eigenvalues by order δ.
        let band = lambda_tol.max(10.0 * cut_error.sqrt()).max(10.0 * solved.resid);
        if lambda >= band {
            let coeffs = level.basis.matvec(&solved.c);
            let (w, z) = slice.eval(&coeffs);
            let scale = w.trace() + z.iter().sum::<f64>();
            return Ok(MaxRank {
                outcome: MaxRankOutcome::Found,
                coeffs,
                w,
                z,
                margin: if numeric_cuts > 0 { 0.0 } else { lambda / scale.max(f64::MIN_POSITIVE) },
                top_lambda,
                exact_cuts,
                numeric_cuts,
            });
        }
        if lambda <= -band {
            return Ok(trivial(q, slice, -lambda, top_lambda, exact_cuts, numeric_cuts));
        }
        // λ* ≈ 0: cut the range of Y ∈ L⊥ ∩ K
        match cut_by_dual_element(&mut level, slice, &solved.y_mat, &solved.y_lin) {
            Some(err) => cut_error += err,
            None => return Ok(trivial(q, slice, lambda.abs(), top_lambda, exact_cuts, numeric_cuts)),
        }
        numeric_cuts += 1;
    }
    Ok(trivial(q, slice, 0.0, top_lambda, exact_cuts, numeric_cuts))
}

/// Eigenvalues of a single direction above this fraction of its norm count as nonzero.
const SINGLE_GAP: f64 = 1e-7;
/// Eigenvalues below this fraction of its norm count as zero.
const SINGLE_ZERO: f64 = 1e-11;

enum Single {
    /// `local` are coefficients in the level's parameters.
    Found { local: Vec<f64>, margin: f64 },
    Trivial { margin: f64 },
}

/// Decide a one-parameter subspace from the spectrum of its generator; None when some
/// eigenvalue falls between the zero and gap thresholds.
fn single_direction((w, z): &(Mat, Vec<f64>)) -> Option<Single> {
    let vals = spectrum(w, z);
    let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if scale == 0.0 {
        return Some(Single::Trivial { margin: 1.0 });
    }
    if vals.iter().any(|v| v.abs() > SINGLE_ZERO * scale && v.abs() < SINGLE_GAP * scale) {
        return None;
    }
    let pos: Vec<f64> = vals.iter().copied().filter(|v| *v > SINGLE_ZERO * scale).collect();
    let neg: Vec<f64> = vals.iter().map(|v| -v).filter(|v| *v > SINGLE_ZERO * scale).collect();
    let sum = |xs: &[f64]| xs.iter().sum::<f64>();
    let least = |xs: &[f64]| xs.iter().copied().fold(f64::INFINITY, f64::min);
    Some(match (pos.is_empty(), neg.is_empty()) {
        (false, true) => Single::Found { local: vec![1.0], margin: least(&pos) / sum(&pos) },
        (true, false) => Single::Found { local: vec![-1.0], margin: least(&neg) / sum(&neg) },
        _ => {
            let most = |xs: &[f64]| xs.iter().copied().fold(0.0f64, f64::max);
            Single::Trivial { margin: most(&pos).min(most(&neg)) / scale }
        }
    })
}

/// Values of an element of a slice: eigenvalues of the matrix part, then the linear part.
fn spectrum(w: &Mat, z: &[f64]) -> Vec<f64> {
    let mut vals = if w.rows() > 0 { sym_eigen_unchecked(w).eigenvalues } else { Vec::new() };
    vals.extend_from_slice(z);
    vals
}

fn combine2(red: &[(Mat, Vec<f64>)], c: [f64; 2]) -> (Mat, Vec<f64>) {
    let w = &red[0].0.scale(&c[0]) + &red[1].0.scale(&c[1]);
    let z = red[0].1.iter().zip(&red[1].1).map(|(a, b)| c[0] * a + c[1] * b).collect();
    (w.symmetrize(), z)
}

/// Decide a two-parameter subspace by maximizing the concave function
/// t ↦ λ_min(W(c₀ + t·d)) on the line of unit trace; None when the maximum is ambiguous.
fn pencil_decision(red: &[(Mat, Vec<f64>)], tau: &[f64]) -> Option<Single> {
    let tn2 = tau[0] * tau[0] + tau[1] * tau[1];
    let c0 = [tau[0] / tn2, tau[1] / tn2];
    let tn = tn2.sqrt();
    let d = [-tau[1] / tn, tau[0] / tn];
    let at = |t: f64| [c0[0] + t * d[0], c0[1] + t * d[1]];
    let f = |t: f64| {
        let (w, z) = combine2(red, at(t));
        spectrum(&w, &z).into_iter().fold(f64::INFINITY, f64::min)
    };
    let f0 = f(0.0);
    let mut span = 1.0 / tn;
    let mut grown = 0;
    while f(span) >= f0 || f(-span) >= f0 {
        if grown == 60 {
            return None;
        }
        span *= 2.0;
        grown += 1;
    }
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (-span, span);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= 1e-15 * span {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
    }
    let t = refine_smooth_max(red, d, at, if f1 >= f2 { x1 } else { x2 });
    let c = at(t);
    let (w, z) = combine2(red, c);
    let vals = spectrum(&w, &z);
    let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    let least = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if least <= -SINGLE_GAP * scale {
        return Some(Single::Trivial { margin: -least / scale });
    }
    if vals.iter().any(|v| v.abs() > SINGLE_ZERO * scale && v.abs() < SINGLE_GAP * scale) {
        return None;
    }
    let pos: Vec<f64> = vals.iter().copied().filter(|v| *v > SINGLE_ZERO * scale).collect();
    let trace: f64 = pos.iter().sum();
    Some(Single::Found { local: c.to_vec(), margin: pos.iter().copied().fold(f64::INFINITY, f64::min) / trace })
}

/// Newton steps on the derivative of a simple smallest eigenvalue. A smooth maximum is
/// only located to about √ε by comparisons, and the kernel vector inherits that error.
fn refine_smooth_max(red: &[(Mat, Vec<f64>)], d: [f64; 2], at: impl Fn(f64) -> [f64; 2], mut t: f64) -> f64 {
    let (wd, _) = combine2(red, d);
    let value = |t: f64| {
        let (w, z) = combine2(red, at(t));
        spectrum(&w, &z).into_iter().fold(f64::INFINITY, f64::min)
    };
    for _ in 0..8 {
        let (w, z) = combine2(red, at(t));
        let r = w.rows();
        if r < 2 {
            break;
        }
        let e = sym_eigen_unchecked(&w);
        let lmin = e.min();
        let spread = e.max_abs().max(1e-300);
        // a linear entry at the bottom or a repeated eigenvalue makes the maximum a kink,
        // which the comparisons already locate to full precision
        if z.iter().any(|v| *v <= lmin) || e.eigenvalues[r - 2] - lmin <= 1e-8 * spread {
            break;
        }
        let v = e.eigenvectors.col(r - 1);
        let wv = wd.matvec(&v);
        let slope = dot(&v, &wv);
        let curve: f64 = (0..r - 1)
            .map(|k| {
                let x = dot(&e.eigenvectors.col(k), &wv);
                2.0 * x * x / (lmin - e.eigenvalues[k])
            })
            .sum();
        if curve >= 0.0 {
            break;
        }
        let step = -slope / curve;
        if value(t + step) < value(t) - 1e-14 * spread {
            break;
        }
        t += step;
        if step.abs() <= 1e-16 * (1.0 + t.abs()) {
            break;
        }
    }
    t
}

/// Remove the common kernel of all matrix parts from the face; no parameter changes.
fn cut_common_kernel(level: &mut Level, slice: &Slice) -> bool {
    let r = level.face.cols();
    let red = level.all_reduced(slice);
    if r == 0 || red.is_empty() {
        return false;
    }
    let rows: Vec<Vec<f64>> = red.iter().flat_map(|(w, _)| (0..r).map(move |i| w.row(i).to_vec())).collect();
    let stacked = Mat::from_rows(&rows);
    if stacked.max_abs() == 0.0 {
        return false;
    }
    let common = nullspace_basis(&stacked, 1e-12);
    if common.cols() == 0 {
        return false;
    }
    let comp = nullspace_basis(&common.transpose(), 1e-10);
    level.face = &level.face * &comp;
    true
}

/// Relative tolerance for the orthogonality of a known dual element.
const KNOWN_ORTH_TOL: f64 = 1e-8;
/// Relative eigenvalue and singular-value cutoff for cuts by a known dual element.
const KNOWN_CUT_TOL: f64 = 1e-9;

fn check_orthogonal(slice: &Slice, y_mat: &Mat, y_lin: &[f64]) -> Result<(), SdpError> {
    if y_mat.rows() != slice.order || y_lin.len() != slice.lin_len() {
        return Err(SdpError::Shape("known dual element does not match the slice".into()));
    }
    let ynorm = y_mat.frobenius() + norm2(y_lin);
    for j in 0..slice.params() {
        let mut c = vec![0.0; slice.params()];
        c[j] = 1.0;
        let (w, z) = slice.eval(&c);
        let inner = y_mat.inner(&w) + dot(y_lin, &z);
        if inner.abs() > KNOWN_ORTH_TOL * ynorm * (w.frobenius() + norm2(&z)).max(1e-300) {
            return Err(SdpError::Shape(format!("known dual element is not orthogonal to the subspace ({inner:e})")));
        }
    }
    Ok(())
}

/// Cut the range of a known dual element: every PSD element of L annihilates it.
fn cut_by_known_element(level: &mut Level, slice: &Slice, y_mat: &Mat, y_lin: &[f64]) -> bool {
    let e = sym_eigen_unchecked(y_mat);
    let top = e.max().max(y_lin.iter().fold(0.0f64, |a, v| a.max(*v)));
    if top <= 0.0 {
        return false;
    }
    let range = e.vectors_where(|l| l > KNOWN_CUT_TOL * top);
    let lin_cut: Vec<usize> = (0..y_lin.len()).filter(|&k| y_lin[k] > KNOWN_CUT_TOL * top).collect();
    if range.cols() == 0 && lin_cut.is_empty() {
        return false;
    }
    let red = level.all_reduced(slice);
    let scale = red.iter().map(|(w, z)| w.frobenius() + dot(z, z).sqrt()).fold(0.0, f64::max).max(1e-300);
    let phi = cut_constraints(&red, &range, &lin_cut);
    let keep = if phi.rows() == 0 {
        Mat::identity(phi.cols())
    } else {
        let svd = right_svd(&phi);
        let idx: Vec<usize> = (0..phi.cols()).filter(|&j| j >= phi.rows() || svd.sigma[j] <= KNOWN_CUT_TOL * scale).collect();
        svd.v.columns(&idx)
    };
    level.restrict(&keep);
    let comp = nullspace_basis(&range.transpose(), 1e-10);
    level.face = &level.face * &comp;
    level.support = level.support.iter().enumerate().filter(|(i, _)| !lin_cut.contains(i)).map(|(_, &k)| k).collect();
    true
}

fn structural_zero_coordinate(level: &Level, slice: &Slice) -> Option<usize> {
    let red = level.all_reduced(slice);
    if red.is_empty() {
        return None;
    }
    let scale = red.iter().map(|(w, z)| w.max_abs().max(z.iter().fold(0.0f64, |a, v| a.max(v.abs())))).fold(0.0, f64::max);
    let r = level.face.cols();
    (0..r).find(|&k| red.iter().all(|(w, _)| w[(k, k)].abs() <= STRUCTURAL_ZERO * scale.max(1e-300)))
}

/// Impose W e_k = 0 on the parameters and remove coordinate k from the face.
fn cut_matrix_coordinate(level: &mut Level, slice: &Slice, k: usize) {
    let red = level.all_reduced(slice);
    let r = level.face.cols();
    let scale = red.iter().map(|(w, _)| w.max_abs()).fold(0.0, f64::max).max(1e-300);
    let rows = Mat::from_fn(r, red.len(), |l, j| red[j].0[(k, l)] / scale);
    let keep = nullspace_basis(&rows, 1e-12);
    level.restrict(&keep);
    let idx: Vec<usize> = (0..r).filter(|&l| l != k).collect();
    level.face = level.face.columns(&idx);
}

/// Cut the range of a (numerically) dual element Y.
///
/// Returns the relative residual of the surviving parameter directions on the cut, or
/// None if nothing could be cut.
fn cut_by_dual_element(level: &mut Level, slice: &Slice, y_mat: &Mat, y_lin: &[f64]) -> Option<f64> {
    let e = sym_eigen_unchecked(y_mat);
    let top = e.max().max(y_lin.iter().fold(0.0f64, |a, v| a.max(*v)));
    if top <= 0.0 {
        return None;
    }
    let range = e.vectors_where(|l| l > CUT_RANGE_TOL * top);
    let lin_cut: Vec<usize> = (0..y_lin.len()).filter(|&k| y_lin[k] > CUT_RANGE_TOL * top).collect();
    if range.cols() == 0 && lin_cut.is_empty() {
        return None;
    }
    let red = level.all_reduced(slice);
    let scale = red.iter().map(|(w, z)| w.frobenius() + dot(z, z).sqrt()).fold(0.0, f64::max).max(1e-300);
    let phi = cut_constraints(&red, &range, &lin_cut);
    let keep = separated_kernel(&phi, scale);
    let err = (0..keep.cols()).map(|k| norm2(&phi.matvec(&keep.col(k)))).fold(0.0, f64::max) / scale;
    level.restrict(&keep);
    // the surviving face is the orthogonal complement of the cut range
    let comp = nullspace_basis(&range.transpose(), 1e-10);
    level.face = &level.face * &comp;
    level.support = level
        .support
        .iter()
        .enumerate()
        .filter(|(i, _)| !lin_cut.contains(i))
        .map(|(_, &k)| k)
        .collect();
    Some(err)
}

/// Right singular vectors of `phi` whose singular values are below CUT_NULL_TOL·scale and
/// separated from the rest by a factor CUT_GAP.
fn separated_kernel(phi: &Mat, scale: f64) -> Mat {
    let q = phi.cols();
    if phi.rows() == 0 {
        return Mat::identity(q);
    }
    let svd = right_svd(phi);
    let sigma: Vec<f64> = (0..q).map(|j| if j < phi.rows() { svd.sigma[j] / scale } else { 0.0 }).collect();
    let mut first = sigma.iter().position(|&x| x <= CUT_NULL_TOL).unwrap_or(q);
    while first < q && first > 0 && sigma[first - 1] < CUT_GAP * sigma[first] {
        first += 1;
    }
    let idx: Vec<usize> = (first..q).collect();
    svd.v.columns(&idx)
}

/// Rows of the linear map c ↦ (W(c)·range, z(c) on the cut coordinates).
fn cut_constraints(red: &[(Mat, Vec<f64>)], range: &Mat, lin_cut: &[usize]) -> Mat {
    let q = red.len();
    let r = range.rows();
    let wr: Vec<Mat> = red.iter().map(|(w, _)| w * range).collect();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for a in 0..r {
        for b in 0..range.cols() {
            rows.push((0..q).map(|j| wr[j][(a, b)]).collect());
        }
    }
    for &k in lin_cut {
        rows.push((0..q).map(|j| red[j].1[k]).collect());
    }
    if rows.is_empty() {
        return Mat::zeros(0, q);
    }
    Mat::from_rows(&rows)
}

struct Normalized {
    lambda: f64,
    /// Coefficients in the current level's parameters.
    c: Vec<f64>,
    y_mat: Mat,
    y_lin: Vec<f64>,
    /// Residual level of a stalled solve, 0 when it converged.
    resid: f64,
}

/// max λ s.t. W(c) ⪰ λI, z(c) ≥ λ, τᵀc = 1 over the current reduced parametrization.
fn solve_normalized(red: &[(Mat, Vec<f64>)], tau: &[f64], r: usize, p: usize) -> Result<Normalized, SdpError> {
    let tn2 = dot(tau, tau);
    let c0: Vec<f64> = tau.iter().map(|t| t / tn2).collect();
    let nt = nullspace_basis(&Mat::from_rows(&[tau.to_vec()]), 1e-12);
    let combine = |coef: &[f64]| -> (Mat, Vec<f64>) {
        let mut w = Mat::zeros(r, r);
        let mut z = vec![0.0; p];
        for (j, &cj) in coef.iter().enumerate() {
            if cj != 0.0 {
                w = &w + &red[j].0.scale(&cj);
                for (zk, v) in z.iter_mut().zip(&red[j].1) {
                    *zk += cj * v;
                }
            }
        }
        (w, z)
    };
    let (w0, z0) = combine(&c0);
    let dirs: Vec<(Mat, Vec<f64>)> = (0..nt.cols()).map(|k| combine(&nt.col(k))).collect();

    // dual variables (t, λ): S = W0 + Σ tₖWₖ − λI, s = z0 + Σ tₖzₖ − λ1
    let mut a: Vec<Mat> = dirs.iter().map(|(w, _)| -w).collect();
    a.push(Mat::identity(r));
    let m = a.len();
    let mut b = vec![0.0; m];
    b[m - 1] = 1.0;
    let g = Mat::from_fn(m, p, |i, k| if i + 1 < m { -dirs[i].1[k] } else { 1.0 });
    let prob = SdpProblem::new(r, a, b, w0).with_nonneg(g, z0);
    let sol = solve_to(&prob, NORMALIZED_TOL)?;
    let usable = match sol.status {
        SdpStatus::Optimal => true,
        SdpStatus::NumericalFailure => sol.residuals.primal.max(sol.residuals.dual) <= STALL_LIMIT,
        _ => false,
    };
    if !usable {
        return Err(SdpError::Shape(format!(
            "normalized slice solve ended with {:?} (residuals {:?})",
            sol.status, sol.residuals
        )));
    }
    let lambda = sol.y[m - 1];
    let mut c = c0.clone();
    for k in 0..nt.cols() {
        for (ci, v) in c.iter_mut().zip(nt.col(k)) {
            *ci += sol.y[k] * v;
        }
    }
    let resid = if sol.status == SdpStatus::Optimal { 0.0 } else { sol.residuals.primal.max(sol.residuals.dual).max(sol.residuals.gap) };
    Ok(Normalized { lambda, c, y_mat: sol.x, y_lin: sol.z, resid })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    }

    fn ladder(n: usize) -> Vec<Mat> {
        let mut a = vec![Mat::outer(&unit(n, 0), &unit(n, 0))];
        for i in 1..n - 1 {
            let mut m = Mat::outer(&unit(n, i), &unit(n, i));
            m[(i - 1, i + 1)] = 1.0;
            m[(i + 1, i - 1)] = 1.0;
            a.push(m);
        }
        a
    }

    #[test]
    fn ladder_first_level_is_rank_one() {
        for n in 3..=7 {
            let slice = Slice::new(n, ladder(n), vec![]);
            let res = max_rank_element(&slice).unwrap();
            assert_eq!(res.outcome, MaxRankOutcome::Found);
            let e = sym_eigen_unchecked(&res.w);
            assert!(e.eigenvalues[1].abs() < 1e-12, "n={n}: {:?}", e.eigenvalues);
            assert!((res.w[(0, 0)] - res.w.trace()).abs() < 1e-12);
        }
    }

    #[test]
    fn definite_subspace_returns_interior_point() {
        let slice = Slice::new(2, vec![Mat::identity(2), Mat::diag(&[1.0, -1.0])], vec![]);
        let res = max_rank_element(&slice).unwrap();
        assert_eq!(res.outcome, MaxRankOutcome::Found);
        assert!(sym_eigen_unchecked(&res.w).min() > 0.1 * res.w.trace());
    }

    #[test]
    fn indefinite_line_is_trivial_with_margin() {
        let slice = Slice::new(2, vec![Mat::diag(&[1.0, -1.0])], vec![]);
        let res = max_rank_element(&slice).unwrap();
        assert_eq!(res.outcome, MaxRankOutcome::Trivial);
        assert!(res.margin > 0.1);
    }

    #[test]
    fn two_diagonal_directions_found_together() {
        // span{e₁e₁ᵀ, e₂e₂ᵀ} in order 3: maximal rank 2
        let slice = Slice::new(3, vec![Mat::diag(&[1.0, 0.0, 0.0]), Mat::diag(&[0.0, 1.0, 0.0])], vec![]);
        let res = max_rank_element(&slice).unwrap();
        let e = sym_eigen_unchecked(&res.w);
        assert!(e.eigenvalues[1] > 0.1 && e.eigenvalues[2].abs() < 1e-12);
    }

    #[test]
    fn rotated_ladder_is_uncertified() {
        // rotate the ladder so no diagonal entry vanishes structurally
        let n = 4;
        let theta: f64 = 0.3;
        let mut rot = Mat::identity(n);
        for (i, j) in [(0, 3), (1, 2), (0, 1)] {
            let mut g = Mat::identity(n);
            g[(i, i)] = theta.cos();
            g[(j, j)] = theta.cos();
            g[(i, j)] = -theta.sin();
            g[(j, i)] = theta.sin();
            rot = &rot * &g;
        }
        let mats: Vec<Mat> = ladder(n).iter().map(|a| &(&rot * a) * &rot.transpose()).collect();
        let slice = Slice::new(n, mats, vec![]);
        let res = max_rank_element(&slice).unwrap();
        // no structural cut applies, so the result rests on numeric cuts and is uncertified
        assert_eq!(res.exact_cuts, 0);
        assert!(res.numeric_cuts > 0);
        assert_eq!(res.margin, 0.0);
        assert!(sym_eigen_unchecked(&res.w).min() > -1e-9);
    }

    #[test]
    fn ladder_is_resolved_by_exact_cuts() {
        let slice = Slice::new(5, ladder(5), vec![]);
        let res = max_rank_element(&slice).unwrap();
        assert_eq!(res.numeric_cuts, 0);
        assert_eq!(res.exact_cuts, 4);
        assert!(res.margin > 0.1);
    }

    fn rotation(n: usize, theta: f64) -> Mat {
        let mut rot = Mat::identity(n);
        for i in 0..n {
            for j in i + 1..n {
                let mut g = Mat::identity(n);
                let t = theta * (1 + i + 2 * j) as f64;
                g[(i, i)] = t.cos();
                g[(j, j)] = t.cos();
                g[(i, j)] = -t.sin();
                g[(j, i)] = t.sin();
                rot = &rot * &g;
            }
        }
        rot
    }

    fn conj(q: &Mat, a: &Mat) -> Mat {
        (&(q * a) * &q.transpose()).symmetrize()
    }

    #[test]
    fn pencil_with_a_single_singular_ray() {
        // [[c₁, c₂], [c₂, 0]] ⪰ 0 only for c₂ = 0, c₁ ≥ 0; rotated so no diagonal vanishes
        let q = rotation(2, 0.4);
        let mut off = Mat::zeros(2, 2);
        off[(0, 1)] = 1.0;
        off[(1, 0)] = 1.0;
        let slice = Slice::new(2, vec![conj(&q, &Mat::diag(&[1.0, 0.0])), conj(&q, &off)], vec![]);
        let res = max_rank_element(&slice).unwrap();
        assert_eq!(res.outcome, MaxRankOutcome::Found);
        assert_eq!(res.numeric_cuts, 0);
        assert!(res.margin > 0.5);
        let e = sym_eigen_unchecked(&res.w);
        assert!(e.min().abs() < 1e-12 * e.max_abs(), "{:?}", e.eigenvalues);
        assert!(res.coeffs[1].abs() < 1e-12 * res.coeffs[0].abs());
    }

    #[test]
    fn pencil_through_the_interior() {
        let slice = Slice::new(3, vec![Mat::diag(&[1.0, 2.0, -1.0]), Mat::diag(&[0.0, -1.0, 2.0])], vec![]);
        let res = max_rank_element(&slice).unwrap();
        assert_eq!(res.outcome, MaxRankOutcome::Found);
        assert_eq!(res.numeric_cuts, 0);
        assert!(sym_eigen_unchecked(&res.w).min() > 0.1 * res.w.trace());
    }

    #[test]
    fn known_dual_element_is_cut_exactly() {
        // L = span{e₁e₁ᵀ, e₁e₃ᵀ + e₃e₁ᵀ, e₂e₂ᵀ − e₃e₃ᵀ} rotated; Y = e₃e₃ᵀ + e₂e₂ᵀ is orthogonal to L
        let q = rotation(3, 0.3);
        let mut a2 = Mat::zeros(3, 3);
        a2[(0, 2)] = 1.0;
        a2[(2, 0)] = 1.0;
        let mats = [Mat::diag(&[1.0, 0.0, 0.0]), a2, Mat::diag(&[0.0, 1.0, -1.0])].iter().map(|a| conj(&q, a)).collect();
        let y = conj(&q, &Mat::diag(&[0.0, 1.0, 1.0]));
        let res = max_rank_element(&Slice::new(3, mats, vec![]).with_orthogonal(y, vec![])).unwrap();
        assert_eq!(res.outcome, MaxRankOutcome::Found);
        assert_eq!(res.numeric_cuts, 0);
        assert!(res.exact_cuts >= 1);
        let expect = conj(&q, &Mat::diag(&[1.0, 0.0, 0.0]));
        assert!((&res.w.scale(&(1.0 / res.w.trace())) - &expect).max_abs() < 1e-10);
    }

    #[test]
    fn non_orthogonal_known_element_is_rejected() {
        let slice = Slice::new(2, vec![Mat::identity(2)], vec![]).with_orthogonal(Mat::diag(&[1.0, 0.0]), vec![]);
        assert!(max_rank_element(&slice).is_err());
    }

    #[test]
    fn linear_block_only() {
        // z(c) = (c₁, −c₁ + c₂): max rank element has both coordinates positive
        let slice = Slice::new(0, vec![], vec![vec![1.0, -1.0], vec![0.0, 1.0]]);
        let res = max_rank_element(&slice).unwrap();
        assert_eq!(res.outcome, MaxRankOutcome::Found);
        assert!(res.z.iter().all(|&v| v > 1e-3));
        // z(c) = (c, −c): only zero
        let slice = Slice::new(0, vec![], vec![vec![1.0, -1.0]]);
        assert_eq!(max_rank_element(&slice).unwrap().outcome, MaxRankOutcome::Trivial);
    }
}
