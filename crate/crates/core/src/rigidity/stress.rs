use crate::cones::lindenstrauss::{centered_basis, edm_lower};
use crate::cones::{ConeDesc, Element};
use crate::facial::{facial_reduction, nullspace_reduce_signed, ConicSystem, Mode, NullspaceReduction};
use crate::numerics::{exact_rank, sym_eigen_unchecked, Mat, RatMat};

use super::{
    affine_flex_dim, infinitesimal_verdict, is_chordal, is_laman, pebble_independent_edges, rigidity_map_exact, EdgeKind,
    Framework, Infinitesimal, RigidityError,
};

/// Sign constraints and zero patterns are checked to this absolute tolerance on
/// trace-normalized stresses.
const STRESS_TOL: f64 = 1e-7;
/// Spectral gap a level needs to count as verified.
const EXACT_GAP: f64 = 1e-6;

/// One level of a PSD stress sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct StressLevel {
    /// n × n stress matrix, Ωe = 0, off-diagonal −ωᵢⱼ on edges and zero on non-edges.
    pub omega: Mat,
    /// ω per edge, in edge order.
    pub stress: Vec<f64>,
    /// Rank of Ω on the face it reduces (the drop in face dimension).
    pub rank: usize,
    /// Smallest eigenvalue of Ω restricted to that face.
    pub face_lambda_min: f64,
    /// Smallest eigenvalue of Ω on the part of the face it cuts away, and smallest sign
    /// value on the cables and struts it releases; ∞ if there are none.
    pub gap: f64,
    /// Cable stresses ≥ 0 and strut stresses ≤ 0, within tolerance.
    pub proper: bool,
    /// The level checks out on its own: PSD on its face, orthogonal to the configuration,
    /// and a clear gap between what it cuts and what it keeps.
    pub verified: bool,
}

/// (i, j) coordinate functional H = (eᵢeⱼᵀ + eⱼeᵢᵀ)/2 on n × n matrices.
fn pair(n: usize, i: usize, j: usize) -> Mat {
    let mut h = Mat::zeros(n, n);
    h[(i, j)] = 0.5;
    h[(j, i)] = 0.5;
    h
}

/// EDM completion of the framework's edge lengths over reduced Gram matrices Y ⪰ 0
/// (order n − 1): ⟨K*(Hᵢⱼ) pulled back, Y⟩ = dᵢⱼ per edge. Cables and struts get slacks
/// z ≥ 0 in a nonnegative block, K(X)ᵢⱼ + z = dᵢⱼ for cables and K(X)ᵢⱼ − z = dᵢⱼ for struts.
pub fn edm_completion_system(f: &Framework) -> Result<ConicSystem, RigidityError> {
    let n = f.n();
    if n < 2 {
        return Err(RigidityError::Invalid("need at least two vertices".into()));
    }
    let g = &f.graph;
    let slack: Vec<usize> = (0..g.m()).filter(|&e| g.kinds[e] != EdgeKind::Bar).collect();
    let b = rigidity_map_exact(f);
    let constraints: Vec<Element> = g
        .edges
        .iter()
        .enumerate()
        .map(|(e, &(i, j))| {
            let a = Element::Matrix(edm_lower(&pair(n, i, j)));
            if slack.is_empty() {
                return a;
            }
            let mut z = vec![0.0; slack.len()];
            if let Some(k) = slack.iter().position(|&s| s == e) {
                z[k] = f64::from(g.kinds[e].sign());
            }
            Element::Product(vec![a, Element::Vector(z)])
        })
        .collect();
    let cone = if slack.is_empty() {
        ConeDesc::Psd(n - 1)
    } else {
        ConeDesc::Product(vec![ConeDesc::Psd(n - 1), ConeDesc::Orthant(slack.len())])
    };
    let gram = Element::Matrix(reduced_gram(f));
    let point = if slack.is_empty() { gram } else { Element::Product(vec![gram, Element::Vector(vec![0.0; slack.len()])]) };
    Ok(ConicSystem::new(cone, constraints, b, Mode::Float)?.with_known_point(point)?)
}

/// Reduced Gram matrix Uᵀ P Pᵀ U of the configuration.
pub(crate) fn reduced_gram(f: &Framework) -> Mat {
    let u = centered_basis(f.n());
    let up = &u.transpose() * &Mat::from_rows(&f.points());
    &up * &up.transpose()
}

/// Exact dimension of the affine span of the points.
pub(crate) fn affine_dim(f: &Framework) -> usize {
    if f.n() < 2 {
        return 0;
    }
    let rows: Vec<Vec<_>> = f.coords[1..]
        .iter()
        .map(|p| p.iter().zip(&f.coords[0]).map(|(a, b)| a.clone() - b.clone()).collect())
        .collect();
    exact_rank(&RatMat::from_rows(&rows))
}

struct Sequence {
    levels: Vec<StressLevel>,
    reduction: NullspaceReduction,
}

fn stress_sequence(f: &Framework) -> Result<Sequence, RigidityError> {
    f.refuse_degenerate()?;
    let n = f.n();
    if n < 2 {
        return Err(RigidityError::Invalid("need at least two vertices".into()));
    }
    let g = &f.graph;
    let u = centered_basis(n);
    let ut = u.transpose();
    let lower = |h: &Mat| (&(&ut * h) * &u).symmetrize();
    let basis: Vec<Mat> = g.non_edges().iter().map(|&(i, j)| lower(&pair(n, i, j))).collect();
    let signed: Vec<usize> = (0..g.m()).filter(|&e| g.kinds[e] != EdgeKind::Bar).collect();
    let signs: Vec<Mat> = signed
        .iter()
        .map(|&e| {
            let (i, j) = g.edges[e];
            lower(&pair(n, i, j)).scale(&-f64::from(g.kinds[e].sign()))
        })
        .collect();
    let x_hat = reduced_gram(f);
    let reduction = nullspace_reduce_signed(&x_hat, &basis, &signs)?;

    let mut levels = Vec::with_capacity(reduction.exposers.len());
    let mut face = Mat::identity(n - 1);
    let mut support: Vec<usize> = (0..signs.len()).collect();
    for (k, bar) in reduction.exposers.iter().enumerate() {
        let omega = (&(&u * bar) * &ut).symmetrize();
        let stress: Vec<f64> = g.edges.iter().map(|&(i, j)| -omega[(i, j)]).collect();
        let on_face = (&(&face.transpose() * bar) * &face).symmetrize();
        let next = &reduction.faces[k];
        let rank = face.cols() - next.cols();
        let mut eig = if on_face.rows() == 0 { Vec::new() } else { sym_eigen_unchecked(&on_face).eigenvalues };
        eig.sort_by(|a, b| b.total_cmp(a));
        let face_lambda_min = eig.last().copied().unwrap_or(0.0);
        let kept_max = eig[rank..].iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let released = support.iter().filter(|l| !reduction.supports[k].contains(l));
        let gap = eig[..rank].iter().copied().chain(released.map(|&l| reduction.sign_values[k][l])).fold(f64::INFINITY, f64::min);
        let orth = bar.inner(&x_hat).abs() / (1.0 + x_hat.max_abs());
        let proper = signed.iter().all(|&e| f64::from(g.kinds[e].sign()) * stress[e] >= -STRESS_TOL);
        let verified = proper
            && face_lambda_min >= -STRESS_TOL
            && orth <= STRESS_TOL
            && gap >= EXACT_GAP
            && kept_max <= 1e-3 * gap;
        levels.push(StressLevel { omega, stress, rank, face_lambda_min, gap, proper, verified });
        face = next.clone();
        support = reduction.supports[k].clone();
    }
    Ok(Sequence { levels, reduction })
}

/// PSD stress matrices Ω₁, Ω₂, … from facial reduction of the completion problem in
/// nullspace form; Ωₖ is PSD on the face left by the previous levels.
pub fn psd_stress_sequence(f: &Framework) -> Result<Vec<StressLevel>, RigidityError> {
    Ok(stress_sequence(f)?.levels)
}

/// Number of stress levels, checked against the singularity degree of the range-form
/// completion system.
pub fn framework_sd(f: &Framework) -> Result<usize, RigidityError> {
    let nullspace = psd_stress_sequence(f)?.len();
    let range = facial_reduction(&edm_completion_system(f)?)?.sd;
    if range != nullspace {
        return Err(RigidityError::FormsDisagree { range, nullspace });
    }
    Ok(nullspace)
}

/// A-priori bound on the singularity degree from excess edges: over a spanning Laman
/// subgraph in the plane, over a maximal-planar base in space (taken from the provenance,
/// which must start with "maximal-planar").
pub fn a_priori_bound(f: &Framework) -> Option<usize> {
    let g = &f.graph;
    let n = g.n;
    match f.dim {
        2 if n >= 2 && pebble_independent_edges(g).len() == 2 * n - 3 => {
            let excess = g.m() - (2 * n - 3);
            Some(if g.is_tensegrity() { excess } else { excess.min((n - 1).saturating_sub(affine_dim(f))) })
        }
        3 if n >= 3 && g.m() >= 3 * n - 6 && f.provenance.as_deref().is_some_and(|p| p.starts_with("maximal-planar")) => {
            Some(g.m() - (3 * n - 6))
        }
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RigidityVerdict {
    pub sd: usize,
    /// Singularity degree of the range-form completion system.
    pub sd_range: usize,
    pub stress_sequence: Vec<StressLevel>,
    /// Dimension of the affine span of the configuration.
    pub affine_dim: usize,
    pub dimensionally_rigid: bool,
    pub affine_flex_dim: usize,
    pub universally_rigid_certified: bool,
    pub super_stable: bool,
    pub infinitesimal: Infinitesimal,
    /// Every level satisfies the cable and strut sign constraints.
    pub proper: bool,
    /// Every level passed its own checks.
    pub levels_verified: bool,
    /// No rank decision rested on an uncertified numeric cut.
    pub certified: bool,
    /// Margin of every auxiliary decision, the final one last.
    pub margins: Vec<f64>,
    pub laman: Option<bool>,
    pub chordal: bool,
    pub a_priori_bound: Option<usize>,
}

pub fn rigidity_verdicts(f: &Framework) -> Result<RigidityVerdict, RigidityError> {
    let seq = stress_sequence(f)?;
    let sd = seq.levels.len();
    let sd_range = facial_reduction(&edm_completion_system(f)?)?.sd;
    let affine = affine_dim(f);
    let reached = seq.reduction.faces.last().map_or(f.n() - 1, |v| v.cols());
    // d + Σ rank(Ωₖ) = n − 1
    let dimensionally_rigid = affine + seq.levels.iter().map(|l| l.rank).sum::<usize>() == f.n() - 1;
    debug_assert_eq!(dimensionally_rigid, reached == affine);
    let flex = affine_flex_dim(f);
    let proper = seq.levels.iter().all(|l| l.proper);
    let certified = seq.reduction.certified;
    // the sequence is a certificate by itself; maximality of each level only matters for
    // the minimality of sd
    let verified = seq.levels.iter().all(|l| l.verified);
    let universally = verified && dimensionally_rigid && flex == 0;
    Ok(RigidityVerdict {
        sd,
        sd_range,
        affine_dim: affine,
        dimensionally_rigid,
        affine_flex_dim: flex,
        universally_rigid_certified: universally,
        super_stable: universally && sd <= 1,
        infinitesimal: infinitesimal_verdict(f),
        proper,
        levels_verified: verified,
        certified,
        margins: seq.reduction.margins.clone(),
        laman: (f.dim == 2).then(|| is_laman(&f.graph)),
        chordal: is_chordal(&f.graph),
        a_priori_bound: a_priori_bound(f),
        stress_sequence: seq.levels,
    })
}
