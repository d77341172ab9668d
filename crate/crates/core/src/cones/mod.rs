//! Cones, faces, and exposing elements.
//!
//! EDM cones are handled through their reduced Gram coordinates: a face of `Edm(n)`
//! is a PSD face of order n−1 and exposing elements are (n−1)×(n−1) matrices already
//! pulled back with [`lindenstrauss::edm_lower`].

pub mod fig1;
pub mod lindenstrauss;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::numerics::{sym_eigen_unchecked, Mat, Rational};
pub use fig1::{Fig1Face, Fig1Fixture};

/// Projector distance below which two PSD faces are considered equal.
pub const FACE_COMPARE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub enum ConeDesc {
    Orthant(usize),
    Psd(usize),
    Edm(usize),
    Product(Vec<ConeDesc>),
    Fig1,
}

/// An element of the ambient space (or of its dual, which is identified with it).
#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    Vector(Vec<f64>),
    Exact(Vec<Rational>),
    Matrix(Mat),
    Product(Vec<Element>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum FaceRep {
    /// Coordinates allowed to be nonzero.
    Orthant { n: usize, support: Vec<usize> },
    /// {V R Vᵀ : R ⪰ 0} with orthonormal columns in `basis`.
    Psd { basis: Mat },
    Product(Vec<FaceRep>),
    Fig1(Fig1Face),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConeError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("element is not in the dual of the face (residual {residual:.3e})")]
    NotInDual { residual: f64 },
    #[error("element is orthogonal to the face; nothing is exposed")]
    NoReduction,
    #[error("invalid face: {0}")]
    InvalidFace(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualCheck {
    pub in_dual: bool,
    pub in_perp: bool,
    /// Violation of dual membership (0 when inside).
    pub residual: f64,
}

impl ConeDesc {
    pub fn validate(&self) -> Result<(), ConeError> {
        match self {
            ConeDesc::Orthant(n) | ConeDesc::Psd(n) | ConeDesc::Edm(n) if *n == 0 => {
                Err(ConeError::Shape("cone order must be at least 1".into()))
            }
            ConeDesc::Product(parts) if parts.is_empty() => Err(ConeError::Shape("empty product cone".into())),
            ConeDesc::Product(parts) => parts.iter().try_for_each(|p| p.validate()),
            _ => Ok(()),
        }
    }

    /// The cone itself as a face.
    pub fn whole_face(&self) -> FaceRep {
        match self {
            ConeDesc::Orthant(n) => FaceRep::Orthant { n: *n, support: (0..*n).collect() },
            ConeDesc::Psd(n) => FaceRep::Psd { basis: Mat::identity(*n) },
            ConeDesc::Edm(n) => FaceRep::Psd { basis: Mat::identity(n - 1) },
            ConeDesc::Product(parts) => FaceRep::Product(parts.iter().map(|p| p.whole_face()).collect()),
            ConeDesc::Fig1 => FaceRep::Fig1(Fig1Face::Whole),
        }
    }

    /// Dimension of the cone's linear span.
    pub fn dim(&self) -> usize {
        face_dim(self, &self.whole_face()).expect("whole face is valid")
    }

    /// Order of the matrix block for PSD-like cones (n−1 for EDM).
    pub fn psd_order(&self) -> Option<usize> {
        match self {
            ConeDesc::Psd(n) => Some(*n),
            ConeDesc::Edm(n) => Some(n - 1),
            _ => None,
        }
    }

    pub fn is_polyhedral(&self) -> bool {
        match self {
            ConeDesc::Orthant(_) => true,
            ConeDesc::Product(parts) => parts.iter().all(|p| p.is_polyhedral()),
            _ => false,
        }
    }
}

impl FaceRep {
    /// Zero face of the same shape.
    pub fn is_zero(&self) -> bool {
        match self {
            FaceRep::Orthant { support, .. } => support.is_empty(),
            FaceRep::Psd { basis } => basis.cols() == 0,
            FaceRep::Product(parts) => parts.iter().all(|p| p.is_zero()),
            FaceRep::Fig1(tag) => *tag == Fig1Face::Zero,
        }
    }

    pub fn psd_basis(&self) -> Option<&Mat> {
        match self {
            FaceRep::Psd { basis } => Some(basis),
            _ => None,
        }
    }
}

pub fn face_dim(cone: &ConeDesc, face: &FaceRep) -> Result<usize, ConeError> {
    check_face(cone, face)?;
    Ok(match face {
        FaceRep::Orthant { support, .. } => support.len(),
        FaceRep::Psd { basis } => {
            let r = basis.cols();
            r * (r + 1) / 2
        }
        FaceRep::Product(parts) => {
            let ConeDesc::Product(cones) = cone else { unreachable!() };
            cones.iter().zip(parts).map(|(c, f)| face_dim(c, f)).sum::<Result<usize, _>>()?
        }
        FaceRep::Fig1(tag) => tag.dim(),
    })
}

/// Structural validity of a face for a cone.
pub fn check_face(cone: &ConeDesc, face: &FaceRep) -> Result<(), ConeError> {
    match (cone, face) {
        (ConeDesc::Orthant(n), FaceRep::Orthant { n: m, support }) => {
            if n != m || support.iter().any(|&i| i >= *n) || support.windows(2).any(|w| w[0] >= w[1]) {
                return Err(ConeError::InvalidFace(format!("support {support:?} for orthant of order {n}")));
            }
            Ok(())
        }
        (ConeDesc::Psd(_) | ConeDesc::Edm(_), FaceRep::Psd { basis }) => {
            let order = cone.psd_order().unwrap();
            if basis.rows() != order {
                return Err(ConeError::InvalidFace(format!(
                    "face basis has {} rows, cone order is {order}",
                    basis.rows()
                )));
            }
            let gram = &basis.transpose() * basis;
            if (&gram - &Mat::identity(basis.cols())).max_abs() > 1e-10 {
                return Err(ConeError::InvalidFace("face basis is not orthonormal".into()));
            }
            Ok(())
        }
        (ConeDesc::Product(cones), FaceRep::Product(parts)) if cones.len() == parts.len() => {
            cones.iter().zip(parts).try_for_each(|(c, f)| check_face(c, f))
        }
        (ConeDesc::Fig1, FaceRep::Fig1(_)) => Ok(()),
        _ => Err(ConeError::InvalidFace("face does not match cone type".into())),
    }
}

/// Whether `z` lies in the dual of `face` and/or in its orthogonal complement.
pub fn dual_residual(cone: &ConeDesc, face: &FaceRep, z: &Element, tol: f64) -> Result<DualCheck, ConeError> {
    match (cone, face, z) {
        (ConeDesc::Orthant(n), FaceRep::Orthant { support, .. }, Element::Vector(v)) => {
            expect_len(v.len(), *n)?;
            let min = support.iter().map(|&i| v[i]).fold(f64::INFINITY, f64::min);
            let max_abs = support.iter().map(|&i| v[i].abs()).fold(0.0, f64::max);
            let residual = if min.is_finite() { (-min).max(0.0) } else { 0.0 };
            Ok(DualCheck { in_dual: residual <= tol, in_perp: max_abs <= tol, residual })
        }
        (ConeDesc::Orthant(n), FaceRep::Orthant { support, .. }, Element::Exact(v)) => {
            expect_len(v.len(), *n)?;
            let neg = support.iter().map(|&i| &v[i]).filter(|x| x.is_negative()).map(crate::numerics::to_f64);
            let residual = neg.fold(0.0f64, |m, x| m.max(-x));
            let in_perp = support.iter().all(|&i| v[i].is_zero());
            let in_dual = !support.iter().any(|&i| v[i].is_negative());
            Ok(DualCheck { in_dual, in_perp, residual })
        }
        (ConeDesc::Psd(_) | ConeDesc::Edm(_), FaceRep::Psd { basis }, Element::Matrix(zm)) => {
            let order = cone.psd_order().unwrap();
            if zm.shape() != (order, order) {
                return Err(ConeError::Shape(format!("exposer is {}x{}, expected order {order}", zm.rows(), zm.cols())));
            }
            if basis.cols() == 0 {
                return Ok(DualCheck { in_dual: true, in_perp: true, residual: 0.0 });
            }
            let w = (&(&basis.transpose() * zm) * basis).symmetrize();
            let lmin = sym_eigen_unchecked(&w).min();
            let residual = (-lmin).max(0.0);
            Ok(DualCheck { in_dual: lmin >= -tol, in_perp: w.max_abs() <= tol, residual })
        }
        (ConeDesc::Product(cones), FaceRep::Product(faces), Element::Product(parts)) => {
            if cones.len() != parts.len() || faces.len() != parts.len() {
                return Err(ConeError::Shape("product arity mismatch".into()));
            }
            let mut out = DualCheck { in_dual: true, in_perp: true, residual: 0.0 };
            for ((c, f), p) in cones.iter().zip(faces).zip(parts) {
                let d = dual_residual(c, f, p, tol)?;
                out.in_dual &= d.in_dual;
                out.in_perp &= d.in_perp;
                out.residual = out.residual.max(d.residual);
            }
            Ok(out)
        }
        (ConeDesc::Fig1, FaceRep::Fig1(tag), Element::Vector(v)) => {
            expect_len(v.len(), 3)?;
            Fig1Fixture.dual_check(*tag, [v[0], v[1], v[2]], tol)
        }
        _ => Err(ConeError::Shape("element does not match cone type".into())),
    }
}

/// face ∩ z⊥ for z in the dual of the face.
///
/// `tol` is the threshold for dual membership and for deciding which eigenvalues of
/// VᵀZV count as zero.
pub fn expose(cone: &ConeDesc, face: &FaceRep, z: &Element, tol: f64) -> Result<FaceRep, ConeError> {
    check_face(cone, face)?;
    let check = dual_residual(cone, face, z, tol)?;
    if !check.in_dual {
        return Err(ConeError::NotInDual { residual: check.residual });
    }
    if check.in_perp {
        return Err(ConeError::NoReduction);
    }
    Ok(expose_unchecked(cone, face, z, tol))
}

fn expose_unchecked(cone: &ConeDesc, face: &FaceRep, z: &Element, tol: f64) -> FaceRep {
    match (cone, face, z) {
        (ConeDesc::Orthant(n), FaceRep::Orthant { support, .. }, Element::Vector(v)) => FaceRep::Orthant {
            n: *n,
            support: support.iter().copied().filter(|&i| v[i].abs() <= tol).collect(),
        },
        (ConeDesc::Orthant(n), FaceRep::Orthant { support, .. }, Element::Exact(v)) => FaceRep::Orthant {
            n: *n,
            support: support.iter().copied().filter(|&i| v[i].is_zero()).collect(),
        },
        (_, FaceRep::Psd { basis }, Element::Matrix(zm)) => {
            let w = (&(&basis.transpose() * zm) * basis).symmetrize();
            let e = sym_eigen_unchecked(&w);
            let kernel = e.vectors_where(|l| l.abs() <= tol);
            FaceRep::Psd { basis: basis * &kernel }
        }
        (ConeDesc::Product(cones), FaceRep::Product(faces), Element::Product(parts)) => FaceRep::Product(
            cones
                .iter()
                .zip(faces)
                .zip(parts)
                .map(|((c, f), p)| expose_unchecked(c, f, p, tol))
                .collect(),
        ),
        (ConeDesc::Fig1, FaceRep::Fig1(tag), Element::Vector(v)) => {
            FaceRep::Fig1(Fig1Fixture.expose(*tag, [v[0], v[1], v[2]], tol))
        }
        _ => unreachable!("shapes checked by dual_residual"),
    }
}

/// Face equality: PSD faces by projector distance, others structurally.
pub fn same_face(a: &FaceRep, b: &FaceRep) -> bool {
    match (a, b) {
        (FaceRep::Psd { basis: u }, FaceRep::Psd { basis: v }) => {
            u.rows() == v.rows()
                && u.cols() == v.cols()
                && (&(u * &u.transpose()) - &(v * &v.transpose())).frobenius() <= FACE_COMPARE_TOL
        }
        (FaceRep::Product(x), FaceRep::Product(y)) => {
            x.len() == y.len() && x.iter().zip(y).all(|(p, q)| same_face(p, q))
        }
        _ => a == b,
    }
}

/// Whether `inner` ⊆ `outer` as faces of the same cone.
pub fn face_contains(outer: &FaceRep, inner: &FaceRep) -> bool {
    match (outer, inner) {
        (FaceRep::Orthant { support: s, .. }, FaceRep::Orthant { support: t, .. }) => t.iter().all(|i| s.contains(i)),
        (FaceRep::Psd { basis: u }, FaceRep::Psd { basis: v }) => {
            let proj = &(u * &u.transpose()) * v;
            (&proj - v).frobenius() <= FACE_COMPARE_TOL
        }
        (FaceRep::Product(x), FaceRep::Product(y)) => x.len() == y.len() && x.iter().zip(y).all(|(p, q)| face_contains(p, q)),
        (FaceRep::Fig1(x), FaceRep::Fig1(y)) => x.contains(*y),
        _ => false,
    }
}

fn expect_len(got: usize, want: usize) -> Result<(), ConeError> {
    if got != want {
        return Err(ConeError::Shape(format!("vector of length {got}, expected {want}")));
    }
    Ok(())
}
