use num_traits::Zero;

use crate::cones::{check_face, dual_residual, expose, same_face, ConeDesc, Element, FaceRep};
use crate::numerics::{to_f64, Mat, Rational};

use super::system::Mode;
use super::{Certificate, ConicSystem, Tolerances};

/// Largest kernel threshold a certificate step may claim.
const MAX_STEP_TOL: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq)]
pub struct StepCheck {
    /// max |Z − ℳ*(v)|, or ∞ when the shapes disagree.
    pub reconstruction: f64,
    pub in_dual: bool,
    /// Z is not orthogonal to the face.
    pub reduces: bool,
    pub orthogonal_to_b: bool,
    pub face_matches: bool,
    pub ok: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub ok: bool,
    pub steps: Vec<StepCheck>,
    pub witnesses_in_face: bool,
}

/// Check every step condition of a certificate, and that the witnesses lie in its last face.
pub fn validate_certificate(sys: &ConicSystem, cert: &Certificate, witnesses: &[Element]) -> ValidationReport {
    let tol = Tolerances::default();
    if let Err(e) = sys.check() {
        return ValidationReport {
            ok: false,
            steps: vec![failed(format!("system: {e}"))],
            witnesses_in_face: false,
        };
    }
    let b = sys.b_f64();
    let bnorm = crate::numerics::norm2(&b);
    let mut face = sys.cone.whole_face();
    let mut steps = Vec::with_capacity(cert.steps.len());
    for step in &cert.steps {
        let mut check = StepCheck {
            reconstruction: f64::INFINITY,
            in_dual: false,
            reduces: false,
            orthogonal_to_b: false,
            face_matches: false,
            ok: false,
            note: None,
        };
        let tol_ok = step.tol.is_finite() && step.tol >= 0.0 && step.tol <= MAX_STEP_TOL;
        if !tol_ok {
            check.note = Some(format!("step tolerance {} out of range", step.tol));
        }
        if let Ok(z) = sys.adjoint(&step.v) {
            check.reconstruction = element_distance(&z, &step.z);
        } else {
            check.note.get_or_insert_with(|| "multiplier does not match the system".into());
        }
        let rec_ok = check.reconstruction <= tol.reconstruction * (1.0 + element_scale(&step.z));
        match dual_residual(&sys.cone, &face, &step.z, step.tol) {
            Ok(d) => {
                check.in_dual = d.in_dual;
                check.reduces = !d.in_perp;
            }
            Err(e) => {
                check.note.get_or_insert_with(|| e.to_string());
            }
        }
        check.orthogonal_to_b = match (&step.v, sys.mode) {
            (Element::Exact(v), Mode::Exact) if v.len() == sys.b.len() => {
                v.iter().zip(&sys.b).fold(Rational::zero(), |acc, (x, y)| acc + x * y).is_zero()
            }
            (Element::Vector(v), Mode::Float) if v.len() == b.len() => {
                crate::numerics::dot(v, &b).abs() <= tol.orthogonality * (1.0 + bnorm)
            }
            _ => false,
        };
        if check_face(&sys.cone, &step.face).is_ok() {
            if let Ok(next) = expose(&sys.cone, &face, &step.z, step.tol) {
                check.face_matches = same_face(&next, &step.face);
            }
        } else {
            check.note.get_or_insert_with(|| "stored face is not a valid face".into());
        }
        check.ok = tol_ok && rec_ok && check.in_dual && check.reduces && check.orthogonal_to_b && check.face_matches;
        steps.push(check);
        face = step.face.clone();
    }
    let witnesses_in_face = check_face(&sys.cone, &face).is_ok() && witnesses.iter().all(|w| in_face(&sys.cone, &face, w));
    let ok = steps.iter().all(|s| s.ok) && witnesses_in_face;
    ValidationReport { ok, steps, witnesses_in_face }
}

fn failed(note: String) -> StepCheck {
    StepCheck {
        reconstruction: f64::INFINITY,
        in_dual: false,
        reduces: false,
        orthogonal_to_b: false,
        face_matches: false,
        ok: false,
        note: Some(note),
    }
}

fn element_distance(a: &Element, b: &Element) -> f64 {
    match (a, b) {
        (Element::Vector(x), Element::Vector(y)) if x.len() == y.len() => {
            x.iter().zip(y).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
        }
        (Element::Exact(x), Element::Exact(y)) if x.len() == y.len() => {
            if x == y {
                0.0
            } else {
                f64::INFINITY
            }
        }
        (Element::Matrix(x), Element::Matrix(y)) if x.shape() == y.shape() => (x - y).max_abs(),
        (Element::Product(x), Element::Product(y)) if x.len() == y.len() => {
            x.iter().zip(y).map(|(u, v)| element_distance(u, v)).fold(0.0, f64::max)
        }
        _ => f64::INFINITY,
    }
}

fn element_scale(a: &Element) -> f64 {
    match a {
        Element::Vector(x) => x.iter().fold(0.0, |m, v| m.max(v.abs())),
        Element::Exact(x) => x.iter().map(to_f64).fold(0.0, |m: f64, v| m.max(v.abs())),
        Element::Matrix(x) => x.max_abs(),
        Element::Product(x) => x.iter().map(element_scale).fold(0.0, f64::max),
    }
}

/// Whether a point of the cone lies in `face`.
pub(crate) fn in_face(cone: &ConeDesc, face: &FaceRep, x: &Element) -> bool {
    match (cone, face, x) {
        (ConeDesc::Orthant(n), FaceRep::Orthant { support, .. }, Element::Exact(v)) if v.len() == *n => {
            (0..*n).all(|i| support.contains(&i) || v[i].is_zero())
        }
        (ConeDesc::Orthant(n), FaceRep::Orthant { support, .. }, Element::Vector(v)) if v.len() == *n => {
            let scale = 1.0 + v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            (0..*n).all(|i| support.contains(&i) || v[i].abs() <= 1e-9 * scale)
        }
        (ConeDesc::Psd(_) | ConeDesc::Edm(_), FaceRep::Psd { basis }, Element::Matrix(m)) if m.rows() == basis.rows() => {
            let p: Mat = basis * &basis.transpose();
            let proj = &(&p * m) * &p;
            (m - &proj).frobenius() <= 1e-7 * (1.0 + m.frobenius())
        }
        (ConeDesc::Product(cones), FaceRep::Product(faces), Element::Product(parts)) if cones.len() == parts.len() && faces.len() == parts.len() => {
            cones.iter().zip(faces).zip(parts).all(|((c, f), p)| in_face(c, f, p))
        }
        _ => false,
    }
}
