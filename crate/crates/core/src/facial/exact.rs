//! Exact facial reduction for polyhedral systems {x ≥ 0 : Ax = b} by rational LP.

use num_traits::{One, Signed, Zero};

use crate::cones::{FaceRep};
use crate::numerics::{rational_lp, LpOutcome, RatMat, Rational, Sense};

use super::engine::Exposer;
use super::{CertStep, Certificate, ConicSystem, FacialError, SingularityReport, Tolerances};

/// Largest z_k = (Aᵀv)_k ≤ 1 over v ⊥ b with (Aᵀv)_S ≥ 0; Some(v) when positive.
fn coordinate_exposer(a: &RatMat, b: &[Rational], support: &[usize], k: usize) -> Result<Option<Vec<Rational>>, FacialError> {
    let m = a.rows();
    let s = support.len();
    // variables: v⁺ (m), v⁻ (m), slack z_S (s), bound slack t (1)
    let nvar = 2 * m + s + 1;
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs = Vec::new();
    for (t, &j) in support.iter().enumerate() {
        let mut row = vec![Rational::zero(); nvar];
        for i in 0..m {
            row[i] = a[(i, j)].clone();
            row[m + i] = -a[(i, j)].clone();
        }
        row[2 * m + t] = -Rational::one();
        rows.push(row);
        rhs.push(Rational::zero());
    }
    let mut row = vec![Rational::zero(); nvar];
    for i in 0..m {
        row[i] = b[i].clone();
        row[m + i] = -b[i].clone();
    }
    rows.push(row);
    rhs.push(Rational::zero());
    let kt = support.iter().position(|&j| j == k).expect("k in support");
    let mut row = vec![Rational::zero(); nvar];
    row[2 * m + kt] = Rational::one();
    row[nvar - 1] = Rational::one();
    rows.push(row);
    rhs.push(Rational::one());

    let mut c = vec![Rational::zero(); nvar];
    c[2 * m + kt] = Rational::one();
    match rational_lp(&c, &RatMat::from_rows(&rows), &rhs, Sense::Max)? {
        LpOutcome::Optimal { x, value } if value.is_positive() => {
            Ok(Some((0..m).map(|i| &x[i] - &x[m + i]).collect()))
        }
        LpOutcome::Optimal { .. } => Ok(None),
        // v = 0 is feasible and the objective is bounded by 1
        LpOutcome::Infeasible | LpOutcome::Unbounded { .. } => unreachable!("exposer LP is feasible and bounded"),
    }
}

fn adjoint_exact(a: &RatMat, v: &[Rational]) -> Vec<Rational> {
    (0..a.cols())
        .map(|k| v.iter().enumerate().fold(Rational::zero(), |acc, (i, c)| acc + c * &a[(i, k)]))
        .collect()
}

fn make_exposer(sys: &ConicSystem, a: &RatMat, support: &[usize], mut v: Vec<Rational>) -> Result<Exposer, FacialError> {
    let z = adjoint_exact(a, &v);
    let total = support.iter().fold(Rational::zero(), |acc, &j| acc + &z[j]);
    for x in v.iter_mut() {
        *x = &*x / &total;
    }
    let z = adjoint_exact(a, &v);
    let layout = sys.layout()?;
    Ok(Exposer { v: crate::cones::Element::Exact(v), z: layout.assemble_exact(&z), margin: 1.0, certified: true, kernel_tol: 0.0 })
}

fn face_support(sys: &ConicSystem, face: &FaceRep) -> Result<Vec<usize>, FacialError> {
    Ok(sys.layout()?.face_parts(face)?.1)
}

pub(crate) fn any_exposer(sys: &ConicSystem, face: &FaceRep) -> Result<Option<Exposer>, FacialError> {
    let a = sys.exact_matrix()?;
    let support = face_support(sys, face)?;
    for &k in &support {
        if let Some(v) = coordinate_exposer(&a, &sys.b, &support, k)? {
            return Ok(Some(make_exposer(sys, &a, &support, v)?));
        }
    }
    Ok(None)
}

/// Sum of per-coordinate exposers: its support is the union of all exposer supports.
pub(crate) fn max_support_exposer(sys: &ConicSystem, face: &FaceRep) -> Result<Option<Exposer>, FacialError> {
    let a = sys.exact_matrix()?;
    let support = face_support(sys, face)?;
    max_support_multiplier(&a, &sys.b, &support)?.map(|v| make_exposer(sys, &a, &support, v)).transpose()
}

fn max_support_multiplier(a: &RatMat, b: &[Rational], support: &[usize]) -> Result<Option<Vec<Rational>>, FacialError> {
    let mut total: Option<Vec<Rational>> = None;
    let mut covered = vec![false; a.cols()];
    for &k in support {
        if covered[k] {
            continue;
        }
        if let Some(v) = coordinate_exposer(a, b, support, k)? {
            let z = adjoint_exact(a, &v);
            for &j in support {
                if z[j].is_positive() {
                    covered[j] = true;
                }
            }
            total = Some(match total {
                None => v,
                Some(t) => t.iter().zip(&v).map(|(x, y)| x + y).collect(),
            });
        }
    }
    Ok(total)
}

/// A point of {x ≥ 0 : Ax = b} in the relative interior of the minimal face.
pub(crate) fn relative_interior_point(a: &RatMat, b: &[Rational]) -> Result<Vec<Rational>, FacialError> {
    let p = a.cols();
    let mut points: Vec<Vec<Rational>> = Vec::new();
    let mut fallback = None;
    for k in 0..p {
        let mut c = vec![Rational::zero(); p];
        c[k] = Rational::one();
        let x = match rational_lp(&c, a, b, Sense::Max)? {
            LpOutcome::Infeasible => return Err(FacialError::Infeasible),
            LpOutcome::Optimal { x, .. } => x,
            LpOutcome::Unbounded { x, ray } => x.iter().zip(&ray).map(|(u, w)| u + w).collect(),
        };
        if x[k].is_positive() {
            points.push(x);
        } else if fallback.is_none() {
            fallback = Some(x);
        }
    }
    if points.is_empty() {
        return match fallback {
            Some(x) => Ok(x),
            // no coordinates at all: feasible iff b = 0
            None if b.iter().all(|x| x.is_zero()) => Ok(Vec::new()),
            None => Err(FacialError::Infeasible),
        };
    }
    let count = Rational::from_integer((points.len() as i64).into());
    Ok((0..p).map(|j| points.iter().fold(Rational::zero(), |acc, x| acc + &x[j]) / &count).collect())
}

pub(crate) fn reduce(sys: &ConicSystem, tol: &Tolerances) -> Result<SingularityReport, FacialError> {
    let a = sys.exact_matrix()?;
    let layout = sys.layout()?;
    let witness = relative_interior_point(&a, &sys.b)?;
    let mut face = sys.cone.whole_face();
    let mut steps = Vec::new();
    loop {
        let support = face_support(sys, &face)?;
        let Some(v) = max_support_multiplier(&a, &sys.b, &support)? else { break };
        let e = make_exposer(sys, &a, &support, v)?;
        let next = crate::cones::expose(&sys.cone, &face, &e.z, 0.0)?;
        steps.push(CertStep { v: e.v, z: e.z, face: next.clone(), tol: 0.0 });
        face = next;
        if steps.len() > layout.lin_len {
            return Err(FacialError::NumericalFailure {
                partial: Certificate { steps },
                reason: "exact reduction did not terminate".into(),
            });
        }
    }
    let sd = steps.len();
    Ok(SingularityReport {
        sd,
        minimal_face: face,
        certificate: Certificate { steps },
        strictly_feasible: sd == 0,
        tolerances: *tol,
        margins: vec![1.0; sd + 1],
        exact: true,
        exact_arithmetic: true,
        witness: Some(layout.assemble_exact(&witness)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::{ConeDesc, Element};
    use crate::facial::{facial_reduction, Mode};
    use crate::numerics::rational::int;

    fn orthant(rows: &[&[i64]], b: &[i64]) -> ConicSystem {
        let n = rows[0].len();
        ConicSystem::new(
            ConeDesc::Orthant(n),
            rows.iter().map(|r| Element::Exact(r.iter().map(|&x| int(x)).collect())).collect(),
            b.iter().map(|&x| int(x)).collect(),
            Mode::Exact,
        )
        .unwrap()
    }

    #[test]
    fn strictly_feasible_orthant() {
        let sys = orthant(&[&[1, 1]], &[1]);
        let rep = facial_reduction(&sys).unwrap();
        assert_eq!(rep.sd, 0);
        assert!(rep.exact_arithmetic);
    }

    #[test]
    fn sum_zero_orthant_exposed_exactly() {
        let sys = orthant(&[&[1, 1]], &[0]);
        let rep = facial_reduction(&sys).unwrap();
        assert_eq!(rep.sd, 1);
        assert!(rep.minimal_face.is_zero());
        assert_eq!(rep.certificate.steps[0].v, Element::Exact(vec![crate::numerics::rational::rat(1, 2)]));
        assert_eq!(rep.certificate.steps[0].z, Element::Exact(vec![crate::numerics::rational::rat(1, 2); 2]));
    }

    #[test]
    fn infeasible_orthant() {
        let sys = orthant(&[&[1, 1]], &[-1]);
        assert_eq!(facial_reduction(&sys).unwrap_err(), FacialError::Infeasible);
    }

    #[test]
    fn partial_support_minimal_face() {
        // x1 + x2 - x3 = 0, x3 = 0 ⇒ x1 = x2 = x3 = 0 … but x4 free
        let sys = orthant(&[&[1, 1, -1, 0], &[0, 0, 1, 0]], &[0, 0]);
        let rep = facial_reduction(&sys).unwrap();
        assert_eq!(rep.sd, 1);
        assert_eq!(rep.minimal_face, FaceRep::Orthant { n: 4, support: vec![3] });
        let Some(Element::Exact(w)) = rep.witness else { panic!() };
        assert!(w[3].is_positive());
    }
}
