//! Singularity degree of a face of a cone, driven by an exposing-vector oracle.

use crate::cones::fig1::{dot3, POINT_A, POINT_B};
use crate::cones::{dual_residual, expose, same_face, ConeDesc, Element, FaceRep, Fig1Face, Fig1Fixture};
use crate::numerics::Mat;

use super::FacialError;

const ORACLE_TOL: f64 = 1e-9;

pub trait ExposingOracle {
    fn whole(&self) -> FaceRep;
    /// An exposer d ∈ F*, d ∉ F⊥, d ⊥ target, with the face F ∩ d⊥; None if none is known.
    fn step(&self, face: &FaceRep, target: &FaceRep) -> Option<(Element, FaceRep)>;
}

/// Number of oracle steps F_{i+1} = F_i ∩ d_i⊥ from the whole cone down to `target`.
pub fn sd_of_face_algorithm2(oracle: &impl ExposingOracle, target: &FaceRep) -> Result<usize, FacialError> {
    let mut face = oracle.whole();
    let mut steps = 0;
    while !same_face(&face, target) {
        let Some((_, next)) = oracle.step(&face, target) else {
            return Err(FacialError::OracleExhausted { steps });
        };
        if same_face(&next, &face) {
            return Err(FacialError::OracleExhausted { steps });
        }
        face = next;
        steps += 1;
        if steps > 16 {
            return Err(FacialError::OracleExhausted { steps });
        }
    }
    Ok(steps)
}

/// Oracle for the non-exposed cone fixture.
pub struct Fig1Oracle;

fn fig1_ri_point(face: Fig1Face) -> Option<[f64; 3]> {
    match face {
        Fig1Face::Whole => Some([0.0, 0.0, 1.0]),
        Fig1Face::SegmentAB => Some([1.0, -0.5, 1.0]),
        Fig1Face::RayA => Some(POINT_A),
        Fig1Face::RayB => Some(POINT_B),
        Fig1Face::Zero => Some([0.0; 3]),
        Fig1Face::OtherSegment | Fig1Face::OtherRay => None,
    }
}

impl ExposingOracle for Fig1Oracle {
    fn whole(&self) -> FaceRep {
        FaceRep::Fig1(Fig1Face::Whole)
    }

    fn step(&self, face: &FaceRep, target: &FaceRep) -> Option<(Element, FaceRep)> {
        let (FaceRep::Fig1(f), FaceRep::Fig1(t)) = (face, target) else { return None };
        let d = Fig1Fixture.next_exposer(*f, *t)?;
        let point = fig1_ri_point(*t)?;
        if dot3(d, point).abs() > ORACLE_TOL {
            return None;
        }
        let z = Element::Vector(d.to_vec());
        let check = dual_residual(&ConeDesc::Fig1, face, &z, ORACLE_TOL).ok()?;
        if !check.in_dual || check.in_perp {
            return None;
        }
        let next = expose(&ConeDesc::Fig1, face, &z, ORACLE_TOL).ok()?;
        Some((z, next))
    }
}

/// PSD cone with an explicit target face {T R Tᵀ}: d = VVᵀ − TTᵀ reaches it in one step.
pub struct PsdTargetOracle {
    pub n: usize,
}

impl ExposingOracle for PsdTargetOracle {
    fn whole(&self) -> FaceRep {
        FaceRep::Psd { basis: Mat::identity(self.n) }
    }

    fn step(&self, face: &FaceRep, target: &FaceRep) -> Option<(Element, FaceRep)> {
        let (FaceRep::Psd { basis: v }, FaceRep::Psd { basis: t }) = (face, target) else { return None };
        let d = &(v * &v.transpose()) - &(t * &t.transpose());
        let z = Element::Matrix(d);
        let next = expose(&ConeDesc::Psd(self.n), face, &z, ORACLE_TOL).ok()?;
        Some((z, next))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_ray_at_a_needs_two_steps() {
        assert_eq!(sd_of_face_algorithm2(&Fig1Oracle, &FaceRep::Fig1(Fig1Face::RayA)).unwrap(), 2);
        assert_eq!(sd_of_face_algorithm2(&Fig1Oracle, &FaceRep::Fig1(Fig1Face::SegmentAB)).unwrap(), 1);
        assert_eq!(sd_of_face_algorithm2(&Fig1Oracle, &FaceRep::Fig1(Fig1Face::Whole)).unwrap(), 0);
    }

    #[test]
    fn fig1_other_faces_exhaust_the_oracle() {
        let err = sd_of_face_algorithm2(&Fig1Oracle, &FaceRep::Fig1(Fig1Face::OtherRay)).unwrap_err();
        assert_eq!(err, FacialError::OracleExhausted { steps: 0 });
    }

    #[test]
    fn psd_face_in_one_step() {
        let t = Mat::from_fn(3, 2, |i, j| if i == j + 1 { 1.0 } else { 0.0 });
        let oracle = PsdTargetOracle { n: 3 };
        assert_eq!(sd_of_face_algorithm2(&oracle, &FaceRep::Psd { basis: t }).unwrap(), 1);
        assert_eq!(sd_of_face_algorithm2(&oracle, &FaceRep::Psd { basis: Mat::identity(3) }).unwrap(), 0);
        let (d, _) = oracle.step(&oracle.whole(), &FaceRep::Psd { basis: Mat::from_fn(3, 2, |i, j| if i == j + 1 { 1.0 } else { 0.0 }) }).unwrap();
        assert_eq!(d, Element::Matrix(Mat::diag(&[1.0, 0.0, 0.0])));
    }
}
