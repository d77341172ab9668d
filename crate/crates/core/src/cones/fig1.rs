//! A three-dimensional cone that is not facially exposed.
//!
//! K = cl cone{(x, y, 1) : (x, y) ∈ C} with C the union of the upper unit half-disk and
//! the square [−1,1]×[−1,0]. The point A = (1,0) sits where the arc meets the square's
//! right edge: every supporting line of C through A also contains B = (1,−1), so the ray
//! through A is a face of K that is reachable only through the face cone{A, B}.

use super::{ConeError, DualCheck};

pub const POINT_A: [f64; 3] = [1.0, 0.0, 1.0];
pub const POINT_B: [f64; 3] = [1.0, -1.0, 1.0];
/// Exposes cone{A, B} in K.
pub const D1: [f64; 3] = [-1.0, 0.0, 1.0];
/// Exposes cone{A} inside cone{A, B}.
pub const D2: [f64; 3] = [0.0, -1.0, 0.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fig1Face {
    Whole,
    /// cone{A, B}
    SegmentAB,
    RayA,
    RayB,
    /// A two-dimensional face other than cone{A, B} (left or bottom edge of the square).
    OtherSegment,
    /// An extreme ray other than those through A or B.
    OtherRay,
    Zero,
}

impl Fig1Face {
    pub fn dim(self) -> usize {
        match self {
            Fig1Face::Whole => 3,
            Fig1Face::SegmentAB | Fig1Face::OtherSegment => 2,
            Fig1Face::RayA | Fig1Face::RayB | Fig1Face::OtherRay => 1,
            Fig1Face::Zero => 0,
        }
    }

    pub fn contains(self, other: Fig1Face) -> bool {
        self == other
            || self == Fig1Face::Whole
            || other == Fig1Face::Zero
            || (self == Fig1Face::SegmentAB && matches!(other, Fig1Face::RayA | Fig1Face::RayB))
    }

    pub fn name(self) -> &'static str {
        match self {
            Fig1Face::Whole => "whole",
            Fig1Face::SegmentAB => "segment-AB",
            Fig1Face::RayA => "ray-A",
            Fig1Face::RayB => "ray-B",
            Fig1Face::OtherSegment => "other-segment",
            Fig1Face::OtherRay => "other-ray",
            Fig1Face::Zero => "zero",
        }
    }
}

pub fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Hard-coded membership and exposing-vector oracles for the cone.
#[derive(Clone, Copy, Debug, Default)]
pub struct Fig1Fixture;

impl Fig1Fixture {
    pub fn in_base(x: f64, y: f64, tol: f64) -> bool {
        let square = x.abs() <= 1.0 + tol && y <= tol && y >= -1.0 - tol;
        let disk = y >= -tol && x * x + y * y <= 1.0 + tol;
        square || disk
    }

    /// Membership in K.
    pub fn contains(&self, p: [f64; 3], tol: f64) -> bool {
        let [x, y, t] = p;
        if t > tol {
            Self::in_base(x / t, y / t, tol)
        } else {
            t >= -tol && x.abs() <= tol && y.abs() <= tol
        }
    }

    /// min over (x, y) ∈ C of ax + by + c, computed in closed form.
    pub fn support_min(&self, z: [f64; 3]) -> f64 {
        let [a, b, c] = z;
        let square = -a.abs() - b.max(0.0);
        let disk = if b >= 0.0 { -a.abs() } else { -(a * a + b * b).sqrt() };
        c + square.min(disk)
    }

    /// Membership of z in the dual cone K*.
    pub fn in_dual(&self, z: [f64; 3], tol: f64) -> bool {
        self.support_min(z) >= -tol
    }

    pub fn dual_check(&self, face: Fig1Face, z: [f64; 3], tol: f64) -> Result<DualCheck, ConeError> {
        let values: Vec<f64> = match face {
            Fig1Face::Whole => {
                let residual = (-self.support_min(z)).max(0.0);
                let perp = z.iter().all(|v| v.abs() <= tol);
                return Ok(DualCheck { in_dual: residual <= tol, in_perp: perp, residual });
            }
            Fig1Face::SegmentAB => vec![dot3(z, POINT_A), dot3(z, POINT_B)],
            Fig1Face::RayA => vec![dot3(z, POINT_A)],
            Fig1Face::RayB => vec![dot3(z, POINT_B)],
            Fig1Face::Zero => vec![],
            Fig1Face::OtherSegment | Fig1Face::OtherRay => {
                return Err(ConeError::InvalidFace(format!("no dual oracle for face {}", face.name())))
            }
        };
        let residual = values.iter().fold(0.0f64, |m, v| m.max(-v));
        let perp = values.iter().all(|v| v.abs() <= tol);
        Ok(DualCheck { in_dual: residual <= tol, in_perp: perp, residual })
    }

    /// face ∩ z⊥ for z already known to be in the dual of `face` and not in its complement.
    pub fn expose(&self, face: Fig1Face, z: [f64; 3], tol: f64) -> Fig1Face {
        let za = dot3(z, POINT_A).abs() <= tol;
        let zb = dot3(z, POINT_B).abs() <= tol;
        match face {
            Fig1Face::Whole => {
                if self.support_min(z) > tol {
                    return Fig1Face::Zero;
                }
                let [a, b, _] = z;
                let flat_b = b.abs() <= tol;
                if flat_b && a < 0.0 {
                    // minimized along the right edge x = 1
                    Fig1Face::SegmentAB
                } else if (flat_b && a > 0.0) || (a.abs() <= tol && b > 0.0) {
                    Fig1Face::OtherSegment
                } else if zb {
                    Fig1Face::RayB
                } else if za {
                    Fig1Face::RayA
                } else {
                    Fig1Face::OtherRay
                }
            }
            Fig1Face::SegmentAB => match (za, zb) {
                (true, false) => Fig1Face::RayA,
                (false, true) => Fig1Face::RayB,
                (true, true) => Fig1Face::SegmentAB,
                (false, false) => Fig1Face::Zero,
            },
            Fig1Face::RayA | Fig1Face::RayB | Fig1Face::Zero => Fig1Face::Zero,
            other => other,
        }
    }

    /// Exposing vector for the next step toward `target`, if the fixture knows one.
    pub fn next_exposer(&self, face: Fig1Face, target: Fig1Face) -> Option<[f64; 3]> {
        match (face, target) {
            (Fig1Face::Whole, Fig1Face::SegmentAB | Fig1Face::RayA | Fig1Face::RayB) => Some(D1),
            (Fig1Face::SegmentAB, Fig1Face::RayA) => Some(D2),
            (Fig1Face::SegmentAB, Fig1Face::RayB) => Some([0.0, 1.0, 0.0]),
            (_, Fig1Face::Zero) if face != Fig1Face::Zero => Some([0.0, 0.0, 1.0]),
            _ => None,
        }
    }
}
