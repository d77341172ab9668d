//! Facial reduction, singularity degree, and certificates.
//!
//! The engine alternates a maximal-rank exposing step with `cones::expose` until the
//! auxiliary system has only the zero solution. On polyhedral systems in exact mode every
//! decision is an exact rational LP.

mod algorithm2;
mod engine;
mod exact;
mod nullspace;
mod system;
mod validate;

use thiserror::Error;

use crate::cones::{ConeError, Element, FaceRep};
use crate::numerics::NumericsError;
use crate::sdp::SdpError;

pub use algorithm2::{sd_of_face_algorithm2, ExposingOracle, Fig1Oracle, PsdTargetOracle};
pub use engine::{auxiliary_step, facial_reduction, facial_reduction_with, max_rank_exposing, sd_of_image_face, Exposer};
pub use nullspace::{nullspace_reduce, nullspace_reduce_signed, NullspaceReduction};
pub use system::{ConicSystem, Mode};
pub use validate::{validate_certificate, StepCheck, ValidationReport};

/// Tolerance bundle of a reduction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Decision threshold τ_aux for "no exposer exists".
    pub aux: f64,
    /// Margin a no-more-exposer decision needs before "exactly k" is claimed.
    pub exact_margin: f64,
    /// Reconstruction check Z = ℳ*(v).
    pub reconstruction: f64,
    /// Relative bound on |⟨v, b⟩|.
    pub orthogonality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { aux: 1e-7, exact_margin: 1e-6, reconstruction: 1e-10, orthogonality: 1e-9 }
    }
}

/// One reducing step: multiplier v, exposing element Z = ℳ*(v), and the face it cuts out.
#[derive(Clone, Debug, PartialEq)]
pub struct CertStep {
    /// `Element::Vector` in float mode, `Element::Exact` in exact mode.
    pub v: Element,
    pub z: Element,
    pub face: FaceRep,
    /// Threshold used to read the kernel of Z on the previous face.
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Certificate {
    pub steps: Vec<CertStep>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingularityReport {
    pub sd: usize,
    pub minimal_face: FaceRep,
    pub certificate: Certificate,
    pub strictly_feasible: bool,
    pub tolerances: Tolerances,
    /// Margin of every auxiliary decision, the final "no exposer" decision last.
    pub margins: Vec<f64>,
    /// "Exactly sd" rather than only "certified ≤ sd".
    pub exact: bool,
    /// All decisions were taken in exact rational arithmetic.
    pub exact_arithmetic: bool,
    /// A point in the relative interior of the minimal face satisfying ℳ(x) = b.
    pub witness: Option<Element>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FacialError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("the system is infeasible")]
    Infeasible,
    #[error("numerical failure after {} steps: {reason}", partial.steps.len())]
    NumericalFailure { partial: Certificate, reason: String },
    #[error("oracle has no exposer after {steps} steps")]
    OracleExhausted { steps: usize },
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
