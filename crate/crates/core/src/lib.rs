//! Facial reduction and singularity degree for linear conic systems, with a
//! rigidity-analysis front end for frameworks and tensegrities.

pub mod batch;
pub mod cones;
pub mod facial;
pub mod numerics;
pub mod rigidity;
pub mod sdp;
