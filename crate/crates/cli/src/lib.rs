//! File formats, reports, and commands behind the `facered` binary.

pub mod commands;
pub mod error;
pub mod files;
pub mod svg;

pub use commands::Outcome;
pub use error::CliError;
