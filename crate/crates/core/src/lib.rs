//! Executable constructions around polynomial growth and asymptotic
//! dimension on finite graphs and finite metric spaces.

pub mod cover;
pub mod error;
pub mod generators;
pub mod graph;
pub mod growth;
pub mod io;
pub mod metric;
pub mod separator;

pub use error::{Error, ErrorKind, Result};

/// Crate version, embedded in every emitted artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
