//! Spectral toolkit for the two-dimensional periodic Navier-Stokes equations.

pub mod bilinear;
pub mod constants;
pub mod dynamics;
pub mod error;
pub mod gevrey;
pub mod inequalities;
pub mod kolmogorov;
pub mod logspace;
pub mod report;
pub mod snapshot;
pub mod spectral;
pub mod taylor;

pub use error::{Error, Result};

/// Crate version, echoed into run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
