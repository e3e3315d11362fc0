//! Finite-matrix toolkit for orthogonal projections relative to a fixed
//! splitting `H = H+ ⊕ H−`: mixed norms, spectral pictures, the Halmos
//! two-projection decomposition, geodesics, the nine-class classification
//! with Fredholm indices, and constructors for standard example families.

pub mod algebra;
pub mod error;
pub mod gallery;
pub mod halmos;
pub mod linalg;
pub mod model;
pub mod random;
pub mod report;
pub mod spectral;
pub mod suites;

pub use error::{Error, Result};

/// Version tag written into every JSON document.
pub const SCHEMA_VERSION: u32 = 1;
