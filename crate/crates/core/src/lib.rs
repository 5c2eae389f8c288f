//! Affine Coxeter complexes, small euclidean buildings glued from apartment
//! charts, and verification of local-to-global convexity criteria.
//!
//! The crate models everything at desk scale: the infinite complex is
//! materialized inside a configurable bounding box, buildings are finite
//! atlases of apartment charts, and every predicate that can be decided in
//! rational arithmetic is decided exactly. Lengths and angles are emitted as
//! floating point with a 1e-9 tolerance.

pub mod angle;
pub mod atlas;
pub mod convexity;
pub mod coxeter;
pub mod error;
pub mod exact;
pub mod link;
pub mod poly;
pub mod report;
pub mod scene;
pub mod scenario;
pub mod svg;

pub use error::Error;
pub use exact::{Rat, QVec};

/// Absolute tolerance for all floating-point lengths and angles.
pub const TOL: f64 = 1e-9;
