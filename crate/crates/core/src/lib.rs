//! Constructive bilipschitz extension machinery for planar lattices and
//! separated nets.
//!
//! The crate builds explicit curves, swap homeomorphisms, lattice
//! permutation decompositions and strip extensions, and pairs each
//! construction with a verifier for its bilipschitz constant.

pub mod error;
pub mod exact;
pub(crate) mod float;
pub mod geom;
pub mod permlattice;
pub mod pipeline;
pub mod planemap;
pub mod rounding;
pub mod separation;
pub mod shore;
pub mod strip_ext;

pub use error::{Error, Result};

/// Global tolerance for equality and on-curve tests.
pub const EPS: f64 = 1e-9;
