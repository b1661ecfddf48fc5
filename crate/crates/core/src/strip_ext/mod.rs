//! Extensions from the boundary of a strip to the strip, and the
//! straightening of two bilipschitz lines to a standard pair.

pub mod normalise;
pub mod square;
pub mod strip;
pub mod trapezium;

pub use normalise::{
    boundary_bilip, normalise, normalise_error, normalise_step, normalise_with, straighten_with,
    NormaliseConfig, Normalised, Straightening, TopLine,
};
pub use square::{
    square_boundary_extend, BoundaryMap, CoonsOracle, SquareBoundary, SquareExtension,
    SquareExtensionOracle, SquareFill,
};
pub use strip::{
    check_strip, extend_strip, grid_injective, random_graph_strip, GridInjectivity, RandomStrip,
    Rung, StripBoundary, StripExtension, StripReport,
};
pub use trapezium::{trapezium_map, TrapeziumMap, TrapeziumSpec, UNIT_SQUARE};
