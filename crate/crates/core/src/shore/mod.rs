//! Shore curves for the horizontal-line extension: a bilipschitz curve near
//! a Lipschitz one, its perturbation away from a separated set, and the
//! extension of a lattice map to horizontal lines.

pub mod gridcurve;
pub mod initial;
pub mod line;
pub mod oracle;

pub use gridcurve::{
    avoid_gridcurve, check_gridcurve, detour_extension, detour_map, exact_clearance, grid_h, Detour, GridCurve,
    DetourMap, GridReport,
};
pub use line::{
    check_well_separating, horizontal_line_extension, line_clearance, line_window, strips_extension,
    strips_spacing_log2, HorizontalLine, LineConstants, LineParams, LineReport, SeparationMode,
    Strips, WellSeparating,
};
pub use initial::{
    check_shore, initial_shore, lattice_curve_constant, random_lattice_curve, ShoreCurve,
    ShoreInput, ShoreReport,
};
pub use oracle::{check_line_extension, LineExtension, LineExtensionOracle, ShearOracle};
