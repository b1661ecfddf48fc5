//! Composable invertible maps of R^d (d ≤ 3) carrying bilipschitz bounds.

pub mod affine;
pub mod bound;
pub mod map;
pub mod mesh;
pub mod profile;
pub mod region;
pub mod shear;

pub use affine::{op_norm2, Affine};
pub use bound::Bound;
pub use map::{rotate_in_plane, ExactTube, GluedPiece, PlaneMap, Spin, TubeFamily, TubeSpin};
pub use mesh::Mesh;
pub use profile::AngleProfile;
pub use region::Region;
pub use shear::ColumnShear;

use crate::error::{Error, Result};
use crate::geom::PointD;

/// Φ(x) = R_{ψ(‖x‖)} x rotating the first two coordinates, with bound
/// π · Lip(ψ) · t0 + 1.
pub fn spin_map(profile: AngleProfile, t0: f64, d: usize) -> Result<PlaneMap> {
    if d < 2 || d > 3 {
        return Err(Error::InvalidInput(format!(
            "spin needs dimension 2 or 3, got {d}"
        )));
    }
    if !profile.vanishes_from(t0) {
        return Err(Error::ProfileNotCompact(t0));
    }
    Ok(PlaneMap::Spin {
        spin: Spin {
            dim: d,
            profile,
            t0,
            plane: (0, 1),
        },
    })
}

/// The swap of `x` and `y` supported in the open r-tube around [x, y].
pub fn tube_spin(x: PointD, y: PointD, r: f64) -> Result<PlaneMap> {
    Ok(PlaneMap::TubeSpin {
        tube: TubeSpin::new(x, y, r)?,
    })
}

pub fn compose(ms: Vec<PlaneMap>) -> PlaneMap {
    PlaneMap::compose(ms)
}

pub fn evaluate(m: &PlaneMap, p: &PointD) -> Result<PointD> {
    m.evaluate(p)
}

pub fn inverse_evaluate(m: &PlaneMap, q: &PointD) -> Result<PointD> {
    m.inverse_evaluate(q)
}
