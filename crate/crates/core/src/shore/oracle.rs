//! Extensions of a bilipschitz line parameterisation to the whole plane.

use crate::error::{Error, Result};
use crate::geom::{Point, PointD, Polyline};
use crate::planemap::{Bound, ColumnShear, PlaneMap};

/// Φ: R² → R² with Φ(t, 0) = curve(t).
#[derive(Clone, Debug, PartialEq)]
pub struct LineExtension {
    pub map: PlaneMap,
    /// Claimed bilipschitz constant of Φ.
    pub bound: Bound,
    /// Φ is affine on each vertical strip between consecutive knots and on
    /// the half-planes beyond them, so Φ maps polylines refined at the
    /// knots to polylines.
    pub knots: Vec<f64>,
}

/// A source of line extensions.
pub trait LineExtensionOracle: Sync {
    fn name(&self) -> &'static str;
    fn extend(&self, curve: &Polyline) -> Result<LineExtension>;
}

/// The column shear (u, v) ↦ X(u)·e + (Y(u) + v)·e⊥ over a direction e in
/// which the curve is a graph.
///
/// With `direction` unset the chord direction and 64 evenly spaced
/// directions are tried and the smallest bound wins.
#[derive(Clone, Debug, Default)]
pub struct ShearOracle {
    pub direction: Option<Point>,
}

impl ShearOracle {
    pub fn along(e: Point) -> Self {
        ShearOracle { direction: Some(e) }
    }

    fn candidates(curve: &Polyline) -> Vec<Point> {
        let first = curve.vertices[0];
        let last = *curve.vertices.last().unwrap();
        let chord = last - first;
        let mut out = Vec::with_capacity(65);
        if chord.norm() > 0.0 {
            out.push(chord * (1.0 / chord.norm()));
        }
        for k in 0..64 {
            out.push(Point::new(1.0, 0.0).rotate(k as f64 * std::f64::consts::TAU / 64.0));
        }
        out
    }
}

impl LineExtensionOracle for ShearOracle {
    fn name(&self) -> &'static str {
        "shear"
    }

    fn extend(&self, curve: &Polyline) -> Result<LineExtension> {
        let dirs = match self.direction {
            Some(e) => vec![e * (1.0 / e.norm())],
            None => ShearOracle::candidates(curve),
        };
        let mut best: Option<ColumnShear> = None;
        for e in dirs {
            if let Ok(s) = ColumnShear::from_graph(curve, e) {
                if best.as_ref().map_or(true, |b| s.bound() < b.bound()) {
                    best = Some(s);
                }
            }
        }
        let shear = best.ok_or_else(|| {
            Error::OracleUnavailable(
                "the curve is not a graph over any tried direction; supply a line oracle".into(),
            )
        })?;
        let bound = Bound::new(shear.bound());
        let knots = shear.knots().to_vec();
        Ok(LineExtension {
            map: PlaneMap::ColumnShear { shear },
            bound,
            knots,
        })
    }
}

/// Checks Φ(t, 0) = curve(t) at breakpoints, midpoints and tail points,
/// within `tol` relative to the coordinate scale.
pub fn check_line_extension(ext: &LineExtension, curve: &Polyline, tol: f64) -> Result<()> {
    let (lo, hi) = curve.window();
    let mut ts: Vec<f64> = curve.breakpoints.clone();
    ts.extend(curve.breakpoints.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    ts.extend([lo - 1.0, lo - 10.0, hi + 1.0, hi + 10.0]);
    for t in ts {
        let want = curve.eval(t);
        let got = ext.map.evaluate(&PointD::xy(t, 0.0))?.to2();
        let scale = 1.0 + want.x.abs().max(want.y.abs());
        if got.dist(want) > tol * scale {
            return Err(Error::OracleBoundaryMismatch(format!(
                "Φ({t}, 0) = {got:?} but the curve gives {want:?}"
            )));
        }
    }
    Ok(())
}
