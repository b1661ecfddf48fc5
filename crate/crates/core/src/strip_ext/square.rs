//! Extensions from the boundary of the unit square, and their transport to
//! trapezia.

use super::trapezium::{TrapeziumMap, UNIT_SQUARE};
use crate::error::{Error, Result};
use crate::exact;
use crate::geom::{Point, PointD};
use crate::planemap::{Bound, Mesh, PlaneMap};
use serde::{Deserialize, Serialize};

/// A piecewise-affine map on ∂[0, 1]², given side by side as knots
/// (parameter, image) with parameters increasing from 0 to 1.
///
/// `bottom` and `top` run in u, `left` and `right` in v; adjacent sides
/// share their corner images.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquareBoundary {
    pub bottom: Vec<(f64, Point)>,
    pub right: Vec<(f64, Point)>,
    pub top: Vec<(f64, Point)>,
    pub left: Vec<(f64, Point)>,
}

fn eval_side(side: &[(f64, Point)], s: f64) -> Point {
    let i = side
        .partition_point(|(t, _)| *t <= s)
        .clamp(1, side.len() - 1);
    let ((t0, p0), (t1, p1)) = (side[i - 1], side[i]);
    if s <= t0 {
        return p0;
    }
    if s >= t1 {
        return p1;
    }
    p0.lerp(p1, (s - t0) / (t1 - t0))
}

impl SquareBoundary {
    pub fn validate(&self) -> Result<()> {
        for (name, side) in self.sides() {
            if side.len() < 2 {
                return Err(Error::InvalidInput(format!("{name} side needs two knots")));
            }
            if side[0].0 != 0.0 || side[side.len() - 1].0 != 1.0 {
                return Err(Error::InvalidInput(format!(
                    "{name} side must run from 0 to 1"
                )));
            }
            if !side.windows(2).all(|w| w[0].0 < w[1].0) {
                return Err(Error::InvalidInput(format!(
                    "{name} side parameters must increase"
                )));
            }
            if !side.iter().all(|(t, p)| t.is_finite() && p.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "{name} side has non-finite data"
                )));
            }
        }
        let corner = |a: Point, b: Point, which: &str| {
            if a.dist(b) > 1e-12 * (1.0 + a.norm()) {
                Err(Error::InvalidInput(format!(
                    "corner {which} images differ: {a:?} vs {b:?}"
                )))
            } else {
                Ok(())
            }
        };
        corner(self.bottom[0].1, self.left[0].1, "(0,0)")?;
        corner(self.bottom.last().unwrap().1, self.right[0].1, "(1,0)")?;
        corner(
            self.top.last().unwrap().1,
            self.right.last().unwrap().1,
            "(1,1)",
        )?;
        corner(self.top[0].1, self.left.last().unwrap().1, "(0,1)")
    }

    fn sides(&self) -> [(&'static str, &Vec<(f64, Point)>); 4] {
        [
            ("bottom", &self.bottom),
            ("right", &self.right),
            ("top", &self.top),
            ("left", &self.left),
        ]
    }

    /// The boundary map at a point of ∂[0, 1]².
    pub fn eval(&self, p: Point) -> Point {
        let tol = 1e-12;
        if p.y.abs() <= tol {
            eval_side(&self.bottom, p.x)
        } else if (p.y - 1.0).abs() <= tol {
            eval_side(&self.top, p.x)
        } else if p.x.abs() <= tol {
            eval_side(&self.left, p.y)
        } else {
            eval_side(&self.right, p.y)
        }
    }

    /// Points of ∂[0, 1]² at every knot and midpoint between knots.
    pub fn probe_points(&self) -> Vec<Point> {
        let mut out = Vec::new();
        let mut side = |knots: &[(f64, Point)], at: &dyn Fn(f64) -> Point| {
            for w in knots.windows(2) {
                out.push(at(w[0].0));
                out.push(at(0.5 * (w[0].0 + w[1].0)));
            }
            out.push(at(1.0));
        };
        side(&self.bottom, &|s| Point::new(s, 0.0));
        side(&self.right, &|s| Point::new(1.0, s));
        side(&self.top, &|s| Point::new(s, 1.0));
        side(&self.left, &|s| Point::new(0.0, s));
        out
    }
}

/// G: [0, 1]² → R² extending a boundary map, with a claimed bilipschitz
/// bound.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareExtension {
    pub map: PlaneMap,
    pub bound: Bound,
}

/// A source of square extensions.
pub trait SquareExtensionOracle: Sync {
    fn name(&self) -> &'static str;
    /// The constant C with bilip(G) ≤ C·L for L-bilipschitz input, when the
    /// oracle knows one.
    fn constant(&self) -> Option<f64> {
        None
    }
    /// `l` is an upper bound for the bilipschitz constant of the boundary
    /// map.
    fn extend(&self, boundary: &SquareBoundary, l: f64) -> Result<SquareExtension>;
}

/// The transfinite blend
/// G(u, v) = (1−v)c₀(u) + v c₁(u) + (1−u)d₀(v) + u d₁(v) − bilinear corners,
/// triangulated on the grid of all boundary knots refined to at least
/// `min_cells` per side.
///
/// This is a heuristic: the result is accepted only when every triangle keeps
/// one orientation, decided exactly, and the bound reported is the largest
/// operator norm of its affine pieces and their inverses.
#[derive(Clone, Debug)]
pub struct CoonsOracle {
    pub min_cells: usize,
}

impl Default for CoonsOracle {
    fn default() -> Self {
        CoonsOracle { min_cells: 8 }
    }
}

fn merged_knots(a: &[(f64, Point)], b: &[(f64, Point)], cells: usize) -> Vec<f64> {
    let mut ts: Vec<f64> = a.iter().chain(b).map(|(t, _)| *t).collect();
    ts.extend((0..=cells).map(|i| i as f64 / cells as f64));
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|x, y| (*x - *y).abs() <= 1e-13);
    *ts.first_mut().unwrap() = 0.0;
    *ts.last_mut().unwrap() = 1.0;
    ts
}

impl SquareExtensionOracle for CoonsOracle {
    fn name(&self) -> &'static str {
        "coons"
    }

    fn extend(&self, b: &SquareBoundary, _l: f64) -> Result<SquareExtension> {
        b.validate()?;
        let cells = self.min_cells.max(1);
        let us = merged_knots(&b.bottom, &b.top, cells);
        let vs = merged_knots(&b.left, &b.right, cells);
        let (p00, p10) = (b.bottom[0].1, b.bottom.last().unwrap().1);
        let (p01, p11) = (b.top[0].1, b.top.last().unwrap().1);
        let (nu, nv) = (us.len(), vs.len());
        let mut src = Vec::with_capacity(nu * nv);
        let mut dst = Vec::with_capacity(nu * nv);
        for (j, &v) in vs.iter().enumerate() {
            for (i, &u) in us.iter().enumerate() {
                src.push(Point::new(u, v));
                // Boundary vertices take the boundary value itself so that
                // agreement does not depend on cancellation in the blend.
                let g = if j == 0 {
                    eval_side(&b.bottom, u)
                } else if j == nv - 1 {
                    eval_side(&b.top, u)
                } else if i == 0 {
                    eval_side(&b.left, v)
                } else if i == nu - 1 {
                    eval_side(&b.right, v)
                } else {
                    let ruled_u = eval_side(&b.bottom, u) * (1.0 - v) + eval_side(&b.top, u) * v;
                    let ruled_v = eval_side(&b.left, v) * (1.0 - u) + eval_side(&b.right, v) * u;
                    let corners = p00 * ((1.0 - u) * (1.0 - v))
                        + p10 * (u * (1.0 - v))
                        + p01 * ((1.0 - u) * v)
                        + p11 * (u * v);
                    ruled_u + ruled_v - corners
                };
                dst.push(g);
            }
        }
        let idx = |i: usize, j: usize| (j * nu + i) as u32;
        let mut tris = Vec::with_capacity(2 * (nu - 1) * (nv - 1));
        for j in 0..nv - 1 {
            for i in 0..nu - 1 {
                tris.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                tris.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
        let mut sign = 0;
        for (k, t) in tris.iter().enumerate() {
            let o = exact::orient2d(
                dst[t[0] as usize].arr(),
                dst[t[1] as usize].arr(),
                dst[t[2] as usize].arr(),
            );
            if o == 0 || (sign != 0 && o != sign) {
                let c = src[t[0] as usize];
                return Err(Error::OracleUnavailable(format!(
                    "the Coons blend folds at triangle {k} near {c:?}; supply a square oracle"
                )));
            }
            sign = o;
        }
        let mesh = Mesh::new(src, dst, tris)?;
        let bound = Bound::new(mesh.piece_bound());
        Ok(SquareExtension {
            map: PlaneMap::Mesh { mesh, bound },
            bound,
        })
    }
}

/// A piecewise-affine map on the boundary of a trapezium, given as a closed
/// loop of (point of ∂P, image) pairs in counterclockwise order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryMap {
    pub src: Vec<Point>,
    pub dst: Vec<Point>,
}

/// F = G∘T⁻¹ on T([0, 1]²) with G the oracle's extension of f∘T.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareFill {
    pub map: PlaneMap,
    /// Claimed bound of F.
    pub bound: Bound,
    /// The oracle's bound for G.
    pub oracle_bound: Bound,
    /// bilip(T).
    pub k: f64,
    /// Largest boundary disagreement seen at knots and midpoints.
    pub boundary_error: f64,
}

/// Splits the pulled-back loop into the four sides of the unit square.
fn square_sides(pulled: &[(Point, Point)]) -> Result<SquareBoundary> {
    let n = pulled.len();
    let tol = 1e-9;
    let corner_index = |c: Point| {
        pulled
            .iter()
            .position(|(w, _)| w.dist(c) <= tol)
            .ok_or_else(|| {
                Error::InvalidInput(format!("boundary loop misses the corner image of {c:?}"))
            })
    };
    let start = corner_index(UNIT_SQUARE[0])?;
    let mut walk: Vec<(Point, Point)> = (0..=n).map(|i| pulled[(start + i) % n]).collect();
    walk[n].0 = UNIT_SQUARE[0];
    let mut sides: [Vec<(f64, Point)>; 4] = Default::default();
    let mut side = 0;
    for (i, (w, img)) in walk.iter().enumerate() {
        let target = UNIT_SQUARE[(side + 1) % 4];
        let param = match side {
            0 => w.x,
            1 => w.y,
            2 => 1.0 - w.x,
            _ => 1.0 - w.y,
        };
        sides[side].push((param.clamp(0.0, 1.0), *img));
        if i > 0 && w.dist(target) <= tol && side < 3 {
            side += 1;
            sides[side].push((0.0, *img));
        }
    }
    if side != 3 {
        return Err(Error::InvalidInput(
            "boundary loop is not counterclockwise around the square".into(),
        ));
    }
    for s in sides.iter_mut() {
        s[0].0 = 0.0;
        s.last_mut().unwrap().0 = 1.0;
        s.dedup_by(|b, a| b.0 <= a.0);
    }
    let [bottom, right, mut top, mut left] = sides;
    for s in [&mut top, &mut left] {
        s.reverse();
        for k in s.iter_mut() {
            k.0 = 1.0 - k.0;
        }
        s.dedup_by(|b, a| b.0 <= a.0);
    }
    let b = SquareBoundary {
        bottom,
        right,
        top,
        left,
    };
    b.validate()?;
    Ok(b)
}

/// Extends `f` from ∂P to P = T([0, 1]²) by conjugating the oracle with T.
///
/// `l` bounds the bilipschitz constant of `f`. With an oracle constant C the
/// claimed bound is C·K²·L for K = bilip(T); otherwise it is the oracle's
/// bound for G times K.
pub fn square_boundary_extend(
    f: &BoundaryMap,
    t: &TrapeziumMap,
    l: f64,
    oracle: &dyn SquareExtensionOracle,
) -> Result<SquareFill> {
    if f.src.len() != f.dst.len() || f.src.len() < 4 {
        return Err(Error::InvalidInput(
            "boundary map needs matching loops of ≥ 4 points".into(),
        ));
    }
    let pulled: Vec<(Point, Point)> = f
        .src
        .iter()
        .zip(&f.dst)
        .map(|(s, d)| t.apply_inverse(*s).map(|w| (w, *d)))
        .collect::<Result<_>>()?;
    let boundary = square_sides(&pulled)?;
    let k = t.bilip();
    let ext = oracle.extend(&boundary, k * l)?;
    let map = PlaneMap::compose(vec![ext.map.clone(), t.map.inverse()]);
    let mut boundary_error = 0.0_f64;
    let n = f.src.len();
    for i in 0..n {
        let j = (i + 1) % n;
        for s in [0.0, 0.5] {
            let p = f.src[i].lerp(f.src[j], s);
            let want = f.dst[i].lerp(f.dst[j], s);
            let got = map.evaluate(&PointD::from(p))?.to2();
            let err = got.dist(want);
            boundary_error = boundary_error.max(err);
            if err > 1e-9 * (1.0 + want.norm()) {
                return Err(Error::OracleBoundaryMismatch(format!(
                    "oracle {} gives {got:?} at {p:?} where the boundary map gives {want:?}",
                    oracle.name()
                )));
            }
        }
    }
    let bound = match oracle.constant() {
        Some(c) => Bound::new(c * k * k * l),
        None => ext.bound.times(Bound::new(k)),
    };
    Ok(SquareFill {
        map,
        bound,
        oracle_bound: ext.bound,
        k,
        boundary_error,
    })
}
