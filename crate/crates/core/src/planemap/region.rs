//! Closed regions used to glue maps piecewise.

use super::map::PlaneMap;
use crate::geom::{point_segment_distance, Point, PointD, Segment};
use crate::EPS;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Region {
    All,
    /// Axis-aligned box, closed.
    Box {
        lo: PointD,
        hi: PointD,
    },
    /// { x : n · x ≤ c }.
    HalfSpace {
        normal: PointD,
        #[serde(with = "crate::float")]
        offset: f64,
    },
    /// Planar simple polygon, closed; boundary points within `EPS` count.
    Polygon {
        vertices: Vec<Point>,
    },
    Intersection {
        parts: Vec<Region>,
    },
    Union {
        parts: Vec<Region>,
    },
    /// { x : map(x) ∈ region }; points outside the domain of the map are
    /// not contained.
    Pullback {
        map: Box<PlaneMap>,
        region: Box<Region>,
    },
}

impl Region {
    pub fn contains(&self, p: &PointD) -> bool {
        self.contains_tol(p, EPS)
    }

    pub fn contains_tol(&self, p: &PointD, tol: f64) -> bool {
        match self {
            Region::All => true,
            Region::Box { lo, hi } => {
                (0..p.dim()).all(|i| p[i] >= lo[i] - tol && p[i] <= hi[i] + tol)
            }
            Region::HalfSpace { normal, offset } => {
                normal.dot(p) <= offset + tol * (1.0 + normal.norm())
            }
            Region::Polygon { vertices } => polygon_contains(vertices, p.to2(), tol),
            Region::Intersection { parts } => parts.iter().all(|r| r.contains_tol(p, tol)),
            Region::Union { parts } => parts.iter().any(|r| r.contains_tol(p, tol)),
            Region::Pullback { map, region } => {
                map.evaluate(p).is_ok_and(|q| region.contains_tol(&q, tol))
            }
        }
    }

    /// Horizontal slab a ≤ y ≤ b in the plane (last coordinate in general).
    pub fn slab(d: usize, a: f64, b: f64) -> Region {
        let mut lo = PointD::zeros(d);
        let mut hi = PointD::zeros(d);
        for i in 0..d - 1 {
            lo[i] = f64::NEG_INFINITY;
            hi[i] = f64::INFINITY;
        }
        lo[d - 1] = a;
        hi[d - 1] = b;
        Region::Box { lo, hi }
    }

    pub fn triangle(a: Point, b: Point, c: Point) -> Region {
        Region::Polygon {
            vertices: vec![a, b, c],
        }
    }

    /// Bounding box in the plane, when finite.
    pub fn bbox2(&self) -> Option<(Point, Point)> {
        match self {
            Region::Box { lo, hi } => Some((lo.to2(), hi.to2())),
            Region::Polygon { vertices } => {
                let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
                let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
                for v in vertices {
                    lo = Point::new(lo.x.min(v.x), lo.y.min(v.y));
                    hi = Point::new(hi.x.max(v.x), hi.y.max(v.y));
                }
                Some((lo, hi))
            }
            Region::Intersection { parts } => parts.iter().filter_map(|r| r.bbox2()).next(),
            _ => None,
        }
    }
}

/// Crossing-number test with a boundary tolerance.
pub fn polygon_contains(v: &[Point], p: Point, tol: f64) -> bool {
    let n = v.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        if point_segment_distance(p, &Segment::new(a, b)) <= tol {
            return true;
        }
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}
