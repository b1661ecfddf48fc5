//! Which side of a graph-like curve a point lies on.

use super::point::Point;
use super::polyline::Polyline;
use super::segment::Segment;
use crate::EPS;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Below,
    Above,
    OnCurve,
}

/// Classifies `p` against a curve whose tails run off to x = −∞ and x = +∞.
///
/// Counts crossings of the upward vertical ray from `p`; an odd count means
/// `p` is below. Segments are taken half-open in x so every vertex is counted
/// once and vertical pieces never count.
pub fn side_classify(curve: &Polyline, p: Point) -> Side {
    side_classify_tol(curve, p, EPS)
}

pub fn side_classify_tol(curve: &Polyline, p: Point, tol: f64) -> Side {
    if curve.distance_to(p) < tol {
        return Side::OnCurve;
    }
    let (lo, hi) = curve.bbox();
    let span = (hi.x - lo.x).abs() + (p.x - lo.x).abs() + (p.x - hi.x).abs() + 1.0;
    let (t0, t1) = curve.window();
    let reach0 = span / curve.tails[0].x.abs().max(f64::MIN_POSITIVE);
    let reach1 = span / curve.tails[1].x.abs().max(f64::MIN_POSITIVE);
    let mut crossings = 0usize;
    let mut count = |s: Segment| {
        if crosses_above(&s, p) {
            crossings += 1;
        }
    };
    count(Segment::new(curve.eval(t0 - reach0), curve.vertices[0]));
    for s in curve.segments() {
        count(s);
    }
    count(Segment::new(
        *curve.vertices.last().unwrap(),
        curve.eval(t1 + reach1),
    ));
    if crossings % 2 == 1 {
        Side::Below
    } else {
        Side::Above
    }
}

/// True when the segment meets the open upward ray from `p`, with the
/// half-open convention on x.
pub fn crosses_above(s: &Segment, p: Point) -> bool {
    let (a, b) = (s.a, s.b);
    let straddles = (a.x <= p.x && p.x < b.x) || (b.x <= p.x && p.x < a.x);
    if !straddles {
        return false;
    }
    // Sign of the segment's height over p, decided by an exact orientation.
    let (l, r) = if a.x < b.x { (a, b) } else { (b, a) };
    crate::exact::orient2d(l.arr(), r.arr(), p.arr()) < 0
}

/// Parity of the crossings between the ray from `p` in direction `dir` and
/// the curve, with the tails followed well past the ray's end. Points with
/// equal parity lie in the same component of the complement of a curve whose
/// tails leave every bounded set, provided `dir` is not asymptotic to a tail.
/// Returns None when the ray meets a vertex, where the count is ambiguous.
pub fn crossing_parity(curve: &Polyline, p: Point, dir: Point) -> Option<bool> {
    let (lo, hi) = curve.bbox();
    let span = (hi - lo).norm() + (p - lo).norm() + (p - hi).norm() + 1.0;
    let d = dir * (1.0 / dir.norm());
    let end = p + d * (4.0 * span);
    let ray = Segment::new(p, end);
    let (t0, t1) = curve.window();
    let far = 64.0 * span;
    let head = curve.eval(t0 - far / curve.tails[0].norm().max(f64::MIN_POSITIVE));
    let tail = curve.eval(t1 + far / curve.tails[1].norm().max(f64::MIN_POSITIVE));
    let mut pieces = Vec::with_capacity(curve.vertices.len() + 1);
    pieces.push(Segment::new(head, curve.vertices[0]));
    pieces.extend(curve.segments());
    pieces.push(Segment::new(*curve.vertices.last().unwrap(), tail));
    let mut odd = false;
    for s in &pieces {
        for v in [s.a, s.b] {
            if crate::exact::orient2d(p.arr(), end.arr(), v.arr()) == 0 && (v - p).dot(d) >= 0.0 {
                return None;
            }
        }
        if ray.intersects(s) {
            odd = !odd;
        }
    }
    Some(odd)
}

/// Whether the two points lie in the same component of the complement of
/// the curve, trying a few ray directions until one avoids the vertices.
pub fn same_component(curve: &Polyline, p: Point, q: Point) -> Option<bool> {
    let chord = *curve.vertices.last().unwrap() - curve.vertices[0];
    let base = if chord.norm() > 0.0 { Point::new(-chord.y, chord.x) } else { Point::new(0.0, 1.0) };
    for k in 0..16 {
        let dir = base.rotate(0.01 * k as f64);
        if let (Some(a), Some(b)) = (crossing_parity(curve, p, dir), crossing_parity(curve, q, dir)) {
            return Some(a == b);
        }
    }
    None
}

/// Crossing parities of all points for one ray direction that avoids every
/// vertex, so that equal labels mean the same component. None when no tried
/// direction works for every point.
pub fn component_labels(curve: &Polyline, pts: &[Point]) -> Option<Vec<bool>> {
    let chord = *curve.vertices.last().unwrap() - curve.vertices[0];
    let base = if chord.norm() > 0.0 { Point::new(-chord.y, chord.x) } else { Point::new(0.0, 1.0) };
    'dirs: for k in 0..16 {
        let dir = base.rotate(0.01 * k as f64 + 1e-3);
        let mut out = Vec::with_capacity(pts.len());
        for p in pts {
            match crossing_parity(curve, *p, dir) {
                Some(b) => out.push(b),
                None => continue 'dirs,
            }
        }
        return Some(out);
    }
    None
}
