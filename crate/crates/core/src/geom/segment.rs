//! Closed segments and exact distance predicates between them.

use super::point::Point;
use crate::exact;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub const fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn midpoint(&self) -> Point {
        self.a.lerp(self.b, 0.5)
    }

    /// Axis-aligned bounding box as (min, max).
    pub fn bbox(&self) -> (Point, Point) {
        (
            Point::new(self.a.x.min(self.b.x), self.a.y.min(self.b.y)),
            Point::new(self.a.x.max(self.b.x), self.a.y.max(self.b.y)),
        )
    }

    pub fn intersects(&self, o: &Segment) -> bool {
        exact::segments_intersect(self.a.arr(), self.b.arr(), o.a.arr(), o.b.arr())
    }
}

/// Euclidean distance from `p` to the closed segment `s`.
pub fn point_segment_distance(p: Point, s: &Segment) -> f64 {
    let ab = s.b - s.a;
    let len2 = ab.norm2();
    if len2 == 0.0 {
        return p.dist(s.a);
    }
    let t = ((p - s.a).dot(ab) / len2).clamp(0.0, 1.0);
    // Evaluate the foot from the nearer endpoint to limit cancellation.
    let foot = if t <= 0.5 {
        s.a + ab * t
    } else {
        s.b - ab * (1.0 - t)
    };
    p.dist(foot)
}

/// Minimum distance between closed segments; zero exactly when they meet.
pub fn segment_segment_distance(s1: &Segment, s2: &Segment) -> f64 {
    if s1.intersects(s2) {
        return 0.0;
    }
    point_segment_distance(s1.a, s2)
        .min(point_segment_distance(s1.b, s2))
        .min(point_segment_distance(s2.a, s1))
        .min(point_segment_distance(s2.b, s1))
}

/// Gap between two axis-aligned boxes, a cheap lower bound on the distance of
/// whatever they contain.
pub fn bbox_gap(a: (Point, Point), b: (Point, Point)) -> f64 {
    let dx = (b.0.x - a.1.x).max(a.0.x - b.1.x).max(0.0);
    let dy = (b.0.y - a.1.y).max(a.0.y - b.1.y).max(0.0);
    dx.hypot(dy)
}
