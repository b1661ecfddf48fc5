//! Piecewise-affine curves on a parameter window with affine tails.

use super::point::Point;
use super::segment::{point_segment_distance, Segment};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A piecewise-affine map from R into the plane.
///
/// On `[breakpoints[i], breakpoints[i + 1]]` the curve interpolates
/// `vertices[i]` and `vertices[i + 1]` affinely. Before the first and after
/// the last breakpoint it continues with the constant velocity stored in
/// `tails[0]` and `tails[1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub breakpoints: Vec<f64>,
    pub vertices: Vec<Point>,
    pub tails: [Point; 2],
}

impl Polyline {
    pub fn new(breakpoints: Vec<f64>, vertices: Vec<Point>, tails: [Point; 2]) -> Result<Self> {
        let p = Polyline {
            breakpoints,
            vertices,
            tails,
        };
        p.validate()?;
        Ok(p)
    }

    /// Curve whose tails continue the first and last segment.
    pub fn with_extended_tails(breakpoints: Vec<f64>, vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 2 || breakpoints.len() != vertices.len() {
            return Err(Error::InvalidInput(
                "polyline needs matching breakpoints and ≥ 2 vertices".into(),
            ));
        }
        let n = vertices.len();
        let t0 = (vertices[1] - vertices[0]) * (1.0 / (breakpoints[1] - breakpoints[0]));
        let t1 =
            (vertices[n - 1] - vertices[n - 2]) * (1.0 / (breakpoints[n - 1] - breakpoints[n - 2]));
        Polyline::new(breakpoints, vertices, [t0, t1])
    }

    pub fn validate(&self) -> Result<()> {
        if self.breakpoints.len() != self.vertices.len() || self.vertices.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "polyline has {} breakpoints and {} vertices",
                self.breakpoints.len(),
                self.vertices.len()
            )));
        }
        if !self.breakpoints.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if !self.breakpoints.iter().all(|t| t.is_finite())
            || !self.vertices.iter().all(|v| v.is_finite())
            || !self.tails.iter().all(|v| v.is_finite())
        {
            return Err(Error::InvalidInput("non-finite polyline data".into()));
        }
        Ok(())
    }

    pub fn window(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    pub fn num_segments(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn segment(&self, i: usize) -> Segment {
        Segment::new(self.vertices[i], self.vertices[i + 1])
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.vertices.windows(2).map(|w| Segment::new(w[0], w[1]))
    }

    /// Velocity on segment `i`.
    pub fn velocity(&self, i: usize) -> Point {
        (self.vertices[i + 1] - self.vertices[i])
            * (1.0 / (self.breakpoints[i + 1] - self.breakpoints[i]))
    }

    /// Index of the segment containing `t`, clamped to the window.
    pub fn locate(&self, t: f64) -> usize {
        let n = self.breakpoints.len();
        match self
            .breakpoints
            .binary_search_by(|b| b.partial_cmp(&t).unwrap())
        {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    pub fn eval(&self, t: f64) -> Point {
        let (lo, hi) = self.window();
        if t < lo {
            return self.vertices[0] + self.tails[0] * (t - lo);
        }
        if t > hi {
            return *self.vertices.last().unwrap() + self.tails[1] * (t - hi);
        }
        let i = self.locate(t);
        let (a, b) = (self.breakpoints[i], self.breakpoints[i + 1]);
        let s = (t - a) / (b - a);
        if s <= 0.5 {
            self.vertices[i] + (self.vertices[i + 1] - self.vertices[i]) * s
        } else {
            self.vertices[i + 1] - (self.vertices[i + 1] - self.vertices[i]) * (1.0 - s)
        }
    }

    /// Segments of the window followed by the two tails truncated at
    /// parameter distance `reach` beyond the window. The left tail is first
    /// and the right tail last, so indices stay consecutive along the curve.
    pub fn segments_with_tails(&self, reach: f64) -> Vec<Segment> {
        let (lo, hi) = self.window();
        let mut out = Vec::with_capacity(self.vertices.len() + 1);
        out.push(Segment::new(self.eval(lo - reach), self.vertices[0]));
        out.extend(self.segments());
        out.push(Segment::new(
            *self.vertices.last().unwrap(),
            self.eval(hi + reach),
        ));
        out
    }

    /// Euclidean distance from `p` to the curve image on the window and tails.
    pub fn distance_to(&self, p: Point) -> f64 {
        let mut d = self
            .segments()
            .map(|s| point_segment_distance(p, &s))
            .fold(f64::INFINITY, f64::min);
        d = d.min(ray_distance(p, self.vertices[0], -self.tails[0]));
        d = d.min(ray_distance(
            p,
            *self.vertices.last().unwrap(),
            self.tails[1],
        ));
        d
    }

    /// Minimum and maximum vertex coordinates.
    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            lo = Point::new(lo.x.min(v.x), lo.y.min(v.y));
            hi = Point::new(hi.x.max(v.x), hi.y.max(v.y));
        }
        (lo, hi)
    }

    /// Applies `f` to every vertex and tail velocity, which is exact for
    /// affine `f` given its linear part `lin`.
    pub fn map_affine(&self, f: impl Fn(Point) -> Point, lin: impl Fn(Point) -> Point) -> Polyline {
        Polyline {
            breakpoints: self.breakpoints.clone(),
            vertices: self.vertices.iter().map(|v| f(*v)).collect(),
            tails: [lin(self.tails[0]), lin(self.tails[1])],
        }
    }

    /// Interior angle at vertex `i` in [0, π], using the tails at the ends.
    /// Collinear continuation gives π.
    pub fn vertex_angle(&self, i: usize) -> f64 {
        let n = self.vertices.len();
        let v = self.vertices[i];
        let back = if i == 0 {
            -self.tails[0]
        } else {
            self.vertices[i - 1] - v
        };
        let fwd = if i == n - 1 {
            self.tails[1]
        } else {
            self.vertices[i + 1] - v
        };
        angle_between(back, fwd)
    }
}

/// Unsigned angle between two vectors in [0, π].
pub fn angle_between(u: Point, v: Point) -> f64 {
    u.cross(v).abs().atan2(u.dot(v))
}

/// Distance from `p` to the closed ray from `o` along `dir`.
pub fn ray_distance(p: Point, o: Point, dir: Point) -> f64 {
    let l2 = dir.norm2();
    if l2 == 0.0 {
        return p.dist(o);
    }
    let t = ((p - o).dot(dir) / l2).max(0.0);
    p.dist(o + dir * t)
}
