//! Planar and low-dimensional points.

use crate::float::Float;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

/// A point of the Euclidean plane.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point {
    fn from(a: [f64; 2]) -> Self {
        Point { x: a[0], y: a[1] }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn arr(self) -> [f64; 2] {
        [self.x, self.y]
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        self + (o - self) * t
    }

    pub fn rotate(self, theta: f64) -> Point {
        let (s, c) = theta.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

pub const MAX_DIM: usize = 3;

/// A point of R^d for 1 ≤ d ≤ 3, stored inline.
#[derive(Clone, Copy, PartialEq)]
pub struct PointD {
    dim: u8,
    c: [f64; MAX_DIM],
}

impl std::fmt::Debug for PointD {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.coords()).finish()
    }
}

impl Serialize for PointD {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let c: Vec<Float> = self.coords().iter().map(|&v| Float(v)).collect();
        c.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PointD {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<f64> = Vec::<Float>::deserialize(d)?.into_iter().map(|f| f.0).collect();
        if v.is_empty() || v.len() > MAX_DIM {
            return Err(serde::de::Error::custom("point dimension must be 1..=3"));
        }
        Ok(PointD::new(&v))
    }
}

impl PointD {
    pub fn new(c: &[f64]) -> Self {
        assert!(
            !c.is_empty() && c.len() <= MAX_DIM,
            "dimension out of range"
        );
        let mut a = [0.0; MAX_DIM];
        a[..c.len()].copy_from_slice(c);
        PointD {
            dim: c.len() as u8,
            c: a,
        }
    }

    pub fn zeros(d: usize) -> Self {
        PointD::new(&[0.0; MAX_DIM][..d])
    }

    pub fn basis(d: usize, i: usize) -> Self {
        let mut p = PointD::zeros(d);
        p.c[i] = 1.0;
        p
    }

    pub fn xy(x: f64, y: f64) -> Self {
        PointD::new(&[x, y])
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[f64] {
        &self.c[..self.dim as usize]
    }

    pub fn last(&self) -> f64 {
        self.c[self.dim as usize - 1]
    }

    pub fn dot(&self, o: &PointD) -> f64 {
        self.coords()
            .iter()
            .zip(o.coords())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm2(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        match self.dim {
            1 => self.c[0].abs(),
            2 => self.c[0].hypot(self.c[1]),
            _ => self.norm2().sqrt(),
        }
    }

    pub fn dist(&self, o: &PointD) -> f64 {
        (*self - *o).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|v| v.is_finite())
    }

    pub fn to2(&self) -> Point {
        Point::new(self.c[0], self.c[1])
    }

    /// Drops the last coordinate.
    pub fn proj(&self) -> PointD {
        PointD::new(&self.c[..self.dim as usize - 1])
    }

    /// Appends a coordinate.
    pub fn lift(&self, v: f64) -> PointD {
        let mut p = *self;
        p.c[self.dim as usize] = v;
        p.dim += 1;
        p
    }

    pub fn max_norm(&self) -> f64 {
        self.coords().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl From<Point> for PointD {
    fn from(p: Point) -> Self {
        PointD::xy(p.x, p.y)
    }
}

impl Index<usize> for PointD {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        debug_assert!(i < self.dim as usize);
        &self.c[i]
    }
}

impl IndexMut<usize> for PointD {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        debug_assert!(i < self.dim as usize);
        &mut self.c[i]
    }
}

impl Add for PointD {
    type Output = PointD;
    fn add(mut self, o: PointD) -> PointD {
        for i in 0..self.dim as usize {
            self.c[i] += o.c[i];
        }
        self
    }
}

impl Sub for PointD {
    type Output = PointD;
    fn sub(mut self, o: PointD) -> PointD {
        for i in 0..self.dim as usize {
            self.c[i] -= o.c[i];
        }
        self
    }
}

impl Mul<f64> for PointD {
    type Output = PointD;
    fn mul(mut self, s: f64) -> PointD {
        for i in 0..self.dim as usize {
            self.c[i] *= s;
        }
        self
    }
}

impl Neg for PointD {
    type Output = PointD;
    fn neg(self) -> PointD {
        self * -1.0
    }
}

/// Distance from `p` to the closed segment `[a, b]` in any dimension.
pub fn point_segment_dist_d(p: &PointD, a: &PointD, b: &PointD) -> f64 {
    let ab = *b - *a;
    let len2 = ab.norm2();
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((*p - *a).dot(&ab) / len2).clamp(0.0, 1.0);
    p.dist(&(*a + ab * t))
}
