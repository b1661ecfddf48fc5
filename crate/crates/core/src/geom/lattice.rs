//! Maps given by their values on a rectangular window of Z².

use super::bilip::{exhaustive_bilip, BilipEstimate};
use super::point::Point;
use super::polyline::Polyline;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// f on {x_lo..=x_hi} × {y_lo..=y_hi}, stored row by row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeMap {
    pub x: (i64, i64),
    pub y: (i64, i64),
    pub values: Vec<Point>,
}

impl LatticeMap {
    pub fn new(x: (i64, i64), y: (i64, i64), values: Vec<Point>) -> Result<Self> {
        let m = LatticeMap { x, y, values };
        m.validate()?;
        Ok(m)
    }

    pub fn from_fn(x: (i64, i64), y: (i64, i64), f: impl Fn(i64, i64) -> Point) -> Self {
        let values = (y.0..=y.1).flat_map(|j| (x.0..=x.1).map(move |i| (i, j))).map(|(i, j)| f(i, j)).collect();
        LatticeMap { x, y, values }
    }

    pub fn validate(&self) -> Result<()> {
        if self.x.0 > self.x.1 || self.y.0 > self.y.1 {
            return Err(Error::InvalidInput(format!("empty window {:?} × {:?}", self.x, self.y)));
        }
        let n = self.width() * self.height();
        if self.values.len() != n {
            return Err(Error::InvalidInput(format!("{} values for a window of {n} points", self.values.len())));
        }
        if let Some(k) = self.values.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(format!("value {k} is not finite")));
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        (self.x.1 - self.x.0 + 1) as usize
    }

    pub fn height(&self) -> usize {
        (self.y.1 - self.y.0 + 1) as usize
    }

    pub fn contains(&self, i: i64, j: i64) -> bool {
        i >= self.x.0 && i <= self.x.1 && j >= self.y.0 && j <= self.y.1
    }

    pub fn get(&self, i: i64, j: i64) -> Option<Point> {
        self.contains(i, j)
            .then(|| self.values[(j - self.y.0) as usize * self.width() + (i - self.x.0) as usize])
    }

    /// Every window point with its value, row by row.
    pub fn points(&self) -> impl Iterator<Item = ((i64, i64), Point)> + '_ {
        let w = self.width();
        self.values.iter().enumerate().map(move |(k, p)| {
            (((k % w) as i64 + self.x.0, (k / w) as i64 + self.y.0), *p)
        })
    }

    pub fn row(&self, j: i64) -> Result<Vec<Point>> {
        if j < self.y.0 || j > self.y.1 {
            return Err(Error::WindowTooSmall(format!("row {j} outside {:?}", self.y)));
        }
        let w = self.width();
        let s = (j - self.y.0) as usize * w;
        Ok(self.values[s..s + w].to_vec())
    }

    /// The exhaustive bilipschitz constant over all pairs of window points.
    pub fn bilip(&self) -> Result<BilipEstimate> {
        let pairs: Vec<(Point, Point)> =
            self.points().map(|((i, j), p)| (Point::new(i as f64, j as f64), p)).collect();
        exhaustive_bilip(&pairs)
    }

    /// The window grown by `rows` rows at each end, each new row a
    /// translate of the nearest row by a multiple of the mean step between
    /// the two nearest rows: f(x, y₁ + k) = f(x, y₁) + k·v₁ with v₁ the mean
    /// of f(·, y₁) − f(·, y₁ − 1).
    pub fn extrapolate_rows(&self, rows: i64) -> Result<LatticeMap> {
        if self.height() < 2 {
            return Err(Error::WindowTooSmall("row extrapolation needs two rows".into()));
        }
        let (y0, y1) = self.y;
        let at = |i: i64, j: i64| self.get(i, j).expect("inside the window");
        let mean_step = |from: i64, to: i64| {
            let n = self.width() as f64;
            let sum = (self.x.0..=self.x.1).fold(Point::new(0.0, 0.0), |acc, i| acc + (at(i, to) - at(i, from)));
            sum * (1.0 / n)
        };
        let down = mean_step(y0 + 1, y0);
        let up = mean_step(y1 - 1, y1);
        Ok(LatticeMap::from_fn(self.x, (y0 - rows, y1 + rows), |i, j| {
            if j < y0 {
                at(i, y0) + down * (y0 - j) as f64
            } else if j > y1 {
                at(i, y1) + up * (j - y1) as f64
            } else {
                at(i, j)
            }
        }))
    }

    /// The mean over all rows of the first and of the last column step.
    pub fn edge_steps(&self) -> Result<[Point; 2]> {
        if self.width() < 2 {
            return Err(Error::WindowTooSmall("edge steps need two columns".into()));
        }
        let at = |i: i64, j: i64| self.get(i, j).expect("inside the window");
        let (x0, x1) = self.x;
        let n = self.height() as f64;
        let zero = Point::new(0.0, 0.0);
        let (a, b) = (self.y.0..=self.y.1).fold((zero, zero), |(a, b), j| {
            (a + (at(x0 + 1, j) - at(x0, j)), b + (at(x1, j) - at(x1 - 1, j)))
        });
        Ok([a * (1.0 / n), b * (1.0 / n)])
    }

    /// The piecewise-affine interpolation of row j, carried at every integer
    /// of `knots` (which must contain the window's columns); knots outside
    /// the window sit on affine tails along [`LatticeMap::edge_steps`], so
    /// that all rows leave the window in parallel.
    pub fn row_curve(&self, j: i64, knots: (i64, i64)) -> Result<Polyline> {
        let row = self.row(j)?;
        if self.width() < 2 {
            return Err(Error::WindowTooSmall("a row curve needs two columns".into()));
        }
        if knots.0 > self.x.0 || knots.1 < self.x.1 {
            return Err(Error::InvalidInput(format!("knots {knots:?} must contain columns {:?}", self.x)));
        }
        let n = row.len();
        let [t0, t1] = self.edge_steps()?;
        let eval = |i: i64| -> Point {
            if i < self.x.0 {
                row[0] - t0 * (self.x.0 - i) as f64
            } else if i > self.x.1 {
                row[n - 1] + t1 * (i - self.x.1) as f64
            } else {
                row[(i - self.x.0) as usize]
            }
        };
        let bps: Vec<f64> = (knots.0..=knots.1).map(|i| i as f64).collect();
        let verts: Vec<Point> = (knots.0..=knots.1).map(eval).collect();
        Polyline::new(bps, verts, [t0, t1])
    }
}
