//! Column shears over a monotone graph: straightening maps for curves that
//! are graphs over some direction.

use super::affine::op_norm2;
use crate::error::{Error, Result};
use crate::geom::{Point, PointD, Polyline};
use serde::{Deserialize, Serialize};

/// Φ(u, v) = X(u)·e + (Y(u) + v)·e⊥ with X, Y piecewise affine on shared
/// knots, X strictly increasing, and e⊥ the rotation of e by π/2.
///
/// Φ is affine on every vertical strip between consecutive knots and on the
/// two half-planes beyond them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ShearData", into = "ShearData")]
pub struct ColumnShear {
    knots: Vec<f64>,
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// (X', Y') before the first and after the last knot.
    tails: [[f64; 2]; 2],
    frame: Point,
    pub inverted: bool,
}

#[derive(Clone, Serialize, Deserialize)]
struct ShearData {
    knots: Vec<f64>,
    xs: Vec<f64>,
    ys: Vec<f64>,
    tails: [[f64; 2]; 2],
    frame: [f64; 2],
    #[serde(default)]
    inverted: bool,
}

impl TryFrom<ShearData> for ColumnShear {
    type Error = Error;
    fn try_from(d: ShearData) -> Result<Self> {
        let mut s = ColumnShear::new(d.knots, d.xs, d.ys, d.tails, Point::from(d.frame))?;
        s.inverted = d.inverted;
        Ok(s)
    }
}

impl From<ColumnShear> for ShearData {
    fn from(s: ColumnShear) -> Self {
        ShearData {
            knots: s.knots,
            xs: s.xs,
            ys: s.ys,
            tails: s.tails,
            frame: s.frame.arr(),
            inverted: s.inverted,
        }
    }
}

impl ColumnShear {
    pub fn new(
        knots: Vec<f64>,
        xs: Vec<f64>,
        ys: Vec<f64>,
        tails: [[f64; 2]; 2],
        frame: Point,
    ) -> Result<Self> {
        let n = knots.len();
        if n < 2 || xs.len() != n || ys.len() != n {
            return Err(Error::InvalidInput(
                "column shear needs ≥ 2 matching knots".into(),
            ));
        }
        if !knots.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(
                "shear knots must increase strictly".into(),
            ));
        }
        if !xs.windows(2).all(|w| w[0] < w[1]) || !(tails[0][0] > 0.0 && tails[1][0] > 0.0) {
            return Err(Error::InvalidInput(
                "shear abscissa must increase strictly".into(),
            ));
        }
        let all = knots
            .iter()
            .chain(&xs)
            .chain(&ys)
            .chain(tails.iter().flatten());
        if !all.into_iter().all(|v| v.is_finite()) || !frame.is_finite() {
            return Err(Error::InvalidInput("non-finite shear data".into()));
        }
        let len = frame.norm();
        if (len - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("shear frame has length {len}")));
        }
        Ok(ColumnShear {
            knots,
            xs,
            ys,
            tails,
            frame,
            inverted: false,
        })
    }

    /// The shear with Φ(t, 0) = curve(t), when the curve is a graph over
    /// the unit direction `e`: its projection onto `e` increases strictly,
    /// tails included.
    pub fn from_graph(curve: &Polyline, e: Point) -> Result<Self> {
        let perp = Point::new(-e.y, e.x);
        let xs: Vec<f64> = curve.vertices.iter().map(|v| v.dot(e)).collect();
        let ys: Vec<f64> = curve.vertices.iter().map(|v| v.dot(perp)).collect();
        let tails = [
            [curve.tails[0].dot(e), curve.tails[0].dot(perp)],
            [curve.tails[1].dot(e), curve.tails[1].dot(perp)],
        ];
        ColumnShear::new(curve.breakpoints.clone(), xs, ys, tails, e).map_err(|_| {
            Error::OracleUnavailable(format!("curve is not a graph over direction {e:?}"))
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn frame(&self) -> Point {
        self.frame
    }

    /// Slopes (X', Y') on piece `i`, where piece 0 is the left tail and
    /// piece n the right tail.
    fn slopes(&self, i: usize) -> [f64; 2] {
        let n = self.knots.len();
        if i == 0 {
            return self.tails[0];
        }
        if i == n {
            return self.tails[1];
        }
        let du = self.knots[i] - self.knots[i - 1];
        [
            (self.xs[i] - self.xs[i - 1]) / du,
            (self.ys[i] - self.ys[i - 1]) / du,
        ]
    }

    /// Index of the piece containing u, as for [`ColumnShear::slopes`].
    fn piece(sorted: &[f64], u: f64) -> usize {
        sorted.partition_point(|k| *k <= u)
    }

    fn graph(&self, u: f64) -> (f64, f64) {
        let i = Self::piece(&self.knots, u);
        let j = i.saturating_sub(1);
        let [a, b] = self.slopes(i);
        let du = u - self.knots[j];
        (self.xs[j] + a * du, self.ys[j] + b * du)
    }

    fn forward(&self, p: Point) -> Point {
        let (x, y) = self.graph(p.x);
        let perp = Point::new(-self.frame.y, self.frame.x);
        self.frame * x + perp * (y + p.y)
    }

    fn backward(&self, q: Point) -> Point {
        let perp = Point::new(-self.frame.y, self.frame.x);
        let (x, y) = (q.dot(self.frame), q.dot(perp));
        let i = Self::piece(&self.xs, x);
        let j = i.saturating_sub(1);
        let [a, _] = self.slopes(i);
        let u = self.knots[j] + (x - self.xs[j]) / a;
        let (_, g) = self.graph(u);
        Point::new(u, y - g)
    }

    pub fn eval(&self, p: &PointD) -> PointD {
        let q = if self.inverted {
            self.backward(p.to2())
        } else {
            self.forward(p.to2())
        };
        PointD::from(q)
    }

    pub fn eval_inverse(&self, q: &PointD) -> PointD {
        let p = if self.inverted {
            self.forward(q.to2())
        } else {
            self.backward(q.to2())
        };
        PointD::from(p)
    }

    /// Largest operator norm of the linear parts and of their inverses over
    /// all pieces. Both domain and image pieces are convex strips, so this is
    /// the bilipschitz constant of Φ.
    pub fn bound(&self) -> f64 {
        (0..=self.knots.len())
            .map(|i| {
                let [a, b] = self.slopes(i);
                let up = op_norm2([[a, 0.0], [b, 1.0]]);
                let down = op_norm2([[1.0 / a, 0.0], [-b / a, 1.0]]);
                up.max(down)
            })
            .fold(1.0, f64::max)
    }
}
