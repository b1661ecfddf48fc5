//! Piecewise-affine rotation-angle profiles t ↦ ψ(t).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// ψ is `values[0]` up to `knots[0]`, affine between knots and equal to the
/// last value beyond the last knot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleProfile {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
}

impl AngleProfile {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.is_empty() || knots.len() != values.len() {
            return Err(Error::InvalidInput(
                "profile needs matching, non-empty knots and values".into(),
            ));
        }
        if !knots.windows(2).all(|w| w[0] < w[1]) || knots[0] < 0.0 {
            return Err(Error::InvalidInput(
                "profile knots must be non-negative and increasing".into(),
            ));
        }
        if !values.iter().chain(&knots).all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("non-finite profile data".into()));
        }
        Ok(AngleProfile { knots, values })
    }

    pub fn zero() -> Self {
        AngleProfile {
            knots: vec![0.0],
            values: vec![0.0],
        }
    }

    /// π on [0, 1], falling affinely to 0 at 1 + 2η.
    pub fn tube(eta: f64) -> Self {
        AngleProfile {
            knots: vec![1.0, 1.0 + 2.0 * eta],
            values: vec![std::f64::consts::PI, 0.0],
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = &self.knots;
        let n = k.len();
        if t <= k[0] {
            return self.values[0];
        }
        if t >= k[n - 1] {
            return self.values[n - 1];
        }
        let i = k.partition_point(|&x| x <= t) - 1;
        let s = (t - k[i]) / (k[i + 1] - k[i]);
        self.values[i] + s * (self.values[i + 1] - self.values[i])
    }

    /// Exact Lipschitz constant: the largest slope.
    pub fn lip(&self) -> f64 {
        self.knots
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(k, v)| ((v[1] - v[0]) / (k[1] - k[0])).abs())
            .fold(0.0, f64::max)
    }

    pub fn negated(&self) -> Self {
        AngleProfile {
            knots: self.knots.clone(),
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// True when ψ vanishes on [t0, ∞).
    pub fn vanishes_from(&self, t0: f64) -> bool {
        *self.values.last().unwrap() == 0.0
            && self.eval(t0) == 0.0
            && self
                .knots
                .iter()
                .zip(&self.values)
                .all(|(k, v)| *k < t0 || *v == 0.0)
    }

    /// Smallest t0 with ψ = 0 on [t0, ∞).
    pub fn support_end(&self) -> f64 {
        let n = self.knots.len();
        if self.values[n - 1] != 0.0 {
            return f64::INFINITY;
        }
        let mut i = n - 1;
        while i > 0 && self.values[i - 1] == 0.0 {
            i -= 1;
        }
        if i == 0 && self.values[0] == 0.0 {
            0.0
        } else {
            self.knots[i]
        }
    }
}
