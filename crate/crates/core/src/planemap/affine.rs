//! Invertible affine maps of R^d, d ≤ 3.

use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::geom::PointD;
use serde::{Deserialize, Serialize};

/// x ↦ A x + b with A stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AffineData", into = "AffineData")]
pub struct Affine {
    dim: usize,
    a: [[f64; 3]; 3],
    b: [f64; 3],
    inv: [[f64; 3]; 3],
}

#[derive(Clone, Serialize, Deserialize)]
struct AffineData {
    matrix: Vec<Vec<f64>>,
    offset: Vec<f64>,
}

impl TryFrom<AffineData> for Affine {
    type Error = Error;
    fn try_from(d: AffineData) -> Result<Self> {
        Affine::new(&d.matrix, &d.offset)
    }
}

impl From<Affine> for AffineData {
    fn from(a: Affine) -> Self {
        AffineData {
            matrix: (0..a.dim).map(|i| a.a[i][..a.dim].to_vec()).collect(),
            offset: a.b[..a.dim].to_vec(),
        }
    }
}

impl Affine {
    pub fn new(matrix: &[Vec<f64>], offset: &[f64]) -> Result<Self> {
        let d = offset.len();
        if d == 0 || d > 3 || matrix.len() != d || matrix.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidInput(
                "affine map needs a square matrix of size 1..=3".into(),
            ));
        }
        let mut a = [[0.0; 3]; 3];
        let mut b = [0.0; 3];
        for i in 0..d {
            a[i][..d].copy_from_slice(&matrix[i]);
            b[i] = offset[i];
        }
        let inv = invert(d, &a).ok_or_else(|| Error::InvalidInput("singular affine map".into()))?;
        Ok(Affine { dim: d, a, b, inv })
    }

    pub fn identity(d: usize) -> Self {
        let mut m = vec![vec![0.0; d]; d];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Affine::new(&m, &vec![0.0; d]).unwrap()
    }

    pub fn scaling(d: usize, s: f64) -> Self {
        let mut m = vec![vec![0.0; d]; d];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = s;
        }
        Affine::new(&m, &vec![0.0; d]).unwrap()
    }

    pub fn translation(t: &PointD) -> Self {
        let d = t.dim();
        let mut m = vec![vec![0.0; d]; d];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Affine::new(&m, t.coords()).unwrap()
    }

    /// Planar map from a 2×2 matrix and an offset.
    pub fn planar(m: [[f64; 2]; 2], b: [f64; 2]) -> Result<Self> {
        Affine::new(&[m[0].to_vec(), m[1].to_vec()], &b)
    }

    /// The affine map taking the triangle (p0, p1, p2) onto (q0, q1, q2).
    pub fn from_triangles(p: [[f64; 2]; 3], q: [[f64; 2]; 3]) -> Result<Self> {
        let e = [
            [p[1][0] - p[0][0], p[2][0] - p[0][0]],
            [p[1][1] - p[0][1], p[2][1] - p[0][1]],
        ];
        let f = [
            [q[1][0] - q[0][0], q[2][0] - q[0][0]],
            [q[1][1] - q[0][1], q[2][1] - q[0][1]],
        ];
        let det = e[0][0] * e[1][1] - e[0][1] * e[1][0];
        if det == 0.0 {
            return Err(Error::InvalidInput("degenerate source triangle".into()));
        }
        let ei = [
            [e[1][1] / det, -e[0][1] / det],
            [-e[1][0] / det, e[0][0] / det],
        ];
        let mut m = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = f[i][0] * ei[0][j] + f[i][1] * ei[1][j];
            }
        }
        let b = [
            q[0][0] - m[0][0] * p[0][0] - m[0][1] * p[0][1],
            q[0][1] - m[1][0] * p[0][0] - m[1][1] * p[0][1],
        ];
        Affine::planar(m, b)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.a
    }

    pub fn offset(&self) -> [f64; 3] {
        self.b
    }

    pub fn apply(&self, p: &PointD) -> PointD {
        let mut out = PointD::zeros(self.dim);
        for i in 0..self.dim {
            let mut s = self.b[i];
            for j in 0..self.dim {
                s += self.a[i][j] * p[j];
            }
            out[i] = s;
        }
        out
    }

    pub fn apply_inverse(&self, q: &PointD) -> PointD {
        let mut t = *q;
        for i in 0..self.dim {
            t[i] -= self.b[i];
        }
        let mut out = PointD::zeros(self.dim);
        for i in 0..self.dim {
            let mut s = 0.0;
            for j in 0..self.dim {
                s += self.inv[i][j] * t[j];
            }
            out[i] = s;
        }
        out
    }

    pub fn linear(&self, p: &PointD) -> PointD {
        let mut out = PointD::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[i] += self.a[i][j] * p[j];
            }
        }
        out
    }

    pub fn inverse(&self) -> Affine {
        let m: Vec<Vec<f64>> = (0..self.dim)
            .map(|i| self.inv[i][..self.dim].to_vec())
            .collect();
        let z = self.apply_inverse(&PointD::zeros(self.dim));
        Affine::new(&m, z.coords()).unwrap()
    }

    /// Operator norms (‖A‖, ‖A⁻¹‖).
    pub fn norms(&self) -> (f64, f64) {
        (op_norm(self.dim, &self.a), op_norm(self.dim, &self.inv))
    }

    /// Exact image of a rational point; the float coefficients are dyadic.
    pub fn apply_exact(&self, p: &[Q]) -> Vec<Q> {
        (0..self.dim)
            .map(|i| {
                let mut s = exact::q(self.b[i]);
                for (j, pj) in p.iter().enumerate().take(self.dim) {
                    s += exact::q(self.a[i][j]) * pj;
                }
                s
            })
            .collect()
    }
}

fn invert(d: usize, a: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let mut inv = [[0.0; 3]; 3];
    match d {
        1 => {
            if a[0][0] == 0.0 {
                return None;
            }
            inv[0][0] = 1.0 / a[0][0];
        }
        2 => {
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            if det == 0.0 || !det.is_finite() {
                return None;
            }
            inv[0][0] = a[1][1] / det;
            inv[0][1] = -a[0][1] / det;
            inv[1][0] = -a[1][0] / det;
            inv[1][1] = a[0][0] / det;
        }
        _ => {
            let c = |i: usize, j: usize| {
                let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
                let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
                a[i1][j1] * a[i2][j2] - a[i1][j2] * a[i2][j1]
            };
            let det = a[0][0] * c(0, 0) + a[0][1] * c(0, 1) + a[0][2] * c(0, 2);
            if det == 0.0 || !det.is_finite() {
                return None;
            }
            for i in 0..3 {
                for j in 0..3 {
                    inv[i][j] = c(j, i) / det;
                }
            }
        }
    }
    Some(inv)
}

/// Spectral norm of the leading d×d block.
pub fn op_norm(d: usize, a: &[[f64; 3]; 3]) -> f64 {
    match d {
        1 => a[0][0].abs(),
        2 => op_norm2([[a[0][0], a[0][1]], [a[1][0], a[1][1]]]),
        _ => {
            // Largest eigenvalue of AᵀA by cyclic Jacobi rotations.
            let mut m = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    m[i][j] = (0..3).map(|k| a[k][i] * a[k][j]).sum();
                }
            }
            for _ in 0..64 {
                let off = m[0][1].abs() + m[0][2].abs() + m[1][2].abs();
                if off < 1e-300 {
                    break;
                }
                for (p, q) in [(0, 1), (0, 2), (1, 2)] {
                    if m[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..3 {
                        let (mkp, mkq) = (m[k][p], m[k][q]);
                        m[k][p] = c * mkp - s * mkq;
                        m[k][q] = s * mkp + c * mkq;
                    }
                    for k in 0..3 {
                        let (mpk, mqk) = (m[p][k], m[q][k]);
                        m[p][k] = c * mpk - s * mqk;
                        m[q][k] = s * mpk + c * mqk;
                    }
                }
            }
            m[0][0].max(m[1][1]).max(m[2][2]).max(0.0).sqrt()
        }
    }
}

/// Closed-form spectral norm of a 2×2 matrix.
pub fn op_norm2(m: [[f64; 2]; 2]) -> f64 {
    let (a, b, c, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    let s1 = (a + d).hypot(c - b);
    let s2 = (a - d).hypot(c + b);
    0.5 * (s1 + s2)
}
