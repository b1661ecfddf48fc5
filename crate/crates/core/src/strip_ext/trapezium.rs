//! Explicit bijections from the unit square onto trapezia.

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::planemap::{Affine, Bound, Mesh, PlaneMap};
use serde::{Deserialize, Serialize};

/// A trapezium with vertices in the order bottom-left, bottom-right,
/// top-right, top-left, where the bottom and top sides are the parallel
/// bases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapeziumSpec {
    pub vertices: [Point; 4],
    /// Shorter and longer base.
    pub b1: f64,
    pub b2: f64,
    /// Shorter and longer leg.
    pub l1: f64,
    pub l2: f64,
    pub h: f64,
}

impl TrapeziumSpec {
    pub fn new(vertices: [Point; 4]) -> Result<Self> {
        let [bl, br, tr, tl] = vertices;
        if !vertices.iter().all(|v| v.is_finite()) {
            return Err(Error::DegenerateTrapezium("non-finite vertex".into()));
        }
        let bottom = br - bl;
        let top = tr - tl;
        let (nb, nt) = (bottom.norm(), top.norm());
        if nb == 0.0 || nt == 0.0 {
            return Err(Error::DegenerateTrapezium(format!(
                "zero-length base in {vertices:?}"
            )));
        }
        let scale = nb.max(nt);
        if bottom.cross(top).abs() > 1e-9 * nb * nt || bottom.dot(top) <= 0.0 {
            return Err(Error::DegenerateTrapezium(format!(
                "bases {bottom:?} and {top:?} are not parallel and equally directed"
            )));
        }
        let h = bottom.cross(tl - bl) / nb;
        if !(h > 1e-12 * scale) {
            return Err(Error::DegenerateTrapezium(format!(
                "height {h} is not positive for the counterclockwise order {vertices:?}"
            )));
        }
        let (la, lb) = ((tl - bl).norm(), (tr - br).norm());
        Ok(TrapeziumSpec {
            vertices,
            b1: nb.min(nt),
            b2: nb.max(nt),
            l1: la.min(lb),
            l2: la.max(lb),
            h,
        })
    }

    /// b₂ + l₂.
    pub fn lip_bound(&self) -> f64 {
        self.b2 + self.l2
    }

    /// √(b₂² + 3l₂²/2) / (b₁h).
    pub fn lip_inv_bound(&self) -> f64 {
        (self.b2 * self.b2 + 1.5 * self.l2 * self.l2).sqrt() / (self.b1 * self.h)
    }
}

/// T: [0, 1]² → P, affine on the two triangles cut by the diagonal from
/// (1, 0) to (0, 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapeziumMap {
    pub spec: TrapeziumSpec,
    pub map: PlaneMap,
    /// Exact operator norms over both pieces.
    pub lip: f64,
    pub lip_inv: f64,
}

impl TrapeziumMap {
    /// max(Lip T, Lip T⁻¹).
    pub fn bilip(&self) -> f64 {
        self.lip.max(self.lip_inv)
    }

    pub fn apply(&self, p: Point) -> Result<Point> {
        self.map.evaluate(&p.into()).map(|q| q.to2())
    }

    pub fn apply_inverse(&self, q: Point) -> Result<Point> {
        self.map.inverse_evaluate(&q.into()).map(|p| p.to2())
    }
}

pub const UNIT_SQUARE: [Point; 4] = [
    Point { x: 0.0, y: 0.0 },
    Point { x: 1.0, y: 0.0 },
    Point { x: 1.0, y: 1.0 },
    Point { x: 0.0, y: 1.0 },
];

const TRIANGLES: [[u32; 3]; 2] = [[0, 1, 3], [1, 2, 3]];

/// The two-triangle bijection with its Lipschitz constants, which must lie
/// within b₂ + l₂ and √(b₂² + 3l₂²/2)/(b₁h).
pub fn trapezium_map(p: &TrapeziumSpec) -> Result<TrapeziumMap> {
    let mut lip = 0.0_f64;
    let mut lip_inv = 0.0_f64;
    for t in TRIANGLES {
        let src = t.map(|i| UNIT_SQUARE[i as usize].arr());
        let dst = t.map(|i| p.vertices[i as usize].arr());
        let a = Affine::from_triangles(src, dst)
            .map_err(|e| Error::DegenerateTrapezium(format!("affine piece: {e}")))?;
        let (up, down) = a.norms();
        lip = lip.max(up);
        lip_inv = lip_inv.max(down);
    }
    let slack = 1.0 + 1e-12;
    if lip > p.lip_bound() * slack {
        return Err(Error::check(
            "Lip(T) ≤ b₂ + l₂",
            format!("{lip} > {}", p.lip_bound()),
        ));
    }
    if lip_inv > p.lip_inv_bound() * slack {
        return Err(Error::check(
            "Lip(T⁻¹) ≤ √(b₂² + 3l₂²/2)/(b₁h)",
            format!("{lip_inv} > {}", p.lip_inv_bound()),
        ));
    }
    let mesh = Mesh::new(
        UNIT_SQUARE.to_vec(),
        p.vertices.to_vec(),
        TRIANGLES.to_vec(),
    )?;
    Ok(TrapeziumMap {
        spec: p.clone(),
        map: PlaneMap::Mesh {
            mesh,
            bound: Bound::new(lip.max(lip_inv)),
        },
        lip,
        lip_inv,
    })
}
