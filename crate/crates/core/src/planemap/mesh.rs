//! Piecewise-affine homeomorphisms given by a triangulation and its image.

use super::affine::{op_norm2, Affine};
use crate::error::{Error, Result};
use crate::exact;
use crate::geom::Point;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// A map that is affine on each source triangle and sends vertex `i` of the
/// source to vertex `i` of the target.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "MeshData", into = "MeshData")]
pub struct Mesh {
    pub src: Vec<Point>,
    pub dst: Vec<Point>,
    pub tris: Vec<[u32; 3]>,
    src_index: Bucket,
    dst_index: Bucket,
}

impl PartialEq for Mesh {
    fn eq(&self, o: &Mesh) -> bool {
        self.src == o.src && self.dst == o.dst && self.tris == o.tris
    }
}

#[derive(Clone, Serialize, Deserialize)]
struct MeshData {
    src: Vec<Point>,
    dst: Vec<Point>,
    tris: Vec<[u32; 3]>,
}

impl TryFrom<MeshData> for Mesh {
    type Error = Error;
    fn try_from(d: MeshData) -> Result<Self> {
        Mesh::new(d.src, d.dst, d.tris)
    }
}

impl From<Mesh> for MeshData {
    fn from(m: Mesh) -> Self {
        MeshData {
            src: m.src,
            dst: m.dst,
            tris: m.tris,
        }
    }
}

/// Uniform bucket grid over triangle bounding boxes.
#[derive(Clone, Debug, Default)]
struct Bucket {
    origin: Point,
    cell: f64,
    cells: HashMap<(i64, i64), Vec<u32>>,
}

impl Bucket {
    fn build(pts: &[Point], tris: &[[u32; 3]]) -> Bucket {
        if tris.is_empty() {
            return Bucket::default();
        }
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in pts {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let area = ((hi.x - lo.x) * (hi.y - lo.y)).max(1e-300);
        let cell = (area / tris.len() as f64).sqrt().max(1e-12) * 1.5;
        let mut b = Bucket {
            origin: lo,
            cell,
            cells: HashMap::new(),
        };
        for (k, t) in tris.iter().enumerate() {
            let (a, c) = tri_bbox(pts, t);
            let (i0, j0) = b.key(a);
            let (i1, j1) = b.key(c);
            for i in i0..=i1 {
                for j in j0..=j1 {
                    b.cells.entry((i, j)).or_default().push(k as u32);
                }
            }
        }
        b
    }

    fn key(&self, p: Point) -> (i64, i64) {
        (
            ((p.x - self.origin.x) / self.cell).floor() as i64,
            ((p.y - self.origin.y) / self.cell).floor() as i64,
        )
    }

    fn candidates(&self, p: Point) -> &[u32] {
        self.cells
            .get(&self.key(p))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    /// Triangles in the 3×3 block of cells around `p`, for points that sit
    /// a rounding error outside the cell holding their triangle.
    fn candidates_near(&self, p: Point) -> Vec<u32> {
        let (i, j) = self.key(p);
        let mut out: Vec<u32> = (i - 1..=i + 1)
            .flat_map(|a| (j - 1..=j + 1).map(move |b| (a, b)))
            .filter_map(|k| self.cells.get(&k))
            .flatten()
            .copied()
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn tri_bbox(pts: &[Point], t: &[u32; 3]) -> (Point, Point) {
    let v = [pts[t[0] as usize], pts[t[1] as usize], pts[t[2] as usize]];
    (
        Point::new(
            v[0].x.min(v[1].x).min(v[2].x),
            v[0].y.min(v[1].y).min(v[2].y),
        ),
        Point::new(
            v[0].x.max(v[1].x).max(v[2].x),
            v[0].y.max(v[1].y).max(v[2].y),
        ),
    )
}

/// Barycentric coordinates of `p`, or None when outside beyond `tol`.
fn barycentric(a: Point, b: Point, c: Point, p: Point, tol: f64) -> Option<[f64; 3]> {
    let det = (b - a).cross(c - a);
    if det == 0.0 {
        return None;
    }
    let l1 = (b - p).cross(c - p) / det;
    let l2 = (c - p).cross(a - p) / det;
    let l3 = 1.0 - l1 - l2;
    if l1 >= -tol && l2 >= -tol && l3 >= -tol {
        Some([l1, l2, l3])
    } else {
        None
    }
}

/// Absolute distance, relative to max(1, |p|∞), within which a point just
/// outside the mesh is moved onto it.
const SNAP: f64 = 1e-9;

/// Distance from `p` to the triangle and the barycentric coordinates of the
/// closest point.
fn closest_barycentric(a: Point, b: Point, c: Point, p: Point) -> Option<(f64, [f64; 3])> {
    let det = (b - a).cross(c - a);
    if det == 0.0 {
        return None;
    }
    if let Some(l) = barycentric(a, b, c, p, 0.0) {
        return Some((0.0, l));
    }
    let mut best: Option<(f64, [f64; 3])> = None;
    for (i, (u, v)) in [(a, b), (b, c), (c, a)].into_iter().enumerate() {
        let e = v - u;
        let s = ((p - u).dot(e) / e.norm2()).clamp(0.0, 1.0);
        let d = (u + e * s).dist(p);
        let mut l = [0.0; 3];
        l[i] = 1.0 - s;
        l[(i + 1) % 3] = s;
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, l));
        }
    }
    best
}

impl Mesh {
    pub fn new(src: Vec<Point>, dst: Vec<Point>, tris: Vec<[u32; 3]>) -> Result<Self> {
        if src.len() != dst.len() {
            return Err(Error::InvalidInput(
                "mesh source and target vertex counts differ".into(),
            ));
        }
        if tris.iter().flatten().any(|&i| i as usize >= src.len()) {
            return Err(Error::InvalidInput("triangle index out of range".into()));
        }
        let src_index = Bucket::build(&src, &tris);
        let dst_index = Bucket::build(&dst, &tris);
        Ok(Mesh {
            src,
            dst,
            tris,
            src_index,
            dst_index,
        })
    }

    fn locate(
        pts: &[Point],
        other: &[Point],
        tris: &[[u32; 3]],
        idx: &Bucket,
        p: Point,
    ) -> Option<Point> {
        let near = idx.candidates_near(p);
        for tol in [0.0, 1e-12, 1e-9] {
            let cand = if tol == 0.0 {
                idx.candidates(p)
            } else {
                &near[..]
            };
            for &k in cand {
                let t = tris[k as usize];
                let (a, b, c) = (pts[t[0] as usize], pts[t[1] as usize], pts[t[2] as usize]);
                for (i, v) in [a, b, c].iter().enumerate() {
                    if *v == p {
                        return Some(other[t[i] as usize]);
                    }
                }
                if let Some(l) = barycentric(a, b, c, p, tol) {
                    let (qa, qb, qc) = (
                        other[t[0] as usize],
                        other[t[1] as usize],
                        other[t[2] as usize],
                    );
                    return Some(Point::new(
                        l[0] * qa.x + l[1] * qb.x + l[2] * qc.x,
                        l[0] * qa.y + l[1] * qb.y + l[2] * qc.y,
                    ));
                }
            }
        }
        // Thin triangles turn an absolute rounding error in a glued boundary
        // into a large barycentric one, so fall back to the closest point of
        // the nearest triangle within an absolute tolerance.
        let reach = SNAP * p.x.abs().max(p.y.abs()).max(1.0);
        let mut best: Option<(f64, usize, [f64; 3])> = None;
        for &k in &near {
            let t = tris[k as usize];
            let (a, b, c) = (pts[t[0] as usize], pts[t[1] as usize], pts[t[2] as usize]);
            if let Some((d, l)) = closest_barycentric(a, b, c, p) {
                if d <= reach && best.map_or(true, |(bd, _, _)| d < bd) {
                    best = Some((d, k as usize, l));
                }
            }
        }
        best.map(|(_, k, l)| {
            let t = tris[k];
            let (qa, qb, qc) = (other[t[0] as usize], other[t[1] as usize], other[t[2] as usize]);
            Point::new(
                l[0] * qa.x + l[1] * qb.x + l[2] * qc.x,
                l[0] * qa.y + l[1] * qb.y + l[2] * qc.y,
            )
        })
    }

    pub fn eval(&self, p: Point) -> Result<Point> {
        Mesh::locate(&self.src, &self.dst, &self.tris, &self.src_index, p)
            .ok_or_else(|| Error::OutsideDomain(format!("{p:?} outside mesh")))
    }

    pub fn eval_inverse(&self, q: Point) -> Result<Point> {
        Mesh::locate(&self.dst, &self.src, &self.tris, &self.dst_index, q)
            .ok_or_else(|| Error::OutsideDomain(format!("{q:?} outside mesh image")))
    }

    /// Every image triangle keeps the orientation of its source triangle,
    /// decided exactly. Together with a boundary that maps injectively this
    /// makes the map a homeomorphism onto its image.
    pub fn orientation_preserved(&self) -> std::result::Result<(), usize> {
        for (k, t) in self.tris.iter().enumerate() {
            let s = exact::orient2d(
                self.src[t[0] as usize].arr(),
                self.src[t[1] as usize].arr(),
                self.src[t[2] as usize].arr(),
            );
            let d = exact::orient2d(
                self.dst[t[0] as usize].arr(),
                self.dst[t[1] as usize].arr(),
                self.dst[t[2] as usize].arr(),
            );
            if s == 0 || s != d {
                return Err(k);
            }
        }
        Ok(())
    }

    /// Largest of the operator norms of the affine pieces and their inverses.
    pub fn piece_bound(&self) -> f64 {
        let mut m = 1.0_f64;
        for t in &self.tris {
            let p = [
                self.src[t[0] as usize].arr(),
                self.src[t[1] as usize].arr(),
                self.src[t[2] as usize].arr(),
            ];
            let q = [
                self.dst[t[0] as usize].arr(),
                self.dst[t[1] as usize].arr(),
                self.dst[t[2] as usize].arr(),
            ];
            match Affine::from_triangles(p, q) {
                Ok(a) => {
                    let (u, v) = a.norms();
                    m = m.max(u).max(v);
                }
                Err(_) => return f64::INFINITY,
            }
        }
        m
    }
}

/// Spectral norm of a planar linear map, re-exported for callers that
/// assemble meshes by hand.
pub fn linear_norm(m: [[f64; 2]; 2]) -> f64 {
    op_norm2(m)
}
