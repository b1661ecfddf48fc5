//! Invertible maps of R^d with bilipschitz bounds attached.

use super::affine::Affine;
use super::bound::Bound;
use super::mesh::Mesh;
use super::profile::AngleProfile;
use super::region::Region;
use super::shear::ColumnShear;
use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::geom::{point_segment_dist_d, Point, PointD};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Rotation of the plane spanned by two coordinate axes through an angle
/// that depends on the distance to the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spin {
    pub dim: usize,
    pub profile: AngleProfile,
    pub t0: f64,
    pub plane: (usize, usize),
}

impl Spin {
    pub fn eval(&self, p: &PointD) -> PointD {
        rotate_in_plane(p, self.plane, self.profile.eval(p.norm()))
    }

    pub fn eval_inverse(&self, p: &PointD) -> PointD {
        rotate_in_plane(p, self.plane, -self.profile.eval(p.norm()))
    }

    /// π · Lip(ψ) · t0 + 1.
    pub fn bound(&self) -> f64 {
        PI * self.profile.lip() * self.t0 + 1.0
    }

    pub fn inverse(&self) -> Spin {
        Spin {
            profile: self.profile.negated(),
            ..self.clone()
        }
    }
}

/// Rotates the (i, j) coordinate plane by `theta`. Half turns are exact.
pub fn rotate_in_plane(p: &PointD, (i, j): (usize, usize), theta: f64) -> PointD {
    if theta == 0.0 {
        return *p;
    }
    let mut q = *p;
    if theta == PI || theta == -PI {
        q[i] = -p[i];
        q[j] = -p[j];
        return q;
    }
    let (s, c) = theta.sin_cos();
    q[i] = c * p[i] - s * p[j];
    q[j] = s * p[i] + c * p[j];
    q
}

/// Exact data for evaluating a tube spin on rational points.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactTube {
    pub x: Vec<Q>,
    pub y: Vec<Q>,
    pub r2: Q,
}

/// Homeomorphism exchanging `x` and `y` and fixing every point at distance
/// at least `r` from the segment [x, y].
///
/// In coordinates where x = e₁/2 and y = −e₁/2 it is T⁻¹ ∘ Φ ∘ T with
/// Te₁ = 2e₁, Teᵢ = (2 + 1/η)eᵢ and Φ the spin whose angle is π up to
/// radius 1 and falls to 0 at radius 1 + 2η, where η = r/‖y − x‖.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TubeData", into = "TubeData")]
pub struct TubeSpin {
    pub x: PointD,
    pub y: PointD,
    pub r: f64,
    /// Set for τ⁻¹, which also exchanges x and y.
    pub inverted: bool,
    cache: TubeCache,
    pub exact: Option<ExactTube>,
}

#[derive(Clone, Debug, PartialEq)]
struct TubeCache {
    mid: PointD,
    gap: f64,
    /// Householder vector of the frame change, with its squared norm.
    h: PointD,
    hh: f64,
    eta: f64,
    perp: f64,
    r2: f64,
    profile: AngleProfile,
}

#[derive(Clone, Serialize, Deserialize)]
struct TubeData {
    x: PointD,
    y: PointD,
    r: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    inverted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exact: Option<ExactTubeData>,
}

#[derive(Clone, Serialize, Deserialize)]
struct ExactTubeData {
    x: Vec<String>,
    y: Vec<String>,
    r2: String,
}

impl TryFrom<TubeData> for TubeSpin {
    type Error = Error;
    fn try_from(d: TubeData) -> Result<Self> {
        let mut t = match d.exact {
            Some(e) => {
                let parse = |v: &[String]| -> Result<Vec<Q>> {
                    v.iter()
                        .map(|s| {
                            exact::parse(s)
                                .ok_or_else(|| Error::InvalidInput(format!("bad rational {s}")))
                        })
                        .collect()
                };
                let r2 = exact::parse(&e.r2)
                    .ok_or_else(|| Error::InvalidInput("bad rational".into()))?;
                TubeSpin::new_exact(parse(&e.x)?, parse(&e.y)?, r2)?
            }
            None => TubeSpin::new(d.x, d.y, d.r)?,
        };
        t.inverted = d.inverted;
        Ok(t)
    }
}

impl From<TubeSpin> for TubeData {
    fn from(t: TubeSpin) -> Self {
        TubeData {
            x: t.x,
            y: t.y,
            r: t.r,
            inverted: t.inverted,
            exact: t.exact.map(|e| ExactTubeData {
                x: e.x.iter().map(|v| v.to_string()).collect(),
                y: e.y.iter().map(|v| v.to_string()).collect(),
                r2: e.r2.to_string(),
            }),
        }
    }
}

impl TubeSpin {
    pub fn new(x: PointD, y: PointD, r: f64) -> Result<Self> {
        if x.dim() != y.dim() || x.dim() < 2 {
            return Err(Error::InvalidInput(
                "tube spin needs two points of the same dimension ≥ 2".into(),
            ));
        }
        let gap = x.dist(&y);
        if !(r > 0.0) || !(gap > 0.0) || r > gap / 2.0 {
            return Err(Error::RadiusTooLarge {
                r,
                half_gap: gap / 2.0,
            });
        }
        Ok(Self::build(x, y, x - y, gap, r))
    }

    /// Float data from the endpoints, the difference x − y and its length.
    fn build(x: PointD, y: PointD, diff: PointD, gap: f64, r: f64) -> Self {
        let e = diff * (1.0 / gap);
        // Reflect e₁ onto ±e, picking the sign that avoids cancellation.
        let mut h = e;
        if e[0] <= 0.0 {
            h[0] -= 1.0;
        } else {
            h[0] += 1.0;
        }
        let hh = h.norm2();
        let eta = r / gap;
        TubeSpin {
            x,
            y,
            r,
            inverted: false,
            cache: TubeCache {
                mid: (x + y) * 0.5,
                gap,
                h,
                hh,
                eta,
                perp: 2.0 + 1.0 / eta,
                r2: r * r,
                profile: AngleProfile::tube(eta),
            },
            exact: None,
        }
    }

    /// Tube spin with rational endpoints and radius² for exact evaluation.
    ///
    /// The hypothesis r ≤ ‖y − x‖/2 is checked exactly, and the float data
    /// are derived from the exact gap and direction, so endpoints closer
    /// than a float ulp are still handled.
    pub fn new_exact(x: Vec<Q>, y: Vec<Q>, r2: Q) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::InvalidInput(
                "tube spin needs two points of the same dimension ≥ 2".into(),
            ));
        }
        let gap2 = exact::dist2(&x, &y);
        if exact::sign(&r2) <= 0 || exact::qi(4) * &r2 > gap2 {
            return Err(Error::RadiusTooLarge {
                r: exact::to_f64(&r2).sqrt(),
                half_gap: exact::to_f64(&gap2).sqrt() / 2.0,
            });
        }
        let to_pt = |v: &[Q]| PointD::new(&v.iter().map(exact::to_f64).collect::<Vec<_>>());
        let diff: Vec<Q> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        let gap = exact::to_f64(&gap2).sqrt();
        // The float radius is rounded down so the float map never moves a
        // point the exact map fixes, and kept within the float half gap.
        let mut r = exact::to_f64(&r2).sqrt();
        while r > 0.0 && exact::q(r) * exact::q(r) > r2 {
            r = f64::from_bits(r.to_bits() - 1);
        }
        let r = r.min(gap / 2.0);
        if !(r > 0.0 && gap > 0.0 && gap.is_finite()) {
            return Err(Error::InvalidInput(
                "tube too small for float evaluation".into(),
            ));
        }
        let mut t = Self::build(to_pt(&x), to_pt(&y), to_pt(&diff), gap, r);
        t.exact = Some(ExactTube { x, y, r2 });
        Ok(t)
    }

    /// 11‖y − x‖²/r².
    pub fn bound(&self) -> f64 {
        11.0 * self.cache.gap * self.cache.gap / (self.r * self.r)
    }

    pub fn eta(&self) -> f64 {
        self.cache.eta
    }

    fn reflect(&self, v: &PointD) -> PointD {
        let c = &self.cache;
        *v - c.h * (2.0 * c.h.dot(v) / c.hh)
    }

    fn to_frame(&self, z: &PointD) -> PointD {
        let c = &self.cache;
        let mut u = self.reflect(&((*z - c.mid) * (1.0 / c.gap)));
        u[0] *= 2.0;
        for i in 1..u.dim() {
            u[i] *= c.perp;
        }
        u
    }

    fn from_frame(&self, v: &PointD) -> PointD {
        let c = &self.cache;
        let mut u = *v;
        u[0] *= 0.5;
        for i in 1..u.dim() {
            u[i] /= c.perp;
        }
        c.mid + self.reflect(&u) * c.gap
    }

    /// True when `z` is in the open tube around [x, y].
    pub fn moves(&self, z: &PointD) -> bool {
        let d = point_segment_dist_d(z, &self.x, &self.y);
        d * d < self.cache.r2
    }

    fn apply(&self, z: &PointD, sign: f64) -> PointD {
        if z == &self.x {
            return self.y;
        }
        if z == &self.y {
            return self.x;
        }
        if !self.moves(z) {
            return *z;
        }
        let v = self.to_frame(z);
        let theta = self.cache.profile.eval(v.norm());
        if theta == 0.0 {
            return *z;
        }
        self.from_frame(&rotate_in_plane(&v, (0, 1), sign * theta))
    }

    pub fn eval(&self, z: &PointD) -> PointD {
        self.apply(z, if self.inverted { -1.0 } else { 1.0 })
    }

    pub fn eval_inverse(&self, z: &PointD) -> PointD {
        self.apply(z, if self.inverted { 1.0 } else { -1.0 })
    }

    /// Endpoints and squared radius as rationals.
    pub fn exact_parts(&self) -> (Vec<Q>, Vec<Q>, Q) {
        match &self.exact {
            Some(e) => (e.x.clone(), e.y.clone(), e.r2.clone()),
            None => (
                self.x.coords().iter().map(|v| exact::q(*v)).collect(),
                self.y.coords().iter().map(|v| exact::q(*v)).collect(),
                exact::q(self.r) * exact::q(self.r),
            ),
        }
    }

    /// Exact image of a rational point, available for the endpoints and for
    /// points outside the tube.
    pub fn eval_exact(&self, p: &[Q]) -> Option<Vec<Q>> {
        let (x, y, r2) = self.exact_parts();
        if p == x.as_slice() {
            return Some(y);
        }
        if p == y.as_slice() {
            return Some(x);
        }
        if exact::point_segment_dist2(p, &x, &y) >= r2 {
            return Some(p.to_vec());
        }
        None
    }

    /// Axis-aligned box containing every point the map moves.
    pub fn support_box(&self) -> (PointD, PointD) {
        let mut lo = self.x;
        let mut hi = self.x;
        for i in 0..lo.dim() {
            lo[i] = self.x[i].min(self.y[i]) - self.r;
            hi[i] = self.x[i].max(self.y[i]) + self.r;
        }
        (lo, hi)
    }
}

/// Tube spins whose open tubes are pairwise disjoint. At most one factor
/// moves any point, so the family is bilipschitz with the largest single
/// bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilyData", into = "FamilyData")]
pub struct TubeFamily {
    pub dim: usize,
    /// Sorted by the low end of the support box in the first coordinate.
    pub tubes: Vec<TubeSpin>,
    /// Widest support box in the first coordinate.
    reach: f64,
}

#[derive(Clone, Serialize, Deserialize)]
struct FamilyData {
    dim: usize,
    tubes: Vec<TubeSpin>,
}

impl TryFrom<FamilyData> for TubeFamily {
    type Error = Error;
    fn try_from(d: FamilyData) -> Result<Self> {
        if d.tubes.iter().any(|t| t.x.dim() != d.dim) {
            return Err(Error::InvalidInput(
                "tube of the wrong dimension in a family".into(),
            ));
        }
        Ok(TubeFamily::new(d.dim, d.tubes))
    }
}

impl From<TubeFamily> for FamilyData {
    fn from(f: TubeFamily) -> Self {
        FamilyData {
            dim: f.dim,
            tubes: f.tubes,
        }
    }
}

impl TubeFamily {
    /// Disjointness is the caller's claim; [`TubeFamily::check_disjoint`]
    /// verifies it.
    pub fn new(dim: usize, mut tubes: Vec<TubeSpin>) -> Self {
        tubes.sort_by(|a, b| a.support_box().0[0].total_cmp(&b.support_box().0[0]));
        let reach = tubes
            .iter()
            .map(|t| {
                let (lo, hi) = t.support_box();
                hi[0] - lo[0]
            })
            .fold(0.0, f64::max);
        TubeFamily { dim, tubes, reach }
    }

    pub fn bound(&self) -> f64 {
        self.tubes.iter().map(|t| t.bound()).fold(1.0, f64::max)
    }

    /// Tubes whose support box contains `p`, widened by `margin`.
    fn near<'a>(&'a self, p: &'a PointD, margin: f64) -> impl Iterator<Item = &'a TubeSpin> + 'a {
        let start = self
            .tubes
            .partition_point(|t| t.support_box().0[0] < p[0] - self.reach - margin);
        self.tubes[start..]
            .iter()
            .take_while(move |t| t.support_box().0[0] <= p[0] + margin)
            .filter(move |t| {
                let (lo, hi) = t.support_box();
                (0..p.dim()).all(|i| p[i] >= lo[i] - margin && p[i] <= hi[i] + margin)
            })
    }

    fn apply(&self, p: &PointD, inverse: bool) -> PointD {
        for t in self.near(p, 0.0) {
            if t.x == *p || t.y == *p || t.moves(p) {
                return if inverse {
                    t.eval_inverse(p)
                } else {
                    t.eval(p)
                };
            }
        }
        *p
    }

    pub fn eval(&self, p: &PointD) -> PointD {
        self.apply(p, false)
    }

    pub fn eval_inverse(&self, p: &PointD) -> PointD {
        self.apply(p, true)
    }

    pub fn eval_exact(&self, p: &[Q]) -> Option<Vec<Q>> {
        let pf = PointD::new(&p.iter().map(exact::to_f64).collect::<Vec<_>>());
        let margin = 1e-9 * (1.0 + pf.max_norm());
        for t in self.near(&pf, margin) {
            let v = t.eval_exact(p)?;
            if v.as_slice() != p {
                return Some(v);
            }
        }
        Some(p.to_vec())
    }

    pub fn inverse(&self) -> TubeFamily {
        let mut f = self.clone();
        for t in &mut f.tubes {
            t.inverted = !t.inverted;
        }
        f
    }

    /// Exact pairwise disjointness of the open tubes.
    pub fn check_disjoint(&self) -> Result<()> {
        let parts: Vec<_> = self.tubes.iter().map(|t| t.exact_parts()).collect();
        let boxes: Vec<_> = self.tubes.iter().map(|t| t.support_box()).collect();
        for i in 0..self.tubes.len() {
            let (lo, hi) = &boxes[i];
            let margin = 1e-9 * (1.0 + hi.max_norm());
            for j in i + 1..self.tubes.len() {
                let (lo2, hi2) = &boxes[j];
                if lo2[0] > hi[0] + margin {
                    break;
                }
                if (0..self.dim).any(|k| lo2[k] > hi[k] + margin || hi2[k] < lo[k] - margin) {
                    continue;
                }
                let (a, b, ra) = &parts[i];
                let (c, d, rb) = &parts[j];
                if !exact::tubes_disjoint(a, b, ra, c, d, rb) {
                    return Err(Error::check(
                        "tube disjointness",
                        format!(
                            "tubes around {:?} and {:?} overlap",
                            self.tubes[i].x, self.tubes[j].x
                        ),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// One piece of a glued map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GluedPiece {
    pub domain: Region,
    pub image: Region,
    pub map: PlaneMap,
}

/// A composable invertible map with a bilipschitz bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum PlaneMap {
    Identity {
        dim: usize,
    },
    Affine {
        map: Affine,
    },
    Spin {
        spin: Spin,
    },
    TubeSpin {
        tube: TubeSpin,
    },
    /// `maps[0] ∘ maps[1] ∘ …`, applied right to left.
    Compose {
        dim: usize,
        maps: Vec<PlaneMap>,
    },
    /// Pieces agreeing on shared boundaries; the first piece containing a
    /// point wins. `bound` is supplied by the construction.
    RegionGlue {
        dim: usize,
        pieces: Vec<GluedPiece>,
        bound: Bound,
    },
    /// Piecewise-affine map on a triangulated planar region.
    Mesh {
        mesh: Mesh,
        bound: Bound,
    },
    /// Tube spins with pairwise disjoint supports.
    TubeFamily {
        family: TubeFamily,
    },
    /// Straightening shear over a monotone graph.
    ColumnShear {
        shear: ColumnShear,
    },
}

impl PlaneMap {
    pub fn identity(dim: usize) -> Self {
        PlaneMap::Identity { dim }
    }

    pub fn affine(a: Affine) -> Self {
        PlaneMap::Affine { map: a }
    }

    pub fn dim(&self) -> usize {
        match self {
            PlaneMap::Identity { dim } => *dim,
            PlaneMap::Affine { map } => map.dim(),
            PlaneMap::Spin { spin } => spin.dim,
            PlaneMap::TubeSpin { tube } => tube.x.dim(),
            PlaneMap::Compose { dim, .. } => *dim,
            PlaneMap::RegionGlue { dim, .. } => *dim,
            PlaneMap::Mesh { .. } => 2,
            PlaneMap::TubeFamily { family } => family.dim,
            PlaneMap::ColumnShear { .. } => 2,
        }
    }

    /// The bilipschitz bound attached to the map.
    pub fn bound(&self) -> Bound {
        match self {
            PlaneMap::Identity { .. } => Bound::ONE,
            PlaneMap::Affine { map } => {
                let (a, b) = map.norms();
                Bound::new(a.max(b))
            }
            PlaneMap::Spin { spin } => Bound::new(spin.bound()),
            PlaneMap::TubeSpin { tube } => Bound::new(tube.bound()),
            PlaneMap::Compose { maps, .. } => Bound::product(maps.iter().map(|m| m.bound())),
            PlaneMap::RegionGlue { bound, .. } => *bound,
            PlaneMap::Mesh { bound, .. } => *bound,
            PlaneMap::TubeFamily { family } => Bound::new(family.bound()),
            PlaneMap::ColumnShear { shear } => Bound::new(shear.bound()),
        }
    }

    pub fn evaluate(&self, p: &PointD) -> Result<PointD> {
        match self {
            PlaneMap::Identity { .. } => Ok(*p),
            PlaneMap::Affine { map } => Ok(map.apply(p)),
            PlaneMap::Spin { spin } => Ok(spin.eval(p)),
            PlaneMap::TubeSpin { tube } => Ok(tube.eval(p)),
            PlaneMap::Compose { maps, .. } => {
                let mut q = *p;
                for m in maps.iter().rev() {
                    q = m.evaluate(&q)?;
                }
                Ok(q)
            }
            PlaneMap::RegionGlue { pieces, .. } => {
                for piece in pieces {
                    if piece.domain.contains(p) {
                        return piece.map.evaluate(p);
                    }
                }
                Err(Error::OutsideDomain(format!("{p:?}")))
            }
            PlaneMap::Mesh { mesh, .. } => mesh.eval(p.to2()).map(PointD::from),
            PlaneMap::TubeFamily { family } => Ok(family.eval(p)),
            PlaneMap::ColumnShear { shear } => Ok(shear.eval(p)),
        }
    }

    pub fn inverse_evaluate(&self, q: &PointD) -> Result<PointD> {
        match self {
            PlaneMap::Identity { .. } => Ok(*q),
            PlaneMap::Affine { map } => Ok(map.apply_inverse(q)),
            PlaneMap::Spin { spin } => Ok(spin.eval_inverse(q)),
            PlaneMap::TubeSpin { tube } => Ok(tube.eval_inverse(q)),
            PlaneMap::Compose { maps, .. } => {
                let mut p = *q;
                for m in maps {
                    p = m.inverse_evaluate(&p)?;
                }
                Ok(p)
            }
            PlaneMap::RegionGlue { pieces, .. } => {
                for piece in pieces {
                    if piece.image.contains(q) {
                        return piece.map.inverse_evaluate(q);
                    }
                }
                Err(Error::OutsideDomain(format!("{q:?} not in any image")))
            }
            PlaneMap::Mesh { mesh, .. } => mesh.eval_inverse(q.to2()).map(PointD::from),
            PlaneMap::TubeFamily { family } => Ok(family.eval_inverse(q)),
            PlaneMap::ColumnShear { shear } => Ok(shear.eval_inverse(q)),
        }
    }

    /// Evaluation for maps defined everywhere.
    pub fn apply(&self, p: &PointD) -> PointD {
        self.evaluate(p).expect("point in the domain of the map")
    }

    pub fn apply2(&self, p: Point) -> Point {
        self.apply(&PointD::from(p)).to2()
    }

    /// Exact evaluation on rational points. Returns `None` when some factor
    /// cannot be evaluated without rounding at the given point.
    pub fn evaluate_exact(&self, p: &[Q]) -> Option<Vec<Q>> {
        match self {
            PlaneMap::Identity { .. } => Some(p.to_vec()),
            PlaneMap::Affine { map } => Some(map.apply_exact(p)),
            PlaneMap::TubeSpin { tube } => tube.eval_exact(p),
            PlaneMap::Compose { maps, .. } => {
                let mut v = p.to_vec();
                for m in maps.iter().rev() {
                    v = m.evaluate_exact(&v)?;
                }
                Some(v)
            }
            PlaneMap::Spin { spin } => {
                let n2 = exact::dist2(p, &vec![exact::qi(0); p.len()]);
                let t0 = exact::q(spin.profile.support_end());
                (n2 >= &t0 * &t0).then(|| p.to_vec())
            }
            PlaneMap::TubeFamily { family } => family.eval_exact(p),
            PlaneMap::RegionGlue { .. } | PlaneMap::Mesh { .. } | PlaneMap::ColumnShear { .. } => {
                None
            }
        }
    }

    /// A composition, flattening nested compositions and dropping
    /// identities.
    pub fn compose(maps: Vec<PlaneMap>) -> PlaneMap {
        let dim = maps.first().map(|m| m.dim()).unwrap_or(2);
        let mut flat = Vec::new();
        for m in maps {
            match m {
                PlaneMap::Compose { maps: inner, .. } => flat.extend(inner),
                PlaneMap::Identity { .. } => {}
                other => flat.push(other),
            }
        }
        if flat.is_empty() {
            return PlaneMap::Identity { dim };
        }
        PlaneMap::Compose { dim, maps: flat }
    }

    /// `self ∘ inner`.
    pub fn after(self, inner: PlaneMap) -> PlaneMap {
        PlaneMap::compose(vec![self, inner])
    }

    /// The inverse map with the same bound.
    pub fn inverse(&self) -> PlaneMap {
        match self {
            PlaneMap::Identity { dim } => PlaneMap::Identity { dim: *dim },
            PlaneMap::Affine { map } => PlaneMap::Affine { map: map.inverse() },
            PlaneMap::Spin { spin } => PlaneMap::Spin {
                spin: spin.inverse(),
            },
            PlaneMap::Compose { dim, maps } => PlaneMap::Compose {
                dim: *dim,
                maps: maps.iter().rev().map(|m| m.inverse()).collect(),
            },
            PlaneMap::RegionGlue { dim, pieces, bound } => PlaneMap::RegionGlue {
                dim: *dim,
                pieces: pieces
                    .iter()
                    .map(|p| GluedPiece {
                        domain: p.image.clone(),
                        image: p.domain.clone(),
                        map: p.map.inverse(),
                    })
                    .collect(),
                bound: *bound,
            },
            PlaneMap::Mesh { mesh, bound } => PlaneMap::Mesh {
                mesh: Mesh::new(mesh.dst.clone(), mesh.src.clone(), mesh.tris.clone())
                    .expect("valid mesh"),
                bound: *bound,
            },
            PlaneMap::TubeSpin { tube } => {
                let mut t = tube.clone();
                t.inverted = !t.inverted;
                PlaneMap::TubeSpin { tube: t }
            }
            PlaneMap::TubeFamily { family } => PlaneMap::TubeFamily {
                family: family.inverse(),
            },
            PlaneMap::ColumnShear { shear } => {
                let mut s = shear.clone();
                s.inverted = !s.inverted;
                PlaneMap::ColumnShear { shear: s }
            }
        }
    }

    /// Number of elementary factors.
    pub fn size(&self) -> usize {
        match self {
            PlaneMap::Compose { maps, .. } => maps.iter().map(|m| m.size()).sum(),
            PlaneMap::RegionGlue { pieces, .. } => {
                pieces.iter().map(|p| p.map.size()).sum::<usize>().max(1)
            }
            PlaneMap::TubeFamily { family } => family.tubes.len().max(1),
            _ => 1,
        }
    }
}
