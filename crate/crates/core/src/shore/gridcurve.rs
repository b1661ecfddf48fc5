//! Perturbing a bilipschitz curve so that it keeps away from a separated
//! set, by square detours in straightened coordinates.

use super::oracle::{check_line_extension, LineExtension, LineExtensionOracle};
use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::geom::{
    empirical_bilip, point_segment_distance, BilipEstimate, IntervalSampler, Point, PointD,
    Polyline,
};
use crate::planemap::{Bound, GluedPiece, Mesh, PlaneMap, Region};
use crate::rounding::close_pairs;
use serde::{Deserialize, Serialize};

/// One detour of ψ along the boundary of the ℓ∞-square of half-width h/2
/// around a straightened point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Detour {
    /// Index of the point of Γ.
    pub index: usize,
    /// Φ⁻¹(x) for that point.
    pub center: Point,
    /// ψ leaves the axis at r and returns at r + h.
    pub r: f64,
    /// Height of the horizontal side used, h/2 above or below the center.
    pub level: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridCurve {
    /// μ = Φ∘ψ.
    pub mu: Polyline,
    /// ψ, equal to t·e₁ off the detours.
    pub psi: Polyline,
    pub extension: LineExtension,
    pub h: f64,
    pub detours: Vec<Detour>,
    /// δ/(2²⁴L²).
    pub clearance_bound: f64,
    /// 2³⁹L³/δ².
    pub bound: f64,
    /// 16/h².
    pub psi_bound: f64,
}

/// h = δ/(2¹²L).
pub fn grid_h(delta: f64, l: f64) -> f64 {
    delta / (4096.0 * l)
}

/// μ with ‖μ − ξ‖ ≤ δ whose image keeps δ/(2²⁴L²) away from Γ.
///
/// The oracle's Φ must be at most 2¹¹L-bilipschitz so that Φ⁻¹(Γ) is
/// 2h-separated.
pub fn avoid_gridcurve(
    xi: &Polyline,
    gamma: &[Point],
    delta: f64,
    l: f64,
    oracle: &dyn LineExtensionOracle,
) -> Result<GridCurve> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!(
            "δ = {delta} must lie in (0, 1)"
        )));
    }
    if !(l >= 1.0 && l.is_finite()) {
        return Err(Error::InvalidInput(format!("L = {l} must be at least 1")));
    }
    let pts: Vec<PointD> = gamma.iter().map(|p| PointD::from(*p)).collect();
    if let Some(&(i, j)) = close_pairs(&pts, delta).first() {
        return Err(Error::HypothesisViolated(format!(
            "Γ points {i} and {j} are {} apart, below δ = {delta}",
            gamma[i].dist(gamma[j])
        )));
    }
    let ext = oracle.extend(xi)?;
    check_line_extension(&ext, xi, 1e-9)?;
    let cap = 2048.0 * l;
    if ext.bound.value() > cap {
        return Err(Error::HypothesisViolated(format!(
            "oracle {} claims bound {}, above 2¹¹L = {cap}",
            oracle.name(),
            ext.bound
        )));
    }
    let h = grid_h(delta, l);
    let mut detours = Vec::new();
    for (index, x) in gamma.iter().enumerate() {
        let z = ext.map.inverse_evaluate(&PointD::from(*x))?.to2();
        if z.y.abs() < 0.5 * h {
            // The longer way round the square passes the side farther from
            // the axis; ties go over the top.
            let level = if z.y >= 0.0 {
                z.y + 0.5 * h
            } else {
                z.y - 0.5 * h
            };
            detours.push(Detour {
                index,
                center: z,
                r: z.x - 0.5 * h,
                level,
            });
        }
    }
    detours.sort_by(|a, b| a.r.total_cmp(&b.r));
    for w in detours.windows(2) {
        if w[1].r < w[0].r + h {
            return Err(Error::check(
                "detour intervals disjoint",
                format!(
                    "points {} and {} give overlapping squares",
                    w[0].index, w[1].index
                ),
            ));
        }
    }
    let psi = build_psi(xi, &detours, h)?;
    let mu = push_forward(&psi, &ext)?;
    Ok(GridCurve {
        mu,
        psi,
        extension: ext,
        h,
        detours,
        clearance_bound: delta / (2f64.powi(24) * l * l),
        bound: 2f64.powi(39) * l.powi(3) / (delta * delta),
        psi_bound: 16.0 / (h * h),
    })
}

/// Speed ℓ/h of the detour, with ℓ = h + 2|level|.
fn detour_speed(d: &Detour, h: f64) -> f64 {
    (h + 2.0 * d.level.abs()) / h
}

fn build_psi(xi: &Polyline, detours: &[Detour], h: f64) -> Result<Polyline> {
    let (lo, hi) = xi.window();
    let lo = detours.first().map_or(lo, |d| lo.min(d.r));
    let hi = detours.last().map_or(hi, |d| hi.max(d.r + h));
    let mut bps = vec![lo];
    let mut verts = vec![Point::new(lo, 0.0)];
    let mut push = |t: f64, p: Point| {
        if t > *bps.last().unwrap() {
            bps.push(t);
            verts.push(p);
        }
    };
    for d in detours {
        let speed = detour_speed(d, h);
        let s = d.r + d.level.abs() / speed;
        let t = s + h / speed;
        push(d.r, Point::new(d.r, 0.0));
        push(s, Point::new(d.r, d.level));
        push(t, Point::new(d.r + h, d.level));
        push(d.r + h, Point::new(d.r + h, 0.0));
    }
    push(hi, Point::new(hi, 0.0));
    if bps.len() < 2 {
        return Err(Error::InvalidInput("curve window is a single point".into()));
    }
    Polyline::new(bps, verts, [Point::new(1.0, 0.0), Point::new(1.0, 0.0)])
}

/// Φ∘ψ as a polyline: horizontal pieces of ψ are split at the knots of Φ so
/// each piece lies in one strip where Φ is affine.
fn push_forward(psi: &Polyline, ext: &LineExtension) -> Result<Polyline> {
    let mut bps: Vec<f64> = Vec::new();
    let mut pts: Vec<Point> = Vec::new();
    let mut add = |t: f64, p: Point| {
        if bps.last().map_or(true, |l| t > *l) {
            bps.push(t);
            pts.push(p);
        }
    };
    let knots = &ext.knots;
    for i in 0..psi.num_segments() {
        let (t0, t1) = (psi.breakpoints[i], psi.breakpoints[i + 1]);
        let (a, b) = (psi.vertices[i], psi.vertices[i + 1]);
        add(t0, a);
        if a.y == b.y && b.x > a.x {
            // Horizontal piece: parameter is affine in the abscissa.
            let from = knots.partition_point(|k| *k <= a.x);
            for &u in &knots[from..] {
                if u >= b.x {
                    break;
                }
                let t = t0 + (u - a.x) / (b.x - a.x) * (t1 - t0);
                add(t, Point::new(u, a.y));
            }
        }
    }
    let n = psi.vertices.len();
    add(psi.breakpoints[n - 1], psi.vertices[n - 1]);
    let verts: Vec<Point> = pts
        .iter()
        .map(|p| ext.map.evaluate(&PointD::from(*p)).map(|q| q.to2()))
        .collect::<Result<_>>()?;
    let tail = |t: f64, dt: f64| {
        let a = ext.map.evaluate(&PointD::xy(t, 0.0)).map(|q| q.to2());
        let b = ext.map.evaluate(&PointD::xy(t + dt, 0.0)).map(|q| q.to2());
        a.and_then(|a| b.map(|b| (b - a) * (1.0 / dt)))
    };
    let (lo, hi) = psi.window();
    let tails = [tail(lo - 1.0, 1.0)?, tail(hi, 1.0)?];
    Polyline::new(bps, verts, tails)
}

/// A piecewise-affine map of the box around one detour that fixes the box
/// boundary and carries the axis onto the axis with the square detour.
///
/// The box is [r − a, r + h + a] × [−2h, 2h], drawn for a detour above the
/// axis and mirrored for one below. Above the path the box splits into a left
/// part, the rectangle over the top side and a right part; below it the part
/// under the square is fanned from an interior point.
fn detour_mesh(d: &Detour, h: f64, a: f64, speed: f64) -> Result<Mesh> {
    let sg = if d.level >= 0.0 { 1.0 } else { -1.0 };
    let lev = d.level.abs();
    let hh = 2.0 * h;
    let (r, m) = (d.r, d.r + 0.5 * h);
    let s = r + lev / speed;
    let t = s + h / speed;
    let p = |x: f64, y: f64| Point::new(x, sg * y);
    // 0..5 axis points, 6..9 top edge, 10..11 bottom corners, 12..13 bottom
    // edge under the square, 14 the fan centre.
    let src = vec![
        p(r - a, 0.0),
        p(r, 0.0),
        p(s, 0.0),
        p(t, 0.0),
        p(r + h, 0.0),
        p(r + h + a, 0.0),
        p(r - a, hh),
        p(r, hh),
        p(r + h, hh),
        p(r + h + a, hh),
        p(r - a, -hh),
        p(r + h + a, -hh),
        p(r, -hh),
        p(r + h, -hh),
        p(m, -h),
    ];
    let mut dst = src.clone();
    dst[2] = p(r, lev);
    dst[3] = p(r + h, lev);
    let tris = vec![
        [6, 0, 1],
        [6, 1, 2],
        [6, 2, 7],
        [2, 3, 8],
        [2, 8, 7],
        [4, 5, 9],
        [3, 4, 9],
        [8, 3, 9],
        [10, 12, 1],
        [10, 1, 0],
        [14, 12, 13],
        [14, 13, 4],
        [14, 4, 3],
        [14, 3, 2],
        [14, 2, 1],
        [14, 1, 12],
        [13, 11, 5],
        [13, 5, 4],
    ];
    Mesh::new(src, dst, tris)
}

/// B carrying the axis onto ψ: one box map per detour and the identity
/// elsewhere, with its bound and the abscissae of the box sides.
#[derive(Clone, Debug, PartialEq)]
pub struct DetourMap {
    pub map: PlaneMap,
    pub bound: Bound,
    pub edges: Vec<f64>,
}

pub fn detour_map(gc: &GridCurve) -> Result<DetourMap> {
    let h = gc.h;
    let mut pieces = Vec::with_capacity(gc.detours.len() + 1);
    let mut bump_bound = 1.0_f64;
    let mut edges = Vec::with_capacity(2 * gc.detours.len());
    for (k, d) in gc.detours.iter().enumerate() {
        let left_gap = if k > 0 { d.r - (gc.detours[k - 1].r + h) } else { f64::INFINITY };
        let right_gap = gc.detours.get(k + 1).map_or(f64::INFINITY, |n| n.r - (d.r + h));
        let a = (0.25 * h).min(0.5 * left_gap).min(0.5 * right_gap);
        if !(a > 0.0) {
            return Err(Error::check("detour boxes disjoint", format!("detour {} touches a neighbour", d.index)));
        }
        let mesh = detour_mesh(d, h, a, detour_speed(d, h))?;
        if let Err(t) = mesh.orientation_preserved() {
            return Err(Error::check("detour box map", format!("triangle {t} of detour {} flips", d.index)));
        }
        let pb = mesh.piece_bound();
        bump_bound = bump_bound.max(pb);
        let inset = 2.0 * crate::EPS;
        let region = Region::Box {
            lo: PointD::xy(d.r - a + inset, -2.0 * h + inset),
            hi: PointD::xy(d.r + h + a - inset, 2.0 * h - inset),
        };
        edges.extend([d.r - a, d.r + h + a]);
        pieces.push(GluedPiece {
            domain: region.clone(),
            image: region,
            map: PlaneMap::Mesh {
                mesh,
                bound: Bound::new(pb),
            },
        });
    }
    if pieces.is_empty() {
        return Ok(DetourMap {
            map: PlaneMap::identity(2),
            bound: Bound::ONE,
            edges,
        });
    }
    pieces.push(GluedPiece {
        domain: Region::All,
        image: Region::All,
        map: PlaneMap::identity(2),
    });
    let bound = Bound::new(bump_bound);
    Ok(DetourMap {
        map: PlaneMap::RegionGlue { dim: 2, pieces, bound },
        bound,
        edges,
    })
}

/// An extension of μ: Φ∘B with B from [`detour_map`].
pub fn detour_extension(gc: &GridCurve) -> Result<LineExtension> {
    let b = detour_map(gc)?;
    let mut knots = gc.extension.knots.clone();
    knots.extend(b.edges);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    Ok(LineExtension {
        map: PlaneMap::compose(vec![gc.extension.map.clone(), b.map]),
        bound: gc.extension.bound.times(b.bound),
        knots,
    })
}

/// Results of the gridcurve checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    /// max ‖μ − ξ‖ over the union of breakpoints.
    pub deviation: f64,
    pub deviation_ok: bool,
    /// Smallest float distance from a Γ point to μ(R).
    pub min_clearance: f64,
    /// Every Γ point is at least δ/(2²⁴L²) from μ(R), decided exactly.
    pub clearance_exact: bool,
    /// Smallest distance from Φ⁻¹(Γ) to ψ(R); at least h/2.
    pub straight_clearance: f64,
    pub bilip_mu: BilipEstimate,
    pub bilip_psi: BilipEstimate,
}

impl GridReport {
    pub fn pass(&self, gc: &GridCurve) -> bool {
        self.deviation_ok
            && self.clearance_exact
            && self.straight_clearance >= 0.5 * gc.h * (1.0 - 1e-9)
            && self.bilip_mu.bilip() <= gc.bound
            && self.bilip_psi.bilip() <= gc.psi_bound
    }
}

pub fn check_gridcurve(
    gc: &GridCurve,
    xi: &Polyline,
    gamma: &[Point],
    delta: f64,
    samples: usize,
    seed: u64,
) -> Result<GridReport> {
    let mut ts: Vec<f64> = gc.mu.breakpoints.clone();
    ts.extend(xi.breakpoints.iter().copied());
    let deviation = ts
        .iter()
        .map(|t| gc.mu.eval(*t).dist(xi.eval(*t)))
        .fold(0.0, f64::max);
    let (min_clearance, clearance_exact) = exact_clearance(&gc.mu, gamma, gc.clearance_bound);
    let mut straight_clearance = f64::INFINITY;
    for x in gamma {
        let z = gc.extension.map.inverse_evaluate(&PointD::from(*x))?.to2();
        straight_clearance = straight_clearance.min(gc.psi.distance_to(z));
    }
    let (lo, hi) = gc.mu.window();
    let (lo, hi) = (lo - 1.0, hi + 1.0);
    let mut spots: Vec<f64> = gc.detours.iter().flat_map(|d| [d.r, d.r + gc.h]).collect();
    spots.truncate(4096);
    let near = gc.h.max(1e-6 * (hi - lo));
    let sampler = IntervalSampler::new(lo, hi, near).with_hot_spots(spots.clone());
    let mu = &gc.mu;
    let bilip_mu = empirical_bilip(|t: &f64| mu.eval(*t), |r| sampler.sample(r), samples, seed)?;
    let hot = IntervalSampler::new(lo, hi, gc.h).with_hot_spots(spots);
    let psi = &gc.psi;
    let bilip_psi = empirical_bilip(|t: &f64| psi.eval(*t), |r| hot.sample(r), samples, seed ^ 1)?;
    Ok(GridReport {
        deviation,
        deviation_ok: deviation <= delta,
        min_clearance,
        clearance_exact,
        straight_clearance,
        bilip_mu,
        bilip_psi,
    })
}

/// Smallest float distance from the points to the curve, and whether every
/// point is at least `bound` away, decided in rational arithmetic for all
/// pieces within a float margin of the bound.
pub fn exact_clearance(curve: &Polyline, points: &[Point], bound: f64) -> (f64, bool) {
    let qb = exact::q(bound);
    let b2 = &qb * &qb;
    let qp = |p: Point| [exact::q(p.x), exact::q(p.y)];
    let n = curve.vertices.len();
    let first = curve.vertices[0];
    let last = curve.vertices[n - 1];
    let mut min_float = f64::INFINITY;
    let mut ok = true;
    for p in points {
        let scale = 1.0 + p.x.abs().max(p.y.abs());
        let margin = bound + 1e-9 * scale;
        let pq = qp(*p);
        for s in curve.segments() {
            let d = point_segment_distance(*p, &s);
            min_float = min_float.min(d);
            if d <= margin {
                let e: Q = exact::point_segment_dist2(&pq, &qp(s.a), &qp(s.b));
                if e < b2 {
                    ok = false;
                }
            }
        }
        for (o, dir) in [(first, -curve.tails[0]), (last, curve.tails[1])] {
            let d = crate::geom::polyline::ray_distance(*p, o, dir);
            min_float = min_float.min(d);
            if d <= margin && exact::point_ray_dist2(&pq, &qp(o), &qp(dir)) < b2 {
                ok = false;
            }
        }
    }
    (min_float, ok)
}
