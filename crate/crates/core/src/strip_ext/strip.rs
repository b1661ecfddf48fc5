//! Extension from the two boundary lines of a strip to the whole strip by
//! rungs, trapezia and square fills.

use super::square::{square_boundary_extend, BoundaryMap, SquareExtensionOracle, SquareFill};
use super::trapezium::{trapezium_map, TrapeziumMap, TrapeziumSpec};
use crate::error::{Error, Result};
use crate::exact;
use crate::geom::{empirical_bilip, BilipEstimate, BoxSampler, Point, PointD, Polyline};
use crate::planemap::{Bound, GluedPiece, PlaneMap, Region};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// f on R×{0, h}: f(x, 0) = bottom(x) and f(x, h) = top(x).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripBoundary {
    pub bottom: Polyline,
    pub top: Polyline,
    pub h: f64,
}

impl StripBoundary {
    pub fn new(bottom: Polyline, top: Polyline, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "strip height {h} must be positive"
            )));
        }
        bottom.validate()?;
        top.validate()?;
        Ok(StripBoundary { bottom, top, h })
    }

    /// The restriction of an affine map of the plane to the two lines.
    pub fn from_affine(m: [[f64; 2]; 2], b: [f64; 2], h: f64, window: (f64, f64)) -> Result<Self> {
        let f = |x: f64, y: f64| {
            Point::new(
                m[0][0] * x + m[0][1] * y + b[0],
                m[1][0] * x + m[1][1] * y + b[1],
            )
        };
        let e = Point::new(m[0][0], m[1][0]);
        let line = |y: f64| {
            Polyline::new(
                vec![window.0, window.1],
                vec![f(window.0, y), f(window.1, y)],
                [e, e],
            )
        };
        StripBoundary::new(line(0.0)?, line(h)?, h)
    }

    pub fn eval(&self, p: Point) -> Point {
        if p.y.abs() <= (p.y - self.h).abs() {
            self.bottom.eval(p.x)
        } else {
            self.top.eval(p.x)
        }
    }

    /// Parameters where either line has a breakpoint, inside [lo, hi].
    fn breaks_between(line: &Polyline, lo: f64, hi: f64) -> Vec<f64> {
        line.breakpoints
            .iter()
            .copied()
            .filter(|t| *t > lo && *t < hi)
            .collect()
    }
}

/// One rung [x_k, y_k] with the data of its construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rung {
    /// x̄_k on the bottom line.
    pub anchor: f64,
    /// Center f(x̄_k) and radius Lh of B_k.
    pub center: Point,
    pub radius: f64,
    /// x_k = (x, 0) and y_k = (y, h).
    pub x: f64,
    pub y: f64,
    /// ‖f(x_k) − f(y_k)‖, at most Lh.
    pub image_length: f64,
    /// ‖x_k − y_k‖, and the larger of ‖x_k − x̄_k‖, ‖y_k − x̄_k‖; both at
    /// most L²h.
    pub length: f64,
    pub anchor_offset: f64,
    /// sin α_k = h/‖x_k − y_k‖, at least 1/L².
    pub sin_alpha: f64,
    /// Sampled Lip(F_k) and Lip(F_k⁻¹) for the rung glued to both lines.
    pub fk: BilipEstimate,
    /// The same with neighbouring rungs included, for the glued G.
    pub g: BilipEstimate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StripExtension {
    pub boundary: StripBoundary,
    pub l: f64,
    /// q(L, h) = 4L²h.
    pub q: f64,
    pub rungs: Vec<Rung>,
    /// T_k onto P_k = [x_k, x_{k+1}, y_{k+1}, y_k].
    pub trapezia: Vec<TrapeziumMap>,
    pub fills: Vec<SquareFill>,
    /// F glued from the fills.
    pub map: PlaneMap,
    /// max(24L³, bounds of the fills).
    pub bound: Bound,
    /// 2¹¹CL⁷h² when the oracle supplies C.
    pub paper_bound: Option<f64>,
    /// Parameter window on which F is defined on the whole height.
    pub covered: (f64, f64),
    pub oracle: String,
}

/// Pieces of a polyline between consecutive breaks in [lo, hi], each affine.
fn pieces(line: &Polyline, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut ts = vec![lo];
    ts.extend(StripBoundary::breaks_between(line, lo, hi));
    ts.push(hi);
    ts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// The parameter sub-interval of [t0, t1] whose image lies in the closed
/// disk, for an affine piece of `line`.
fn clip_to_disk(line: &Polyline, t0: f64, t1: f64, c: Point, r: f64) -> Option<(f64, f64)> {
    let (a, b) = (line.eval(t0), line.eval(t1));
    let d = b - a;
    let w = a - c;
    let qa = d.norm2();
    let qb = d.dot(w);
    let qc = w.norm2() - r * r;
    if qa == 0.0 {
        return (qc <= 0.0).then_some((t0, t1));
    }
    let disc = qb * qb - qa * qc;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let s0 = ((-qb - sq) / qa).max(0.0);
    let s1 = ((-qb + sq) / qa).min(1.0);
    (s0 <= s1).then(|| (t0 + s0 * (t1 - t0), t0 + s1 * (t1 - t0)))
}

/// Closest pair between the segments line1([a0, a1]) and line2([b0, b1]) as
/// parameters, or None when they meet.
fn closest_params(
    l1: &Polyline,
    a: (f64, f64),
    l2: &Polyline,
    b: (f64, f64),
) -> Option<(f64, f64, f64)> {
    let (p0, p1) = (l1.eval(a.0), l1.eval(a.1));
    let (q0, q1) = (l2.eval(b.0), l2.eval(b.1));
    if exact::segments_intersect(p0.arr(), p1.arr(), q0.arr(), q1.arr()) {
        return None;
    }
    let project = |p: Point, s0: Point, s1: Point| {
        let d = s1 - s0;
        let l2 = d.norm2();
        if l2 == 0.0 {
            0.0
        } else {
            ((p - s0).dot(d) / l2).clamp(0.0, 1.0)
        }
    };
    let lerp = |r: (f64, f64), s: f64| r.0 + s * (r.1 - r.0);
    let mut best: Option<(f64, f64, f64)> = None;
    let mut consider = |s: f64, t: f64| {
        let (x, y) = (lerp(a, s), lerp(b, t));
        let d = p0.lerp(p1, s).dist(q0.lerp(q1, t));
        let better = match best {
            None => true,
            Some((bd, bx, by)) => d < bd || (d == bd && (x, y) < (bx, by)),
        };
        if better {
            best = Some((d, x, y));
        }
    };
    consider(0.0, project(p0, q0, q1));
    consider(1.0, project(p1, q0, q1));
    consider(project(q0, p0, p1), 0.0);
    consider(project(q1, p0, p1), 1.0);
    best
}

/// Minimises ‖f(x) − f(y)‖ over f(x, 0), f(y, h) in the closed disk B_k.
///
/// On piecewise-affine lines the sets are finite unions of segments, so the
/// minimum is found in closed form over pairs of clipped pieces. Ties go to
/// the smaller parameters.
fn find_rung(f: &StripBoundary, anchor: f64, l: f64) -> Result<(f64, f64, Point)> {
    let h = f.h;
    let center = f.bottom.eval(anchor);
    let r = l * h;
    let reach = l * l * h * (1.0 + 1e-9) + 1e-9;
    let (lo, hi) = (anchor - reach, anchor + reach);
    let clip = |line: &Polyline| -> Vec<(f64, f64)> {
        pieces(line, lo, hi)
            .into_iter()
            .filter_map(|(t0, t1)| clip_to_disk(line, t0, t1, center, r))
            .collect()
    };
    let bottom = clip(&f.bottom);
    let top = clip(&f.top);
    if bottom.is_empty() || top.is_empty() {
        return Err(Error::RungNotFound(format!(
            "B(f({anchor}, 0), {r}) misses the {} line within parameter distance {reach}",
            if bottom.is_empty() { "bottom" } else { "top" }
        )));
    }
    let mut best: Option<(f64, f64, f64)> = None;
    for a in &bottom {
        for b in &top {
            let found = closest_params(&f.bottom, *a, &f.top, *b).ok_or_else(|| {
                Error::RungNotFound(format!(
                    "the images of the two lines meet near parameters {a:?} and {b:?}; f is not injective"
                ))
            })?;
            let better = match best {
                None => true,
                Some((bd, bx, by)) => {
                    let tol = 1e-12 * (1.0 + bd);
                    found.0 < bd - tol
                        || ((found.0 - bd).abs() <= tol && (found.1, found.2) < (bx, by))
                }
            };
            if better {
                best = Some(found);
            }
        }
    }
    let (_, x, y) = best.expect("nonempty candidate sets");
    Ok((x, y, center))
}

/// Max ratios for pairs (a, b) of domain points with images.
fn pair_ratios(a: &[(Point, Point)], b: &[(Point, Point)]) -> (f64, f64) {
    let (mut up, mut down) = (0.0_f64, 0.0_f64);
    for (p, fp) in a {
        for (q, fq) in b {
            let d = p.dist(*q);
            if d <= 1e-12 {
                continue;
            }
            let e = fp.dist(*fq);
            if e == 0.0 {
                return (f64::INFINITY, f64::INFINITY);
            }
            up = up.max(e / d);
            down = down.max(d / e);
        }
    }
    (up, down)
}

fn rung_samples(f: &StripBoundary, x: f64, y: f64, n: usize) -> Vec<(Point, Point)> {
    let (a, b) = (Point::new(x, 0.0), Point::new(y, f.h));
    let (fa, fb) = (f.bottom.eval(x), f.top.eval(y));
    (0..=n)
        .map(|i| {
            let s = i as f64 / n as f64;
            (a.lerp(b, s), fa.lerp(fb, s))
        })
        .collect()
}

fn line_samples(f: &StripBoundary, lo: f64, hi: f64, step: f64) -> Vec<(Point, Point)> {
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    let mut out = Vec::with_capacity(2 * n + 2);
    for i in 0..=n {
        let t = lo + (hi - lo) * i as f64 / n as f64;
        out.push((Point::new(t, 0.0), f.bottom.eval(t)));
        out.push((Point::new(t, f.h), f.top.eval(t)));
    }
    out
}

fn estimate(up: f64, down: f64, samples: usize) -> BilipEstimate {
    BilipEstimate {
        lip_up: up,
        lip_down: down,
        samples,
        seed: 0,
    }
}

/// Extends f from R×{0, h} to the strip over the parameter window.
///
/// `l` must bound the bilipschitz constant of f. The anchors x̄_k = kq are
/// taken far enough beyond the window that the trapezia cover it.
pub fn extend_strip(
    f: &StripBoundary,
    l: f64,
    window: (f64, f64),
    oracle: &dyn SquareExtensionOracle,
) -> Result<StripExtension> {
    let h = f.h;
    if !(l >= 1.0 && l.is_finite()) {
        return Err(Error::InvalidInput(format!("L = {l} must be at least 1")));
    }
    if !(window.0 < window.1) {
        return Err(Error::InvalidInput(format!("empty window {window:?}")));
    }
    let q = 4.0 * l * l * h;
    let reach = l * l * h;
    let k0 = ((window.0 - reach) / q).floor() as i64 - 1;
    let k1 = ((window.1 + reach) / q).ceil() as i64 + 1;
    let anchors: Vec<f64> = (k0..=k1).map(|k| k as f64 * q).collect();
    let found: Vec<(f64, f64, Point)> = anchors
        .par_iter()
        .map(|a| find_rung(f, *a, l))
        .collect::<Result<_>>()?;

    let samples_per_rung = 32;
    let step = h / 8.0;
    let rung_pts: Vec<Vec<(Point, Point)>> = found
        .iter()
        .map(|(x, y, _)| rung_samples(f, *x, *y, samples_per_rung))
        .collect();
    let rungs: Vec<Rung> = (0..found.len())
        .into_par_iter()
        .map(|k| {
            let (x, y, center) = found[k];
            let anchor = anchors[k];
            let (xk, yk) = (Point::new(x, 0.0), Point::new(y, h));
            let ab = Point::new(anchor, 0.0);
            let length = xk.dist(yk);
            let near = line_samples(f, anchor - 2.0 * q, anchor + 2.0 * q, step);
            let own = &rung_pts[k];
            let (u1, d1) = pair_ratios(own, &near);
            let (u2, d2) = pair_ratios(own, own);
            let fk = estimate(u1.max(u2), d1.max(d2), own.len() * (near.len() + own.len()));
            let (mut gu, mut gd) = (fk.lip_up, fk.lip_down);
            let mut count = fk.samples;
            for j in k.saturating_sub(2)..(k + 3).min(found.len()) {
                if j != k {
                    let (u, d) = pair_ratios(own, &rung_pts[j]);
                    gu = gu.max(u);
                    gd = gd.max(d);
                    count += own.len() * rung_pts[j].len();
                }
            }
            Rung {
                anchor,
                center,
                radius: l * h,
                x,
                y,
                image_length: f.bottom.eval(x).dist(f.top.eval(y)),
                length,
                anchor_offset: xk.dist(ab).max(yk.dist(ab)),
                sin_alpha: h / length,
                fk,
                g: estimate(gu, gd, count),
            }
        })
        .collect();

    for i in 0..rungs.len() {
        for j in i + 1..rungs.len() {
            let (a, b) = (&rungs[i], &rungs[j]);
            if exact::segments_intersect([a.x, 0.0], [a.y, h], [b.x, 0.0], [b.y, h]) {
                return Err(Error::check(
                    "rungs pairwise non-crossing",
                    format!(
                        "rungs {i} and {j} meet: {:?} and {:?}",
                        (a.x, a.y),
                        (b.x, b.y)
                    ),
                ));
            }
        }
    }

    let cells: Vec<(TrapeziumMap, BoundaryMap)> = rungs
        .windows(2)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            let spec = TrapeziumSpec::new([
                Point::new(a.x, 0.0),
                Point::new(b.x, 0.0),
                Point::new(b.y, h),
                Point::new(a.y, h),
            ])?;
            Ok((trapezium_map(&spec)?, cell_boundary(f, a, b)))
        })
        .collect::<Result<_>>()?;
    let g_bound = 24.0 * l.powi(3);
    let fills: Vec<SquareFill> = cells
        .par_iter()
        .map(|(t, bm)| square_boundary_extend(bm, t, g_bound, oracle))
        .collect::<Result<_>>()?;
    check_glue(&cells, &fills)?;

    let pieces: Vec<GluedPiece> = cells
        .iter()
        .zip(&fills)
        .map(|((t, bm), fill)| GluedPiece {
            domain: Region::Polygon {
                vertices: t.spec.vertices.to_vec(),
            },
            image: Region::Polygon {
                vertices: bm.dst.clone(),
            },
            map: fill.map.clone(),
        })
        .collect();
    let bound = fills
        .iter()
        .fold(Bound::new(g_bound), |acc, c| acc.max(c.bound));
    let first = rungs.first().unwrap();
    let last = rungs.last().unwrap();
    let covered = (first.x.max(first.y), last.x.min(last.y));
    if covered.0 > window.0 || covered.1 < window.1 {
        return Err(Error::WindowTooSmall(format!(
            "the trapezia cover {covered:?}, not the window {window:?}"
        )));
    }
    Ok(StripExtension {
        boundary: f.clone(),
        l,
        q,
        rungs,
        trapezia: cells.into_iter().map(|(t, _)| t).collect(),
        fills,
        map: PlaneMap::RegionGlue {
            dim: 2,
            pieces,
            bound,
        },
        bound,
        paper_bound: oracle.constant().map(|c| 2048.0 * c * l.powi(7) * h * h),
        covered,
        oracle: oracle.name().to_string(),
    })
}

/// The loop ∂P_k with its images: bottom line, rung k+1, top line backwards,
/// rung k.
fn cell_boundary(f: &StripBoundary, a: &Rung, b: &Rung) -> BoundaryMap {
    let h = f.h;
    let mut src = vec![Point::new(a.x, 0.0)];
    let mut dst = vec![f.bottom.eval(a.x)];
    for t in StripBoundary::breaks_between(&f.bottom, a.x, b.x) {
        src.push(Point::new(t, 0.0));
        dst.push(f.bottom.eval(t));
    }
    src.push(Point::new(b.x, 0.0));
    dst.push(f.bottom.eval(b.x));
    src.push(Point::new(b.y, h));
    dst.push(f.top.eval(b.y));
    for t in StripBoundary::breaks_between(&f.top, a.y, b.y)
        .into_iter()
        .rev()
    {
        src.push(Point::new(t, h));
        dst.push(f.top.eval(t));
    }
    src.push(Point::new(a.y, h));
    dst.push(f.top.eval(a.y));
    BoundaryMap { src, dst }
}

/// The images of distinct cells meet only along shared rungs and no cell
/// image contains an interior point of another.
fn check_glue(cells: &[(TrapeziumMap, BoundaryMap)], fills: &[SquareFill]) -> Result<()> {
    let edges: Vec<Vec<(Point, Point)>> = cells
        .iter()
        .map(|(_, bm)| {
            let n = bm.dst.len();
            (0..n).map(|i| (bm.dst[i], bm.dst[(i + 1) % n])).collect()
        })
        .collect();
    let bbox = |es: &[(Point, Point)]| {
        es.iter().fold(
            (
                Point::new(f64::INFINITY, f64::INFINITY),
                Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
            ),
            |(lo, hi), (a, _)| {
                (
                    Point::new(lo.x.min(a.x), lo.y.min(a.y)),
                    Point::new(hi.x.max(a.x), hi.y.max(a.y)),
                )
            },
        )
    };
    let boxes: Vec<(Point, Point)> = edges.iter().map(|e| bbox(e)).collect();
    let result: Vec<Result<()>> = (0..cells.len())
        .into_par_iter()
        .map(|i| {
            for j in i + 1..cells.len() {
                let (a, b) = (boxes[i], boxes[j]);
                if a.1.x < b.0.x || b.1.x < a.0.x || a.1.y < b.0.y || b.1.y < a.0.y {
                    continue;
                }
                for (p0, p1) in &edges[i] {
                    for (q0, q1) in &edges[j] {
                        let shared = p0 == q0 || p0 == q1 || p1 == q0 || p1 == q1;
                        let same = (p0 == q1 && p1 == q0) || (p0 == q0 && p1 == q1);
                        if same || (shared && j == i + 1) {
                            continue;
                        }
                        if exact::segments_intersect(p0.arr(), p1.arr(), q0.arr(), q1.arr()) {
                            return Err(Error::check(
                                "cell images meet only on shared rungs",
                                format!(
                                    "cells {i} and {j} cross at edges {:?} and {:?}",
                                    (p0, p1),
                                    (q0, q1)
                                ),
                            ));
                        }
                    }
                }
            }
            Ok(())
        })
        .collect();
    result.into_iter().collect::<Result<()>>()?;
    for (i, ((t, _), fill)) in cells.iter().zip(fills).enumerate() {
        let v = t.spec.vertices;
        let mid = (v[0] + v[1] + v[2] + v[3]) * 0.25;
        let probe = fill.map.evaluate(&PointD::from(mid))?.to2();
        for (j, (_, bm)) in cells.iter().enumerate() {
            if j != i && crate::planemap::region::polygon_contains(&bm.dst, probe, -1.0) {
                return Err(Error::check(
                    "cell images have disjoint interiors",
                    format!("the image of the center of cell {i} lies in cell {j}"),
                ));
            }
        }
    }
    Ok(())
}

/// Outcome of the orientation test on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridInjectivity {
    pub ok: bool,
    pub triangles: usize,
    /// A grid point at a triangle whose orientation flips, if any.
    pub witness: Option<Point>,
}

/// Evaluates the map on the grid with `nx`×`ny` cells over [lo, hi] and
/// checks, exactly, that every image triangle keeps one common nonzero
/// orientation. This is the local injectivity proxy used for
/// homeomorphisms.
pub fn grid_injective(
    map: &PlaneMap,
    lo: Point,
    hi: Point,
    nx: usize,
    ny: usize,
) -> Result<GridInjectivity> {
    let at = |i: usize, j: usize| {
        Point::new(
            lo.x + (hi.x - lo.x) * i as f64 / nx as f64,
            lo.y + (hi.y - lo.y) * j as f64 / ny as f64,
        )
    };
    let img: Vec<Point> = (0..(nx + 1) * (ny + 1))
        .into_par_iter()
        .map(|k| {
            map.evaluate(&PointD::from(at(k % (nx + 1), k / (nx + 1))))
                .map(|p| p.to2())
        })
        .collect::<Result<_>>()?;
    let g = |i: usize, j: usize| img[j * (nx + 1) + i].arr();
    let signs: Vec<(i32, i32, Point)> = (0..nx * ny)
        .into_par_iter()
        .map(|c| {
            let (i, j) = (c % nx, c / nx);
            let a = exact::orient2d(g(i, j), g(i + 1, j), g(i + 1, j + 1));
            let b = exact::orient2d(g(i, j), g(i + 1, j + 1), g(i, j + 1));
            (a, b, at(i, j))
        })
        .collect();
    let want = signs.first().map_or(1, |s| s.0);
    let bad = signs
        .iter()
        .find(|(a, b, _)| *a == 0 || *a != want || *b != want);
    Ok(GridInjectivity {
        ok: bad.is_none() && want != 0,
        triangles: 2 * nx * ny,
        witness: bad.map(|s| s.2),
    })
}

/// Results of the strip checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripReport {
    pub boundary_error: f64,
    pub rungs_ok: bool,
    /// max over k of sampled Lip(F_k), Lip(F_k⁻¹), against 2L³ and 12L³.
    pub fk_lip: f64,
    pub fk_lip_inv: f64,
    pub fk_ok: bool,
    /// Sampled Lip(G), Lip(G⁻¹), against 4L³ and 24L³.
    pub g_lip: f64,
    pub g_lip_inv: f64,
    pub g_ok: bool,
    /// Every T_k obeys the trapezium bounds and bilip(T_k) ≤ 7q/4.
    pub trapezia_ok: bool,
    pub grid: GridInjectivity,
    pub bilip: BilipEstimate,
    /// Sampled bilip within the stated bound, when the oracle supplies C.
    pub paper_bound_ok: Option<bool>,
}

impl StripReport {
    pub fn pass(&self) -> bool {
        self.boundary_error <= 1e-9
            && self.rungs_ok
            && self.fk_ok
            && self.g_ok
            && self.trapezia_ok
            && self.grid.ok
            && self.paper_bound_ok != Some(false)
    }
}

/// Checks the claims of the construction on the covered window, with a grid
/// at resolution h/16 for injectivity.
pub fn check_strip(
    ext: &StripExtension,
    window: (f64, f64),
    samples: usize,
    seed: u64,
) -> Result<StripReport> {
    let f = &ext.boundary;
    let (l, h) = (ext.l, f.h);
    let slack = 1.0 + 1e-9;
    let mut boundary_error = 0.0_f64;
    let n = (((window.1 - window.0) / (h / 16.0)).ceil() as usize).max(1);
    for i in 0..=n {
        let t = window.0 + (window.1 - window.0) * i as f64 / n as f64;
        for (y, line) in [(0.0, &f.bottom), (h, &f.top)] {
            let got = ext.map.evaluate(&PointD::xy(t, y))?.to2();
            boundary_error = boundary_error.max(got.dist(line.eval(t)));
        }
    }
    let rungs_ok = ext.rungs.iter().all(|r| {
        r.image_length <= l * h * slack
            && r.length <= l * l * h * slack
            && r.anchor_offset <= l * l * h * slack
            && r.sin_alpha >= 1.0 / (l * l * slack)
    });
    let fold = |g: fn(&Rung) -> f64| ext.rungs.iter().map(g).fold(0.0, f64::max);
    let fk_lip = fold(|r| r.fk.lip_up);
    let fk_lip_inv = fold(|r| r.fk.lip_down);
    let g_lip = fold(|r| r.g.lip_up);
    let g_lip_inv = fold(|r| r.g.lip_down);
    let l3 = l.powi(3) * slack;
    let trapezia_ok = ext.trapezia.iter().all(|t| {
        t.lip <= t.spec.lip_bound() * slack
            && t.lip_inv <= t.spec.lip_inv_bound() * slack
            && t.bilip() <= 1.75 * ext.q * slack
    });
    let nx = (((window.1 - window.0) / (h / 16.0)).ceil() as usize).max(1);
    let grid = grid_injective(
        &ext.map,
        Point::new(window.0, 0.0),
        Point::new(window.1, h),
        nx,
        16,
    )?;
    let (lo, hi) = (PointD::xy(window.0, 0.0), PointD::xy(window.1, h));
    let sampler = BoxSampler::new(lo, hi, h / 4.0);
    let clamp = |p: PointD| PointD::xy(p[0].clamp(lo[0], hi[0]), p[1].clamp(lo[1], hi[1]));
    let map = &ext.map;
    let bilip = empirical_bilip(
        |p: &PointD| map.apply(p),
        |r| {
            let (a, b) = sampler.sample(r);
            (clamp(a), clamp(b))
        },
        samples,
        seed,
    )?;
    Ok(StripReport {
        boundary_error,
        rungs_ok,
        fk_lip,
        fk_lip_inv,
        fk_ok: fk_lip <= 2.0 * l3 && fk_lip_inv <= 12.0 * l3,
        g_lip,
        g_lip_inv,
        g_ok: g_lip <= 4.0 * l3 && g_lip_inv <= 24.0 * l3,
        trapezia_ok,
        grid,
        bilip,
        paper_bound_ok: ext.paper_bound.map(|b| bilip.bilip() <= b),
    })
}

/// A random graph-type boundary map together with a bilipschitz constant
/// that holds by construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomStrip {
    pub boundary: StripBoundary,
    pub l: f64,
}

/// f(x, 0) = R(x, φ₀(x)) + b and f(x, h) = R(x, h + φ₁(x)) + b with R a
/// rotation, φᵢ piecewise affine on unit knots with slopes at most `slope`
/// and |φᵢ| ≤ `amp` < h/2, constant beyond `half`.
///
/// Same-line pairs give ratios in [1, √(1 + slope²)] and cross-line pairs
/// ratios in [(h − 2amp)/h, (h + 2amp)/h], so the returned L is
/// max(√(1 + slope²), (h + 2amp)/h, h/(h − 2amp)).
pub fn random_graph_strip(
    h: f64,
    half: i64,
    slope: f64,
    amp: f64,
    seed: u64,
) -> Result<RandomStrip> {
    use rand::{Rng, SeedableRng};
    if !(amp >= 0.0 && 2.0 * amp < h && slope >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "need 0 ≤ amp < h/2 and slope ≥ 0, got {amp}, {slope}"
        )));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    let shift = Point::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
    let rot = |p: Point| p.rotate(theta);
    let ts: Vec<f64> = (-half..=half).map(|k| k as f64).collect();
    let mut profile = |base: f64| -> Result<Polyline> {
        let mut phi = rng.gen_range(-amp..=amp);
        let mut verts = Vec::with_capacity(ts.len());
        for t in &ts {
            verts.push(rot(Point::new(*t, base + phi)) + shift);
            let s = if slope > 0.0 {
                rng.gen_range(-slope..=slope)
            } else {
                0.0
            };
            phi = (phi + s).clamp(-amp, amp);
        }
        let e = rot(Point::new(1.0, 0.0));
        Polyline::new(ts.clone(), verts, [e, e])
    };
    let bottom = profile(0.0)?;
    let top = profile(h)?;
    let l = (1.0 + slope * slope)
        .sqrt()
        .max((h + 2.0 * amp) / h)
        .max(h / (h - 2.0 * amp));
    Ok(RandomStrip {
        boundary: StripBoundary::new(bottom, top, h)?,
        l,
    })
}
