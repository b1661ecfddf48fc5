//! A bilipschitz zig-zag curve in a horizontal strip that separates a marked
//! subset of a separated point set from the rest.
//!
//! The base curve is a periodic zig-zag with vertical strokes at the
//! multiples of 8r, r = s/100. Every marked point x gets a grid square Q_x
//! crossed by exactly one stroke; the stroke portion inside Q_x is replaced
//! by a path along one side of ∂Q_x so that x ends up on the prescribed side.

mod monotone;
mod svg;

pub use monotone::monotone_separation;

pub use svg::separation_svg;

use crate::error::{Error, Result};
use crate::exact;
use crate::geom::{
    empirical_bilip, side_classify, BilipEstimate, IntervalSampler, Point, Polyline, Segment, Side,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Strip R×[0, w] with a separation scale s and an optional parameter window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripConfig {
    pub s: f64,
    pub w: f64,
    /// Parameter interval carried by vertices; outside it the curve runs
    /// along y = 0 with unit speed. Snapped outward to multiples of 16r.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(f64, f64)>,
}

impl StripConfig {
    pub fn new(s: f64, w: f64) -> Result<Self> {
        let c = StripConfig { s, w, window: None };
        c.validate()?;
        Ok(c)
    }

    pub fn with_window(mut self, lo: f64, hi: f64) -> Self {
        self.window = Some((lo, hi));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0 && self.s < 1.0 && self.w >= 1.0 && self.w.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "strip needs 0 < s < 1 ≤ w, got s = {}, w = {}",
                self.s, self.w
            )));
        }
        if let Some((a, b)) = self.window {
            if !(a < b && a.is_finite() && b.is_finite()) {
                return Err(Error::InvalidInput(format!("empty window [{a}, {b}]")));
            }
        }
        Ok(())
    }

    /// Grid step r = s/100.
    pub fn r(&self) -> f64 {
        self.s / 100.0
    }

    /// First breakpoint inside a period, 8wr/(w+8r).
    pub fn p1(&self) -> f64 {
        let r = self.r();
        8.0 * self.w * r / (self.w + 8.0 * r)
    }

    /// Speed (w+8r)/(8r) of the base zig-zag.
    pub fn speed(&self) -> f64 {
        let r = self.r();
        (self.w + 8.0 * r) / (8.0 * r)
    }

    /// K = w²/4r², the bilipschitz constant of the base zig-zag.
    pub fn k(&self) -> f64 {
        let r = self.r();
        self.w * self.w / (4.0 * r * r)
    }

    /// 36K², the constant attached to the separating curve.
    pub fn gamma_bound(&self) -> f64 {
        36.0 * self.k() * self.k()
    }

    /// The coarser closed form 2³⁰w⁴/s⁴.
    pub fn stated_bound(&self) -> f64 {
        2f64.powi(30) * self.w.powi(4) / self.s.powi(4)
    }

    /// Range of period indices n covered by the window: periods n_lo..n_hi.
    fn periods(&self) -> (i64, i64) {
        let p = 16.0 * self.r();
        let (a, b) = self.window.unwrap_or((0.0, p));
        let lo = (a / p).floor() as i64;
        let hi = ((b / p).ceil() as i64).max(lo + 1);
        (lo, hi)
    }

    /// The window after snapping to whole periods.
    pub fn snapped_window(&self) -> (f64, f64) {
        let (lo, hi) = self.periods();
        ((16 * lo) as f64 * self.r(), (16 * hi) as f64 * self.r())
    }
}

/// Points of the strip with a boolean mark selecting Y.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkedNet {
    pub points: Vec<Point>,
    pub y_mask: Vec<bool>,
}

impl MarkedNet {
    pub fn new(points: Vec<Point>, y_mask: Vec<bool>) -> Result<Self> {
        if points.len() != y_mask.len() {
            return Err(Error::InvalidInput(
                "points and Y mask differ in length".into(),
            ));
        }
        Ok(MarkedNet { points, y_mask })
    }

    pub fn validate(&self, cfg: &StripConfig) -> Result<()> {
        if self.points.len() != self.y_mask.len() {
            return Err(Error::InvalidInput(
                "points and Y mask differ in length".into(),
            ));
        }
        for (i, p) in self.points.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidInput(format!("point {i} is not finite")));
            }
            if p.y < cfg.s || p.y > cfg.w - cfg.s {
                return Err(Error::HypothesisViolated(format!(
                    "point {i} at height {} outside [{}, {}]",
                    p.y,
                    cfg.s,
                    cfg.w - cfg.s
                )));
            }
        }
        Ok(())
    }
}

/// The square attached to a marked point and the detour around it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub point: Point,
    pub in_y: bool,
    /// Grid coordinates of q_x in units of r.
    pub grid: (i64, i64),
    pub q: Point,
    pub square_lo: Point,
    pub square_hi: Point,
    /// Index k of the stroke {8kr}×[0, w] crossing Q_x.
    pub stroke: i64,
    /// Segment index 4n + i of that stroke in the base zig-zag.
    pub segment: usize,
    pub a: f64,
    pub c: f64,
    pub d: f64,
    pub b: f64,
    /// Corner whose upward ray misses the base zig-zag.
    pub q_plus: Point,
    /// Diagonally opposite corner; its downward ray misses the zig-zag.
    pub q_minus: Point,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationCurve {
    pub cfg: StripConfig,
    pub curve: Polyline,
    pub anchors: Vec<Anchor>,
    /// 36K² with K = w²/4r².
    pub bound: f64,
}

/// The periodic zig-zag φ on the configured window.
pub fn base_zigzag(cfg: &StripConfig) -> Result<Polyline> {
    cfg.validate()?;
    let r = cfg.r();
    let p1 = cfg.p1();
    let w = cfg.w;
    let (lo, hi) = cfg.periods();
    let cap = (hi - lo) as u128 * 4 + 1;
    if cap > 50_000_000 {
        return Err(Error::BudgetExceeded(format!(
            "zig-zag would need {cap} vertices"
        )));
    }
    let mut ts = Vec::with_capacity(cap as usize);
    let mut vs = Vec::with_capacity(cap as usize);
    for n in lo..hi {
        let x0 = (16 * n) as f64 * r;
        let x8 = (16 * n + 8) as f64 * r;
        ts.extend([x0, x0 + p1, x8, x8 + p1]);
        vs.extend([
            Point::new(x0, 0.0),
            Point::new(x0, w),
            Point::new(x8, w),
            Point::new(x8, 0.0),
        ]);
    }
    let end = (16 * hi) as f64 * r;
    ts.push(end);
    vs.push(Point::new(end, 0.0));
    Polyline::new(ts, vs, [Point::new(1.0, 0.0), Point::new(1.0, 0.0)])
}

/// q_x minimises ‖q − x‖ over rZ² with first coordinate outside 4rZ.
/// Ties go to the lexicographically smallest grid point.
pub fn anchor_grid(x: Point, r: f64) -> (i64, i64) {
    let (i0, j0) = ((x.x / r).floor() as i64, (x.y / r).floor() as i64);
    let mut best: Option<(f64, (i64, i64))> = None;
    for i in i0 - 1..=i0 + 2 {
        if i.rem_euclid(4) == 0 {
            continue;
        }
        for j in j0 - 1..=j0 + 2 {
            let d = (i as f64 * r - x.x).powi(2) + (j as f64 * r - x.y).powi(2);
            let better = match best {
                None => true,
                Some((bd, bk)) => d < bd || (d == bd && (i, j) < bk),
            };
            if better {
                best = Some((d, (i, j)));
            }
        }
    }
    best.unwrap().1
}

/// Squared distance, in units of r², between the closed squares of
/// half-width 4 around two grid points.
fn square_gap2(a: (i64, i64), b: (i64, i64)) -> i64 {
    let dx = ((a.0 - b.0).abs() - 8).max(0);
    let dy = ((a.1 - b.1).abs() - 8).max(0);
    dx * dx + dy * dy
}

/// Grid anchors for every point, with the square-separation check.
pub fn anchor_squares(net: &MarkedNet, cfg: &StripConfig) -> Result<Vec<(i64, i64)>> {
    cfg.validate()?;
    net.validate(cfg)?;
    let r = cfg.r();
    let grid: Vec<(i64, i64)> = net.points.iter().map(|&x| anchor_grid(x, r)).collect();
    // Squares closer than 84r can only come from grid points within 100r.
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (k, g) in grid.iter().enumerate() {
        buckets
            .entry((g.0.div_euclid(100), g.1.div_euclid(100)))
            .or_default()
            .push(k);
    }
    for (k, g) in grid.iter().enumerate() {
        let (bx, by) = (g.0.div_euclid(100), g.1.div_euclid(100));
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(v) = buckets.get(&(bx + dx, by + dy)) {
                    for &l in v {
                        if l > k && square_gap2(*g, grid[l]) < 84 * 84 {
                            return Err(Error::NetNotSeparated(format!(
                                "squares of points {k} and {l} are closer than 84r"
                            )));
                        }
                    }
                }
            }
        }
    }
    for (k, g) in grid.iter().enumerate() {
        let (lo, hi) = ((g.1 - 4) as f64 * r, (g.1 + 4) as f64 * r);
        if lo < 94.0 * r - 1e-12 * cfg.w || hi > cfg.w - 94.0 * r + 1e-12 * cfg.w {
            return Err(Error::check(
                "square height",
                format!("square of point {k} spans [{lo}, {hi}]"),
            ));
        }
    }
    Ok(grid)
}

/// Stroke index k with r ≤ |q₁ − 8kr| ≤ 3r.
fn stroke_of(i: i64) -> i64 {
    let k = i.div_euclid(8);
    if i.rem_euclid(8) >= 4 {
        k + 1
    } else {
        k
    }
}

/// Whether the vertical ray from `o` in direction `up` meets the curve.
fn ray_hits(
    curve: &Polyline,
    seg_range: std::ops::Range<usize>,
    o: Point,
    up: bool,
    w: f64,
) -> bool {
    let far = if up { w + 1.0 } else { -1.0 };
    let end = Point::new(o.x, far);
    seg_range.into_iter().any(|m| {
        let s = curve.segment(m);
        exact::segments_intersect(s.a.arr(), s.b.arr(), o.arr(), end.arr())
    })
}

/// The separating curve γ for a marked net.
pub fn build_separation(net: &MarkedNet, cfg: &StripConfig) -> Result<SeparationCurve> {
    cfg.validate()?;
    let r = cfg.r();
    let mut cfg = *cfg;
    if !net.points.is_empty() {
        let xmin = net.points.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
        let xmax = net
            .points
            .iter()
            .map(|p| p.x)
            .fold(f64::NEG_INFINITY, f64::max);
        let need = (xmin - 32.0 * r, xmax + 32.0 * r);
        match cfg.window {
            None => cfg.window = Some(need),
            Some((a, b)) => {
                let snapped = cfg.snapped_window();
                if snapped.0 > need.0 || snapped.1 < need.1 {
                    return Err(Error::WindowTooSmall(format!(
                        "window [{a}, {b}] does not reach 32r beyond the net extent [{xmin}, {xmax}]"
                    )));
                }
            }
        }
    }
    let grid = anchor_squares(net, &cfg)?;
    let phi = base_zigzag(&cfg)?;
    let (n_lo, _) = cfg.periods();
    let nseg = phi.num_segments();
    let w = cfg.w;

    let mut anchors = Vec::with_capacity(grid.len());
    for (idx, (&x, &g)) in net.points.iter().zip(&grid).enumerate() {
        let k = stroke_of(g.0);
        let (n, i) = (k.div_euclid(2), if k.rem_euclid(2) == 0 { 0 } else { 2 });
        let m = (4 * (n - n_lo) + i) as usize;
        if m >= nseg {
            return Err(Error::WindowTooSmall(format!(
                "point {idx} falls outside the window"
            )));
        }
        let (pm, pn) = (phi.breakpoints[m], phi.breakpoints[m + 1]);
        let sq = |di: i64, dj: i64| Point::new((g.0 + di) as f64 * r, (g.1 + dj) as f64 * r);
        let corners = [sq(-4, -4), sq(4, -4), sq(4, 4), sq(-4, 4)];
        // Label the corners by which vertical rays miss the zig-zag.
        let near = m.saturating_sub(8)..(m + 9).min(nseg);
        let up_clear: Vec<Point> = [corners[2], corners[3]]
            .into_iter()
            .filter(|&c| !ray_hits(&phi, near.clone(), c, true, w))
            .collect();
        let down_clear: Vec<Point> = [corners[0], corners[1]]
            .into_iter()
            .filter(|&c| !ray_hits(&phi, near.clone(), c, false, w))
            .collect();
        let (q_plus, q_minus) = match (up_clear.as_slice(), down_clear.as_slice()) {
            ([p], [q]) if p.x != q.x => (*p, *q),
            _ => {
                return Err(Error::check(
                    "corner labels",
                    format!("point {idx}: no unique diagonal pair clears the zig-zag"),
                ))
            }
        };
        // Detour side: the vertical side of ∂Q_x containing q⁺ for x ∈ Y.
        let side_x = if net.y_mask[idx] { q_plus.x } else { q_minus.x };
        let xk = (8 * k) as f64 * r;
        let upward = i == 0;
        let (y_in, y_out) = if upward {
            ((g.1 - 4) as f64 * r, (g.1 + 4) as f64 * r)
        } else {
            ((g.1 + 4) as f64 * r, (g.1 - 4) as f64 * r)
        };
        let y_start = phi.vertices[m].y;
        let frac = |y: f64| (y - y_start).abs() / w;
        let a = pm + frac(y_in) * (pn - pm);
        let b = pm + frac(y_out) * (pn - pm);
        let h = (side_x - xk).abs();
        let len = 2.0 * h + 8.0 * r;
        let c = a + h / len * (b - a);
        let d = a + (h + 8.0 * r) / len * (b - a);
        if !(pm < a && a < c && c < d && d < b && b < pn) {
            return Err(Error::check(
                "detour parameters",
                format!("point {idx}: a={a} c={c} d={d} b={b}"),
            ));
        }
        anchors.push(Anchor {
            point: x,
            in_y: net.y_mask[idx],
            grid: g,
            q: sq(0, 0),
            square_lo: corners[0],
            square_hi: corners[2],
            stroke: k,
            segment: m,
            a,
            c,
            d,
            b,
            q_plus,
            q_minus,
        });
    }

    // Splice the detours into the stroke segments.
    let mut by_seg: HashMap<usize, Vec<usize>> = HashMap::new();
    for (k, an) in anchors.iter().enumerate() {
        by_seg.entry(an.segment).or_default().push(k);
    }
    let mut ts = Vec::with_capacity(phi.breakpoints.len() + 4 * anchors.len());
    let mut vs = Vec::with_capacity(ts.capacity());
    for m in 0..phi.breakpoints.len() {
        ts.push(phi.breakpoints[m]);
        vs.push(phi.vertices[m]);
        if let Some(list) = by_seg.get_mut(&m) {
            list.sort_by(|&u, &v| anchors[u].a.total_cmp(&anchors[v].a));
            for &u in list.iter() {
                let an = &anchors[u];
                let xk = (8 * an.stroke) as f64 * r;
                let upward = phi.vertices[m + 1].y > phi.vertices[m].y;
                let side_x = if an.in_y { an.q_plus.x } else { an.q_minus.x };
                let (y0, y1) = if upward {
                    (an.square_lo.y, an.square_hi.y)
                } else {
                    (an.square_hi.y, an.square_lo.y)
                };
                ts.extend([an.a, an.c, an.d, an.b]);
                vs.extend([
                    Point::new(xk, y0),
                    Point::new(side_x, y0),
                    Point::new(side_x, y1),
                    Point::new(xk, y1),
                ]);
            }
        }
    }
    let curve = Polyline::new(ts, vs, phi.tails)?;
    Ok(SeparationCurve {
        cfg,
        curve,
        anchors,
        bound: cfg.gamma_bound(),
    })
}

/// Outcome of checking the three separation properties.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    /// Largest sampled |γ₁(t) − t|, against the bound 24s/100.
    pub max_displacement: f64,
    pub displacement_ok: bool,
    /// γ₂ stays inside [0, w] at every vertex and on the tails.
    pub height_ok: bool,
    /// Smallest exact distance from a net point to the curve.
    pub min_clearance: f64,
    pub clearance_ok: bool,
    /// Indices of net points on the wrong side.
    pub misclassified: Vec<usize>,
    /// Every detour segment has speed in [1/K, 3K].
    pub detour_speed_ok: bool,
}

impl SeparationReport {
    pub fn all(&self) -> bool {
        self.displacement_ok
            && self.height_ok
            && self.clearance_ok
            && self.misclassified.is_empty()
            && self.detour_speed_ok
    }
}

/// Squared exact distance from `p` to a segment, as a float.
fn exact_dist2(p: Point, s: &Segment) -> exact::Q {
    let pq = [exact::q(p.x), exact::q(p.y)];
    let a = [exact::q(s.a.x), exact::q(s.a.y)];
    let b = [exact::q(s.b.x), exact::q(s.b.y)];
    exact::point_segment_dist2(&pq, &a, &b)
}

/// Checks the displacement, clearance and side properties of γ.
pub fn verify_separation(
    sep: &SeparationCurve,
    net: &MarkedNet,
    samples: usize,
    seed: u64,
) -> SeparationReport {
    let cfg = &sep.cfg;
    let r = cfg.r();
    let curve = &sep.curve;
    let (t0, t1) = curve.window();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut disp: f64 = 0.0;
    for &t in &curve.breakpoints {
        disp = disp.max((curve.eval(t).x - t).abs());
    }
    for _ in 0..samples {
        let t = rng.gen_range(t0 - 1.0..t1 + 1.0);
        disp = disp.max((curve.eval(t).x - t).abs());
    }
    let height_ok = curve.vertices.iter().all(|v| v.y >= 0.0 && v.y <= cfg.w)
        && curve.tails.iter().all(|t| t.y == 0.0);

    // Exact clearance over the segments that can come within 10r.
    let need = 2.0 * cfg.s / 100.0 - 1e-12;
    let need2 = exact::q(need.max(0.0)) * exact::q(need.max(0.0));
    let segs: Vec<Segment> = curve.segments().collect();
    let cell = 16.0 * r;
    let mut index: HashMap<i64, Vec<usize>> = HashMap::new();
    for (k, s) in segs.iter().enumerate() {
        let (lo, hi) = s.bbox();
        for c in (lo.x / cell).floor() as i64..=(hi.x / cell).floor() as i64 {
            index.entry(c).or_default().push(k);
        }
    }
    let mut min_clear = f64::INFINITY;
    let mut clearance_ok = true;
    for &p in &net.points {
        let c = (p.x / cell).floor() as i64;
        let mut seen = std::collections::HashSet::new();
        for cc in c - 1..=c + 1 {
            for &k in index.get(&cc).map(|v| v.as_slice()).unwrap_or(&[]) {
                if !seen.insert(k) {
                    continue;
                }
                let d2 = exact_dist2(p, &segs[k]);
                min_clear = min_clear.min(exact::to_f64(&d2).sqrt());
                if d2 < need2 {
                    clearance_ok = false;
                }
            }
        }
        // Tails run along y = 0 outside the window, at least x₂ ≥ s away.
        let first = curve.vertices[0];
        let last = *curve.vertices.last().unwrap();
        let tail_d = if p.x <= first.x { p.y } else { first.dist(p) }.min(if p.x >= last.x {
            p.y
        } else {
            last.dist(p)
        });
        min_clear = min_clear.min(tail_d);
        if tail_d < need {
            clearance_ok = false;
        }
    }

    let misclassified = net
        .points
        .iter()
        .enumerate()
        .filter(|(k, &p)| {
            let want = if net.y_mask[*k] {
                Side::Below
            } else {
                Side::Above
            };
            side_classify(curve, p) != want
        })
        .map(|(k, _)| k)
        .collect();

    let kk = cfg.k();
    let detour_speed_ok = sep.anchors.iter().all(|an| {
        let i0 = curve.breakpoints.partition_point(|&t| t < an.a);
        (i0..i0 + 3).all(|i| {
            let v = curve.velocity(i).norm();
            v >= 1.0 / kk * (1.0 - 1e-12) && v <= 3.0 * kk * (1.0 + 1e-12)
        })
    });

    SeparationReport {
        max_displacement: disp,
        displacement_ok: disp <= 24.0 * cfg.s / 100.0 * (1.0 + 1e-12),
        height_ok,
        min_clearance: min_clear,
        clearance_ok,
        misclassified,
        detour_speed_ok,
    }
}

/// Sampled bilipschitz constant of γ over its window, with pairs
/// concentrated around the detours.
pub fn sampled_bilip(sep: &SeparationCurve, n: usize, seed: u64) -> Result<BilipEstimate> {
    let (t0, t1) = sep.curve.window();
    let r = sep.cfg.r();
    let hot: Vec<f64> = sep
        .anchors
        .iter()
        .flat_map(|a| [a.a, a.c, a.d, a.b])
        .collect();
    let sampler = IntervalSampler::new(t0 - 1.0, t1 + 1.0, 16.0 * r).with_hot_spots(hot);
    let curve = &sep.curve;
    empirical_bilip(
        |t: &f64| curve.eval(*t),
        |g: &mut ChaCha8Rng| sampler.sample(g),
        n,
        seed,
    )
}

/// Dart-throwing sample of up to `n` s-separated points in R×[s, w−s]
/// with a random Y mask. The horizontal extent grows with `n` so that the
/// target count is reachable.
pub fn random_marked_net(cfg: &StripConfig, n: usize, seed: u64) -> MarkedNet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (s, w) = (cfg.s, cfg.w);
    let height = (w - 2.0 * s).max(0.0);
    let width = (4.0 * n as f64 * s * s / height.max(s)).max(s);
    let cell = s;
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut pts: Vec<Point> = Vec::new();
    let mut attempts = 0;
    while pts.len() < n && attempts < 200 * n.max(1) {
        attempts += 1;
        let p = Point::new(rng.gen_range(0.0..width), s + rng.gen_range(0.0..=height));
        let key = ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64);
        let clash = (-1..=1).any(|dx| {
            (-1..=1).any(|dy| {
                grid.get(&(key.0 + dx, key.1 + dy))
                    .is_some_and(|v| v.iter().any(|&k| pts[k].dist(p) < s))
            })
        });
        if !clash {
            grid.entry(key).or_default().push(pts.len());
            pts.push(p);
        }
    }
    let mask = (0..pts.len()).map(|_| rng.gen_bool(0.5)).collect();
    MarkedNet {
        points: pts,
        y_mask: mask,
    }
}
