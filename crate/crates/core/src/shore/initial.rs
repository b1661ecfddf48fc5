//! A bilipschitz curve ξ close to a Lipschitz curve γ whose restriction to
//! Z is bilipschitz, built from greedy chords of length p(L) = 8L³.

use crate::error::{Error, Result};
use crate::geom::{
    empirical_bilip, exhaustive_bilip, point_segment_distance, BilipEstimate, IntervalSampler,
    Point, Polyline, Segment,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// γ given by its values on a window of consecutive integers, affine in
/// between and with affine tails.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShoreInput {
    pub gamma: Polyline,
    pub l: f64,
}

const SLACK: f64 = 1.0 + 1e-12;

impl ShoreInput {
    pub fn new(gamma: Polyline, l: f64) -> Result<Self> {
        let s = ShoreInput { gamma, l };
        s.validate()?;
        Ok(s)
    }

    /// The input with L taken as the measured constant of the curve.
    pub fn measured(gamma: Polyline) -> Result<Self> {
        check_integer_knots(&gamma)?;
        let l = lattice_curve_constant(&gamma)?;
        ShoreInput::new(gamma, l)
    }

    pub fn validate(&self) -> Result<()> {
        self.gamma.validate()?;
        check_integer_knots(&self.gamma)?;
        if !(self.l >= 1.0 && self.l.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "L = {} must be at least 1",
                self.l
            )));
        }
        let c = lattice_curve_constant(&self.gamma)?;
        if c > self.l * SLACK {
            return Err(Error::HypothesisViolated(format!(
                "γ has constant {c} on the window, above L = {}",
                self.l
            )));
        }
        Ok(())
    }

    /// p(L) = 8L³.
    pub fn p(&self) -> f64 {
        8.0 * self.l.powi(3)
    }

    /// Parameter distance 2L·p(L) beyond which chords exceed p(L).
    pub fn reach(&self) -> f64 {
        2.0 * self.l * self.p()
    }
}

fn check_integer_knots(g: &Polyline) -> Result<()> {
    let b0 = g.breakpoints[0];
    let ok = b0.fract() == 0.0
        && g.breakpoints
            .iter()
            .enumerate()
            .all(|(i, b)| *b == b0 + i as f64);
    if !ok {
        return Err(Error::InvalidInput(
            "curve breakpoints must be consecutive integers".into(),
        ));
    }
    Ok(())
}

/// max{Lip(γ), Lip(γ|_Z), Lip((γ|_Z)⁻¹)} on the window, with the tail
/// speeds included. For a curve affine between integers, Lip(γ) is the
/// largest segment or tail speed.
pub fn lattice_curve_constant(g: &Polyline) -> Result<f64> {
    let pairs: Vec<(f64, Point)> = g
        .breakpoints
        .iter()
        .copied()
        .zip(g.vertices.iter().copied())
        .collect();
    let est = exhaustive_bilip(&pairs)?;
    Ok(est
        .lip_up
        .max(est.lip_down)
        .max(g.tails[0].norm())
        .max(g.tails[1].norm())
        .max(1.0))
}

/// ξ together with its greedy parameters (b_i).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShoreCurve {
    pub xi: Polyline,
    pub b_points: Vec<f64>,
    /// p(L) = 8L³.
    pub pl: f64,
    /// Position of b₀ in `b_points`.
    pub origin: usize,
}

impl ShoreCurve {
    /// ‖γ − ξ‖ ≤ 16L⁵.
    pub fn deviation_bound(l: f64) -> f64 {
        16.0 * l.powi(5)
    }

    /// bilip(ξ) ≤ 2²³L¹².
    pub fn bilip_bound(l: f64) -> f64 {
        2f64.powi(23) * l.powi(12)
    }
}

/// Solutions s ∈ R of ‖a + s·v − c‖ = p, as (s₋, s₊).
fn circle_params(a: Point, v: Point, c: Point, p: f64) -> Option<(f64, f64)> {
    let w = a - c;
    let vv = v.norm2();
    if vv == 0.0 {
        return None;
    }
    let half_b = w.dot(v);
    let cc = w.norm2() - p * p;
    let disc = half_b * half_b - vv * cc;
    if disc < 0.0 {
        return None;
    }
    // Stable roots: q carries the sign of −half_b.
    let q = -(half_b + half_b.signum() * disc.sqrt());
    let (r1, r2) = if q == 0.0 {
        let r = disc.sqrt() / vv;
        (-r, r)
    } else {
        (q / vv, cc / q)
    };
    Some((r1.min(r2), r1.max(r2)))
}

struct Greedy<'a> {
    g: &'a Polyline,
    p: f64,
    reach: f64,
    lo: i64,
    hi: i64,
}

impl Greedy<'_> {
    fn seg(&self, j: i64) -> (Point, Point) {
        let i = (j - self.lo) as usize;
        (
            self.g.vertices[i],
            self.g.vertices[i + 1] - self.g.vertices[i],
        )
    }

    /// sup{t : ‖γ(t) − γ(from)‖ ≤ p}, or None when the window ends before
    /// the search range does.
    fn last_exit(&self, from: f64) -> Option<f64> {
        if from + self.reach > self.hi as f64 {
            return None;
        }
        let c = self.g.eval(from);
        let top = ((from + self.reach).floor() as i64).min(self.hi - 1);
        let bottom = (from.floor() as i64).max(self.lo);
        for j in (bottom..=top).rev() {
            let (a, v) = self.seg(j);
            if let Some((s0, s1)) = circle_params(a, v, c, self.p) {
                if s1 >= 0.0 && s0 <= 1.0 {
                    return Some(j as f64 + s1.min(1.0));
                }
            }
        }
        None
    }

    /// inf{t : ‖γ(t) − γ(from)‖ ≤ p}, or None when the window ends first.
    fn first_entry(&self, from: f64) -> Option<f64> {
        if from - self.reach < self.lo as f64 {
            return None;
        }
        let c = self.g.eval(from);
        let bottom = ((from - self.reach).floor() as i64).max(self.lo);
        let top = (from.floor() as i64).min(self.hi - 1);
        for j in bottom..=top {
            let (a, v) = self.seg(j);
            if let Some((s0, s1)) = circle_params(a, v, c, self.p) {
                if s1 >= 0.0 && s0 <= 1.0 {
                    return Some(j as f64 + s0.max(0.0));
                }
            }
        }
        None
    }

    /// b₀ = min{t ≤ 0 : dist(γ(t), γ([0, ∞))) ≤ p}: the first integer
    /// segment within p of some segment of γ([0, ∞)), then bisection on
    /// each convex distance function.
    fn b0(&self) -> Result<f64> {
        let start = ((-self.reach).floor() as i64).max(self.lo);
        for k in start..0 {
            let (a, v) = self.seg(k);
            let sk = Segment::new(a, a + v);
            let last = ((k + 1) as f64 + self.reach).ceil() as i64;
            let mut best: Option<f64> = None;
            for j in 0..last.min(self.hi) {
                let (c, w) = self.seg(j);
                let sj = Segment::new(c, c + w);
                if crate::geom::segment_segment_distance(&sk, &sj) > self.p {
                    continue;
                }
                if let Some(t) = leftmost_within(a, v, &sj, self.p) {
                    let t = k as f64 + t;
                    best = Some(best.map_or(t, |b: f64| b.min(t)));
                }
            }
            if let Some(t) = best {
                return Ok(t);
            }
        }
        Err(Error::check(
            "b₀ search",
            "no parameter in [−2Lp, 0] is within p of γ([0, ∞))",
        ))
    }
}

/// Smallest s ∈ [0, 1] with dist(a + s·v, seg) ≤ p. The distance is convex
/// in s, so a ternary search finds its minimiser and bisection the crossing.
fn leftmost_within(a: Point, v: Point, seg: &Segment, p: f64) -> Option<f64> {
    let h = |s: f64| point_segment_distance(a + v * s, seg);
    if h(0.0) <= p {
        return Some(0.0);
    }
    let (mut l, mut r) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let m1 = l + (r - l) / 3.0;
        let m2 = r - (r - l) / 3.0;
        if h(m1) <= h(m2) {
            r = m2;
        } else {
            l = m1;
        }
    }
    let smin = 0.5 * (l + r);
    if h(smin) > p {
        return None;
    }
    let (mut out, mut inn) = (0.0_f64, smin);
    for _ in 0..200 {
        let m = 0.5 * (out + inn);
        if m <= out || m >= inn {
            break;
        }
        if h(m) <= p {
            inn = m;
        } else {
            out = m;
        }
    }
    Some(inn)
}

/// ξ with ξ(b_i) = γ(b_i), affine between consecutive b_i.
pub fn initial_shore(input: &ShoreInput) -> Result<ShoreCurve> {
    input.validate()?;
    let g = &input.gamma;
    let (lo, hi) = g.window();
    let (lo, hi) = (lo as i64, hi as i64);
    let reach = input.reach();
    if (lo as f64) > -reach || (hi as f64) < reach {
        return Err(Error::WindowTooSmall(format!(
            "window [{lo}, {hi}] must contain [−2Lp, 2Lp] = [−{reach}, {reach}]"
        )));
    }
    let gr = Greedy {
        g,
        p: input.p(),
        reach,
        lo,
        hi,
    };
    let b0 = gr.b0()?;
    let mut right = vec![b0];
    while let Some(t) = gr.last_exit(*right.last().unwrap()) {
        let prev = *right.last().unwrap();
        if !(t > prev) {
            return Err(Error::check(
                "greedy chords advance",
                format!("b = {t} after {prev}"),
            ));
        }
        right.push(t);
    }
    let mut left = Vec::new();
    let mut cur = b0;
    while let Some(t) = gr.first_entry(cur) {
        if !(t < cur) {
            return Err(Error::check(
                "greedy chords advance",
                format!("b = {t} before {cur}"),
            ));
        }
        left.push(t);
        cur = t;
    }
    if right.len() < 2 {
        return Err(Error::WindowTooSmall(
            "the greedy sequence cannot advance past b₀".into(),
        ));
    }
    let origin = left.len();
    left.reverse();
    let mut b = left;
    b.extend(right);
    let verts: Vec<Point> = b.iter().map(|t| g.eval(*t)).collect();
    let xi = Polyline::with_extended_tails(b.clone(), verts)?;
    Ok(ShoreCurve {
        xi,
        b_points: b,
        pl: input.p(),
        origin,
    })
}

/// Results of the shore checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShoreReport {
    /// max |‖ξ(b_i) − ξ(b_{i−1})‖ − p(L)|.
    pub chord_error: f64,
    /// min and max of b_i − b_{i−1}, against p/L and 2Lp.
    pub step_range: (f64, f64),
    pub steps_ok: bool,
    /// min ‖γ(b_i) − γ(b_j)‖ over |i − j| ≥ 2; must exceed p.
    pub nonadjacent_min: f64,
    /// max ‖γ − ξ‖ on [b_first, b_last], exact for the two affine-between-
    /// breakpoints curves.
    pub deviation: f64,
    pub deviation_bound: f64,
    pub bilip: BilipEstimate,
    pub bilip_bound: f64,
    /// Smallest ratio ‖γ(x) − γ(y)‖·2L/|x − y| over sampled |x − y| ≥ 4L².
    pub coarse_ratio: f64,
}

impl ShoreReport {
    pub fn pass(&self, tol: f64) -> bool {
        self.chord_error <= tol
            && self.steps_ok
            && self.nonadjacent_min > 0.0
            && self.deviation <= self.deviation_bound
            && self.bilip.bilip() <= self.bilip_bound
            && self.coarse_ratio >= 1.0 - 1e-12
    }
}

pub fn check_shore(
    input: &ShoreInput,
    shore: &ShoreCurve,
    samples: usize,
    seed: u64,
) -> Result<ShoreReport> {
    let (l, p) = (input.l, shore.pl);
    let g = &input.gamma;
    let b = &shore.b_points;
    let chord_error = b
        .windows(2)
        .map(|w| (shore.xi.eval(w[1]).dist(shore.xi.eval(w[0])) - p).abs())
        .fold(0.0, f64::max);
    let steps: Vec<f64> = b.windows(2).map(|w| w[1] - w[0]).collect();
    let smin = steps.iter().copied().fold(f64::INFINITY, f64::min);
    let smax = steps.iter().copied().fold(0.0, f64::max);
    let steps_ok = smin >= p / l * (1.0 - 1e-12) && smax <= 2.0 * l * p * SLACK;
    let pts: Vec<Point> = b.iter().map(|t| g.eval(*t)).collect();
    let mut nonadj = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 2..pts.len() {
            nonadj = nonadj.min(pts[i].dist(pts[j]));
        }
    }
    let nonadjacent_min = if nonadj.is_finite() {
        nonadj - p
    } else {
        f64::INFINITY
    };
    let (b_lo, b_hi) = (b[0], *b.last().unwrap());
    let mut ts: Vec<f64> = g
        .breakpoints
        .iter()
        .copied()
        .filter(|t| *t > b_lo && *t < b_hi)
        .collect();
    ts.extend(b.iter().copied());
    let deviation = ts
        .iter()
        .map(|t| g.eval(*t).dist(shore.xi.eval(*t)))
        .fold(0.0, f64::max);
    let sampler = IntervalSampler::new(b_lo, b_hi, p / l).with_hot_spots(b.clone());
    let xi = &shore.xi;
    let bilip = empirical_bilip(|t: &f64| xi.eval(*t), |r| sampler.sample(r), samples, seed)?;
    let (w_lo, w_hi) = g.window();
    let gap = 4.0 * l * l;
    let mut coarse_ratio = f64::INFINITY;
    if w_hi - w_lo > gap {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for _ in 0..samples {
            let x = rng.gen_range(w_lo..w_hi - gap);
            let y = rng.gen_range(x + gap..=w_hi);
            coarse_ratio = coarse_ratio.min(g.eval(x).dist(g.eval(y)) * 2.0 * l / (y - x));
        }
    }
    Ok(ShoreReport {
        chord_error,
        step_range: (smin, smax),
        steps_ok,
        nonadjacent_min,
        deviation,
        deviation_bound: ShoreCurve::deviation_bound(l),
        bilip,
        bilip_bound: ShoreCurve::bilip_bound(l),
        coarse_ratio,
    })
}

/// A random curve through steps of length in [0.85, 1.15] whose heading
/// wanders by at most `turn` per step and stays within `spread` of a random
/// base heading. Breakpoints are −half..=half with γ(0) = 0.
pub fn random_lattice_curve(half: i64, turn: f64, spread: f64, seed: u64) -> Polyline {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let walk = |rng: &mut ChaCha8Rng| {
        let mut phi = 0.0_f64;
        let mut pos = Point::new(0.0, 0.0);
        let mut out = Vec::with_capacity(half as usize);
        for _ in 0..half {
            phi = (phi + rng.gen_range(-turn..=turn)).clamp(-spread, spread);
            let len: f64 = rng.gen_range(0.85..1.15);
            pos = pos + Point::new(1.0, 0.0).rotate(base + phi) * len;
            out.push(pos);
        }
        out
    };
    let fwd = walk(&mut rng);
    let back: Vec<Point> = walk(&mut rng).into_iter().map(|p| -p).collect();
    let mut verts: Vec<Point> = back.into_iter().rev().collect();
    verts.push(Point::new(0.0, 0.0));
    verts.extend(fwd);
    let bps: Vec<f64> = (-half..=half).map(|t| t as f64).collect();
    Polyline::with_extended_tails(bps, verts).expect("at least two vertices")
}
