//! Sufficient conditions for a piecewise-affine curve to be bilipschitz.

use super::point::Point;
use super::polyline::{ray_distance, Polyline};
use super::segment::{bbox_gap, point_segment_distance, segment_segment_distance, Segment};
use crate::error::{Error, Result};
use crate::EPS;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

/// Outcome of each certificate condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertChecks {
    pub speed: bool,
    pub separation: bool,
    pub far_pairs: bool,
    pub angle: bool,
}

impl CertChecks {
    pub fn all(&self) -> bool {
        self.speed && self.separation && self.far_pairs && self.angle
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PwAffCertificate {
    pub c: f64,
    pub alpha: f64,
    pub bound: f64,
    pub checks: CertChecks,
    /// First violated condition with a witness, if any.
    pub failure: Option<(String, String)>,
}

impl PwAffCertificate {
    pub fn valid(&self) -> bool {
        self.checks.all()
    }
}

/// Sampling budget for the far-pair condition.
#[derive(Clone, Copy, Debug)]
pub struct CertOptions {
    pub far_samples: usize,
    pub max_breakpoint_pairs: usize,
    pub seed: u64,
}

impl Default for CertOptions {
    fn default() -> Self {
        CertOptions {
            far_samples: 100_000,
            max_breakpoint_pairs: 4_000_000,
            seed: 0x5eed,
        }
    }
}

/// Cosine with the common angles snapped so that closed forms stay exact.
pub fn cos_snapped(alpha: f64) -> f64 {
    const SNAPS: [(f64, f64); 4] = [
        (PI / 2.0, 0.0),
        (PI / 3.0, 0.5),
        (2.0 * PI / 3.0, -0.5),
        (PI, -1.0),
    ];
    for (a, c) in SNAPS {
        if (alpha - a).abs() <= 4.0 * f64::EPSILON {
            return c;
        }
    }
    alpha.cos()
}

/// The bound 4C²/√(1−cos α).
pub fn pwaff_bound(c: f64, alpha: f64) -> f64 {
    4.0 * c * c / (1.0 - cos_snapped(alpha)).sqrt()
}

/// Runs every condition and records which passed.
pub fn pwaff_audit(
    curve: &Polyline,
    c: f64,
    alpha: f64,
    opts: CertOptions,
) -> Result<PwAffCertificate> {
    if !(alpha > 0.0 && alpha < PI) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if !(c >= 1.0) {
        return Err(Error::InvalidInput(format!(
            "certificate constant {c} must be ≥ 1"
        )));
    }
    let mut failure = None;
    let note = |cond: &str, w: String, failure: &mut Option<(String, String)>| {
        if failure.is_none() {
            *failure = Some((cond.to_string(), w));
        }
    };
    let speed = check_speed(curve, c)
        .map_err(|w| note("speed", w, &mut failure))
        .is_ok();
    let separation = check_separation(curve, 1.0 / c)
        .map_err(|w| note("separation", w, &mut failure))
        .is_ok();
    let far_pairs = check_far_pairs(curve, c, &opts)
        .map_err(|w| note("far_pairs", w, &mut failure))
        .is_ok();
    let angle = check_angles(curve, alpha)
        .map_err(|w| note("angle", w, &mut failure))
        .is_ok();
    Ok(PwAffCertificate {
        c,
        alpha,
        bound: pwaff_bound(c, alpha),
        checks: CertChecks {
            speed,
            separation,
            far_pairs,
            angle,
        },
        failure,
    })
}

/// Certificate that fails with the first violated condition.
pub fn pwaff_certificate(curve: &Polyline, c: f64, alpha: f64) -> Result<PwAffCertificate> {
    let cert = pwaff_audit(curve, c, alpha, CertOptions::default())?;
    match &cert.failure {
        Some((cond, w)) => Err(Error::check(cond.clone(), w.clone())),
        None => Ok(cert),
    }
}

fn check_speed(curve: &Polyline, c: f64) -> std::result::Result<(), String> {
    let (lo, hi) = (1.0 / c * (1.0 - EPS), c * (1.0 + EPS));
    let mut speeds: Vec<(String, f64)> = vec![
        ("left tail".into(), curve.tails[0].norm()),
        ("right tail".into(), curve.tails[1].norm()),
    ];
    for i in 0..curve.num_segments() {
        speeds.push((format!("segment {i}"), curve.velocity(i).norm()));
    }
    for (name, v) in speeds {
        if !(v >= lo && v <= hi) {
            return Err(format!("{name} has speed {v}"));
        }
    }
    Ok(())
}

fn check_angles(curve: &Polyline, alpha: f64) -> std::result::Result<(), String> {
    for i in 0..curve.vertices.len() {
        let a = curve.vertex_angle(i);
        if a < alpha - EPS {
            return Err(format!("vertex {i} has angle {a}"));
        }
    }
    Ok(())
}

/// Non-adjacent pieces (segments and the two tail rays) must be `gap` apart.
fn check_separation(curve: &Polyline, gap: f64) -> std::result::Result<(), String> {
    let segs: Vec<Segment> = curve.segments().collect();
    let n = segs.len();
    let tol = gap * EPS;
    // Window segments against each other through a uniform grid.
    let mean_len = segs.iter().map(|s| s.length()).sum::<f64>() / n as f64;
    let cell = gap.max(mean_len).max(1e-12);
    let key = |x: f64, y: f64| ((x / cell).floor() as i64, (y / cell).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut too_many = false;
    for (i, s) in segs.iter().enumerate() {
        let (lo, hi) = s.bbox();
        let (a, b) = (key(lo.x - gap, lo.y - gap), key(hi.x + gap, hi.y + gap));
        if ((b.0 - a.0 + 1) * (b.1 - a.1 + 1)) > 1_000_000 {
            too_many = true;
            break;
        }
        for gx in a.0..=b.0 {
            for gy in a.1..=b.1 {
                grid.entry((gx, gy)).or_default().push(i);
            }
        }
    }
    let pair_ok = |i: usize, j: usize| -> std::result::Result<(), String> {
        if bbox_gap(segs[i].bbox(), segs[j].bbox()) >= gap {
            return Ok(());
        }
        let d = segment_segment_distance(&segs[i], &segs[j]);
        if d < gap - tol {
            return Err(format!("segments {i} and {j} are {d} apart"));
        }
        Ok(())
    };
    if too_many {
        for i in 0..n {
            for j in i + 2..n {
                pair_ok(i, j)?;
            }
        }
    } else {
        let mut seen = std::collections::HashSet::new();
        let mut cells: Vec<_> = grid.into_iter().collect();
        cells.sort_by_key(|(k, _)| *k);
        for (_, idx) in cells {
            for (u, &i) in idx.iter().enumerate() {
                for &j in &idx[u + 1..] {
                    let (i, j) = (i.min(j), i.max(j));
                    if j >= i + 2 && seen.insert((i, j)) {
                        pair_ok(i, j)?;
                    }
                }
            }
        }
    }
    // Tails against window segments and against each other.
    let first = curve.vertices[0];
    let last = *curve.vertices.last().unwrap();
    let left = -curve.tails[0];
    let right = curve.tails[1];
    for (j, s) in segs.iter().enumerate() {
        if j >= 1 {
            let d = ray_segment_distance(first, left, s);
            if d < gap - tol {
                return Err(format!("left tail and segment {j} are {d} apart"));
            }
        }
        if j + 2 <= n {
            let d = ray_segment_distance(last, right, s);
            if d < gap - tol {
                return Err(format!("right tail and segment {j} are {d} apart"));
            }
        }
    }
    if n >= 1 {
        let d = ray_ray_distance(first, left, last, right);
        if d < gap - tol {
            return Err(format!("tails are {d} apart"));
        }
    }
    Ok(())
}

/// Distance between the closed ray `o + t·dir` (t ≥ 0) and a segment.
pub fn ray_segment_distance(o: Point, dir: Point, s: &Segment) -> f64 {
    let (lo, hi) = s.bbox();
    let reach = (hi - lo).norm() + (o - lo).norm() + (o - hi).norm() + 1.0;
    let far = o + dir * (reach / dir.norm().max(f64::MIN_POSITIVE));
    if Segment::new(o, far).intersects(s) {
        return 0.0;
    }
    ray_distance(s.a, o, dir)
        .min(ray_distance(s.b, o, dir))
        .min(point_segment_distance(o, s))
}

/// Distance between two closed rays.
pub fn ray_ray_distance(o1: Point, d1: Point, o2: Point, d2: Point) -> f64 {
    let den = d1.cross(d2);
    if den != 0.0 {
        let w = o2 - o1;
        let t = w.cross(d2) / den;
        let u = w.cross(d1) / den;
        if t >= 0.0 && u >= 0.0 {
            return 0.0;
        }
    }
    ray_distance(o1, o2, d2).min(ray_distance(o2, o1, d1))
}

fn check_far_pairs(
    curve: &Polyline,
    c: f64,
    opts: &CertOptions,
) -> std::result::Result<(), String> {
    let test = |t1: f64, t2: f64| -> std::result::Result<(), String> {
        let dt = (t2 - t1).abs();
        if dt < c {
            return Ok(());
        }
        let d = curve.eval(t1).dist(curve.eval(t2));
        if d < dt / c * (1.0 - EPS) {
            return Err(format!(
                "parameters {t1} and {t2}: distance {d} < {}",
                dt / c
            ));
        }
        Ok(())
    };
    let bp = &curve.breakpoints;
    let n = bp.len();
    let stride = ((n * n / 2) as f64 / opts.max_breakpoint_pairs as f64)
        .sqrt()
        .ceil()
        .max(1.0) as usize;
    for i in (0..n).step_by(stride) {
        for j in (i + 1..n).step_by(stride) {
            test(bp[i], bp[j])?;
        }
    }
    let (lo, hi) = curve.window();
    let ext = (hi - lo).max(c);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.far_samples {
        let t1 = rng.gen_range(lo - ext..hi + ext);
        let t2 = rng.gen_range(lo - ext..hi + ext);
        test(t1, t2)?;
    }
    // Deep in the tails the condition reduces to the tail speeds and the
    // divergence of the two rays, probed at growing scales.
    for k in 1..=20 {
        let s = ext * 2f64.powi(k);
        test(lo - s, hi + s)?;
        test(lo - s, lo - s + c.max(s / 2.0))?;
        test(hi + s, hi + s + c.max(s / 2.0))?;
        test(lo - s, lo)?;
        test(hi, hi + s)?;
    }
    Ok(())
}
