//! Seeded empirical estimation of Lipschitz constants.

use super::point::{Point, PointD};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Lower estimates of Lip(f) and Lip(f⁻¹) from sampled pairs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilipEstimate {
    pub lip_up: f64,
    pub lip_down: f64,
    pub samples: usize,
    pub seed: u64,
}

impl BilipEstimate {
    pub fn bilip(&self) -> f64 {
        self.lip_up.max(self.lip_down)
    }

    /// Combines two estimates of the same map.
    pub fn merge(&self, o: &BilipEstimate) -> BilipEstimate {
        BilipEstimate {
            lip_up: self.lip_up.max(o.lip_up),
            lip_down: self.lip_down.max(o.lip_down),
            samples: self.samples + o.samples,
            seed: self.seed,
        }
    }
}

/// Types with a Euclidean distance.
pub trait Metric: Copy + Send + Sync {
    fn dist_to(&self, o: &Self) -> f64;
}

impl Metric for f64 {
    fn dist_to(&self, o: &f64) -> f64 {
        (self - o).abs()
    }
}

impl Metric for Point {
    fn dist_to(&self, o: &Point) -> f64 {
        self.dist(*o)
    }
}

impl Metric for PointD {
    fn dist_to(&self, o: &PointD) -> f64 {
        self.dist(o)
    }
}

const CHUNK: usize = 2048;

/// Estimates the bilipschitz constants of `f` on pairs drawn by `sampler`.
///
/// The estimate is deterministic in `seed`: pairs are drawn in fixed-size
/// chunks, each from its own stream, and maxima do not depend on order.
pub fn empirical_bilip<A, B, F, S>(f: F, sampler: S, n: usize, seed: u64) -> Result<BilipEstimate>
where
    A: Metric,
    B: Metric,
    F: Fn(&A) -> B + Sync,
    S: Fn(&mut ChaCha8Rng) -> (A, A) + Sync,
{
    if n < 2 {
        return Err(Error::InvalidInput("need at least two sample pairs".into()));
    }
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Result<(f64, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let count = CHUNK.min(n - k * CHUNK);
            let (mut up, mut down) = (0.0_f64, 0.0_f64);
            let mut drawn = 0;
            let mut attempts = 0;
            while drawn < count {
                attempts += 1;
                if attempts > 16 * count + 64 {
                    return Err(Error::DegenerateSample(
                        "sampler keeps returning coincident pairs".into(),
                    ));
                }
                let (x, y) = sampler(&mut rng);
                let dx = x.dist_to(&y);
                if !(dx > 0.0) {
                    continue;
                }
                let dy = f(&x).dist_to(&f(&y));
                if !(dy > 0.0) {
                    return Err(Error::DegenerateSample(format!(
                        "distinct points at distance {dx} have the same image"
                    )));
                }
                up = up.max(dy / dx);
                down = down.max(dx / dy);
                drawn += 1;
            }
            Ok((up, down))
        })
        .collect();
    let (mut up, mut down) = (0.0_f64, 0.0_f64);
    for p in parts {
        let (u, d) = p?;
        up = up.max(u);
        down = down.max(d);
    }
    Ok(BilipEstimate {
        lip_up: up,
        lip_down: down,
        samples: n,
        seed,
    })
}

/// Exhaustive constants over every pair of a finite map.
pub fn exhaustive_bilip<A: Metric, B: Metric>(pairs: &[(A, B)]) -> Result<BilipEstimate> {
    let rows: Vec<Result<(f64, f64)>> = (0..pairs.len())
        .into_par_iter()
        .map(|i| {
            let (mut up, mut down) = (0.0_f64, 0.0_f64);
            for j in i + 1..pairs.len() {
                let dx = pairs[i].0.dist_to(&pairs[j].0);
                let dy = pairs[i].1.dist_to(&pairs[j].1);
                if dx == 0.0 {
                    if dy != 0.0 {
                        return Err(Error::WellDefinedness(format!(
                            "point {i} listed twice with different images"
                        )));
                    }
                    continue;
                }
                if dy == 0.0 {
                    return Err(Error::DegenerateSample(format!(
                        "points {i} and {j} share an image"
                    )));
                }
                up = up.max(dy / dx);
                down = down.max(dx / dy);
            }
            Ok((up, down))
        })
        .collect();
    let (mut up, mut down) = (0.0_f64, 0.0_f64);
    for r in rows {
        let (u, d) = r?;
        up = up.max(u);
        down = down.max(d);
    }
    Ok(BilipEstimate {
        lip_up: up,
        lip_down: down,
        samples: pairs.len() * pairs.len().saturating_sub(1) / 2,
        seed: 0,
    })
}

/// Stratified pair sampler on an axis-aligned box in R^d.
///
/// A fraction of pairs are near pairs at distance up to `near_scale`, the
/// rest are independent uniform points. A third stratum concentrates near
/// pairs around caller-supplied hot spots such as corners and seams.
#[derive(Clone, Debug)]
pub struct BoxSampler {
    pub lo: PointD,
    pub hi: PointD,
    pub near_scale: f64,
    pub hot_spots: Vec<PointD>,
    pub hot_radius: f64,
}

impl BoxSampler {
    pub fn new(lo: PointD, hi: PointD, near_scale: f64) -> Self {
        BoxSampler {
            lo,
            hi,
            near_scale,
            hot_spots: Vec::new(),
            hot_radius: near_scale,
        }
    }

    pub fn with_hot_spots(mut self, spots: Vec<PointD>, radius: f64) -> Self {
        self.hot_spots = spots;
        self.hot_radius = radius;
        self
    }

    fn uniform(&self, rng: &mut ChaCha8Rng) -> PointD {
        let mut p = self.lo;
        for i in 0..p.dim() {
            p[i] = if self.hi[i] > self.lo[i] {
                rng.gen_range(self.lo[i]..self.hi[i])
            } else {
                self.lo[i]
            };
        }
        p
    }

    fn jitter(&self, rng: &mut ChaCha8Rng, p: PointD, scale: f64) -> PointD {
        let mut q = p;
        for i in 0..q.dim() {
            q[i] += rng.gen_range(-scale..scale);
        }
        q
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> (PointD, PointD) {
        let u: f64 = rng.gen();
        if u < 0.35 {
            let p = self.uniform(rng);
            let s = self.near_scale * rng.gen_range(1e-3..1.0_f64);
            (p, self.jitter(rng, p, s))
        } else if u < 0.6 && !self.hot_spots.is_empty() {
            let c = self.hot_spots[rng.gen_range(0..self.hot_spots.len())];
            let p = self.jitter(rng, c, self.hot_radius);
            let s = self.near_scale * rng.gen_range(1e-3..1.0_f64);
            (p, self.jitter(rng, p, s))
        } else {
            (self.uniform(rng), self.uniform(rng))
        }
    }
}

/// Stratified pair sampler on a parameter interval.
#[derive(Clone, Debug)]
pub struct IntervalSampler {
    pub lo: f64,
    pub hi: f64,
    pub near_scale: f64,
    pub hot_spots: Vec<f64>,
}

impl IntervalSampler {
    pub fn new(lo: f64, hi: f64, near_scale: f64) -> Self {
        IntervalSampler {
            lo,
            hi,
            near_scale,
            hot_spots: Vec::new(),
        }
    }

    pub fn with_hot_spots(mut self, spots: Vec<f64>) -> Self {
        self.hot_spots = spots;
        self
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> (f64, f64) {
        let u: f64 = rng.gen();
        if u < 0.35 {
            let t = rng.gen_range(self.lo..self.hi);
            (t, t + self.near_scale * rng.gen_range(-1.0..1.0_f64))
        } else if u < 0.6 && !self.hot_spots.is_empty() {
            let c = self.hot_spots[rng.gen_range(0..self.hot_spots.len())];
            let s = self.near_scale;
            (c + rng.gen_range(-s..s), c + rng.gen_range(-s..s))
        } else {
            (
                rng.gen_range(self.lo..self.hi),
                rng.gen_range(self.lo..self.hi),
            )
        }
    }
}
