//! One module per subcommand, with the helpers they share.

pub mod extend;
pub mod permdecomp;
pub mod roundnet;
pub mod separate;
pub mod shoreline;
pub mod stripext;
pub mod thread;
pub mod verify;

use crate::error::CliError;
use crate::io;
use crate::svg::{self, Scene};
use bilip_core::geom::{empirical_bilip, BilipEstimate, BoxSampler, Point, PointD};
use bilip_core::planemap::PlaneMap;
use std::path::Path;

/// Result of a completed run.
pub struct Outcome {
    pub pass: bool,
    pub summary: String,
}

/// F(p), or NaN when p is outside the domain so that the sampler rejects
/// the pair loudly.
pub fn eval_or_nan(map: &PlaneMap, p: &PointD) -> PointD {
    map.evaluate(p).unwrap_or_else(|_| PointD::new(&vec![f64::NAN; p.dim()]))
}

/// Empirical bilipschitz constant of `map` on pairs from the box
/// [lo, hi], with partners jittered by `near`. The box is shrunk by `near`
/// first so that partners stay inside it.
pub fn box_bilip(map: &PlaneMap, lo: PointD, hi: PointD, near: f64, n: usize, seed: u64) -> Result<BilipEstimate, CliError> {
    let mut a = lo;
    let mut b = hi;
    for i in 0..lo.dim() {
        if hi[i] - lo[i] > 2.0 * near {
            a[i] += near;
            b[i] -= near;
        }
    }
    let sampler = BoxSampler::new(a, b, near);
    Ok(empirical_bilip(|p: &PointD| eval_or_nan(map, p), |r| sampler.sample(r), n, seed)?)
}

/// Writes panels to `path` when one was asked for.
pub fn write_svg(path: Option<&Path>, panels: &[Scene]) -> Result<(), CliError> {
    match path {
        Some(p) => io::write_atomic(p, svg::render(panels).as_bytes()),
        None => Ok(()),
    }
}

/// Samples of the segment from `a` to `b` in world coordinates.
pub fn segment_samples(a: Point, b: Point, n: usize) -> Vec<Point> {
    (0..=n).map(|i| a + (b - a) * (i as f64 / n as f64)).collect()
}

/// The image of a sampled polyline, split where the map is undefined.
pub fn image_runs(map: &PlaneMap, pts: &[Point]) -> Vec<Vec<Point>> {
    let mut runs = vec![Vec::new()];
    for p in pts {
        match map.evaluate(&PointD::from(*p)) {
            Ok(q) => runs.last_mut().unwrap().push(q.to2()),
            Err(_) => {
                if !runs.last().unwrap().is_empty() {
                    runs.push(Vec::new());
                }
            }
        }
    }
    runs.retain(|r| r.len() >= 2);
    runs
}

pub(crate) fn check_positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Input(format!("{name} = {v} must be positive and finite")))
    }
}
