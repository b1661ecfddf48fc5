//! The extension of a lattice map through lines, bands and unit strips, and
//! its reduction from separated nets.

use super::fill::{iterate_fill, Band, Fill, FillParams};
use super::thread::ThreadMode;
use super::StageReport;
use crate::error::{Error, Result};
use crate::geom::{empirical_bilip, BoxSampler, LatticeMap, Point, PointD};
use crate::planemap::{Bound, PlaneMap};
use crate::rounding::{extend_from_subnet, net_to_lattice, net_to_lattice_smallest, LatticeExtension, LatticeRounding, SeparatedNet, SubnetMap};
use crate::shore::{lattice_curve_constant, line_window, strips_extension, strips_spacing_log2, LineConstants, LineParams, SeparationMode, ShearOracle, Strips};
use crate::strip_ext::{grid_injective, CoonsOracle, GridInjectivity};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// G = 38L⁶, T from J(L), zig-zag separations and tile-shuffle threads.
    Paper,
    /// G = 1, T = 3, graph separations and direct axis swaps. The stated
    /// constants do not apply to this profile.
    Desk,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtendParams {
    pub profile: Profile,
    /// The constant P of the normalisation bound.
    pub p: f64,
    /// Spacing of the injectivity grid.
    pub grid_step: f64,
    /// Points sampled for the F⁻¹∘F check.
    pub round_trip: usize,
    /// Pairs sampled for the empirical constant of F.
    pub samples: usize,
    /// Pairs sampled per unit strip for the thread constants.
    pub thread_samples: usize,
    pub seed: u64,
    /// Allowed lattice deviation and round-trip error.
    pub tolerance: f64,
    /// Transposition cap of the full-constant thread.
    pub max_program: u64,
}

impl ExtendParams {
    pub fn new(profile: Profile) -> Self {
        ExtendParams {
            profile,
            p: 1.0,
            grid_step: 0.125,
            round_trip: 10_000,
            samples: 20_000,
            thread_samples: 1_000,
            seed: 0,
            tolerance: 1e-6,
            max_program: u64::MAX,
        }
    }
}

/// F on the strip between the outermost lines, with the checks on the
/// original window.
#[derive(Clone, Debug)]
pub struct Extension {
    pub profile: Profile,
    pub l: f64,
    /// The original lattice window.
    pub x: (i64, i64),
    pub y: (i64, i64),
    /// Rows added on each side so that every line has its shore rows.
    pub extra_rows: i64,
    pub strips: Strips,
    pub fills: Vec<Fill>,
    pub map: PlaneMap,
    pub lattice_error: f64,
    pub injectivity: GridInjectivity,
    pub round_trip_error: f64,
    pub empirical: f64,
    pub report: Vec<StageReport>,
}

impl Extension {
    pub fn pass(&self) -> bool {
        self.report.iter().all(|r| r.pass)
    }
}

fn millis(t: Instant) -> u128 {
    t.elapsed().as_millis()
}

/// Evaluates F and maps points outside its domain to NaN, which makes the
/// bilipschitz sampler reject them loudly.
fn eval_or_nan(map: &PlaneMap, p: &PointD) -> PointD {
    map.evaluate(p).unwrap_or(PointD::xy(f64::NAN, f64::NAN))
}

fn sampled_bilip(stage: &str, map: &PlaneMap, lo: Point, hi: Point, n: usize, seed: u64) -> Result<f64> {
    // Jittered partners stay inside [lo, hi] when the box is shrunk by the
    // jitter scale.
    let near = 0.25;
    let lo = PointD::xy(lo.x + near, lo.y + near);
    let hi = PointD::xy(hi.x - near, hi.y - near);
    let sampler = BoxSampler::new(lo, hi, near);
    let est = empirical_bilip(|p: &PointD| eval_or_nan(map, p), |r| sampler.sample(r), n, seed).map_err(|e| match e {
        Error::DegenerateSample(m) => Error::DegenerateSample(format!("{stage}: {m}")),
        e => e,
    })?;
    Ok(est.bilip())
}

/// Index of the first line level Tp − ½ below y₀ and the number of levels
/// up to the first one above y₁.
fn line_levels(y: (i64, i64), t: i64) -> (i64, usize) {
    let lo = y.0.div_euclid(t);
    let hi = (y.1 + 1 + t - 1).div_euclid(t);
    (lo, (hi - lo + 1) as usize)
}

pub fn main_extend(f: &LatticeMap, params: &ExtendParams) -> Result<Extension> {
    let start = Instant::now();
    if f.width() < 2 || f.height() < 2 {
        return Err(Error::WindowTooSmall(format!(
            "a {}×{} lattice window",
            f.width(),
            f.height()
        )));
    }
    let measured = f.bilip()?.bilip();
    let l = measured.max(1.0) * (1.0 + 1e-9);
    let (mut line_params, t, thread) = match params.profile {
        Profile::Desk => (LineParams::desk(l), 3, ThreadMode::Desk),
        Profile::Paper => {
            let lp = LineParams::paper(l);
            let c = LineConstants::new(l, lp.g, params.p);
            let t_log2 = strips_spacing_log2(c.j, l);
            let rows = (f.y.1 - f.y.0) as f64;
            if !(t_log2 < 62.0) || 2.0 * lp.g as f64 + t_log2.exp2() > rows {
                return Err(Error::WindowTooSmall(format!(
                    "strip spacing T = 2^{t_log2:.1} and shore offset G = {} need more than the {} rows of the window",
                    lp.g,
                    f.height()
                )));
            }
            let t = t_log2.exp2().ceil() as i64;
            (
                lp,
                t,
                ThreadMode::Paper {
                    max_program: params.max_program,
                },
            )
        }
    };
    line_params.p = params.p;
    let mut report = vec![StageReport::new("lattice", l.log2(), measured, false, millis(start))];

    let (p0, count) = line_levels(f.y, t);
    let k0 = t * p0 - 1;
    let k1 = k0 + t * (count as i64 - 1);
    let g = line_params.g;
    let extra_rows = (f.y.0 - (k0 - g)).max(k1 + g - f.y.1).max(0);
    let fe = if extra_rows > 0 {
        f.extrapolate_rows(extra_rows)?
    } else {
        f.clone()
    };

    let l = data_constant(&fe, l, line_params.vertex_budget)?;
    line_params.l = l;
    report[0] = StageReport::new("lattice", l.log2(), measured, false, millis(start));

    let clock = Instant::now();
    let lines = ShearOracle::default();
    let squares = CoonsOracle::default();
    let strips = strips_extension(&fe, &line_params, t, k0, count, &lines, &squares)?;
    let ms = millis(clock);
    for h in &strips.lines {
        let mut r = StageReport::new(&format!("line {}", h.k as f64 + 0.5), h.constants.j.log2, h.report.bilip, true, ms);
        r.pass &= h.report.pass(&h.constants);
        report.push(r);
    }
    report.push(StageReport::check("strips well-separating", strips.well_separating.pass(), ms));

    let fill_params = FillParams {
        window: line_window(&fe, line_params.margin),
        separation: match params.profile {
            Profile::Desk => line_params.separation,
            Profile::Paper => SeparationMode::Zigzag { s: None },
        },
        sample_step: line_params.sample_step,
        p: params.p,
        thread,
        thread_l: 24,
        vertex_budget: line_params.vertex_budget,
    };
    let clock = Instant::now();
    let fills: Vec<Fill> = strips
        .lines
        .par_windows(2)
        .map(|w| {
            let band = Band {
                rows: (w[0].k + 1, w[1].k),
                bottom: &w[0].line,
                top: &w[1].line,
            };
            let j = w[0].constants.j.log2.max(w[1].constants.j.log2);
            iterate_fill(&fe, &band, j, &fill_params, &lines, &squares)
        })
        .collect::<Result<_>>()?;
    let ms = millis(clock);
    let pieces: Vec<_> = fills.iter().flat_map(|b| b.pieces.iter().cloned()).collect();
    let bound = fills.iter().map(|b| b.bound).fold(Bound::ONE, Bound::max);
    let map = PlaneMap::RegionGlue {
        dim: 2,
        pieces,
        bound,
    };

    let seeds: Vec<u64> = (0..fills.len() as u64).map(|i| params.seed.wrapping_add(1 + i)).collect();
    let band_reports: Vec<Vec<StageReport>> = fills
        .par_iter()
        .zip(&seeds)
        .map(|(b, seed)| band_reports(b, params, *seed, ms))
        .collect::<Result<_>>()?;
    report.extend(band_reports.into_iter().flatten());

    let lo = Point::new(f.x.0 as f64, f.y.0 as f64);
    let hi = Point::new(f.x.1 as f64, f.y.1 as f64);
    let clock = Instant::now();
    let lattice_error = f
        .points()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|((i, j), p)| Ok(map.evaluate(&PointD::xy(*i as f64, *j as f64))?.to2().dist(*p)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    report.push(StageReport::new("lattice agreement", params.tolerance.log2(), lattice_error, false, millis(clock)));

    let clock = Instant::now();
    let nx = ((hi.x - lo.x) / params.grid_step).round().max(1.0) as usize;
    let ny = ((hi.y - lo.y) / params.grid_step).round().max(1.0) as usize;
    let injectivity = grid_injective(&map, lo, hi, nx, ny)?;
    report.push(StageReport::check("grid injectivity", injectivity.ok, millis(clock)));

    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let zs: Vec<PointD> = (0..params.round_trip)
        .map(|_| PointD::xy(rng.gen_range(lo.x..=hi.x), rng.gen_range(lo.y..=hi.y)))
        .collect();
    let round_trip_error = zs
        .par_iter()
        .map(|z| Ok(map.inverse_evaluate(&map.evaluate(z)?)?.dist(z)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    report.push(StageReport::new("round trip", params.tolerance.log2(), round_trip_error, false, millis(clock)));

    let clock = Instant::now();
    let empirical = sampled_bilip("extension", &map, lo, hi, params.samples, params.seed)?;
    let paper = fills.iter().map(|b| b.paper_log2).fold(f64::NEG_INFINITY, f64::max);
    report.push(StageReport::new("extension", paper, empirical, true, millis(clock)));
    report.push(StageReport::check("total", true, millis(start)));

    Ok(Extension {
        profile: params.profile,
        l,
        x: f.x,
        y: f.y,
        extra_rows,
        strips,
        fills,
        map,
        lattice_error,
        injectivity,
        round_trip_error,
        empirical,
        report,
    })
}

/// The constant of f on all lattice points, its extrapolated rows, and the
/// row curves with the affine tails out to 16L⁴, raised until it covers
/// its own reach.
fn data_constant(fe: &LatticeMap, l: f64, budget: usize) -> Result<f64> {
    let mut l = l.max(fe.bilip()?.bilip() * (1.0 + 1e-9));
    for _ in 0..8 {
        let reach = 16.0 * l.powi(4);
        if 2.0 * reach > budget as f64 {
            return Err(Error::BudgetExceeded(format!(
                "row curves reaching 16L⁴ = {reach:.3e} columns exceed the vertex budget {budget}"
            )));
        }
        let r = reach.ceil() as i64 + 1;
        let knots = (fe.x.0.min(-r), fe.x.1.max(r));
        let rows: Vec<i64> = (fe.y.0..=fe.y.1).collect();
        let c = rows
            .par_iter()
            .map(|&j| lattice_curve_constant(&fe.row_curve(j, knots)?))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(1.0, f64::max);
        if c <= l {
            return Ok(l);
        }
        l = c * (1.0 + 1e-9);
    }
    Err(Error::HypothesisViolated(format!("the row curves of f have constants that keep growing past {l}")))
}

fn band_reports(b: &Fill, params: &ExtendParams, seed: u64, ms: u128) -> Result<Vec<StageReport>> {
    let name = format!("band {}..{}", b.rows.0, b.rows.1);
    let mut out = Vec::new();
    for s in &b.sliced.splits {
        out.push(StageReport::new(&format!("{name} split {}", s.level), s.alpha_log2, s.bilip, true, ms));
    }
    out.push(StageReport::check(&format!("{name} well-separating"), b.sliced.well_separating.pass(), ms));
    let (w0, w1) = b.window;
    for (k, s) in b.strips.iter().enumerate() {
        let clock = Instant::now();
        let lo = Point::new(w0, -1.0);
        let hi = Point::new(w1, 1.0);
        let theta = sampled_bilip(&format!("{name} thread {}", s.row), &s.thread.map, lo, hi, params.thread_samples, seed.wrapping_mul(31).wrapping_add(k as u64))?;
        let mut r = StageReport::new(&format!("{name} thread {}", s.row), s.thread.paper_log2, theta, false, millis(clock));
        r.pass &= s.lattice_error <= params.tolerance && s.line_error <= params.tolerance;
        out.push(r);
    }
    let clock = Instant::now();
    let lo = Point::new(w0, b.rows.0 as f64 - 0.5);
    let hi = Point::new(w1, b.rows.1 as f64 + 0.5);
    let emp = sampled_bilip(&format!("{name} fill"), &b.map(), lo, hi, params.thread_samples, seed)?;
    out.push(StageReport::new(&format!("{name} fill"), b.paper_log2, emp, true, millis(clock)));
    Ok(out)
}

/// G∘Φ with Φ the rounding of the net to Z² and G the extension of the
/// lattice map Φ(a) ↦ f(a) completed off Φ(A). The desk profile rounds at
/// the smallest integer scale that keeps the swaps disjoint.
#[derive(Clone, Debug)]
pub struct NetExtension {
    pub rounding: LatticeRounding,
    pub lambda: f64,
    pub subnet: SubnetMap,
    pub lattice: LatticeExtension,
    pub extension: Extension,
    pub map: PlaneMap,
    /// max ‖G∘Φ(a) − f(a)‖ over the net.
    pub net_error: f64,
}

pub fn sep_net_extend(net: &SeparatedNet, images: &[Point], params: &ExtendParams) -> Result<NetExtension> {
    if net.d != 2 || images.len() != net.points.len() {
        return Err(Error::InvalidInput(format!(
            "{} images for {} points in dimension {}",
            images.len(),
            net.points.len(),
            net.d
        )));
    }
    let big_r = net
        .big_r
        .ok_or_else(|| Error::InvalidInput("the net radius R is required".into()))?;
    let rounding = match params.profile {
        Profile::Paper => net_to_lattice(net)?,
        Profile::Desk => net_to_lattice_smallest(net)?,
    };
    // Φ(A) is a (cR + √d/2)-net: scaling by c and moving each point by at
    // most √d/2.
    let lambda = (rounding.scale * big_r + 0.5 * (net.d as f64).sqrt()).max(1.0);
    let sites = &rounding.images;
    let window: Vec<(i64, i64)> = (0..2)
        .map(|a| {
            let lo = sites.iter().map(|s| s[a]).min().unwrap_or(0);
            let hi = sites.iter().map(|s| s[a]).max().unwrap_or(0);
            (lo, hi)
        })
        .collect();
    let subnet = SubnetMap {
        d: 2,
        window: window.clone(),
        domain: sites.clone(),
        images: images.iter().map(|p| PointD::from(*p)).collect(),
    };
    let pairs: Vec<(Point, Point)> = sites
        .iter()
        .zip(images)
        .map(|(s, v)| (Point::new(s[0] as f64, s[1] as f64), *v))
        .collect();
    let l = crate::geom::exhaustive_bilip(&pairs)?.bilip().max(1.0) * (1.0 + 1e-9);
    let lattice = extend_from_subnet(&subnet, lambda, l)?;
    let at: HashMap<(i64, i64), Point> = lattice
        .points
        .iter()
        .zip(&lattice.images)
        .map(|(s, v)| ((s[0], s[1]), v.to2()))
        .collect();
    let g = LatticeMap::from_fn(window[0], window[1], |i, j| at[&(i, j)]);
    let extension = main_extend(&g, params)?;
    let map = PlaneMap::compose(vec![extension.map.clone(), rounding.map.clone()]);
    let net_error = net
        .points
        .par_iter()
        .zip(images)
        .map(|(a, v)| Ok(map.evaluate(a)?.to2().dist(*v)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(NetExtension {
        rounding,
        lambda,
        subnet,
        lattice,
        extension,
        map,
        net_error,
    })
}
