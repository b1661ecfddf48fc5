//! Filling a band between two line images: adding the lines between its
//! rows one at a time, then extending over each unit strip by normalising
//! its two lines and threading its lattice row.

use super::thread::{thread_extend, thread_paper_log2, Thread, ThreadInput, ThreadMode};
use crate::error::{Error, Result};
use crate::geom::{exhaustive_bilip, LatticeMap, Point, PointD, Polyline};
use crate::planemap::{Affine, Bound, GluedPiece, PlaneMap, Region};
use crate::separation::{build_separation, monotone_separation, MarkedNet, SeparationCurve, StripConfig};
use crate::shore::{check_well_separating, LineExtensionOracle, SeparationMode, WellSeparating};
use crate::strip_ext::{normalise, NormaliseConfig, Normalised, SquareExtensionOracle, StripBoundary};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FillParams {
    /// Parameter window shared by all lines.
    pub window: (f64, f64),
    pub separation: SeparationMode,
    pub sample_step: f64,
    /// The constant P of the normalisation bound.
    pub p: f64,
    pub thread: ThreadMode,
    /// Smallest L used for threading, at least 12d.
    pub thread_l: u32,
    pub vertex_budget: usize,
}

/// log₂ α(L, T) = log₂(2¹⁷⁰P¹⁷L²⁵⁷T⁵⁰).
pub fn alpha_log2(log2_l: f64, t: f64, p: f64) -> f64 {
    170.0 + 17.0 * p.log2() + 257.0 * log2_l + 50.0 * t.log2()
}

/// The rows r₀..=r₁ of a band with the line images at r₀ − ½ and r₁ + ½.
#[derive(Clone, Debug, PartialEq)]
pub struct Band<'a> {
    pub rows: (i64, i64),
    pub bottom: &'a Polyline,
    pub top: &'a Polyline,
}

impl Band<'_> {
    pub fn height(&self) -> i64 {
        self.rows.1 - self.rows.0 + 1
    }
}

/// The line at r₀ + ½ added by [`split_red_black`].
#[derive(Clone, Debug, PartialEq)]
pub struct Split {
    pub level: f64,
    pub line: Polyline,
    pub normalised: Normalised,
    pub gamma: SeparationCurve,
    /// min vertical distance of the normalised lattice images to the strip
    /// sides.
    pub gap: f64,
    /// Exhaustive bilipschitz constant on the band rows and the three lines.
    pub bilip: f64,
    /// log₂ α(L, T) for the input constant.
    pub alpha_log2: f64,
}

fn pull_back(map: &PlaneMap, c: &Polyline, ts: &[f64]) -> Result<Polyline> {
    let verts: Vec<Point> = ts
        .par_iter()
        .map(|t| Ok(map.inverse_evaluate(&PointD::from(c.eval(*t)))?.to2()))
        .collect::<Result<_>>()?;
    Polyline::with_extended_tails(ts.to_vec(), verts)
}

fn grid(window: (f64, f64), step: f64, extra: &[f64]) -> Vec<f64> {
    let n = ((window.1 - window.0) / step).ceil() as usize;
    let mut ts: Vec<f64> = (0..=n).map(|i| window.0 + (window.1 - window.0) * i as f64 / n as f64).collect();
    ts.extend(extra.iter().copied().filter(|t| *t > window.0 && *t < window.1));
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    ts
}

fn line_pairs(level: f64, c: &Polyline, window: (f64, f64)) -> impl Iterator<Item = (Point, Point)> + '_ {
    c.breakpoints
        .iter()
        .zip(&c.vertices)
        .filter(move |(t, _)| **t >= window.0 && **t <= window.1)
        .map(move |(t, v)| (Point::new(*t, level), *v))
}

/// Adds the image of R×{r₀ + ½}: Υ sends the band's lines to R×{0} and
/// R×{T}, γ separates the normalised row r₀ from rows r₀ + 1..=r₁, and the
/// new line is Υ⁻¹∘γ.
pub fn split_red_black(
    f: &LatticeMap,
    band: &Band,
    log2_l: f64,
    params: &FillParams,
    lines: &dyn LineExtensionOracle,
    squares: &dyn SquareExtensionOracle,
) -> Result<Split> {
    let t = band.height();
    if t < 2 {
        return Err(Error::InvalidInput(format!("a band of {t} rows cannot be split")));
    }
    let h = t as f64;
    let boundary = StripBoundary::new(band.bottom.clone(), band.top.clone(), h)?;
    let normalised = normalise(&boundary, &NormaliseConfig::new(params.window), lines, squares)?;
    let rows: Vec<((i64, i64), Point)> = f
        .points()
        .filter(|((_, j), _)| *j >= band.rows.0 && *j <= band.rows.1)
        .collect();
    let images: Vec<Point> = rows
        .par_iter()
        .map(|(_, p)| Ok(normalised.map.evaluate(&PointD::from(*p))?.to2()))
        .collect::<Result<_>>()?;
    let gap = images.iter().map(|q| q.y.min(h - q.y)).fold(f64::INFINITY, f64::min);
    if !(gap > 0.0) {
        return Err(Error::check(
            "band rows between the band lines",
            format!("a normalised lattice image sits {gap} from the strip sides"),
        ));
    }
    let mask: Vec<bool> = rows.iter().map(|((_, j), _)| *j == band.rows.0).collect();
    let net = MarkedNet::new(images, mask)?;
    let alpha = alpha_log2(log2_l, h, params.p);
    let gamma = match params.separation {
        SeparationMode::Monotone { step } => {
            let cfg = StripConfig::new(gap.min(0.5), h)?.with_window(params.window.0, params.window.1);
            net.validate(&cfg)?;
            monotone_separation(&net, &cfg, params.window, step)?
        }
        SeparationMode::Zigzag { s } => {
            // s = 1/(4PL¹⁵T²)
            let log2_s = -(2.0 + params.p.log2() + 15.0 * log2_l + 2.0 * h.log2());
            let s = s.unwrap_or(log2_s.exp2());
            let cfg = StripConfig::new(s.max(f64::MIN_POSITIVE), h)?
                .with_window(params.window.0, params.window.1);
            let vertices = 4.0 * (params.window.1 - params.window.0) / (16.0 * cfg.r());
            if !(s > 0.0) || vertices > params.vertex_budget as f64 {
                return Err(Error::BudgetExceeded(format!(
                    "zig-zag at s = 2^{log2_s:.1} needs about {vertices:.3e} vertices, over the budget {}",
                    params.vertex_budget
                )));
            }
            net.validate(&cfg)?;
            build_separation(&net, &cfg)?
        }
    };
    let ts = grid(params.window, params.sample_step, &gamma.curve.breakpoints);
    let line = pull_back(&normalised.map, &gamma.curve, &ts)?;
    let level = band.rows.0 as f64 + 0.5;
    let mut pairs: Vec<(Point, Point)> =
        rows.iter().map(|((i, j), p)| (Point::new(*i as f64, *j as f64), *p)).collect();
    pairs.extend(line_pairs(level, &line, params.window));
    pairs.extend(line_pairs(band.rows.0 as f64 - 0.5, band.bottom, params.window));
    pairs.extend(line_pairs(band.rows.1 as f64 + 0.5, band.top, params.window));
    let bilip = exhaustive_bilip(&pairs)?.bilip();
    Ok(Split {
        level,
        line,
        normalised,
        gamma,
        gap,
        bilip,
        alpha_log2: alpha,
    })
}

/// Lines at every half-integer level of a band.
#[derive(Clone, Debug, PartialEq)]
pub struct Sliced {
    /// (level, image) from the bottom line to the top line.
    pub lines: Vec<(f64, Polyline)>,
    pub splits: Vec<Split>,
    /// log₂ K_i with K_{i+1} = α(K_i, H − i).
    pub chain_log2: Vec<f64>,
    pub well_separating: WellSeparating,
}

/// Applies [`split_red_black`] to the band cut down to rows r₀ + i..=r₁ and
/// the latest line, for i = 0, …, H − 2.
pub fn slice_strip(
    f: &LatticeMap,
    band: &Band,
    log2_l: f64,
    params: &FillParams,
    lines: &dyn LineExtensionOracle,
    squares: &dyn SquareExtensionOracle,
) -> Result<Sliced> {
    let hgt = band.height();
    if hgt < 1 {
        return Err(Error::InvalidInput("empty band".into()));
    }
    let mut out = vec![(band.rows.0 as f64 - 0.5, band.bottom.clone())];
    let mut splits = Vec::new();
    let mut chain = vec![log2_l];
    for i in 0..hgt - 1 {
        let bottom = out.last().unwrap().1.clone();
        let sub = Band {
            rows: (band.rows.0 + i, band.rows.1),
            bottom: &bottom,
            top: band.top,
        };
        let split = split_red_black(f, &sub, *chain.last().unwrap(), params, lines, squares)?;
        chain.push(split.alpha_log2);
        out.push((split.level, split.line.clone()));
        splits.push(split);
    }
    out.push((band.rows.1 as f64 + 0.5, band.top.clone()));
    let stack: Vec<(f64, &Polyline)> = out.iter().map(|(l, c)| (*l, c)).collect();
    let well_separating = check_well_separating(f, &stack)?;
    Ok(Sliced {
        lines: out,
        splits,
        chain_log2: chain,
        well_separating,
    })
}

/// F_r on R×[r − ½, r + ½]: Υ_r⁻¹∘Θ_r∘A_r.
#[derive(Clone, Debug)]
pub struct UnitStrip {
    pub row: i64,
    /// Υ_r with the lines at r ∓ ½ sent to R×{∓1}.
    pub upsilon: PlaneMap,
    pub normalised: Normalised,
    pub thread: Thread,
    pub map: PlaneMap,
    /// max ‖F_r(x, r) − f(x, r)‖ over the columns.
    pub lattice_error: f64,
    /// max ‖F_r(t, r ∓ ½) − line(t)‖ over the line breakpoints.
    pub line_error: f64,
}

/// A_r(x, y) = (x, 2(y − r)).
pub fn unit_strip_chart(row: i64) -> Result<Affine> {
    Affine::planar([[1.0, 0.0], [0.0, 2.0]], [0.0, -2.0 * row as f64])
}

pub fn unit_strip(
    f: &LatticeMap,
    row: i64,
    below: &Polyline,
    above: &Polyline,
    params: &FillParams,
    lines: &dyn LineExtensionOracle,
    squares: &dyn SquareExtensionOracle,
) -> Result<UnitStrip> {
    let boundary = StripBoundary::new(below.clone(), above.clone(), 2.0)?;
    let normalised = normalise(&boundary, &NormaliseConfig::new(params.window), lines, squares)?;
    let down = PlaneMap::affine(Affine::translation(&PointD::xy(0.0, -1.0)));
    let upsilon = PlaneMap::compose(vec![down, normalised.map.clone()]);
    let data = f.row(row)?;
    let values: Vec<Point> = data
        .par_iter()
        .map(|p| Ok(upsilon.evaluate(&PointD::from(*p))?.to2()))
        .collect::<Result<_>>()?;
    let pts: Vec<(Point, Point)> = values
        .iter()
        .enumerate()
        .map(|(k, v)| (Point::new((f.x.0 + k as i64) as f64, 0.0), *v))
        .collect();
    let measured = exhaustive_bilip(&pts)?.bilip();
    let wall = values.iter().map(|v| 1.0 - v.y.abs()).fold(f64::INFINITY, f64::min);
    let need = measured.max(1.0 / wall.max(f64::MIN_POSITIVE)).ceil();
    let l = (params.thread_l as f64).max(need);
    if l > u32::MAX as f64 {
        return Err(Error::HypothesisViolated(format!("thread constant {l} is out of range")));
    }
    let input = ThreadInput::new(f.x, values, l as u32)?;
    let thread = thread_extend(&input, params.thread)?;
    let chart = PlaneMap::affine(unit_strip_chart(row)?);
    let map = PlaneMap::compose(vec![upsilon.inverse(), thread.map.clone(), chart]);
    let lattice_error = data
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let x = PointD::xy((f.x.0 + k as i64) as f64, row as f64);
            Ok(map.evaluate(&x)?.to2().dist(*p))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let mut line_error = 0.0_f64;
    for (y, c) in [(row as f64 - 0.5, below), (row as f64 + 0.5, above)] {
        for (t, v) in c.breakpoints.iter().zip(&c.vertices) {
            if *t < params.window.0 || *t > params.window.1 {
                continue;
            }
            let got = map.evaluate(&PointD::xy(*t, y))?.to2();
            line_error = line_error.max(got.dist(*v));
        }
    }
    Ok(UnitStrip {
        row,
        upsilon,
        normalised,
        thread,
        map,
        lattice_error,
        line_error,
    })
}

/// F on R×[r₀ − ½, r₁ + ½] glued from the unit strips.
#[derive(Clone, Debug)]
pub struct Fill {
    pub rows: (i64, i64),
    /// Parameter window of the lines.
    pub window: (f64, f64),
    pub sliced: Sliced,
    pub strips: Vec<UnitStrip>,
    pub pieces: Vec<GluedPiece>,
    /// log₂ of D = CK with β = K_{H−1}, K = Pβ¹⁴ and C the thread constant
    /// at βK.
    pub paper_log2: f64,
    /// Largest construction bound over the unit strips, which bounds F by
    /// gluing on parts.
    pub bound: Bound,
}

impl Fill {
    pub fn map(&self) -> PlaneMap {
        PlaneMap::RegionGlue {
            dim: 2,
            pieces: self.pieces.clone(),
            bound: self.bound,
        }
    }
}

/// The glued piece of a unit strip: its domain slab and the region between
/// its two lines.
pub fn strip_piece(s: &UnitStrip) -> GluedPiece {
    let r = s.row as f64;
    GluedPiece {
        domain: Region::slab(2, r - 0.5, r + 0.5),
        image: Region::Pullback {
            map: Box::new(s.upsilon.clone()),
            region: Box::new(Region::slab(2, -1.0, 1.0)),
        },
        map: s.map.clone(),
    }
}

pub fn iterate_fill(
    f: &LatticeMap,
    band: &Band,
    log2_l: f64,
    params: &FillParams,
    lines: &dyn LineExtensionOracle,
    squares: &dyn SquareExtensionOracle,
) -> Result<Fill> {
    let sliced = slice_strip(f, band, log2_l, params, lines, squares)?;
    let strips: Vec<UnitStrip> = (0..band.height() as usize)
        .into_par_iter()
        .map(|i| {
            let row = band.rows.0 + i as i64;
            unit_strip(f, row, &sliced.lines[i].1, &sliced.lines[i + 1].1, params, lines, squares)
        })
        .collect::<Result<_>>()?;
    let pieces: Vec<GluedPiece> = strips.iter().map(strip_piece).collect();
    let bound = strips
        .iter()
        .map(|s| s.map.bound())
        .fold(Bound::ONE, Bound::max);
    let beta = *sliced.chain_log2.last().unwrap();
    let k = params.p.log2() + 14.0 * beta;
    let c = thread_paper_log2((beta + k).exp2(), 2);
    let c = if c.is_nan() { f64::INFINITY } else { c };
    Ok(Fill {
        rows: band.rows,
        window: params.window,
        sliced,
        strips,
        pieces,
        paper_log2: c + k,
        bound,
    })
}
