//! Extension of a lattice map to one horizontal half-integer line, and to a
//! family of such lines spaced T apart.

use super::gridcurve::{avoid_gridcurve, detour_extension, detour_map, GridCurve};
use super::initial::{initial_shore, ShoreCurve, ShoreInput};
use super::oracle::LineExtensionOracle;
use crate::error::{Error, Result};
use crate::geom::{component_labels, exhaustive_bilip, LatticeMap, Point, PointD, Polyline, Segment};
use crate::planemap::Bound;
use crate::separation::{build_separation, monotone_separation, MarkedNet, SeparationCurve, StripConfig};
use crate::strip_ext::{
    normalise_with, NormaliseConfig, Normalised, SquareExtensionOracle, StripBoundary, TopLine,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// How the separating curve inside the normalised strip is built.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SeparationMode {
    /// The zig-zag construction with the given s, or s(L) when unset.
    Zigzag { s: Option<f64> },
    /// A graph with knots `step` apart, see [`monotone_separation`].
    Monotone { step: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineParams {
    /// Bilipschitz constant of f.
    pub l: f64,
    /// Rows k − G and k + G carry the shore curves.
    pub g: i64,
    /// The constant P of the normalisation bound.
    pub p: f64,
    pub separation: SeparationMode,
    /// Parameter margin past the lattice columns on which the line is built.
    pub margin: f64,
    /// Spacing of the samples of Υ⁻¹∘γ that make up the line image.
    pub sample_step: f64,
    /// Largest zig-zag vertex count the zig-zag mode may allocate.
    pub vertex_budget: usize,
}

impl LineParams {
    /// G = ⌈38L⁶⌉ and the zig-zag separation at s(L).
    pub fn paper(l: f64) -> Self {
        LineParams {
            l,
            g: (38.0 * l.powi(6)).ceil() as i64,
            p: 1.0,
            separation: SeparationMode::Zigzag { s: None },
            margin: 4.0,
            sample_step: 0.125,
            vertex_budget: 1 << 22,
        }
    }

    /// G = 1 and a graph separation with knots half a unit apart.
    pub fn desk(l: f64) -> Self {
        LineParams {
            l,
            g: 1,
            p: 1.0,
            separation: SeparationMode::Monotone { step: 0.5 },
            margin: 4.0,
            sample_step: 0.125,
            vertex_budget: 1 << 22,
        }
    }
}

/// log₂ of a sum of powers of two given by their exponents.
fn log2_sum(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + terms.iter().map(|t| (t - m).exp2()).sum::<f64>().log2()
}

/// The constants of the single-line extension, evaluated at the given L, G
/// and P. All entries are bilipschitz-type bounds except `s` and `theta`,
/// which are lengths stored through their base-2 logarithms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineConstants {
    /// bilip(ξ±) ≤ β = 2²³L¹².
    pub beta: Bound,
    /// bilip(μ±) ≤ α = 2³⁹L²β³.
    pub alpha: Bound,
    /// bilip(Υ) ≤ M = Pα¹⁴(2G)².
    pub m: Bound,
    /// s = 1/(2²⁴ML³), as log₂.
    pub log2_s: f64,
    pub w: f64,
    /// bilip(γ) ≤ D = 2³⁰w⁴/s⁴.
    pub d: Bound,
    /// K = M(MLG + 17ML⁵ + ½ + 2w).
    pub k: Bound,
    /// θ = 2s/(100M), as log₂.
    pub log2_theta: f64,
    /// bilip(F) ≤ J = L(1 + (K + 1)/θ).
    pub j: Bound,
}

impl LineConstants {
    pub fn new(l: f64, g: i64, p: f64) -> Self {
        let ll = l.log2();
        let w = 2.0 * g as f64;
        let beta = 23.0 + 12.0 * ll;
        let alpha = 39.0 + 2.0 * ll + 3.0 * beta;
        let m = p.log2() + 14.0 * alpha + 2.0 * w.log2();
        let s = -(24.0 + m + 3.0 * ll);
        let d = 30.0 + 4.0 * w.log2() - 4.0 * s;
        let inner = log2_sum(&[
            m + ll + (g as f64).log2(),
            17f64.log2() + m + 5.0 * ll,
            -1.0,
            (2.0 * w).log2(),
        ]);
        let k = m + inner;
        let theta = 1.0 + s - 100f64.log2() - m;
        let j = ll + log2_sum(&[0.0, log2_sum(&[k, 0.0]) - theta]);
        LineConstants {
            beta: Bound::from_log2(beta),
            alpha: Bound::from_log2(alpha),
            m: Bound::from_log2(m),
            log2_s: s,
            w,
            d: Bound::from_log2(d),
            k: Bound::from_log2(k),
            log2_theta: theta,
            j: Bound::from_log2(j),
        }
    }
}

/// Measured facts about one line extension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineReport {
    /// min over all lattice images of the vertical distance of Υ∘f(x) to
    /// R×{0, 2G}.
    pub boundary_gap: f64,
    /// min distance between the lattice images and the line image.
    pub clearance: f64,
    /// Lattice points split by the line exactly as by its image.
    pub components_ok: bool,
    /// Exhaustive bilipschitz constant of F on the lattice window together
    /// with the line samples.
    pub bilip: f64,
    /// Construction bound of Υ.
    pub upsilon_bound: Bound,
    pub separation_bound: f64,
    pub witness: Option<String>,
}

impl LineReport {
    pub fn pass(&self, c: &LineConstants) -> bool {
        self.components_ok
            && self.clearance > 0.0
            && self.boundary_gap > 0.0
            && c.j.dominates(self.bilip, 1e-9)
    }
}

/// F on Z² ∪ (R×{k + ½}): f on the lattice and `line` on the line.
#[derive(Clone, Debug, PartialEq)]
pub struct HorizontalLine {
    pub k: i64,
    /// F(t, k + ½) = line(t).
    pub line: Polyline,
    /// Separating curve in the normalised strip R×[0, 2G].
    pub gamma: SeparationCurve,
    /// Shore curves on rows k − G and k + G.
    pub shores: [ShoreCurve; 2],
    pub grid: [GridCurve; 2],
    /// Υ with Υ∘μ₋ = (·, 0) and Υ∘μ₊ = (·, 2G).
    pub normalised: Normalised,
    pub constants: LineConstants,
    pub report: LineReport,
}

/// Sorted parameters: the breakpoints of `c` in `window` together with an
/// even grid of spacing `step`.
fn sample_params(c: &Polyline, window: (f64, f64), step: f64) -> Vec<f64> {
    let n = ((window.1 - window.0) / step).ceil() as usize;
    let mut ts: Vec<f64> = (0..=n).map(|i| window.0 + (window.1 - window.0) * i as f64 / n as f64).collect();
    ts.extend(c.breakpoints.iter().copied().filter(|t| *t > window.0 && *t < window.1));
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    ts
}

/// The parameter window of the line: the lattice columns widened by the
/// margin.
pub fn line_window(f: &LatticeMap, margin: f64) -> (f64, f64) {
    (f.x.0 as f64 - margin, f.x.1 as f64 + margin)
}

/// The curve c pulled back by a map: the samples Υ⁻¹(c(t)) joined in order.
fn pull_back(n: &Normalised, c: &Polyline, ts: &[f64]) -> Result<Polyline> {
    let verts: Vec<Point> = ts
        .par_iter()
        .map(|t| Ok(n.map.inverse_evaluate(&PointD::from(c.eval(*t)))?.to2()))
        .collect::<Result<_>>()?;
    Polyline::with_extended_tails(ts.to_vec(), verts)
}

/// Lattice points with their images, split into rows ≤ k and rows > k, and
/// checks that the curve separates the two sets and nothing else.
fn split_check(f: &LatticeMap, level: f64, curve: &Polyline) -> Result<(bool, Option<String>)> {
    let pts: Vec<Point> = f.points().map(|(_, p)| p).collect();
    let rows: Vec<i64> = f.points().map(|((_, j), _)| j).collect();
    let labels = component_labels(curve, &pts)
        .ok_or_else(|| Error::check("crossing parity", "no ray direction avoids the vertices"))?;
    let below = rows.iter().position(|&j| (j as f64) < level);
    let above = rows.iter().position(|&j| (j as f64) > level);
    let (lb, la) = match (below, above) {
        (Some(b), Some(a)) => (labels[b], labels[a]),
        _ => return Ok((true, None)),
    };
    if lb == la {
        return Ok((false, Some(format!("rows on both sides of y = {level} share a component"))));
    }
    for (k, &j) in rows.iter().enumerate() {
        let want = if (j as f64) < level { lb } else { la };
        if labels[k] != want {
            return Ok((false, Some(format!("image of lattice point {k} in row {j} is on the wrong side"))));
        }
    }
    Ok((true, None))
}

/// The extension of f to the line R×{k + ½}, built from shore curves on rows
/// k ± G, their perturbations avoiding f(Z²), the normalisation Υ of the
/// two perturbed curves and a separating curve γ of the normalised images:
/// F = Υ⁻¹∘γ on the line.
pub fn horizontal_line_extension(
    f: &LatticeMap,
    k: i64,
    params: &LineParams,
    lines: &dyn LineExtensionOracle,
    squares: &dyn SquareExtensionOracle,
) -> Result<HorizontalLine> {
    let l = params.l;
    if !(l >= 1.0 && l.is_finite()) {
        return Err(Error::InvalidInput(format!("L = {l} must be at least 1")));
    }
    let g = params.g;
    if g < 1 {
        return Err(Error::InvalidInput(format!("G = {g} must be positive")));
    }
    let (lo_row, hi_row) = (k - g, k + g);
    if lo_row < f.y.0 || hi_row > f.y.1 {
        return Err(Error::WindowTooSmall(format!(
            "rows {lo_row} and {hi_row} must lie in the lattice window {:?}",
            f.y
        )));
    }
    let window = line_window(f, params.margin);
    let delta = 1.0 / l;
    let gamma_pts: Vec<Point> = f.points().map(|(_, p)| p).collect();

    let reach = 16.0 * l.powi(4);
    if 2.0 * reach > params.vertex_budget as f64 {
        return Err(Error::BudgetExceeded(format!(
            "row curves reaching 16L⁴ = {reach:.3e} columns exceed the vertex budget {}",
            params.vertex_budget
        )));
    }
    let knots = (
        f.x.0.min(-(reach.ceil() as i64) - 1),
        f.x.1.max(reach.ceil() as i64 + 1),
    );
    let mut shores = Vec::with_capacity(2);
    let mut grid = Vec::with_capacity(2);
    for row in [lo_row, hi_row] {
        let phi = f.row_curve(row, knots)?;
        let xi = initial_shore(&ShoreInput::new(phi, l)?)?;
        let gc = avoid_gridcurve(&xi.xi, &gamma_pts, delta, l, lines)?;
        shores.push(xi);
        grid.push(gc);
    }
    let (gm, gp) = (&grid[0], &grid[1]);

    let w = 2.0 * g as f64;
    let boundary = StripBoundary::new(gm.mu.clone(), gp.mu.clone(), w)?;
    let bumps = detour_map(gp)?;
    let top = TopLine::Detoured {
        base: shores[1].xi.clone(),
        base_extension: gp.extension.clone(),
        bumps: bumps.map,
        bumps_bound: bumps.bound,
    };
    let normalised = normalise_with(
        &boundary,
        &NormaliseConfig::new(window),
        Some(detour_extension(gm)?),
        Some(top),
        lines,
        squares,
    )?;

    let images: Vec<((i64, i64), Point)> = f
        .points()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(ij, p)| Ok((ij, normalised.map.evaluate(&PointD::from(p))?.to2())))
        .collect::<Result<_>>()?;
    let boundary_gap = images
        .iter()
        .map(|(_, q)| q.y.abs().min((q.y - w).abs()))
        .fold(f64::INFINITY, f64::min);
    let mut net_pts = Vec::new();
    let mut mask = Vec::new();
    for ((_, j), q) in &images {
        if q.y >= 0.0 && q.y <= w {
            net_pts.push(*q);
            mask.push(*j <= k);
        }
    }
    let net = MarkedNet::new(net_pts, mask)?;
    let constants = LineConstants::new(l, g, params.p);
    let gamma = match params.separation {
        SeparationMode::Monotone { step } => {
            let s = boundary_gap.min(0.5);
            let cfg = StripConfig::new(s, w)?.with_window(window.0, window.1);
            net.validate(&cfg)?;
            monotone_separation(&net, &cfg, window, step)?
        }
        SeparationMode::Zigzag { s } => {
            let s = s.unwrap_or(constants.log2_s.exp2());
            if !(s > 0.0) {
                return Err(Error::BudgetExceeded(format!(
                    "s = 2^{} underflows; the zig-zag cannot be built",
                    constants.log2_s
                )));
            }
            let cfg = StripConfig::new(s, w)?.with_window(window.0, window.1);
            let vertices = 4.0 * (window.1 - window.0) / (16.0 * cfg.r());
            if vertices > params.vertex_budget as f64 {
                return Err(Error::BudgetExceeded(format!(
                    "zig-zag at s = {s} needs about {vertices:.3e} vertices, over the budget {}",
                    params.vertex_budget
                )));
            }
            net.validate(&cfg)?;
            build_separation(&net, &cfg)?
        }
    };

    let ts = sample_params(&gamma.curve, window, params.sample_step);
    let line = pull_back(&normalised, &gamma.curve, &ts)?;

    let clearance = line_clearance(&line, &gamma_pts);
    let (components_ok, witness) = split_check(f, k as f64 + 0.5, &line)?;
    let mut pairs: Vec<(Point, Point)> =
        f.points().map(|((i, j), p)| (Point::new(i as f64, j as f64), p)).collect();
    let y = k as f64 + 0.5;
    pairs.extend(line.breakpoints.iter().zip(&line.vertices).map(|(t, v)| (Point::new(*t, y), *v)));
    let bilip = exhaustive_bilip(&pairs)?.bilip();
    let report = LineReport {
        boundary_gap,
        clearance,
        components_ok,
        bilip,
        upsilon_bound: normalised.bound,
        separation_bound: gamma.bound,
        witness,
    };
    Ok(HorizontalLine {
        k,
        line,
        gamma,
        shores: [shores.remove(0), shores.remove(0)],
        grid: [grid.remove(0), grid.remove(0)],
        normalised,
        constants,
        report,
    })
}

/// min distance from the points to the curve.
pub fn line_clearance(curve: &Polyline, pts: &[Point]) -> f64 {
    pts.par_iter().map(|p| curve.distance_to(*p)).reduce(|| f64::INFINITY, f64::min)
}

/// Results of the well-separating checks on a stack of lines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WellSeparating {
    /// Consecutive line images do not meet, decided by exact segment tests.
    pub disjoint: bool,
    /// Each line image lies in the lower component of the next one.
    pub ordered: bool,
    /// Every line splits the lattice images as the line splits the lattice.
    pub split: bool,
    /// The lattice images between two consecutive line images are exactly
    /// the images of the rows between the lines.
    pub bands: bool,
    pub witness: Option<String>,
}

impl WellSeparating {
    pub fn pass(&self) -> bool {
        self.disjoint && self.ordered && self.split && self.bands
    }
}

fn segments_in(c: &Polyline) -> Vec<Segment> {
    c.segments().collect()
}

fn polylines_meet(a: &Polyline, b: &Polyline) -> Option<(usize, usize)> {
    let sa = segments_in(a);
    let sb = segments_in(b);
    sa.par_iter()
        .enumerate()
        .find_map_any(|(i, s)| {
            let (lo, hi) = s.bbox();
            sb.iter().enumerate().find_map(|(j, t)| {
                let (l2, h2) = t.bbox();
                let apart = h2.x < lo.x || l2.x > hi.x || h2.y < lo.y || l2.y > hi.y;
                (!apart && s.intersects(t)).then_some((i, j))
            })
        })
}

/// Checks the lines, given as (level, image) with increasing half-integer
/// levels, against the lattice map: consecutive images are disjoint and
/// ordered, and the lattice images between consecutive line images are
/// exactly those of the rows between the lines.
pub fn check_well_separating(f: &LatticeMap, lines: &[(f64, &Polyline)]) -> Result<WellSeparating> {
    let mut out = WellSeparating {
        disjoint: true,
        ordered: true,
        split: true,
        bands: true,
        witness: None,
    };
    let pts: Vec<Point> = f.points().map(|(_, p)| p).collect();
    let rows: Vec<f64> = f.points().map(|((_, j), _)| j as f64).collect();
    let mut labels = Vec::with_capacity(lines.len());
    for (level, c) in lines {
        let (ok, w) = split_check(f, *level, c)?;
        if !ok {
            out.split = false;
            out.witness = out.witness.or(w.map(|w| format!("line at {level}: {w}")));
        }
        let lab = component_labels(c, &pts)
            .ok_or_else(|| Error::check("crossing parity", "no ray direction avoids the vertices"))?;
        let lower = rows.iter().position(|&r| r < *level).map(|i| lab[i]);
        labels.push((lab, lower));
    }
    for (n, pair) in lines.windows(2).enumerate() {
        let ((la, a), (lb, b)) = (pair[0], pair[1]);
        if !(la < lb) {
            return Err(Error::InvalidInput("line levels must increase".into()));
        }
        if let Some((i, j)) = polylines_meet(a, b) {
            out.disjoint = false;
            out.witness = out
                .witness
                .or(Some(format!("lines at {la} and {lb} meet at segments {i} and {j}")));
        }
        if let Some(lower_b) = labels[n + 1].1 {
            let vl = component_labels(b, &a.vertices)
                .ok_or_else(|| Error::check("crossing parity", "no ray direction avoids the vertices"))?;
            if let Some(v) = vl.iter().position(|&x| x != lower_b) {
                out.ordered = false;
                out.witness = out
                    .witness
                    .or(Some(format!("vertex {v} of the line at {la} is above the line at {lb}")));
            }
        }
        let (lab_a, lower_a) = &labels[n];
        let (lab_b, lower_b) = &labels[n + 1];
        for (k, &r) in rows.iter().enumerate() {
            let above_a = lower_a.map_or(true, |x| lab_a[k] != x);
            let below_b = lower_b.map_or(r < lb, |x| lab_b[k] == x);
            let between = above_a && below_b;
            if between != (r > la && r < lb) {
                out.bands = false;
                out.witness = out
                    .witness
                    .or(Some(format!("image of lattice point {k} in row {r} misplaced between {la} and {lb}")));
                break;
            }
        }
    }
    Ok(out)
}

/// Line extensions at levels k₀ + Tp + ½ for p = 0, …, count − 1, glued.
#[derive(Clone, Debug, PartialEq)]
pub struct Strips {
    pub t: i64,
    pub lines: Vec<HorizontalLine>,
    pub well_separating: WellSeparating,
}

impl Strips {
    pub fn levels(&self) -> Vec<f64> {
        self.lines.iter().map(|h| h.k as f64 + 0.5).collect()
    }
}

/// T = 2J²L√2/(J − L), as log₂, for the planar case.
pub fn strips_spacing_log2(j: Bound, l: f64) -> f64 {
    let jl = j.log2 - l.log2();
    // log₂(J − L) = log₂ J + log₂(1 − L/J)
    let gap = j.log2 + (1.0 - (-jl).exp2()).log2();
    1.0 + 2.0 * j.log2 + l.log2() + 0.5 - gap
}

pub fn strips_extension(
    f: &LatticeMap,
    params: &LineParams,
    t: i64,
    k0: i64,
    count: usize,
    lines: &dyn LineExtensionOracle,
    squares: &dyn SquareExtensionOracle,
) -> Result<Strips> {
    if count < 2 || t < 1 {
        return Err(Error::WindowTooSmall(format!(
            "{count} lines at spacing {t}: at least two lines are needed"
        )));
    }
    let ks: Vec<i64> = (0..count as i64).map(|p| k0 + t * p).collect();
    let built: Vec<HorizontalLine> = ks
        .par_iter()
        .map(|&k| horizontal_line_extension(f, k, params, lines, squares))
        .collect::<Result<_>>()?;
    let stack: Vec<(f64, &Polyline)> = built.iter().map(|h| (h.k as f64 + 0.5, &h.line)).collect();
    let well_separating = check_well_separating(f, &stack)?;
    Ok(Strips {
        t,
        lines: built,
        well_separating,
    })
}
