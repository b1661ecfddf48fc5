//! Straightening a pair of bilipschitz lines to R×{0, T}.

use super::square::SquareExtensionOracle;
use super::strip::{extend_strip, StripBoundary, StripExtension};
use crate::error::{Error, Result};
use crate::geom::{exhaustive_bilip, side_classify, Point, PointD, Polyline, Side};
use crate::planemap::{Affine, Bound, GluedPiece, PlaneMap, Region};
use crate::shore::{check_line_extension, LineExtension, LineExtensionOracle};

/// Ψ with Ψ∘h(t) = (t, 0): the inverse of a line extension Δ, followed by
/// the reflection in R×{0} when Δ⁻¹ puts the chosen side below.
#[derive(Clone, Debug, PartialEq)]
pub struct Straightening {
    pub extension: LineExtension,
    pub reflect: bool,
}

fn reflection() -> Affine {
    Affine::planar([[1.0, 0.0], [0.0, -1.0]], [0.0, 0.0]).expect("invertible")
}

impl Straightening {
    pub fn map(&self) -> PlaneMap {
        let inv = self.extension.map.inverse();
        if self.reflect {
            PlaneMap::compose(vec![PlaneMap::affine(reflection()), inv])
        } else {
            inv
        }
    }

    pub fn bound(&self) -> Bound {
        self.extension.bound
    }

    pub fn apply(&self, p: Point) -> Result<Point> {
        let z = self.extension.map.inverse_evaluate(&PointD::from(p))?.to2();
        Ok(if self.reflect {
            Point::new(z.x, -z.y)
        } else {
            z
        })
    }

    /// Abscissa of Δ⁻¹(p); Ψ is affine between consecutive knots of it.
    fn abscissa(&self, p: Point) -> Result<f64> {
        Ok(self.extension.map.inverse_evaluate(&PointD::from(p))?[0])
    }

    /// Ψ∘c as a polyline, exact up to rounding: each piece of c is split
    /// where Δ⁻¹ crosses a knot, and the tails are followed until they leave
    /// the knot range.
    pub fn push(&self, c: &Polyline) -> Result<Polyline> {
        let knots = &self.extension.knots;
        let (k_lo, k_hi) = (knots[0], *knots.last().unwrap());
        let outside = |u: f64| u < k_lo || u > k_hi;
        let (lo, hi) = c.window();
        let far = |dir: f64| -> Result<f64> {
            let base = if dir < 0.0 { lo } else { hi };
            let mut step = 1.0_f64;
            for _ in 0..80 {
                let t = base + dir * step;
                if outside(self.abscissa(c.eval(t))?) {
                    return Ok(t);
                }
                step *= 2.0;
            }
            Err(Error::InvalidInput(
                "curve tail never leaves the straightening knots".into(),
            ))
        };
        let t_lo = far(-1.0)?;
        let t_hi = far(1.0)?;
        let mut ts = vec![t_lo];
        ts.extend(c.breakpoints.iter().copied());
        ts.push(t_hi);
        let mut out_t = vec![t_lo];
        for w in ts.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            let (u0, u1) = (self.abscissa(c.eval(t0))?, self.abscissa(c.eval(t1))?);
            let (a, b) = (u0.min(u1), u0.max(u1));
            let from = knots.partition_point(|k| *k <= a);
            for &kappa in &knots[from..] {
                if kappa >= b {
                    break;
                }
                // u is monotone along an affine piece of the curve.
                let (mut x0, mut x1) = (t0, t1);
                for _ in 0..100 {
                    let m = 0.5 * (x0 + x1);
                    let um = self.abscissa(c.eval(m))?;
                    if (um < kappa) == (u0 < u1) {
                        x0 = m;
                    } else {
                        x1 = m;
                    }
                }
                let t = 0.5 * (x0 + x1);
                // A crossing at a breakpoint is already carried by it.
                if t > *out_t.last().unwrap() + 1e-9 && t < t1 - 1e-9 {
                    out_t.push(t);
                }
            }
            if t1 > *out_t.last().unwrap() {
                out_t.push(t1);
            }
        }
        let verts: Vec<Point> = out_t
            .iter()
            .map(|t| self.apply(c.eval(*t)))
            .collect::<Result<_>>()?;
        let tail = |t: f64, dt: f64| -> Result<Point> {
            Ok((self.apply(c.eval(t + dt))? - self.apply(c.eval(t))?) * (1.0 / dt))
        };
        let tails = [tail(t_lo - 1.0, 1.0)?, tail(t_hi, 1.0)?];
        Polyline::new(out_t, verts, tails)
    }
}

/// Ψ with Ψ∘h(t) = (t, 0) sending the side of h(R) containing `probe` to the
/// upper half-plane when `probe_side` is `Above`, to the lower one when it is
/// `Below`.
///
/// The line extension is obtained from the oracle; the reflection is decided
/// by `side_classify` of the straightened probe against the axis.
pub fn normalise_step(
    h: &Polyline,
    probe: Point,
    probe_side: Side,
    oracle: &dyn LineExtensionOracle,
) -> Result<Straightening> {
    straighten_with(h, oracle.extend(h)?, probe, probe_side)
}

/// [`normalise_step`] with a line extension of `h` supplied by the caller.
pub fn straighten_with(
    h: &Polyline,
    extension: LineExtension,
    probe: Point,
    probe_side: Side,
) -> Result<Straightening> {
    if probe_side == Side::OnCurve {
        return Err(Error::InvalidInput(
            "the probe must name a side of the curve".into(),
        ));
    }
    check_line_extension(&extension, h, 1e-9)?;
    let z = extension.map.inverse_evaluate(&PointD::from(probe))?.to2();
    let axis = Polyline::new(
        vec![z.x - 1.0, z.x + 1.0],
        vec![Point::new(z.x - 1.0, 0.0), Point::new(z.x + 1.0, 0.0)],
        [Point::new(1.0, 0.0); 2],
    )?;
    let side = side_classify(&axis, z);
    if side == Side::OnCurve {
        return Err(Error::InvalidInput(format!(
            "probe {probe:?} lies on the curve"
        )));
    }
    Ok(Straightening {
        extension,
        reflect: side != probe_side,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormaliseConfig {
    /// Parameter window on which Υ must straighten both lines.
    pub window: (f64, f64),
    /// Bilipschitz constant used for the middle strip; estimated from the
    /// boundary when unset.
    pub strip_l: Option<f64>,
    /// Factor applied to the estimate.
    pub l_margin: f64,
}

impl NormaliseConfig {
    pub fn new(window: (f64, f64)) -> Self {
        NormaliseConfig {
            window,
            strip_l: None,
            l_margin: 1.25,
        }
    }
}

/// Υ with Υ∘g = id on R×{0, T} over the window.
#[derive(Clone, Debug, PartialEq)]
pub struct Normalised {
    pub map: PlaneMap,
    pub bound: Bound,
    pub t: f64,
    /// Ψ₀ straightening the bottom line.
    pub psi0: Straightening,
    /// ζ = Ψ₀∘g(·, T).
    pub zeta: Polyline,
    /// Ψ_T straightening ζ with R×{0} below.
    pub psi_t: Straightening,
    /// Λ on R×[0, T] with Λ(s, 0) = (s, 0) and Λ(t, T) = ζ(t).
    pub strip: StripExtension,
    pub strip_l: f64,
}

impl Normalised {
    /// P·L¹⁴·T².
    pub fn paper_bound(&self, p: f64, l: f64) -> f64 {
        p * l.powi(14) * self.t * self.t
    }
}

fn horizontal(window: (f64, f64), y: f64) -> Result<Polyline> {
    Polyline::new(
        vec![window.0, window.1],
        vec![Point::new(window.0, y), Point::new(window.1, y)],
        [Point::new(1.0, 0.0); 2],
    )
}

/// Sampled bilipschitz constant of a strip boundary map, over both lines at
/// spacing h/4 plus every breakpoint in the window.
pub fn boundary_bilip(f: &StripBoundary, window: (f64, f64)) -> Result<f64> {
    let step = f.h / 4.0;
    let n = (((window.1 - window.0) / step).ceil() as usize).max(1);
    let grid: Vec<f64> = (0..=n)
        .map(|i| window.0 + (window.1 - window.0) * i as f64 / n as f64)
        .collect();
    let mut pairs = Vec::with_capacity(2 * n + 2);
    for (y, line) in [(0.0, &f.bottom), (f.h, &f.top)] {
        let mut ts = grid.clone();
        ts.extend(
            line.breakpoints
                .iter()
                .copied()
                .filter(|t| *t >= window.0 && *t <= window.1),
        );
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
        pairs.extend(ts.into_iter().map(|t| (Point::new(t, y), line.eval(t))));
    }
    Ok(exhaustive_bilip(&pairs)?.bilip())
}

/// Builds Υ: Ψ₀ straightens the bottom line, Ψ_T + T·e₂ straightens the
/// image of the top line above it, and the region between them is filled by
/// the inverse of a strip extension of their boundary parameterisation.
pub fn normalise(
    g: &StripBoundary,
    cfg: &NormaliseConfig,
    lines: &dyn LineExtensionOracle,
    squares: &dyn SquareExtensionOracle,
) -> Result<Normalised> {
    normalise_with(g, cfg, None, None, lines, squares)
}

/// What is known about the top line when it is supplied by the caller.
#[derive(Clone, Debug, PartialEq)]
pub enum TopLine {
    /// A line extension Δ of the top line; ζ gets the extension Ψ₀∘Δ.
    Extension(LineExtension),
    /// The top line is Φ∘B(·, 0) where Φ extends the base curve and B is
    /// supported in small boxes around the axis. The strip is then filled
    /// against Ψ₀∘base and carried onto ζ by the conjugate C of B, so that
    /// no square extension sees the boxes.
    Detoured {
        base: Polyline,
        base_extension: LineExtension,
        bumps: PlaneMap,
        bumps_bound: Bound,
    },
}

/// [`normalise`] with line extensions of the bottom and top lines supplied
/// by the caller where known; the oracle covers the others.
pub fn normalise_with(
    g: &StripBoundary,
    cfg: &NormaliseConfig,
    bottom: Option<LineExtension>,
    top: Option<TopLine>,
    lines: &dyn LineExtensionOracle,
    squares: &dyn SquareExtensionOracle,
) -> Result<Normalised> {
    let t = g.h;
    let mid = 0.5 * (cfg.window.0 + cfg.window.1);
    let bottom = match bottom {
        Some(e) => e,
        None => lines.extend(&g.bottom)?,
    };
    let psi0 = straighten_with(&g.bottom, bottom, g.top.eval(mid), Side::Above)?;
    let zeta = psi0.push(&g.top)?;
    let mut carry: Option<(PlaneMap, Bound)> = None;
    let mut fill_top = zeta.clone();
    let zeta_ext = match top {
        Some(TopLine::Extension(e)) => LineExtension {
            map: PlaneMap::compose(vec![psi0.map(), e.map]),
            bound: psi0.bound().times(e.bound),
            knots: e.knots,
        },
        Some(TopLine::Detoured {
            base,
            base_extension,
            bumps,
            bumps_bound,
        }) => {
            fill_top = psi0.push(&base)?;
            let outer = PlaneMap::compose(vec![psi0.map(), base_extension.map.clone()]);
            let c = PlaneMap::compose(vec![outer.clone(), bumps.clone(), outer.inverse()]);
            let cb = psi0.bound().times(base_extension.bound).pow(2.0).times(bumps_bound);
            carry = Some((c, cb));
            LineExtension {
                map: PlaneMap::compose(vec![outer, bumps]),
                bound: psi0.bound().times(base_extension.bound).times(bumps_bound),
                knots: base_extension.knots,
            }
        }
        None => lines.extend(&zeta)?,
    };
    let psi_t = straighten_with(
        &zeta,
        zeta_ext,
        Point::new(zeta.eval(mid).x, 0.0),
        Side::Below,
    )?;
    let lam = StripBoundary::new(horizontal(cfg.window, 0.0)?, fill_top, t)?;
    let strip_l = match cfg.strip_l {
        Some(l) => l,
        None => {
            let q_reach = 8.0 * t * boundary_bilip(&lam, cfg.window)?.powi(2);
            let wide = (cfg.window.0 - q_reach, cfg.window.1 + q_reach);
            (boundary_bilip(&lam, wide)? * cfg.l_margin).max(1.0)
        }
    };
    let strip = extend_strip(&lam, strip_l, cfg.window, squares)?;
    let (middle, middle_bound) = match &carry {
        Some((c, cb)) => (
            PlaneMap::compose(vec![strip.map.inverse(), c.inverse()]),
            strip.bound.times(*cb),
        ),
        None => (strip.map.inverse(), strip.bound),
    };
    let shift = Affine::translation(&PointD::xy(0.0, t));
    let upper = PlaneMap::compose(vec![PlaneMap::affine(shift), psi_t.map()]);
    let below = Region::HalfSpace {
        normal: PointD::xy(0.0, 1.0),
        offset: 0.0,
    };
    let above = Region::HalfSpace {
        normal: PointD::xy(0.0, -1.0),
        offset: -t,
    };
    let inf = f64::INFINITY;
    let pieces = vec![
        GluedPiece {
            domain: below.clone(),
            image: below,
            map: PlaneMap::identity(2),
        },
        GluedPiece {
            domain: Region::Pullback {
                map: Box::new(upper.clone()),
                region: Box::new(above.clone()),
            },
            image: above,
            map: upper,
        },
        GluedPiece {
            domain: Region::All,
            image: Region::Box {
                lo: PointD::xy(-inf, 0.0),
                hi: PointD::xy(inf, t),
            },
            map: middle,
        },
    ];
    let glue_bound = psi_t.bound().max(middle_bound);
    let glued = PlaneMap::RegionGlue {
        dim: 2,
        pieces,
        bound: glue_bound,
    };
    let bound = glue_bound.times(psi0.bound());
    Ok(Normalised {
        map: PlaneMap::compose(vec![glued, psi0.map()]),
        bound,
        t,
        psi0,
        zeta,
        psi_t,
        strip,
        strip_l,
    })
}

/// max ‖Υ(g(x)) − x‖ over both lines at `n` + 1 evenly spaced parameters.
pub fn normalise_error(
    nm: &Normalised,
    g: &StripBoundary,
    window: (f64, f64),
    n: usize,
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for i in 0..=n {
        let s = window.0 + (window.1 - window.0) * i as f64 / n.max(1) as f64;
        for (y, line) in [(0.0, &g.bottom), (g.h, &g.top)] {
            let got = nm.map.evaluate(&PointD::from(line.eval(s)))?.to2();
            worst = worst.max(got.dist(Point::new(s, y)));
        }
    }
    Ok(worst)
}
