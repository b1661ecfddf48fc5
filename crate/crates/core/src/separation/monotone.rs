//! A separating curve that is the graph of a piecewise-affine function,
//! usable when the marked points lie below the others column by column.

use super::{MarkedNet, SeparationCurve, StripConfig};
use crate::error::{Error, Result};
use crate::geom::{side_classify, Point, Polyline, Side};

/// γ(t) = (t, c(t)) with c affine between knots spaced `step` apart over
/// `window` and constant beyond. At each knot c is the midpoint between the
/// highest marked point and the lowest unmarked one within 1.5 steps, the
/// strip sides standing in for missing points; knots without any nearby
/// point copy the nearest knot that has one.
pub fn monotone_separation(net: &MarkedNet, cfg: &StripConfig, window: (f64, f64), step: f64) -> Result<SeparationCurve> {
    cfg.validate()?;
    if !(step > 0.0 && window.0 < window.1) {
        return Err(Error::InvalidInput(format!("bad knot spacing {step} or window {window:?}")));
    }
    let n = ((window.1 - window.0) / step).ceil() as usize;
    let knots: Vec<f64> = (0..=n).map(|j| window.0 + j as f64 * step).collect();
    let reach = 1.5 * step;
    let mut heights: Vec<Option<f64>> = Vec::with_capacity(knots.len());
    for &u in &knots {
        let mut lo: Option<f64> = None;
        let mut hi: Option<f64> = None;
        for (p, &m) in net.points.iter().zip(&net.y_mask) {
            if (p.x - u).abs() > reach {
                continue;
            }
            if m {
                lo = Some(lo.map_or(p.y, |v| v.max(p.y)));
            } else {
                hi = Some(hi.map_or(p.y, |v| v.min(p.y)));
            }
        }
        if lo.is_none() && hi.is_none() {
            heights.push(None);
            continue;
        }
        let (a, b) = (lo.unwrap_or(0.0), hi.unwrap_or(cfg.w));
        if a >= b {
            return Err(Error::SeparationViolated(format!(
                "near abscissa {u} a marked point at height {a} is above an unmarked one at {b}"
            )));
        }
        heights.push(Some(0.5 * (a + b)));
    }
    let known: Vec<usize> = (0..heights.len()).filter(|&j| heights[j].is_some()).collect();
    if known.is_empty() {
        heights = vec![Some(0.5 * cfg.w); knots.len()];
    }
    let filled: Vec<f64> = (0..heights.len())
        .map(|j| {
            heights[j].unwrap_or_else(|| {
                let k = known.iter().min_by_key(|&&k| k.abs_diff(j)).copied().unwrap_or(j);
                heights[k].unwrap_or(0.5 * cfg.w)
            })
        })
        .collect();
    let verts: Vec<Point> = knots.iter().zip(&filled).map(|(&u, &c)| Point::new(u, c)).collect();
    let curve = Polyline::new(knots, verts, [Point::new(1.0, 0.0); 2])?;
    let slope = (0..curve.num_segments())
        .map(|i| {
            let v = curve.velocity(i);
            (v.y / v.x).abs()
        })
        .fold(0.0, f64::max);
    for (k, p) in net.points.iter().enumerate() {
        let want = if net.y_mask[k] { Side::Below } else { Side::Above };
        if side_classify(&curve, *p) != want {
            return Err(Error::SeparationViolated(format!("point {k} at {p:?} is on the wrong side of the graph")));
        }
    }
    Ok(SeparationCurve {
        cfg: *cfg,
        curve,
        anchors: Vec::new(),
        bound: (1.0 + slope * slope).sqrt(),
    })
}
