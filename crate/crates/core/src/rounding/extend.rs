//! Extending a bilipschitz map from a λ-net Y ⊆ Z^d to a window of Z^d.

use crate::error::{Error, Result};
use crate::geom::{exhaustive_bilip, BilipEstimate, PointD};
use crate::permlattice::{box_points, Site};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// A finite map f: Y → R^d with Y inside a box window of Z^d.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubnetMap {
    pub d: usize,
    /// Inclusive bounds per coordinate.
    pub window: Vec<(i64, i64)>,
    pub domain: Vec<Site>,
    pub images: Vec<PointD>,
}

impl SubnetMap {
    pub fn validate(&self) -> Result<()> {
        let d = self.d;
        if !(2..=3).contains(&d) || self.window.len() != d {
            return Err(Error::InvalidInput(format!(
                "dimension {d} with a window of {} axes",
                self.window.len()
            )));
        }
        if self.domain.len() != self.images.len() {
            return Err(Error::InvalidInput(
                "domain and images differ in length".into(),
            ));
        }
        let mut seen = BTreeMap::new();
        for (i, (y, v)) in self.domain.iter().zip(&self.images).enumerate() {
            if y.len() != d || v.dim() != d || !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "entry {i} has the wrong dimension"
                )));
            }
            if !y
                .iter()
                .zip(&self.window)
                .all(|(&c, &(a, b))| a <= c && c <= b)
            {
                return Err(Error::InvalidInput(format!("{y:?} is outside the window")));
            }
            if seen.insert(y.clone(), i).is_some() {
                return Err(Error::InvalidInput(format!("{y:?} is listed twice")));
            }
        }
        Ok(())
    }

    fn pairs(&self) -> Vec<(PointD, PointD)> {
        self.domain
            .iter()
            .map(|y| site_point(y))
            .zip(self.images.iter().copied())
            .collect()
    }
}

fn site_point(y: &[i64]) -> PointD {
    PointD::new(&y.iter().map(|&c| c as f64).collect::<Vec<_>>())
}

/// F on every window point, with the anchors α_y and the slot lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeExtension {
    pub window: Vec<(i64, i64)>,
    pub points: Vec<Site>,
    pub images: Vec<PointD>,
    pub alpha: Vec<Site>,
    /// N = 16λ√d L: off-net images lie in (1/N)Z^d.
    pub n: f64,
    /// K = 16√d L: off-net images avoid B̄(f(α), 1/K).
    pub k: f64,
    /// 4λL.
    pub lip_bound: f64,
    /// 96λ²L√d.
    pub inv_bound: f64,
    /// Fewest candidate slots found around any f(α).
    pub min_capacity: usize,
}

impl LatticeExtension {
    pub fn point_pairs(&self) -> Vec<(PointD, PointD)> {
        self.points
            .iter()
            .map(|y| site_point(y))
            .zip(self.images.iter().copied())
            .collect()
    }
}

/// Points k/N with 1/K < ‖k/N − w‖ ≤ 1/(4L), lexicographic in k.
fn annulus_slots(w: &PointD, n: f64, k: f64, l: f64) -> Vec<PointD> {
    let outer = 1.0 / (4.0 * l);
    let inner = 1.0 / k;
    let ranges: Vec<(i64, i64)> = w
        .coords()
        .iter()
        .map(|&c| {
            (
                ((c - outer) * n).ceil() as i64,
                ((c + outer) * n).floor() as i64,
            )
        })
        .collect();
    box_points(&ranges)
        .into_iter()
        .map(|kk| PointD::new(&kk.iter().map(|&c| c as f64 / n).collect::<Vec<_>>()))
        .filter(|p| {
            let r = p.dist(w);
            r > inner && r <= outer
        })
        .collect()
}

/// F: window ∩ Z^d → R^d extending f, with off-net points sent injectively
/// into (1/N)Z^d near f(α_y).
pub fn extend_from_subnet(f: &SubnetMap, lambda: f64, l: f64) -> Result<LatticeExtension> {
    f.validate()?;
    if !(lambda >= 1.0 && l >= 1.0) {
        return Err(Error::InvalidInput(format!(
            "need λ ≥ 1 and L ≥ 1, got λ = {lambda}, L = {l}"
        )));
    }
    let d = f.d;
    let est = exhaustive_bilip(&f.pairs())?;
    let slack = 1.0 + 1e-12;
    if est.lip_up > l * slack || est.lip_down > l * slack {
        return Err(Error::HypothesisViolated(format!(
            "f is not {l}-bilipschitz on Y: constants {} and {}",
            est.lip_up, est.lip_down
        )));
    }
    let index: HashMap<&Site, usize> = f.domain.iter().enumerate().map(|(i, y)| (y, i)).collect();
    let reach = lambda.floor() as i64;
    let lam2 = lambda * lambda * slack;
    let points = box_points(&f.window);
    let mut alpha = Vec::with_capacity(points.len());
    for y in &points {
        if index.contains_key(y) {
            alpha.push(y.clone());
            continue;
        }
        // Nearest net point within λ; box_points is lexicographic, so the
        // first minimiser is the lexicographically smallest.
        let around: Vec<(i64, i64)> = y.iter().map(|&c| (c - reach, c + reach)).collect();
        let mut best: Option<(i64, Site)> = None;
        for c in box_points(&around) {
            if !index.contains_key(&c) {
                continue;
            }
            let g: i64 = c.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
            if (g as f64) <= lam2 && best.as_ref().map_or(true, |(bg, _)| g < *bg) {
                best = Some((g, c));
            }
        }
        match best {
            Some((_, c)) => alpha.push(c),
            None => {
                return Err(Error::NotANet(format!(
                    "no point of Y within λ = {lambda} of {y:?}"
                )))
            }
        }
    }
    let sd = (d as f64).sqrt();
    let n = 16.0 * lambda * sd * l;
    let k = 16.0 * sd * l;
    let need = (2.0 * (lambda + 1.0)).powi(d as i32);
    let mut groups: BTreeMap<Site, Vec<usize>> = BTreeMap::new();
    for (i, y) in points.iter().enumerate() {
        if !index.contains_key(y) {
            groups.entry(alpha[i].clone()).or_default().push(i);
        }
    }
    let mut images: Vec<PointD> = points
        .iter()
        .map(|y| {
            index
                .get(y)
                .map(|&j| f.images[j])
                .unwrap_or(PointD::zeros(d))
        })
        .collect();
    let mut min_capacity = usize::MAX;
    for (a, members) in &groups {
        let slots = annulus_slots(&f.images[index[a]], n, k, l);
        min_capacity = min_capacity.min(slots.len());
        if (slots.len() as f64) < need {
            return Err(Error::check(
                "annulus capacity",
                format!(
                    "{} slots around f({a:?}), fewer than 2^d(λ+1)^d = {need}",
                    slots.len()
                ),
            ));
        }
        if slots.len() < members.len() {
            return Err(Error::SlotExhausted(format!(
                "{} points anchored at {a:?} but only {} slots",
                members.len(),
                slots.len()
            )));
        }
        for (&i, p) in members.iter().zip(slots) {
            images[i] = p;
        }
    }
    Ok(LatticeExtension {
        window: f.window.clone(),
        points,
        images,
        alpha,
        n,
        k,
        lip_bound: 4.0 * lambda * l,
        inv_bound: 96.0 * lambda * lambda * l * sd,
        min_capacity: if groups.is_empty() { 0 } else { min_capacity },
    })
}

/// Exhaustive constants of F on the window, checked against 4λL and
/// 96λ²L√d, and F = f on Y.
pub fn check_extension(ext: &LatticeExtension, f: &SubnetMap) -> Result<BilipEstimate> {
    let pos: HashMap<&Site, usize> = ext.points.iter().enumerate().map(|(i, y)| (y, i)).collect();
    for (y, v) in f.domain.iter().zip(&f.images) {
        if ext.images[pos[y]] != *v {
            return Err(Error::check(
                "F extends f",
                format!("F({y:?}) differs from f"),
            ));
        }
    }
    let est = exhaustive_bilip(&ext.point_pairs())?;
    if est.lip_up > ext.lip_bound * (1.0 + 1e-12) {
        return Err(Error::check(
            "Lip(F) ≤ 4λL",
            format!("{} > {}", est.lip_up, ext.lip_bound),
        ));
    }
    if est.lip_down > ext.inv_bound * (1.0 + 1e-12) {
        return Err(Error::check(
            "Lip(F⁻¹) ≤ 96λ²L√d",
            format!("{} > {}", est.lip_down, ext.inv_bound),
        ));
    }
    Ok(est)
}

/// Covering radius of Y inside the window: the largest distance from a
/// window point to its nearest point of Y.
pub fn covering_radius(window: &[(i64, i64)], domain: &[Site]) -> f64 {
    let pts = box_points(window);
    pts.iter()
        .map(|p| {
            domain
                .iter()
                .map(|y| {
                    y.iter()
                        .zip(p)
                        .map(|(a, b)| ((a - b) * (a - b)) as f64)
                        .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
        .fold(0.0, f64::max)
}
