//! Rounding an r-separated set of R^d into Z^d by a scaling followed by
//! disjoint tube-spins.

use super::slab::close_pairs;
use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::geom::PointD;
use crate::planemap::{Affine, Bound, PlaneMap, TubeFamily, TubeSpin};
use num_traits::ToPrimitive;
use std::collections::HashMap;

/// An r-separated set, optionally with covering radius R.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparatedNet {
    pub points: Vec<PointD>,
    pub r: f64,
    pub big_r: Option<f64>,
    pub d: usize,
}

impl SeparatedNet {
    pub fn new(points: Vec<PointD>, r: f64, big_r: Option<f64>, d: usize) -> Result<Self> {
        let net = SeparatedNet {
            points,
            r,
            big_r,
            d,
        };
        net.validate()?;
        Ok(net)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.d) {
            return Err(Error::InvalidInput(format!(
                "dimension {} is not 2 or 3",
                self.d
            )));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "separation r = {} must be positive",
                self.r
            )));
        }
        if let Some(big) = self.big_r {
            if !(big >= self.r / 2.0) {
                return Err(Error::InvalidInput(format!(
                    "covering radius {big} is below r/2"
                )));
            }
        }
        for (i, p) in self.points.iter().enumerate() {
            if p.dim() != self.d || !p.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "point {i} is not a finite point of R^{}",
                    self.d
                )));
            }
        }
        if let Some((i, j)) = close_pairs(&self.points, self.r).first() {
            return Err(Error::SeparationViolated(format!(
                "points {i} and {j} are {} apart, below r = {}",
                self.points[*i].dist(&self.points[*j]),
                self.r
            )));
        }
        Ok(())
    }
}

/// Φ = Π∘Ψ with Ψ the scaling by 6d/r and Π swapping each Ψ(x) with a
/// nearby lattice point.
#[derive(Clone, Debug)]
pub struct LatticeRounding {
    /// The float value of 6d/r used for Ψ; exact images use its rational
    /// value.
    pub scale: f64,
    pub map: PlaneMap,
    /// Φ(x) ∈ Z^d.
    pub images: Vec<Vec<i64>>,
    /// max{264d/r, 22r/3d}.
    pub bound: Bound,
}

/// Nearest integer with ties toward −∞.
fn round_down_ties(v: &Q) -> i64 {
    (v - exact::qfrac(1, 2))
        .ceil()
        .to_integer()
        .to_i64()
        .expect("lattice coordinate fits in i64")
}

pub fn net_to_lattice(net: &SeparatedNet) -> Result<LatticeRounding> {
    net.validate()?;
    round_at(net, 6.0 * net.d as f64 / net.r, true)
}

/// Φ with the scaling by a given factor instead of 6d/r. The swaps must
/// still land on distinct lattice points with disjoint tubes, which is
/// checked; the bound is the product of the scaling and tube constants.
pub fn net_to_lattice_at(net: &SeparatedNet, scale: f64) -> Result<LatticeRounding> {
    net.validate()?;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidInput(format!("scale {scale} must be positive")));
    }
    round_at(net, scale, false)
}

/// The smallest integer scale c ≤ 6d/r at which [`net_to_lattice_at`]
/// succeeds, falling back to 6d/r.
pub fn net_to_lattice_smallest(net: &SeparatedNet) -> Result<LatticeRounding> {
    net.validate()?;
    let top = 6.0 * net.d as f64 / net.r;
    for c in 1..top.ceil() as i64 {
        if let Ok(lr) = round_at(net, c as f64, false) {
            return Ok(lr);
        }
    }
    net_to_lattice(net)
}

fn round_at(net: &SeparatedNet, scale: f64, paper: bool) -> Result<LatticeRounding> {
    let d = net.d;
    let c = exact::q(scale);
    let mut tubes = Vec::new();
    let mut images = Vec::with_capacity(net.points.len());
    for p in &net.points {
        let v: Vec<Q> = p.coords().iter().map(|x| &c * exact::q(*x)).collect();
        let y: Vec<i64> = v.iter().map(round_down_ties).collect();
        let yq: Vec<Q> = y.iter().map(|&k| exact::qi(k)).collect();
        if yq != v {
            let r2 = exact::dist2(&v, &yq) / exact::qi(4);
            tubes.push(TubeSpin::new_exact(v, yq, r2)?);
        }
        images.push(y);
    }
    // Swap balls B(y_x, 2√d) are pairwise disjoint: ‖y_x − y_x'‖² ≥ 16d.
    let lifted: Vec<PointD> = images
        .iter()
        .map(|y| PointD::new(&y.iter().map(|&k| k as f64).collect::<Vec<_>>()))
        .collect();
    if !paper {
        let mut seen = HashMap::new();
        for (i, y) in images.iter().enumerate() {
            if let Some(j) = seen.insert(y.clone(), i) {
                return Err(Error::check(
                    "rounding injective",
                    format!("points {j} and {i} round to {y:?}"),
                ));
            }
        }
    }
    let reach = 4.0 * (d as f64).sqrt();
    for (i, j) in close_pairs(&lifted, reach + 1.0).into_iter().filter(|_| paper) {
        let gap2: i64 = images[i]
            .iter()
            .zip(&images[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        if gap2 < 16 * d as i64 {
            return Err(Error::check(
                "swap balls disjoint",
                format!("points {i} and {j} round to lattice points {gap2}^(1/2) apart"),
            ));
        }
    }
    let family = TubeFamily::new(d, tubes);
    family.check_disjoint()?;
    let tube_bound = family.bound();
    let mut m = vec![vec![0.0; d]; d];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = scale;
    }
    let psi = PlaneMap::affine(Affine::new(&m, &vec![0.0; d])?);
    let map = PlaneMap::compose(vec![PlaneMap::TubeFamily { family }, psi]);
    let dd = d as f64;
    let bound = if paper {
        Bound::new((264.0 * dd / net.r).max(22.0 * net.r / (3.0 * dd)))
    } else {
        Bound::new(scale.max(1.0 / scale) * tube_bound)
    };
    Ok(LatticeRounding {
        scale,
        map,
        images,
        bound,
    })
}

/// Exact check that Φ(A) ⊆ Z^d matches the recorded images and is
/// injective.
pub fn check_lattice_rounding(lr: &LatticeRounding, net: &SeparatedNet) -> Result<()> {
    let mut seen: HashMap<&Vec<i64>, usize> = HashMap::new();
    for (i, p) in net.points.iter().enumerate() {
        let x: Vec<Q> = p.coords().iter().map(|v| exact::q(*v)).collect();
        let img = lr.map.evaluate_exact(&x).ok_or_else(|| {
            Error::check("exact evaluation", format!("Φ at point {i} needs rounding"))
        })?;
        let want: Vec<Q> = lr.images[i].iter().map(|&k| exact::qi(k)).collect();
        if img != want {
            return Err(Error::check(
                "Φ(A) ⊆ Z^d",
                format!("point {i} lands at {img:?}"),
            ));
        }
        if let Some(j) = seen.insert(&lr.images[i], i) {
            return Err(Error::check(
                "injectivity",
                format!("points {j} and {i} share an image"),
            ));
        }
    }
    Ok(())
}
