//! Extending a map given on the walls R×{−1, 1} and on the lattice row
//! Z×{0} to the whole plane.

use crate::error::{Error, Result};
use crate::exact;
use crate::geom::{Point, PointD};
use crate::planemap::{Bound, PlaneMap, TubeFamily, TubeSpin};
use crate::rounding::{inj_round, RoundingMaps, SlabNet};
use serde::{Deserialize, Serialize};

/// f(x, 0) for the columns x of a window; f is the identity on the walls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreadInput {
    pub columns: (i64, i64),
    pub values: Vec<Point>,
    pub l: u32,
    pub d: usize,
}

impl ThreadInput {
    pub fn new(columns: (i64, i64), values: Vec<Point>, l: u32) -> Result<Self> {
        let t = ThreadInput {
            columns,
            values,
            l,
            d: 2,
        };
        t.validate()?;
        Ok(t)
    }

    /// L ≥ 12d, one value per column, and values in R×[−(1 − 1/L), 1 − 1/L],
    /// which is what L-bilipschitz with identity walls forces.
    pub fn validate(&self) -> Result<()> {
        if self.d != 2 {
            return Err(Error::InvalidInput(format!("dimension {} is not 2", self.d)));
        }
        if (self.l as usize) < 12 * self.d {
            return Err(Error::HypothesisViolated(format!(
                "L = {} is below 12d = {}",
                self.l,
                12 * self.d
            )));
        }
        let n = self.columns.1 - self.columns.0 + 1;
        if n < 1 || n as usize != self.values.len() {
            return Err(Error::InvalidInput(format!(
                "{} values for columns {:?}",
                self.values.len(),
                self.columns
            )));
        }
        let cap = 1.0 - 1.0 / self.l as f64;
        for (k, p) in self.values.iter().enumerate() {
            if !p.is_finite() || p.y.abs() > cap + crate::EPS {
                return Err(Error::HypothesisViolated(format!(
                    "value {k} at {p:?} is within 1/L of a wall"
                )));
            }
        }
        Ok(())
    }

    pub fn column(&self, k: usize) -> f64 {
        (self.columns.0 + k as i64) as f64
    }
}

/// How the involution φ of the axis is realised.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ThreadMode {
    /// Permutation decomposition and tile shuffles with S = 3L⁴T, subject
    /// to a cap on the transposition program length S^{2d}.
    Paper { max_program: u64 },
    /// One tube spin per column swapping (x, 0) and (ξ(x), 0); needs the
    /// segments [x, ξ(x)] to be disjoint and free of other sites.
    Desk,
}

#[derive(Clone, Debug)]
pub struct Thread {
    /// F = (Υ∘Ψ)⁻¹.
    pub map: PlaneMap,
    pub rounding: RoundingMaps,
    /// ξ(x) for each column.
    pub xi: Vec<f64>,
    /// Υ with Υ(ξ(x), 0) = (x, 0).
    pub upsilon: PlaneMap,
    /// Construction bound of F.
    pub bound: Bound,
    /// log₂ of 2¹⁴dL⁸·exp(2³3^{33d}d^{2d}L^{26d}).
    pub paper_log2: f64,
}

/// log₂ of the stated constant 2¹⁴dL⁸·exp(2³3^{33d}d^{2d}L^{26d}).
pub fn thread_paper_log2(l: f64, d: usize) -> f64 {
    let df = d as f64;
    let lin = 14.0 + df.log2() + 8.0 * l.log2();
    let expo = 3.0 + 33.0 * df * 3f64.log2() + 2.0 * df * df.log2() + 26.0 * df * l.log2();
    lin + expo.exp2() * std::f64::consts::LOG2_E
}

/// T = 2¹⁵dL⁹.
pub fn thread_displacement(l: f64, d: usize) -> f64 {
    2f64.powi(15) * d as f64 * l.powi(9)
}

pub fn thread_extend(input: &ThreadInput, mode: ThreadMode) -> Result<Thread> {
    input.validate()?;
    let l = input.l as f64;
    let d = input.d;
    let s = 1.0 / l;
    let net = SlabNet::new(
        input.values.iter().map(|p| PointD::from(*p)).collect(),
        s,
        d,
    )?;
    let rounding = inj_round(&net)?;
    let xi: Vec<f64> = rounding.slots.iter().map(|c| exact::to_f64(&c[0])).collect();
    let upsilon = match mode {
        ThreadMode::Paper { max_program } => {
            // S ≥ 3·24⁴·T with T ≥ 2¹⁶·24⁹, so S^{2d} exceeds every u64 cap
            // and this check always stops the full-constant path.
            let t = thread_displacement(l, d);
            let side = 3.0 * l.powi(4) * t;
            let log2_len = 2.0 * d as f64 * side.log2();
            return Err(Error::BudgetExceeded(format!(
                "tile side S = 3L⁴T = {side:.3e} gives programs of up to 2^{log2_len:.1} \
                 transpositions, over the cap {max_program}"
            )));
        }
        ThreadMode::Desk => axis_swaps(input, &xi)?,
    };
    let bound = rounding.bound.times(upsilon.bound());
    let map = PlaneMap::compose(vec![rounding.psi.inverse(), upsilon.inverse()]);
    Ok(Thread {
        map,
        rounding,
        xi,
        upsilon,
        bound,
        paper_log2: thread_paper_log2(l, d),
    })
}

/// Tube spins on the axis swapping each column x with ξ(x).
fn axis_swaps(input: &ThreadInput, xi: &[f64]) -> Result<PlaneMap> {
    let n = xi.len();
    let mut iv: Vec<(f64, f64, usize)> = (0..n)
        .map(|k| {
            let x = input.column(k);
            (x.min(xi[k]), x.max(xi[k]), k)
        })
        .collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut sites: Vec<f64> = (0..n).map(|k| input.column(k)).chain(xi.iter().copied()).collect();
    sites.sort_by(f64::total_cmp);
    let mut tubes = Vec::with_capacity(n);
    for (pos, &(a, b, k)) in iv.iter().enumerate() {
        if pos + 1 < n && iv[pos + 1].0 <= b {
            return Err(Error::check(
                "axis swaps disjoint",
                format!("segments of columns {} and {} overlap", input.column(k), input.column(iv[pos + 1].2)),
            ));
        }
        let inside = sites.iter().filter(|&&u| u >= a && u <= b).count();
        if inside != 2 {
            return Err(Error::check(
                "axis swaps disjoint",
                format!("segment [{a}, {b}] of column {} holds another site", input.column(k)),
            ));
        }
        let left = sites.iter().rev().find(|&&u| u < a).map_or(f64::INFINITY, |u| a - u);
        let right = sites.iter().find(|&&u| u > b).map_or(f64::INFINITY, |u| u - b);
        let r = (0.5 * (b - a)).min(left / 3.0).min(right / 3.0);
        tubes.push(TubeSpin::new(
            PointD::xy(input.column(k), 0.0),
            PointD::xy(xi[k], 0.0),
            r,
        )?);
    }
    let family = TubeFamily::new(2, tubes);
    family.check_disjoint()?;
    Ok(PlaneMap::TubeFamily { family })
}
