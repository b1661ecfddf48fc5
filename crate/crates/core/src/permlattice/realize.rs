//! Realising a tile-local permutation of Z^{d−1} by a composition of
//! tube-spins that swap neighbouring lattice points.

use super::perm::{box_points, Site, WindowPermutation};
use crate::error::{Error, Result};
use crate::geom::PointD;
use crate::planemap::{tube_spin, Bound, GluedPiece, PlaneMap, Region};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Boustrophedon enumeration of {0, …, S−1}^l: consecutive entries differ
/// by one in exactly one coordinate.
pub fn snake_order(l: usize, s: i64) -> Vec<Site> {
    if l == 0 {
        return vec![Vec::new()];
    }
    let inner = snake_order(l - 1, s);
    let mut out = Vec::with_capacity(inner.len() * s as usize);
    for v in 0..s {
        let run: Box<dyn Iterator<Item = &Site>> = if v % 2 == 0 {
            Box::new(inner.iter())
        } else {
            Box::new(inner.iter().rev())
        };
        for p in run {
            let mut q = p.clone();
            q.push(v);
            out.push(q);
        }
    }
    out
}

/// Adjacent transpositions (i, i+1), applied first to last, whose product
/// sends position i to position `target[i]`. Bubble sort, so the count is
/// the number of inversions.
pub fn bubble_sort_transpositions(target: &[usize]) -> Vec<(usize, usize)> {
    // `at[j]` is the item currently at position j, identified by its goal.
    let mut at: Vec<usize> = target.to_vec();
    let mut swaps = Vec::new();
    let n = at.len();
    for pass in 0..n {
        let mut moved = false;
        for j in 0..n.saturating_sub(pass + 1) {
            if at[j] > at[j + 1] {
                at.swap(j, j + 1);
                swaps.push((j, j + 1));
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    swaps
}

/// The swaps realising the permutation on one tile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransposeProgram {
    pub tile: Vec<i64>,
    /// a_1, a_2, … in snake order.
    pub sites: Vec<Site>,
    /// Index pairs into `sites`, applied first to last.
    pub swaps: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TileShuffle {
    pub s: i64,
    pub programs: Vec<TransposeProgram>,
    pub map: PlaneMap,
    /// 44^K for the longest program.
    pub bound: Bound,
    /// log₂ of exp(6S^{2d}) = 2^{6S^{2d}}.
    pub stated_log2: f64,
}

fn lift(x: &[i64]) -> PointD {
    let mut c: Vec<f64> = x.iter().map(|&v| v as f64).collect();
    c.push(0.0);
    PointD::new(&c)
}

/// Υ with Υ(x, 0) = (σ(x), 0) on Z^{d−1}, the identity off
/// R^{d−1}×(−1, 1) and on the tile walls. Tiles are (−1/2)+[0, S]^{d−1}+Sz.
pub fn realize_tile_shuffle(sigma: &WindowPermutation, s: i64) -> Result<TileShuffle> {
    if sigma.half {
        return Err(Error::InvalidInput(
            "tile shuffles act on the integer lattice".into(),
        ));
    }
    if s < 2 {
        return Err(Error::InvalidInput(format!(
            "tile side S = {s} must exceed 1"
        )));
    }
    sigma.validate()?;
    let l = sigma.l;
    let d = l + 1;
    if d > 3 {
        return Err(Error::InvalidInput("points live in R^d with d ≤ 3".into()));
    }
    let tile = |x: &[i64]| x.iter().map(|c| c.div_euclid(s)).collect::<Vec<i64>>();
    let mut tiles: BTreeMap<Vec<i64>, ()> = BTreeMap::new();
    for (x, y) in &sigma.map {
        if tile(x) != tile(y) {
            return Err(Error::NotTileLocal(format!(
                "{x:?} ↦ {y:?} crosses a tile wall"
            )));
        }
        tiles.insert(tile(x), ());
    }
    let snake = snake_order(l, s);
    let limit = (s as f64).powi(2 * d as i32);
    let mut programs = Vec::new();
    let mut pieces = Vec::new();
    let mut kmax = 0usize;
    for z in tiles.keys() {
        let sites: Vec<Site> = snake
            .iter()
            .map(|p| p.iter().zip(z).map(|(a, b)| a + s * b).collect())
            .collect();
        let index: BTreeMap<&Site, usize> = sites.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let target: Vec<usize> = sites.iter().map(|p| index[&sigma.apply(p)]).collect();
        let swaps = bubble_sort_transpositions(&target);
        if swaps.len() as f64 > limit {
            return Err(Error::check(
                "program length",
                format!(
                    "tile {z:?} needs {} swaps, more than S^(2d) = {limit}",
                    swaps.len()
                ),
            ));
        }
        kmax = kmax.max(swaps.len());
        let mut spins = Vec::with_capacity(swaps.len());
        for &(i, j) in swaps.iter().rev() {
            spins.push(tube_spin(lift(&sites[i]), lift(&sites[j]), 0.5)?);
        }
        let mut lo = PointD::zeros(d);
        let mut hi = PointD::zeros(d);
        for i in 0..l {
            lo[i] = (s * z[i]) as f64 - 0.5;
            hi[i] = (s * z[i] + s) as f64 - 0.5;
        }
        lo[l] = f64::NEG_INFINITY;
        hi[l] = f64::INFINITY;
        let region = Region::Box { lo, hi };
        pieces.push(GluedPiece {
            domain: region.clone(),
            image: region,
            map: PlaneMap::compose(spins),
        });
        programs.push(TransposeProgram {
            tile: z.clone(),
            sites,
            swaps,
        });
    }
    let bound = Bound::new(44.0).pow(kmax as f64);
    let map = if pieces.is_empty() {
        PlaneMap::identity(d)
    } else {
        pieces.push(GluedPiece {
            domain: Region::All,
            image: Region::All,
            map: PlaneMap::identity(d),
        });
        PlaneMap::RegionGlue {
            dim: d,
            pieces,
            bound,
        }
    };
    Ok(TileShuffle {
        s,
        programs,
        map,
        bound,
        stated_log2: 6.0 * limit,
    })
}

/// All lattice points of a tile, for tests and diagnostics.
pub fn tile_points(z: &[i64], s: i64) -> Vec<Site> {
    let b: Vec<(i64, i64)> = z.iter().map(|&c| (s * c, s * c + s - 1)).collect();
    box_points(&b)
}
