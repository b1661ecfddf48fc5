//! Permutations of Z^l or (1/2)Z^l that move finitely many points.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// A lattice point in stored units: integers for Z^l, doubled coordinates
/// for (1/2)Z^l.
pub type Site = Vec<i64>;

/// A bijection of the lattice that is the identity off a box window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PermData", into = "PermData")]
pub struct WindowPermutation {
    pub l: usize,
    /// When true the lattice is (1/2)Z^l and sites hold doubled coordinates.
    pub half: bool,
    /// Inclusive bounds per coordinate, in stored units.
    pub window: Vec<(i64, i64)>,
    /// The points that move, with their images.
    pub map: BTreeMap<Site, Site>,
}

#[derive(Clone, Serialize, Deserialize)]
struct PermData {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v: Option<u32>,
    l: usize,
    window: Vec<[f64; 2]>,
    pairs: Vec<[Vec<f64>; 2]>,
    #[serde(default)]
    half: bool,
}

fn to_units(x: f64, half: bool) -> Result<i64> {
    let u = if half { 2.0 * x } else { x };
    if u.fract() != 0.0 || !u.is_finite() || u.abs() > 2f64.powi(52) {
        return Err(Error::InvalidInput(format!(
            "{x} is not a lattice coordinate"
        )));
    }
    Ok(u as i64)
}

fn from_units(u: i64, half: bool) -> f64 {
    if half {
        u as f64 / 2.0
    } else {
        u as f64
    }
}

impl TryFrom<PermData> for WindowPermutation {
    type Error = Error;
    fn try_from(d: PermData) -> Result<Self> {
        let window = d
            .window
            .iter()
            .map(|[a, b]| Ok((to_units(*a, d.half)?, to_units(*b, d.half)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut pairs = Vec::with_capacity(d.pairs.len());
        for [x, y] in &d.pairs {
            let x = x
                .iter()
                .map(|c| to_units(*c, d.half))
                .collect::<Result<Site>>()?;
            let y = y
                .iter()
                .map(|c| to_units(*c, d.half))
                .collect::<Result<Site>>()?;
            pairs.push((x, y));
        }
        WindowPermutation::from_pairs(d.l, d.half, window, pairs)
    }
}

impl From<WindowPermutation> for PermData {
    fn from(p: WindowPermutation) -> Self {
        let h = p.half;
        PermData {
            v: Some(1),
            l: p.l,
            window: p
                .window
                .iter()
                .map(|&(a, b)| [from_units(a, h), from_units(b, h)])
                .collect(),
            pairs: p
                .map
                .iter()
                .map(|(x, y)| {
                    [
                        x.iter().map(|&c| from_units(c, h)).collect(),
                        y.iter().map(|&c| from_units(c, h)).collect(),
                    ]
                })
                .collect(),
            half: h,
        }
    }
}

impl WindowPermutation {
    pub fn identity(l: usize, half: bool, window: Vec<(i64, i64)>) -> Self {
        WindowPermutation {
            l,
            half,
            window,
            map: BTreeMap::new(),
        }
    }

    /// Builds and validates a permutation from (x, φ(x)) pairs; pairs with
    /// x = φ(x) may be included or omitted.
    pub fn from_pairs(
        l: usize,
        half: bool,
        window: Vec<(i64, i64)>,
        pairs: Vec<(Site, Site)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (x, y) in pairs {
            if x.len() != l || y.len() != l {
                return Err(Error::InvalidInput("pair of wrong dimension".into()));
            }
            if x != y && map.insert(x.clone(), y).is_some() {
                return Err(Error::InvalidInput(format!("{x:?} listed twice")));
            }
        }
        let p = WindowPermutation {
            l,
            half,
            window,
            map,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn in_window(&self, x: &[i64]) -> bool {
        x.iter()
            .zip(&self.window)
            .all(|(&c, &(a, b))| a <= c && c <= b)
    }

    /// Bijectivity on the window and identity off it.
    pub fn validate(&self) -> Result<()> {
        if self.window.len() != self.l || self.window.iter().any(|(a, b)| a > b) {
            return Err(Error::InvalidInput(
                "window does not match the dimension".into(),
            ));
        }
        let mut images = BTreeSet::new();
        for (x, y) in &self.map {
            if !self.in_window(x) || !self.in_window(y) {
                return Err(Error::InvalidInput(format!(
                    "{x:?} ↦ {y:?} leaves the window"
                )));
            }
            if !images.insert(y.clone()) {
                return Err(Error::InvalidInput(format!("{y:?} has two preimages")));
            }
        }
        let keys: BTreeSet<&Site> = self.map.keys().collect();
        if !images.iter().all(|y| keys.contains(y)) {
            return Err(Error::InvalidInput(
                "map is not a bijection of its moved set".into(),
            ));
        }
        Ok(())
    }

    pub fn apply(&self, x: &[i64]) -> Site {
        self.map.get(x).cloned().unwrap_or_else(|| x.to_vec())
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    pub fn inverse(&self) -> Self {
        WindowPermutation {
            l: self.l,
            half: self.half,
            window: self.window.clone(),
            map: self
                .map
                .iter()
                .map(|(x, y)| (y.clone(), x.clone()))
                .collect(),
        }
    }

    /// Largest squared displacement in stored units.
    pub fn displacement2_units(&self) -> i64 {
        self.map
            .iter()
            .map(|(x, y)| x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<i64>())
            .max()
            .unwrap_or(0)
    }

    /// Largest Euclidean displacement in lattice units.
    pub fn displacement(&self) -> f64 {
        let d = (self.displacement2_units() as f64).sqrt();
        if self.half {
            d / 2.0
        } else {
            d
        }
    }

    /// Every point of the window, in lexicographic order.
    pub fn window_points(&self) -> Vec<Site> {
        box_points(&self.window)
    }

    /// The same permutation viewed on the doubled lattice.
    pub fn to_half(&self) -> Self {
        if self.half {
            return self.clone();
        }
        let dbl = |x: &Site| x.iter().map(|c| 2 * c).collect::<Site>();
        WindowPermutation {
            l: self.l,
            half: true,
            window: self.window.iter().map(|&(a, b)| (2 * a, 2 * b)).collect(),
            map: self.map.iter().map(|(x, y)| (dbl(x), dbl(y))).collect(),
        }
    }
}

/// Points of an inclusive integer box in lexicographic order.
pub fn box_points(b: &[(i64, i64)]) -> Vec<Site> {
    let mut out = vec![Vec::new()];
    for &(lo, hi) in b {
        let mut next = Vec::with_capacity(out.len() * (hi - lo + 1).max(0) as usize);
        for p in &out {
            for c in lo..=hi {
                let mut q = p.clone();
                q.push(c);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Applies `perms[0]`, then `perms[1]`, and so on.
pub fn apply_sequence(perms: &[WindowPermutation], x: &[i64]) -> Site {
    perms.iter().fold(x.to_vec(), |p, s| s.apply(&p))
}

/// Random permutation of the window with displacement at most `t`, built
/// from random swaps that keep every displacement within the bound.
pub fn random_bounded_permutation(
    l: usize,
    window: Vec<(i64, i64)>,
    t: i64,
    seed: u64,
) -> WindowPermutation {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let pts = box_points(&window);
    let index: BTreeMap<Site, usize> = pts
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i))
        .collect();
    // img[i] is the index of φ(pts[i]).
    let mut img: Vec<usize> = (0..pts.len()).collect();
    let d2 = |a: &Site, b: &Site| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<i64>();
    for _ in 0..4 * pts.len() {
        let i = rng.gen_range(0..pts.len());
        let y: Site = pts[i].iter().map(|&c| c + rng.gen_range(-t..=t)).collect();
        let Some(&j) = index.get(&y) else { continue };
        if i == j {
            continue;
        }
        if d2(&pts[i], &pts[img[j]]) <= t * t && d2(&pts[j], &pts[img[i]]) <= t * t {
            img.swap(i, j);
        }
    }
    let pairs = (0..pts.len())
        .map(|i| (pts[i].clone(), pts[img[i]].clone()))
        .collect();
    WindowPermutation::from_pairs(l, false, window, pairs).expect("swaps preserve bijectivity")
}

/// Random permutation of Z^l preserving each tile {0..S−1}^l + Sz for the
/// tiles in `tiles`.
pub fn random_tile_permutation(
    l: usize,
    tiles: &[(i64, i64)],
    s: i64,
    seed: u64,
) -> WindowPermutation {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for z in box_points(tiles) {
        let b: Vec<(i64, i64)> = z.iter().map(|&c| (s * c, s * c + s - 1)).collect();
        let pts = box_points(&b);
        let mut img = pts.clone();
        img.shuffle(&mut rng);
        pairs.extend(pts.into_iter().zip(img));
    }
    let window = tiles.iter().map(|&(a, b)| (s * a, s * b + s - 1)).collect();
    WindowPermutation::from_pairs(l, false, window, pairs).expect("tile shuffles are bijective")
}
