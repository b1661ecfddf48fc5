//! Decomposition of a bounded-displacement permutation of Z^l into
//! permutations of (1/2)Z^l that act inside tiles.
//!
//! All sites here are doubled coordinates. The tile Q + Tz with
//! Q = (−1/3, …, −1/3) + [0, T]^l contains exactly the doubled sites u with
//! 2Tz_i ≤ u_i ≤ 2T(z_i + 1) − 1, so the tile of u is ⌊u / 2T⌋ coordinatewise.
//! The enlarged tile Q̂ + Tc is the union of the 3^l tiles c + {−1, 0, 1}^l.

use super::perm::{box_points, Site, WindowPermutation};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};

pub type Tile = Vec<i64>;

pub fn tile_of(u: &[i64], t: i64) -> Tile {
    u.iter().map(|c| c.div_euclid(2 * t)).collect()
}

/// Doubled sites of Q + Tz in lexicographic order.
pub fn tile_sites(z: &[i64], t: i64) -> Vec<Site> {
    let b: Vec<(i64, i64)> = z
        .iter()
        .map(|&c| (2 * t * c, 2 * t * c + 2 * t - 1))
        .collect();
    box_points(&b)
}

/// Index of the enlarged tile Q̂ + T(3k + p) containing tile `z`.
pub fn block_of(z: &[i64], p: &[i64]) -> Vec<i64> {
    z.iter()
        .zip(p)
        .map(|(&c, &q)| (c - q + 1).div_euclid(3))
        .collect()
}

/// The offsets {−1, 0, 1}^l in lexicographic order.
pub fn offsets(l: usize) -> Vec<Vec<i64>> {
    box_points(&vec![(-1, 1); l])
}

fn in_hat(u: &[i64], c: &[i64], t: i64) -> bool {
    tile_of(u, t).iter().zip(c).all(|(a, b)| (a - b).abs() <= 1)
}

fn is_integer_site(u: &[i64]) -> bool {
    u.iter().all(|c| c.rem_euclid(2) == 0)
}

/// A set M of occupied sites together with the target tile Δ of each.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundState {
    pub t: i64,
    pub l: usize,
    /// Tiles inside which the lattice is tracked; all other tiles are
    /// untouched and satisfy the hypotheses trivially.
    pub tiles: BTreeSet<Tile>,
    /// Occupied site ↦ target tile.
    pub target: BTreeMap<Site, Tile>,
}

impl RoundState {
    fn per_tile<F: Fn(&Site, &Tile) -> Option<Tile>>(&self, key: F) -> HashMap<Tile, usize> {
        let mut m = HashMap::new();
        for (u, z) in &self.target {
            if let Some(k) = key(u, z) {
                *m.entry(k).or_insert(0) += 1;
            }
        }
        m
    }

    /// Hypotheses (a)–(c) of a single round.
    pub fn check_hypotheses(&self) -> Result<()> {
        let tl = (self.t as usize).pow(self.l as u32);
        let cap = (2 * self.t as usize).pow(self.l as u32);
        let pre = self.per_tile(|_, z| Some(z.clone()));
        for z in &self.tiles {
            let n = pre.get(z).copied().unwrap_or(0);
            if n != tl {
                return Err(Error::HypothesisViolated(format!(
                    "(a): tile {z:?} has {n} preimages, not {tl}"
                )));
            }
        }
        for (u, z) in &self.target {
            if !in_hat(u, z, self.t) {
                return Err(Error::HypothesisViolated(format!(
                    "(b): site {u:?} is not in the enlarged tile of {z:?}"
                )));
            }
        }
        let occ = self.per_tile(|u, _| Some(tile_of(u, self.t)));
        let away = self.per_tile(|u, z| (tile_of(u, self.t) != *z).then(|| z.clone()));
        for z in &self.tiles {
            let free = cap - occ.get(z).copied().unwrap_or(0);
            let need = away.get(z).copied().unwrap_or(0);
            if free < need {
                return Err(Error::HypothesisViolated(format!(
                    "(c): tile {z:?} has {free} free sites for {need} incoming points"
                )));
            }
        }
        Ok(())
    }

    /// Moves every occupied site through `sigma`.
    pub fn advance(&self, sigma: &WindowPermutation) -> RoundState {
        RoundState {
            t: self.t,
            l: self.l,
            tiles: self.tiles.clone(),
            target: self
                .target
                .iter()
                .map(|(u, z)| (sigma.apply(u), z.clone()))
                .collect(),
        }
    }

    fn window(&self) -> Vec<(i64, i64)> {
        tiles_window(&self.tiles, self.l, self.t)
    }
}

/// Doubled-coordinate bounding box of a set of tiles.
fn tiles_window(tiles: &BTreeSet<Tile>, l: usize, t: i64) -> Vec<(i64, i64)> {
    (0..l)
        .map(|i| {
            let lo = tiles.iter().map(|z| z[i]).min().unwrap_or(0);
            let hi = tiles.iter().map(|z| z[i]).max().unwrap_or(0);
            (2 * t * lo, 2 * t * hi + 2 * t - 1)
        })
        .collect()
}

/// One round: every point whose target tile is congruent to p mod 3 and
/// which is not yet in its target tile swaps with a free site there.
///
/// The round is built for p = 0 on the translated lattice x ↦ x − Tp and
/// conjugated back. Free sites are taken first-fit in lexicographic order.
pub fn single_round(state: &RoundState, p: &[i64]) -> Result<WindowPermutation> {
    state.check_hypotheses()?;
    let t = state.t;
    let shift: Vec<i64> = p.iter().map(|&c| 2 * t * c).collect();
    let psi = |u: &Site| u.iter().zip(&shift).map(|(a, b)| a - b).collect::<Site>();
    let psi_inv = |u: &Site| u.iter().zip(&shift).map(|(a, b)| a + b).collect::<Site>();
    let kappa = |z: &Tile| z.iter().zip(p).map(|(a, b)| a - b).collect::<Tile>();

    let occupied: BTreeSet<Site> = state.target.keys().map(psi).collect();
    let mut movers: BTreeMap<Tile, Vec<Site>> = BTreeMap::new();
    for (u, z) in &state.target {
        let (u, z) = (psi(u), kappa(z));
        if z.iter().all(|c| c.rem_euclid(3) == 0) && tile_of(&u, t) != z {
            movers.entry(z).or_default().push(u);
        }
    }
    let mut map = BTreeMap::new();
    for (z, items) in movers {
        let mut free = tile_sites(&z, t)
            .into_iter()
            .filter(|s| !occupied.contains(s));
        for u in items {
            let slot = free.next().ok_or_else(|| {
                Error::SlotExhausted(format!("tile {:?} has no free site left", psi_inv(&z)))
            })?;
            map.insert(psi_inv(&u), psi_inv(&slot));
            map.insert(psi_inv(&slot), psi_inv(&u));
        }
    }
    let sigma = WindowPermutation {
        l: state.l,
        half: true,
        window: state.window(),
        map,
    };
    check_round(state, &sigma, p)?;
    Ok(sigma)
}

/// Conclusions (i)–(iv) of a round.
pub fn check_round(state: &RoundState, sigma: &WindowPermutation, p: &[i64]) -> Result<()> {
    let t = state.t;
    sigma
        .validate()
        .map_err(|e| Error::check("round bijectivity", e.to_string()))?;
    for (u, v) in &sigma.map {
        if block_of(&tile_of(u, t), p) != block_of(&tile_of(v, t), p) {
            return Err(Error::check(
                "round (i)",
                format!("{u:?} ↦ {v:?} leaves its enlarged tile"),
            ));
        }
    }
    let congruent = |z: &Tile| z.iter().zip(p).all(|(a, b)| (a - b).rem_euclid(3) == 0);
    for (u, z) in &state.target {
        let v = sigma.apply(u);
        if congruent(z) {
            if tile_of(&v, t) != *z {
                return Err(Error::check(
                    "round (ii)",
                    format!("{u:?} ↦ {v:?} misses tile {z:?}"),
                ));
            }
        } else if v != *u {
            return Err(Error::check(
                "round (iii)",
                format!("{u:?} moved although its target is {z:?}"),
            ));
        }
    }
    state
        .advance(sigma)
        .check_hypotheses()
        .map_err(|e| Error::check("round (iv)", e.to_string()))
}

/// The factors of a decomposition with the offsets they are local to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub t: i64,
    pub l: usize,
    /// p_k for the first 3^l rounds.
    pub offsets: Vec<Vec<i64>>,
    /// 3^l tile-shuffling rounds followed by the final in-tile round, all on
    /// (1/2)Z^l; apply in order.
    pub rounds: Vec<WindowPermutation>,
}

fn check_phi(phi: &WindowPermutation, t: i64) -> Result<()> {
    if phi.half {
        return Err(Error::InvalidInput(
            "expected a permutation of the integer lattice".into(),
        ));
    }
    if t < 1 {
        return Err(Error::InvalidInput("T must be at least 1".into()));
    }
    phi.validate()?;
    let d2 = phi.displacement2_units();
    if d2 > t * t {
        return Err(Error::DisplacementExceeded {
            found: (d2 as f64).sqrt(),
            bound: t as f64,
        });
    }
    Ok(())
}

/// Tiles met by the doubled window of φ.
fn touched_tiles(phi: &WindowPermutation, t: i64) -> BTreeSet<Tile> {
    let b: Vec<(i64, i64)> = phi
        .window
        .iter()
        .map(|&(a, c)| ((2 * a).div_euclid(2 * t), (2 * c).div_euclid(2 * t)))
        .collect();
    box_points(&b).into_iter().collect()
}

/// φ = (σ_{3^l+1} ∘ … ∘ σ_1) on Z^l with each σ_k local to enlarged tiles.
pub fn decompose(phi: &WindowPermutation, t: i64) -> Result<Decomposition> {
    check_phi(phi, t)?;
    let l = phi.l;
    let tiles = touched_tiles(phi, t);
    let dbl = |x: &Site| x.iter().map(|c| 2 * c).collect::<Site>();
    let mut target = BTreeMap::new();
    for z in &tiles {
        for u in tile_sites(z, t) {
            if is_integer_site(&u) {
                let x: Site = u.iter().map(|c| c / 2).collect();
                target.insert(u, tile_of(&dbl(&phi.apply(&x)), t));
            }
        }
    }
    let mut state = RoundState {
        t,
        l,
        tiles,
        target,
    };
    // Remember which original point sits where.
    let mut origin: BTreeMap<Site, Site> = state
        .target
        .keys()
        .map(|u| (u.clone(), u.clone()))
        .collect();
    let offs = offsets(l);
    let mut rounds = Vec::with_capacity(offs.len() + 1);
    for p in &offs {
        let sigma = single_round(&state, p)?;
        origin = origin
            .into_iter()
            .map(|(u, o)| (sigma.apply(&u), o))
            .collect();
        state = state.advance(&sigma);
        rounds.push(sigma);
    }
    // Final round: inside each tile send every point to its image.
    let mut map = BTreeMap::new();
    let mut by_tile: BTreeMap<Tile, Vec<(Site, Site)>> = BTreeMap::new();
    for (u, o) in &origin {
        let x: Site = o.iter().map(|c| c / 2).collect();
        let goal = dbl(&phi.apply(&x));
        let z = tile_of(u, t);
        if z != tile_of(&goal, t) {
            return Err(Error::check(
                "local rounds",
                format!("{o:?} is in tile {z:?} after the shuffles"),
            ));
        }
        by_tile.entry(z).or_default().push((u.clone(), goal));
    }
    for (z, moves) in by_tile {
        let sources: BTreeSet<Site> = moves.iter().map(|m| m.0.clone()).collect();
        let goals: BTreeSet<Site> = moves.iter().map(|m| m.1.clone()).collect();
        let sites = tile_sites(&z, t);
        let rest_src = sites.iter().filter(|s| !sources.contains(*s));
        let rest_dst = sites.iter().filter(|s| !goals.contains(*s));
        for (a, b) in moves
            .into_iter()
            .chain(rest_src.cloned().zip(rest_dst.cloned()))
        {
            if a != b {
                map.insert(a, b);
            }
        }
    }
    rounds.push(WindowPermutation {
        l,
        half: true,
        window: state.window(),
        map,
    });
    let dec = Decomposition {
        t,
        l,
        offsets: offs,
        rounds,
    };
    check_decomposition(phi, &dec)?;
    Ok(dec)
}

/// Tile-locality of every factor and agreement with φ on the window.
pub fn check_decomposition(phi: &WindowPermutation, dec: &Decomposition) -> Result<()> {
    let t = dec.t;
    let l = dec.l;
    if dec.rounds.len() != 3usize.pow(l as u32) + 1 || dec.offsets.len() + 1 != dec.rounds.len() {
        return Err(Error::check(
            "factor count",
            format!("{} factors", dec.rounds.len()),
        ));
    }
    for (k, sigma) in dec.rounds.iter().enumerate() {
        sigma
            .validate()
            .map_err(|e| Error::check("factor bijectivity", e.to_string()))?;
        for (u, v) in &sigma.map {
            let (zu, zv) = (tile_of(u, t), tile_of(v, t));
            let ok = match dec.offsets.get(k) {
                Some(p) => block_of(&zu, p) == block_of(&zv, p),
                None => zu == zv,
            };
            if !ok {
                return Err(Error::check(
                    "tile locality",
                    format!("factor {k} sends {u:?} to {v:?}"),
                ));
            }
        }
    }
    for x in phi.window_points() {
        let u: Site = x.iter().map(|c| 2 * c).collect();
        let got = super::perm::apply_sequence(&dec.rounds, &u);
        let want: Site = phi.apply(&x).iter().map(|c| 2 * c).collect();
        if got != want {
            return Err(Error::check(
                "composition",
                format!("{x:?} ↦ {got:?}, expected {want:?}"),
            ));
        }
    }
    Ok(())
}

/// The three factors of the one-dimensional decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition1d {
    pub t: i64,
    pub sigma: WindowPermutation,
    pub tau: WindowPermutation,
    pub rho: WindowPermutation,
}

/// φ = ρ∘τ∘σ on Z: σ and τ move each boundary-crossing x to φ(x) + 1/2
/// across even and odd tile boundaries respectively, ρ sorts inside tiles.
pub fn decompose_1d(phi: &WindowPermutation, t: i64) -> Result<Decomposition1d> {
    check_phi(phi, t)?;
    if phi.l != 1 {
        return Err(Error::InvalidInput(
            "one-dimensional decomposition needs l = 1".into(),
        ));
    }
    let tiles = touched_tiles(phi, t);
    let window = tiles_window(&tiles, 1, t);
    let mut sigma = BTreeMap::new();
    let mut tau = BTreeMap::new();
    let (wa, wb) = phi.window[0];
    for x in wa..=wb {
        let y = phi.apply(&[x])[0];
        let (zx, zy) = ((2 * x).div_euclid(2 * t), (2 * y).div_euclid(2 * t));
        if zx == zy {
            continue;
        }
        let left = zx.min(zy);
        let half = vec![2 * y + 1];
        let target = if left.rem_euclid(2) == 0 {
            &mut sigma
        } else {
            &mut tau
        };
        target.insert(vec![2 * x], half.clone());
        target.insert(half, vec![2 * x]);
    }
    let sigma = WindowPermutation {
        l: 1,
        half: true,
        window: window.clone(),
        map: sigma,
    };
    let tau = WindowPermutation {
        l: 1,
        half: true,
        window: window.clone(),
        map: tau,
    };
    // ρ sorts each tile: position τσ(x) goes to φ(x); the rest fills in.
    let mut by_tile: BTreeMap<i64, Vec<(i64, i64)>> = BTreeMap::new();
    for z in &tiles {
        for u in tile_sites(z, t) {
            if is_integer_site(&u) {
                let x = u[0] / 2;
                let at = tau.apply(&sigma.apply(&u))[0];
                by_tile
                    .entry(at.div_euclid(2 * t))
                    .or_default()
                    .push((at, 2 * phi.apply(&[x])[0]));
            }
        }
    }
    let mut rho = BTreeMap::new();
    for (z, moves) in by_tile {
        let src: BTreeSet<i64> = moves.iter().map(|m| m.0).collect();
        let dst: BTreeSet<i64> = moves.iter().map(|m| m.1).collect();
        let sites: Vec<i64> = (2 * t * z..2 * t * z + 2 * t).collect();
        let rest = sites
            .iter()
            .filter(|s| !src.contains(s))
            .zip(sites.iter().filter(|s| !dst.contains(s)))
            .map(|(a, b)| (*a, *b));
        for (a, b) in moves.into_iter().chain(rest) {
            if a != b {
                rho.insert(vec![a], vec![b]);
            }
        }
    }
    let rho = WindowPermutation {
        l: 1,
        half: true,
        window,
        map: rho,
    };
    let dec = Decomposition1d { t, sigma, tau, rho };
    check_decomposition_1d(phi, &dec)?;
    Ok(dec)
}

/// σ local to Q_z ∪ Q_{z+1} for even z, τ for odd z, ρ to each Q_z, and
/// ρ∘τ∘σ = φ on the window.
pub fn check_decomposition_1d(phi: &WindowPermutation, dec: &Decomposition1d) -> Result<()> {
    let t = dec.t;
    let pair = |u: i64, parity: i64| (u.div_euclid(2 * t) - parity).div_euclid(2);
    for (name, perm, parity) in [("sigma", &dec.sigma, 0), ("tau", &dec.tau, 1)] {
        perm.validate()
            .map_err(|e| Error::check("factor bijectivity", e.to_string()))?;
        for (u, v) in &perm.map {
            if pair(u[0], parity) != pair(v[0], parity) {
                return Err(Error::check(
                    "tile locality",
                    format!("{name} sends {u:?} to {v:?}"),
                ));
            }
        }
    }
    dec.rho
        .validate()
        .map_err(|e| Error::check("factor bijectivity", e.to_string()))?;
    for (u, v) in &dec.rho.map {
        if u[0].div_euclid(2 * t) != v[0].div_euclid(2 * t) {
            return Err(Error::check(
                "tile locality",
                format!("rho sends {u:?} to {v:?}"),
            ));
        }
    }
    let (a, b) = phi.window[0];
    for x in a..=b {
        let got = dec.rho.apply(&dec.tau.apply(&dec.sigma.apply(&[2 * x])));
        if got != vec![2 * phi.apply(&[x])[0]] {
            return Err(Error::check("composition", format!("{x} ↦ {got:?}")));
        }
    }
    Ok(())
}
