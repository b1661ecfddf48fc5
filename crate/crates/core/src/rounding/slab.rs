//! Injective rounding of a separated set in the slab R^{d−1}×[−(1−s), 1−s]
//! onto (s⁴Z^{d−1}∖Z^{d−1})×{0}.

use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::geom::PointD;
use crate::planemap::{Bound, PlaneMap, TubeFamily, TubeSpin};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// An s-separated set inside R^{d−1}×[−(1−s), 1−s].
#[derive(Clone, Debug, PartialEq)]
pub struct SlabNet {
    pub points: Vec<PointD>,
    pub s: f64,
    pub d: usize,
}

impl SlabNet {
    pub fn new(points: Vec<PointD>, s: f64, d: usize) -> Result<Self> {
        let net = SlabNet { points, s, d };
        net.validate()?;
        Ok(net)
    }

    /// Checks d ∈ {2, 3}, s ≤ 1/(12d), slab membership, s-separation, and
    /// that points with nearby projections are far apart vertically.
    pub fn validate(&self) -> Result<()> {
        let (s, d) = (self.s, self.d);
        if !(2..=3).contains(&d) {
            return Err(Error::InvalidInput(format!("dimension {d} is not 2 or 3")));
        }
        if !(s > 0.0 && 12.0 * d as f64 * s <= 1.0) {
            return Err(Error::HypothesisViolated(format!(
                "s = {s} is not in (0, 1/(12d)]"
            )));
        }
        for (i, p) in self.points.iter().enumerate() {
            if p.dim() != d || !p.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "point {i} is not a finite point of R^{d}"
                )));
            }
            if p.last().abs() > 1.0 - s {
                return Err(Error::HypothesisViolated(format!(
                    "point {i} leaves the slab |x_d| ≤ 1 − s"
                )));
            }
        }
        let near = 3.0 * s * s * ((d - 1) as f64).sqrt();
        for (i, j) in close_pairs(&self.points, s.max(near)) {
            let (a, b) = (&self.points[i], &self.points[j]);
            if a.dist(b) < s {
                return Err(Error::SeparationViolated(format!(
                    "points {i} and {j} are {} apart",
                    a.dist(b)
                )));
            }
            if a.proj().dist(&b.proj()) <= near && (a.last() - b.last()).abs() < s / 2.0 {
                return Err(Error::SeparationViolated(format!(
                    "points {i} and {j} project within 3s²√(d−1) but differ by less than s/2 vertically"
                )));
            }
        }
        Ok(())
    }
}

/// Index pairs (i < j) at distance below `h`, found through a bucket grid.
pub(crate) fn close_pairs(points: &[PointD], h: f64) -> Vec<(usize, usize)> {
    let key =
        |p: &PointD| -> Vec<i64> { p.coords().iter().map(|c| (c / h).floor() as i64).collect() };
    let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        grid.entry(key(p)).or_default().push(i);
    }
    let d = points.first().map(|p| p.dim()).unwrap_or(0);
    let offsets = crate::permlattice::box_points(&vec![(-1, 1); d]);
    let mut out = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let k = key(p);
        for o in &offsets {
            let c: Vec<i64> = k.iter().zip(o).map(|(a, b)| a + b).collect();
            for &j in grid.get(&c).into_iter().flatten() {
                if j > i && p.dist(&points[j]) < h {
                    out.push((i, j));
                }
            }
        }
    }
    out
}

/// Ξ, Ω and Ψ = Ω∘Ξ with the assignment tables of the construction.
#[derive(Clone, Debug)]
pub struct RoundingMaps {
    pub s: f64,
    pub d: usize,
    pub xi: PlaneMap,
    pub omega: PlaneMap,
    pub psi: PlaneMap,
    /// Φ(x): the cell Q + s²Φ(x) containing the projection of x.
    pub cells: Vec<Vec<i64>>,
    /// ι_{Φ(x)}(x) as exact horizontal coordinates.
    pub slots: Vec<Vec<Q>>,
    /// 2¹⁴d/s⁸.
    pub bound: Bound,
}

impl RoundingMaps {
    /// Ψ(x) in exact arithmetic: (ι(x), 0).
    pub fn image_exact(&self, i: usize) -> Vec<Q> {
        let mut v = self.slots[i].clone();
        v.push(Q::zero());
        v
    }

    pub fn image(&self, i: usize) -> PointD {
        PointD::new(
            &self
                .image_exact(i)
                .iter()
                .map(exact::to_f64)
                .collect::<Vec<_>>(),
        )
    }
}

struct Grid {
    s2: Q,
    s4: Q,
    /// Denominator of s⁴ in lowest terms; s⁴k ∈ Z exactly when it divides k.
    den: BigInt,
}

impl Grid {
    fn new(s: f64) -> Self {
        let sq = exact::q(s);
        let s2 = &sq * &sq;
        let s4 = &s2 * &s2;
        let den = s4.denom().clone();
        Grid { s2, s4, den }
    }

    fn cell(&self, x: &Q) -> i64 {
        exact::floor(&(x / &self.s2))
            .to_i64()
            .expect("cell index fits in i64")
    }

    /// Range of k with s⁴k ∈ [s²z, s²z + s²).
    fn k_range(&self, z: i64) -> (i64, i64) {
        let lo = (exact::qi(z) * &self.s2 / &self.s4).ceil().to_integer();
        let hi = (exact::qi(z + 1) * &self.s2 / &self.s4).ceil().to_integer() - BigInt::one();
        (lo.to_i64().expect("fits"), hi.to_i64().expect("fits"))
    }

    fn on_integer_lattice(&self, k: &[i64]) -> bool {
        k.iter().all(|&c| (BigInt::from(c) % &self.den).is_zero())
    }

    /// |(Q + s²z) ∩ (s⁴Z^{d−1} ∖ Z^{d−1})|.
    fn capacity(&self, z: &[i64]) -> BigInt {
        let mut all = BigInt::one();
        let mut integral = BigInt::one();
        for &c in z {
            let (lo, hi) = self.k_range(c);
            all *= BigInt::from(hi - lo + 1);
            let m = |v: i64| BigInt::from(v).div_floor(&self.den);
            integral *= m(hi) - m(lo - 1);
        }
        all - integral
    }

    /// The first `n` admissible sites of the cell in lexicographic order.
    fn first_sites(&self, z: &[i64], n: usize) -> Option<Vec<Vec<i64>>> {
        let ranges: Vec<(i64, i64)> = z.iter().map(|&c| self.k_range(c)).collect();
        let mut out = Vec::with_capacity(n);
        let mut k: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        if ranges.iter().any(|r| r.0 > r.1) {
            return None;
        }
        while out.len() < n {
            if !self.on_integer_lattice(&k) {
                out.push(k.clone());
            }
            // Advance the last coordinate fastest.
            let mut i = k.len();
            loop {
                if i == 0 {
                    return (out.len() >= n).then_some(out);
                }
                i -= 1;
                if k[i] < ranges[i].1 {
                    k[i] += 1;
                    break;
                }
                k[i] = ranges[i].0;
            }
        }
        Some(out)
    }
}

/// |(Q + s²z) ∩ (s⁴Z^{d−1} ∖ Z^{d−1})| for the cell of index z.
pub fn cell_capacity(s: f64, z: &[i64]) -> BigInt {
    Grid::new(s).capacity(z)
}

fn rational_point(p: &PointD) -> Vec<Q> {
    p.coords().iter().map(|c| exact::q(*c)).collect()
}

fn min_q(a: Q, b: Q) -> Q {
    if a <= b {
        a
    } else {
        b
    }
}

/// Ψ = Ω∘Ξ with Ψ = id off R^{d−1}×(−1, 1), Ψ(X) ⊆ (s⁴Z^{d−1}∖Z^{d−1})×{0}
/// and horizontal moves at most s²√(d−1).
pub fn inj_round(net: &SlabNet) -> Result<RoundingMaps> {
    net.validate()?;
    let (s, d) = (net.s, net.d);
    let grid = Grid::new(s);
    let pts: Vec<Vec<Q>> = net.points.iter().map(rational_point).collect();
    let cells: Vec<Vec<i64>> = pts
        .iter()
        .map(|p| p[..d - 1].iter().map(|c| grid.cell(c)).collect())
        .collect();
    let mut groups: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for (i, z) in cells.iter().enumerate() {
        groups.entry(z.clone()).or_default().push(i);
    }
    let mut slots: Vec<Vec<Q>> = vec![Vec::new(); pts.len()];
    for (z, members) in &groups {
        let sites = grid.first_sites(z, members.len()).ok_or_else(|| {
            Error::SlotExhausted(format!(
                "cell {z:?} holds {} points but has only {} admissible sites",
                members.len(),
                grid.capacity(z)
            ))
        })?;
        for (&i, k) in members.iter().zip(sites) {
            slots[i] = k.iter().map(|&c| exact::qi(c) * &grid.s4).collect();
        }
    }
    let four = exact::qi(4);
    let s4_over_4 = &grid.s4 / &four;
    let s8_over_16 = &s4_over_4 * &s4_over_4;
    let mut xi_tubes = Vec::new();
    let mut omega_tubes = Vec::new();
    for (i, x) in pts.iter().enumerate() {
        let mut y = slots[i].clone();
        y.push(x[d - 1].clone());
        if &y != x {
            let r2 = min_q(s4_over_4.clone(), exact::dist2(x, &y) / &four);
            xi_tubes.push(TubeSpin::new_exact(x.clone(), y.clone(), r2)?);
        }
        if !x[d - 1].is_zero() {
            let mut bottom = slots[i].clone();
            bottom.push(Q::zero());
            let r2 = min_q(s8_over_16.clone(), &x[d - 1] * &x[d - 1] / &four);
            omega_tubes.push(TubeSpin::new_exact(y, bottom, r2)?);
        }
    }
    let xi = TubeFamily::new(d, xi_tubes);
    let omega = TubeFamily::new(d, omega_tubes);
    xi.check_disjoint()?;
    omega.check_disjoint()?;
    let xi = PlaneMap::TubeFamily { family: xi };
    let omega = PlaneMap::TubeFamily { family: omega };
    let psi = PlaneMap::compose(vec![omega.clone(), xi.clone()]);
    Ok(RoundingMaps {
        s,
        d,
        xi,
        omega,
        psi,
        cells,
        slots,
        bound: Bound::new(2f64.powi(14) * d as f64 / s.powi(8)),
    })
}

/// Outcome of [`check_rounding`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundingReport {
    /// Largest horizontal move divided by s²√(d−1).
    pub max_relative_move: f64,
    pub tubes_in_slab: bool,
    pub capacity_ok: bool,
}

/// Verifies the rounding in exact arithmetic: Ψ(x) = (ι(x), 0) with
/// ι(x) ∈ s⁴Z^{d−1}∖Z^{d−1}, images distinct, horizontal moves at most
/// s²√(d−1), tubes disjoint and inside R^{d−1}×(−1, 1), and the cell
/// capacity at least ½s^{−2(d−1)}.
pub fn check_rounding(maps: &RoundingMaps, net: &SlabNet) -> Result<RoundingReport> {
    let (s, d) = (maps.s, maps.d);
    let grid = Grid::new(s);
    let mut seen = std::collections::BTreeSet::new();
    let bound2 = &grid.s4 * exact::qi(d as i64 - 1);
    let mut worst = 0.0_f64;
    for (i, p) in net.points.iter().enumerate() {
        let x = rational_point(p);
        let img = maps.psi.evaluate_exact(&x).ok_or_else(|| {
            Error::check("exact evaluation", format!("Ψ at point {i} needs rounding"))
        })?;
        if img != maps.image_exact(i) {
            return Err(Error::check(
                "Ψ(x) = (ι(x), 0)",
                format!("point {i} lands at {img:?}"),
            ));
        }
        let h = &img[..d - 1];
        if !h.iter().all(|c| exact::in_lattice(c, &grid.s4)) || h.iter().all(exact::is_integer) {
            return Err(Error::check(
                "lattice membership",
                format!("point {i} lands off s⁴Z^(d−1)∖Z^(d−1)"),
            ));
        }
        if !seen.insert(img.clone()) {
            return Err(Error::check(
                "injectivity",
                format!("point {i} shares its image"),
            ));
        }
        let mv = exact::dist2(h, &x[..d - 1]);
        if mv > bound2 {
            return Err(Error::check(
                "horizontal displacement",
                format!("point {i} moves too far"),
            ));
        }
        if d > 1 {
            worst = worst.max((exact::to_f64(&mv) / exact::to_f64(&bound2)).sqrt());
        }
    }
    let mut in_slab = true;
    for m in [&maps.xi, &maps.omega] {
        if let PlaneMap::TubeFamily { family } = m {
            family.check_disjoint()?;
            for t in &family.tubes {
                let (a, b, r2) = t.exact_parts();
                for e in [&a[d - 1], &b[d - 1]] {
                    let room = Q::one() - e.abs();
                    if !room.is_positive() || &room * &room <= r2 {
                        in_slab = false;
                    }
                }
            }
        }
    }
    let need = 0.5 * s.powi(-2 * (d as i32 - 1));
    let capacity_ok = maps
        .cells
        .iter()
        .all(|z| grid.capacity(z).to_f64().unwrap_or(0.0) >= need);
    Ok(RoundingReport {
        max_relative_move: worst,
        tubes_in_slab: in_slab,
        capacity_ok,
    })
}

/// Random s-separated set in the slab with `n` points drawn by dart
/// throwing over a horizontal extent chosen to fit them.
pub fn random_slab_net(s: f64, d: usize, n: usize, seed: u64) -> SlabNet {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let h = 1.0 - s;
    let width = ((n as f64) * s.powi(d as i32) / h)
        .powf(1.0 / (d - 1) as f64)
        .max(s)
        * 4.0;
    let mut pts: Vec<PointD> = Vec::with_capacity(n);
    let near = 3.0 * s * s * ((d - 1) as f64).sqrt();
    for _ in 0..200 * n {
        if pts.len() == n {
            break;
        }
        let mut c: Vec<f64> = (0..d - 1).map(|_| rng.gen_range(0.0..width)).collect();
        c.push(rng.gen_range(-h..h));
        let p = PointD::new(&c);
        let ok = pts.iter().all(|q| {
            q.dist(&p) >= s
                && !(q.proj().dist(&p.proj()) <= near && (q.last() - p.last()).abs() < s / 2.0)
        });
        if ok {
            pts.push(p);
        }
    }
    SlabNet { points: pts, s, d }
}
