//! Exact rational arithmetic for predicates and lattice-valued constructions.
//!
//! Every finite `f64` is a dyadic rational, so converting inputs with
//! [`q`] loses nothing; predicates evaluated on the converted values are
//! exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

/// Exact rational value of a finite float.
pub fn q(x: f64) -> Q {
    BigRational::from_float(x).expect("finite coordinate")
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qfrac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn is_integer(x: &Q) -> bool {
    x.is_integer()
}

/// True when `x` lies in `step * Z`.
pub fn in_lattice(x: &Q, step: &Q) -> bool {
    (x / step).is_integer()
}

/// Sign of the orientation determinant of (a, b, c), evaluated without
/// rounding: positive for a counterclockwise turn.
pub fn orient2d(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> i32 {
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    let mag = ((b[0] - a[0]) * (c[1] - a[1])).abs() + ((b[1] - a[1]) * (c[0] - a[0])).abs();
    // Forward error of the float determinant is below 4 eps * mag.
    if det.abs() > 8.0 * f64::EPSILON * mag {
        return if det > 0.0 { 1 } else { -1 };
    }
    let (ax, ay, bx, by, cx, cy) = (q(a[0]), q(a[1]), q(b[0]), q(b[1]), q(c[0]), q(c[1]));
    let d = (&bx - &ax) * (&cy - &ay) - (&by - &ay) * (&cx - &ax);
    sign(&d)
}

pub fn sign(x: &Q) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Exact test whether two closed segments share a point.
pub fn segments_intersect(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let o1 = orient2d(a, b, c);
    let o2 = orient2d(a, b, d);
    let o3 = orient2d(c, d, a);
    let o4 = orient2d(c, d, b);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    let on = |p: [f64; 2], q0: [f64; 2], q1: [f64; 2]| {
        p[0] >= q0[0].min(q1[0])
            && p[0] <= q0[0].max(q1[0])
            && p[1] >= q0[1].min(q1[1])
            && p[1] <= q0[1].max(q1[1])
    };
    (o1 == 0 && on(c, a, b))
        || (o2 == 0 && on(d, a, b))
        || (o3 == 0 && on(a, c, d))
        || (o4 == 0 && on(b, c, d))
}

/// Exact squared Euclidean distance between rational points.
pub fn dist2(a: &[Q], b: &[Q]) -> Q {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let t = x - y;
            &t * &t
        })
        .fold(Q::zero(), |acc, v| acc + v)
}

/// Exact squared distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_dist2(p: &[Q], a: &[Q], b: &[Q]) -> Q {
    let ab: Vec<Q> = b.iter().zip(a).map(|(x, y)| x - y).collect();
    let ap: Vec<Q> = p.iter().zip(a).map(|(x, y)| x - y).collect();
    let len2 = ab.iter().fold(Q::zero(), |acc, v| acc + v * v);
    if len2.is_zero() {
        return dist2(p, a);
    }
    let dot = ab
        .iter()
        .zip(&ap)
        .fold(Q::zero(), |acc, (u, v)| acc + u * v);
    let t = if dot.is_negative() {
        Q::zero()
    } else if dot > len2 {
        Q::one()
    } else {
        dot / len2
    };
    let foot: Vec<Q> = a.iter().zip(&ab).map(|(x, u)| x + &t * u).collect();
    dist2(p, &foot)
}

/// Largest integer not exceeding `x`.
pub fn floor(x: &Q) -> BigInt {
    x.floor().to_integer()
}

/// Rational parse from "n" or "n/d" strings.
pub fn parse(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Q::new(n, d))
    } else {
        s.parse::<BigInt>().ok().map(Q::from_integer)
    }
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

fn sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

/// Exact squared distance between the closed segments `[a, b]` and `[c, d]`.
pub fn segment_segment_dist2(a: &[Q], b: &[Q], c: &[Q], d: &[Q]) -> Q {
    let u = sub(b, a);
    let v = sub(d, c);
    let w = sub(a, c);
    let (aa, bb, cc) = (dot(&u, &u), dot(&u, &v), dot(&v, &v));
    let (dd, ee) = (dot(&u, &w), dot(&v, &w));
    let det = &aa * &cc - &bb * &bb;
    if det.is_positive() {
        // The squared distance is convex in (s, t); an interior critical
        // point is the minimum, otherwise the minimum lies on an edge.
        let s = (&bb * &ee - &cc * &dd) / &det;
        let t = (&aa * &ee - &bb * &dd) / &det;
        let unit = |x: &Q| !x.is_negative() && *x <= Q::one();
        if unit(&s) && unit(&t) {
            let gap: Vec<Q> = (0..u.len())
                .map(|i| &w[i] + &s * &u[i] - &t * &v[i])
                .collect();
            return dot(&gap, &gap);
        }
    }
    [
        point_segment_dist2(a, c, d),
        point_segment_dist2(b, c, d),
        point_segment_dist2(c, a, b),
        point_segment_dist2(d, a, b),
    ]
    .into_iter()
    .min()
    .expect("four candidates")
}

/// True when the open tubes B([a, b], √ra2) and B([c, d], √rb2) are
/// disjoint, decided without rounding.
pub fn tubes_disjoint(a: &[Q], b: &[Q], ra2: &Q, c: &[Q], d: &[Q], rb2: &Q) -> bool {
    // dist ≥ ra + rb  ⇔  D − ra² − rb² ≥ 0 and (D − ra² − rb²)² ≥ 4 ra² rb².
    let excess = segment_segment_dist2(a, b, c, d) - ra2 - rb2;
    !excess.is_negative() && &excess * &excess >= qi(4) * ra2 * rb2
}

/// Exact squared distance from `p` to the closed ray from `o` along `dir`.
pub fn point_ray_dist2(p: &[Q], o: &[Q], dir: &[Q]) -> Q {
    let len2 = dot(dir, dir);
    let t = dot(&sub(p, o), dir);
    if len2.is_zero() || !t.is_positive() {
        return dist2(p, o);
    }
    let s = t / len2;
    let foot: Vec<Q> = o.iter().zip(dir).map(|(x, u)| x + &s * u).collect();
    dist2(p, &foot)
}
