//! Bounds and verifiers for maps glued from pieces.

use super::point::PointD;
use crate::error::{Error, Result};
use crate::EPS;
use serde::{Deserialize, Serialize};

/// Lipschitz constants of a map altered on a θ-separated family of regions,
/// given an L-bilipschitz base map and jumps of size at most K:
/// (3L + 2K, L(1 + (K + 1)/θ)).
pub fn glue_bound_brute(l: f64, k: f64, theta: f64) -> (f64, f64) {
    (3.0 * l + 2.0 * k, l * (1.0 + (k + 1.0) / theta))
}

/// One piece of a glued map: the map, a membership test for its domain and
/// a finite sample of domain points.
pub struct GluePart<'a> {
    pub map: &'a (dyn Fn(&PointD) -> PointD + Sync),
    pub contains: &'a (dyn Fn(&PointD) -> bool + Sync),
    pub samples: &'a [PointD],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlueReport {
    /// Smallest C with ‖x−z‖+‖y−z‖ ≤ C‖x−y‖ over all cross pairs.
    pub c: f64,
    pub cross_pairs: usize,
    /// Lipschitz constants observed on the pieces and on the union.
    pub lip_parts: f64,
    pub lip_glued: f64,
}

/// Checks the gluing hypothesis on the supplied samples and reports the
/// observed constant C together with the Lipschitz constant of the union,
/// which is at most C times that of the pieces.
pub fn glue_lip_check(
    a: &GluePart<'_>,
    b: &GluePart<'_>,
    z: &(dyn Fn(&PointD, &PointD) -> PointD + Sync),
) -> Result<GlueReport> {
    for p in a.samples.iter().filter(|p| (b.contains)(p)) {
        let (u, v) = ((a.map)(p), (b.map)(p));
        if u.dist(&v) > EPS * (1.0 + u.norm()) {
            return Err(Error::WellDefinedness(format!(
                "{p:?} maps to {u:?} and {v:?}"
            )));
        }
    }
    for p in b.samples.iter().filter(|p| (a.contains)(p)) {
        let (u, v) = ((a.map)(p), (b.map)(p));
        if u.dist(&v) > EPS * (1.0 + u.norm()) {
            return Err(Error::WellDefinedness(format!(
                "{p:?} maps to {u:?} and {v:?}"
            )));
        }
    }
    let only_a: Vec<&PointD> = a.samples.iter().filter(|p| !(b.contains)(p)).collect();
    let only_b: Vec<&PointD> = b.samples.iter().filter(|p| !(a.contains)(p)).collect();
    let mut c = 1.0_f64;
    let mut lip_glued = 0.0_f64;
    for x in &only_a {
        for y in &only_b {
            let zz = z(x, y);
            if !((a.contains)(&zz) && (b.contains)(&zz)) {
                return Err(Error::MissingZ(format!("{zz:?} for pair {x:?}, {y:?}")));
            }
            let d = x.dist(y);
            if d > 0.0 {
                c = c.max((x.dist(&zz) + y.dist(&zz)) / d);
                lip_glued = lip_glued.max((a.map)(x).dist(&(b.map)(y)) / d);
            }
        }
    }
    let lip_of = |part: &GluePart<'_>| {
        let mut m = 0.0_f64;
        for (i, x) in part.samples.iter().enumerate() {
            for y in &part.samples[i + 1..] {
                let d = x.dist(y);
                if d > 0.0 {
                    m = m.max((part.map)(x).dist(&(part.map)(y)) / d);
                }
            }
        }
        m
    };
    let lip_parts = lip_of(a).max(lip_of(b));
    Ok(GlueReport {
        c,
        cross_pairs: only_a.len() * only_b.len(),
        lip_parts,
        lip_glued: lip_glued.max(lip_parts),
    })
}
