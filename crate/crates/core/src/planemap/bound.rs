//! Bilipschitz bounds that survive long products.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A bilipschitz bound B ≥ 1.
///
/// The float `value` is exact for modest bounds and becomes infinite on
/// overflow; `log2` keeps the magnitude available past that point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    #[serde(with = "crate::float")]
    pub value: f64,
    #[serde(with = "crate::float")]
    pub log2: f64,
}

impl Bound {
    pub const ONE: Bound = Bound {
        value: 1.0,
        log2: 0.0,
    };

    pub fn new(v: f64) -> Bound {
        Bound {
            value: v,
            log2: v.log2(),
        }
    }

    pub fn from_log2(log2: f64) -> Bound {
        Bound {
            value: log2.exp2(),
            log2,
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn times(self, o: Bound) -> Bound {
        Bound {
            value: self.value * o.value,
            log2: self.log2 + o.log2,
        }
    }

    pub fn pow(self, k: f64) -> Bound {
        Bound {
            value: self.value.powf(k),
            log2: self.log2 * k,
        }
    }

    pub fn max(self, o: Bound) -> Bound {
        if self.log2 >= o.log2 {
            self
        } else {
            o
        }
    }

    /// True when a sampled constant does not exceed the bound up to the
    /// absolute slack `tol`.
    pub fn dominates(&self, empirical: f64, tol: f64) -> bool {
        if self.value.is_infinite() {
            return empirical.is_finite();
        }
        empirical <= self.value + tol
    }

    pub fn product<I: IntoIterator<Item = Bound>>(it: I) -> Bound {
        it.into_iter().fold(Bound::ONE, Bound::times)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.value.is_finite() && self.log2 < 60.0 {
            write!(f, "{}", self.value)
        } else {
            write!(f, "2^{:.3}", self.log2)
        }
    }
}
