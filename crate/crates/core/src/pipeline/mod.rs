//! The end-to-end extension: lattice map to plane map, and separated net
//! to plane map.

pub mod extend;
pub mod fill;
pub mod thread;

pub use extend::{main_extend, sep_net_extend, Extension, ExtendParams, NetExtension, Profile};
pub use fill::{
    alpha_log2, iterate_fill, slice_strip, split_red_black, strip_piece, unit_strip, unit_strip_chart, Band,
    Fill, FillParams, Sliced, Split, UnitStrip,
};
pub use thread::{thread_displacement, thread_extend, thread_paper_log2, Thread, ThreadInput, ThreadMode};

use serde::{Deserialize, Serialize};

/// One row of the per-stage ledger.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: String,
    /// log₂ of the stated bound, infinite when it exceeds every float.
    #[serde(with = "crate::float")]
    pub paper_log2: f64,
    /// Measured constant for this stage.
    #[serde(with = "crate::float")]
    pub empirical: f64,
    pub pass: bool,
    /// Set when the stated bound assumes a normalisation constant that is
    /// taken as given.
    pub conditional: bool,
    pub millis: u128,
}

impl StageReport {
    /// Passes when the measured constant is finite and at most 2^paper_log2.
    pub fn new(stage: &str, paper_log2: f64, empirical: f64, conditional: bool, millis: u128) -> Self {
        let pass = empirical.is_finite()
            && crate::planemap::Bound::from_log2(paper_log2).dominates(empirical, 1e-9);
        StageReport {
            stage: stage.to_string(),
            paper_log2,
            empirical,
            pass,
            conditional,
            millis,
        }
    }

    /// A yes/no check, recorded as a failure count against the bound 0.
    pub fn check(stage: &str, ok: bool, millis: u128) -> Self {
        StageReport {
            stage: stage.to_string(),
            paper_log2: f64::NEG_INFINITY,
            empirical: if ok { 0.0 } else { 1.0 },
            pass: ok,
            conditional: false,
            millis,
        }
    }
}
