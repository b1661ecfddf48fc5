use super::{box_bilip, Outcome};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::io::{self, Doc};
use bilip_core::geom::PointD;
use bilip_core::rounding::{check_lattice_rounding, check_rounding, inj_round, net_to_lattice, SeparatedNet, SlabNet};
use serde::Deserialize;
use std::path::PathBuf;

#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Injective rounding of a net in R×[−1, 1] onto the axis.
    Slab,
    /// Rounding of a separated net onto Z².
    Integer,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Slab mode: {"points", "s", "d"}. Integer mode: {"points", "r", "big_r", "d"}.
    #[arg(long)]
    pub net: PathBuf,
    #[arg(long, value_enum)]
    pub mode: Mode,
    #[arg(long)]
    pub out: PathBuf,
    /// Pairs sampled for the empirical constant of the rounding map.
    #[arg(long, default_value_t = 20_000)]
    pub samples: usize,
}

fn two() -> usize {
    2
}

#[derive(Deserialize)]
struct SlabFile {
    points: Vec<PointD>,
    s: f64,
    #[serde(default = "two")]
    d: usize,
}

#[derive(Deserialize)]
struct NetFile {
    points: Vec<PointD>,
    r: f64,
    #[serde(default)]
    big_r: Option<f64>,
    #[serde(default = "two")]
    d: usize,
}

/// The bounding box of the points widened by `pad` in every coordinate.
fn padded_box(points: &[PointD], d: usize, pad: f64) -> (PointD, PointD) {
    let mut lo = PointD::new(&vec![f64::INFINITY; d]);
    let mut hi = PointD::new(&vec![f64::NEG_INFINITY; d]);
    for p in points {
        for i in 0..d {
            lo[i] = lo[i].min(p[i] - pad);
            hi[i] = hi[i].max(p[i] + pad);
        }
    }
    if points.is_empty() {
        (PointD::new(&vec![-pad; d]), PointD::new(&vec![pad; d]))
    } else {
        (lo, hi)
    }
}

pub fn run(a: &Args, cfg: &mut RunConfig) -> Result<Outcome, CliError> {
    let value = io::read_value(&a.net)?;
    let mut doc = Doc::new("roundnet");
    doc.set("config", &*cfg)?;
    let (pass, summary) = match a.mode {
        Mode::Slab => {
            let f: SlabFile = io::from_value(value, "slab net")?;
            let net = SlabNet::new(f.points, f.s, f.d)?;
            let maps = inj_round(&net)?;
            let report = check_rounding(&maps, &net)?;
            let (mut lo, mut hi) = padded_box(&net.points, net.d, 1.0);
            lo[net.d - 1] = -1.0;
            hi[net.d - 1] = 1.0;
            let est = box_bilip(&maps.psi, lo, hi, net.s, a.samples, cfg.seed)?;
            let pass = report.capacity_ok
                && report.tubes_in_slab
                && report.max_relative_move <= 1.0 + 1e-12
                && maps.bound.dominates(est.bilip(), 1e-9);
            let slots: Vec<Vec<String>> = maps.slots.iter().map(|c| c.iter().map(|q| q.to_string()).collect()).collect();
            doc.set("mode", "slab")?
                .set("pass", pass)?
                .set("map", &maps.psi)?
                .set("cells", &maps.cells)?
                .set("slots", slots)?
                .set("bound", maps.bound)?
                .set("report", &report)?
                .set("empirical", est)?;
            (pass, format!("{} points, empirical {:.3e} against 2^{:.1}", net.points.len(), est.bilip(), maps.bound.log2))
        }
        Mode::Integer => {
            let f: NetFile = io::from_value(value, "separated net")?;
            let net = SeparatedNet::new(f.points, f.r, f.big_r, f.d)?;
            let lr = net_to_lattice(&net)?;
            check_lattice_rounding(&lr, &net)?;
            let (lo, hi) = padded_box(&net.points, net.d, net.r);
            let est = box_bilip(&lr.map, lo, hi, net.r / 4.0, a.samples, cfg.seed)?;
            let pass = lr.bound.dominates(est.bilip(), 1e-9);
            doc.set("mode", "integer")?
                .set("pass", pass)?
                .set("map", &lr.map)?
                .set("scale", lr.scale)?
                .set("images", &lr.images)?
                .set("bound", lr.bound)?
                .set("empirical", est)?;
            (pass, format!("{} points onto Z^{}, empirical {:.3e} against {:.3e}", net.points.len(), net.d, est.bilip(), lr.bound.value))
        }
    };
    doc.write(&a.out)?;
    Ok(Outcome { pass, summary })
}
