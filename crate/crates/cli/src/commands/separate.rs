use super::Outcome;
use crate::config::{parse_pair, RunConfig};
use crate::error::CliError;
use crate::io::{self, Doc};
use bilip_core::separation::{
    build_separation, sampled_bilip, separation_svg, verify_separation, MarkedNet, StripConfig,
};
use std::path::PathBuf;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Net JSON: {"points": [[x, y], ...], "y_mask": [bool, ...]}.
    #[arg(long)]
    pub net: PathBuf,
    /// Separation s and strip height w as "s,w".
    #[arg(long, value_parser = parse_pair)]
    pub strip: (f64, f64),
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Parameters sampled for the displacement check.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Pairs sampled for the empirical constant of the curve.
    #[arg(long, default_value_t = 20_000)]
    pub pairs: usize,
}

pub fn run(a: &Args, cfg: &mut RunConfig) -> Result<Outcome, CliError> {
    let net: MarkedNet = io::read(&a.net, "net")?;
    let strip = StripConfig::new(a.strip.0, a.strip.1)?;
    let sep = build_separation(&net, &strip)?;
    let report = verify_separation(&sep, &net, a.samples, cfg.seed);
    let est = sampled_bilip(&sep, a.pairs, cfg.seed)?;
    let stated = strip.stated_bound();
    let pass = report.all() && est.bilip() <= stated;
    let mut doc = Doc::new("separate");
    doc.set("config", &*cfg)?
        .set("pass", pass)?
        .set("curve", &sep)?
        .set("report", &report)?
        .set("bilip", est)?
        .set("stated_bound", stated)?;
    doc.write(&a.out)?;
    if let Some(p) = &a.svg {
        io::write_atomic(p, separation_svg(&sep, &net).as_bytes())?;
    }
    Ok(Outcome {
        pass,
        summary: format!(
            "{} points, displacement {:.3e}, clearance {:.3e}, bilip {:.3e} (stated {:.3e})",
            net.points.len(),
            report.max_displacement,
            report.min_clearance,
            est.bilip(),
            stated
        ),
    })
}
