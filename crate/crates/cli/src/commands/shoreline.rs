use super::{write_svg, Outcome};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::io::{self, Doc};
use crate::svg::{Scene, CURVE_COLOUR, FAINT_COLOUR, REST_COLOUR, Y_COLOUR};
use bilip_core::geom::{LatticeMap, Point};
use bilip_core::shore::{horizontal_line_extension, line_window, LineParams, ShearOracle};
use bilip_core::strip_ext::CoonsOracle;
use bilip_core::pipeline::Profile;
use std::path::PathBuf;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Lattice JSON: {"x": [a, b], "y": [c, d], "values": [[x, y], ...]} row by row.
    #[arg(long)]
    pub lattice: PathBuf,
    /// The line is R×{k + 1/2}.
    #[arg(long, allow_hyphen_values = true)]
    pub k: i64,
    /// Bilipschitz constant of the lattice map; measured when omitted.
    #[arg(long)]
    pub l: Option<f64>,
    #[arg(long, value_enum, default_value = "desk")]
    pub profile: ProfileArg,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileArg {
    Paper,
    Desk,
}

impl ProfileArg {
    pub fn profile(self) -> Profile {
        match self {
            ProfileArg::Paper => Profile::Paper,
            ProfileArg::Desk => Profile::Desk,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProfileArg::Paper => "paper",
            ProfileArg::Desk => "desk",
        }
    }
}

pub fn read_lattice(path: &std::path::Path) -> Result<LatticeMap, CliError> {
    let f: LatticeMap = io::read(path, "lattice map")?;
    f.validate()?;
    Ok(f)
}

/// The exhaustive bilipschitz constant of the lattice data, nudged up so
/// that it bounds the data strictly.
pub fn measured_l(f: &LatticeMap) -> Result<f64, CliError> {
    Ok(f.bilip()?.bilip().max(1.0) * (1.0 + 1e-9))
}

pub fn run(a: &Args, cfg: &mut RunConfig) -> Result<Outcome, CliError> {
    let f = read_lattice(&a.lattice)?;
    let l = match a.l {
        Some(l) => l,
        None => measured_l(&f)?,
    };
    cfg.profile = Some(a.profile.name().into());
    cfg.oracle = Some("coons".into());
    let params = match a.profile {
        ProfileArg::Desk => LineParams::desk(l),
        ProfileArg::Paper => LineParams::paper(l),
    };
    let h = horizontal_line_extension(&f, a.k, &params, &ShearOracle::default(), &CoonsOracle::default())?;
    let pass = h.report.pass(&h.constants);
    let mut doc = Doc::new("shoreline");
    doc.set("config", &*cfg)?
        .set("pass", pass)?
        .set("k", a.k)?
        .set("l", l)?
        .set("line", &h.line)?
        .set("shores", [&h.shores[0].xi, &h.shores[1].xi])?
        .set("constants", h.constants)?
        .set("report", &h.report)?;
    doc.write(&a.out)?;

    let window = line_window(&f, params.margin);
    let in_window = |p: &Point| p.x >= window.0 - 1.0 && p.x <= window.1 + 1.0;
    let mut scene = Scene::around(f.points().map(|(_, p)| p));
    for s in &h.shores {
        scene.path(s.xi.vertices.iter().copied().filter(|p| in_window(p)).collect(), FAINT_COLOUR, 1.0);
    }
    let ts: Vec<f64> = (0..=400).map(|i| window.0 + (window.1 - window.0) * i as f64 / 400.0).collect();
    scene.path(ts.iter().map(|&t| h.line.eval(t)).collect(), CURVE_COLOUR, 1.5);
    let rad = 0.01 * scene.size();
    for ((_, j), p) in f.points() {
        scene.circle(p, rad, if j <= a.k { Y_COLOUR } else { REST_COLOUR });
    }
    write_svg(a.svg.as_deref(), &[scene])?;

    Ok(Outcome {
        pass,
        summary: format!(
            "line k = {}, clearance {:.3e}, bilip {:.3e} against 2^{:.1}",
            a.k, h.report.clearance, h.report.bilip, h.constants.j.log2
        ),
    })
}
