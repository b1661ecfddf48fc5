use super::shoreline::{read_lattice, ProfileArg};
use super::{image_runs, segment_samples, write_svg, Outcome};
use crate::config::{parse_pair, RunConfig};
use crate::error::CliError;
use crate::io::Doc;
use crate::svg::{Scene, CURVE_COLOUR, FAINT_COLOUR, REST_COLOUR, Y_COLOUR};
use bilip_core::geom::{LatticeMap, Point};
use bilip_core::pipeline::{main_extend, ExtendParams, Extension, StageReport};
use bilip_core::planemap::Bound;
use serde::Serialize;
use std::path::PathBuf;
use std::time::Instant;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Lattice JSON: {"x": [a, b], "y": [c, d], "values": [[x, y], ...]} row by row.
    #[arg(long)]
    pub lattice: PathBuf,
    #[arg(long, value_enum, default_value = "desk")]
    pub profile: ProfileArg,
    /// Restricts the lattice to the square window "a,b" × "a,b".
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub window: Option<(f64, f64)>,
    #[arg(long)]
    pub out: PathBuf,
    /// Per-stage ledger; embedded in the output when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Pairs sampled for the empirical constant of F.
    #[arg(long, default_value_t = 20_000)]
    pub samples: usize,
    /// Points sampled for the round-trip check.
    #[arg(long, default_value_t = 10_000)]
    pub round_trip: usize,
    /// Pairs sampled per unit strip for the thread constants.
    #[arg(long, default_value_t = 1_000)]
    pub thread_samples: usize,
    /// The constant P of the normalisation bound.
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
}

/// One ledger line as written to the report.
#[derive(Serialize)]
struct Stage<'a> {
    stage: &'a str,
    paper_bound: Bound,
    empirical_bound: f64,
    pass: bool,
    conditional: bool,
}

fn stages(report: &[StageReport]) -> Vec<Stage<'_>> {
    report
        .iter()
        .map(|r| Stage {
            stage: &r.stage,
            paper_bound: Bound::from_log2(r.paper_log2),
            empirical_bound: r.empirical,
            pass: r.pass,
            conditional: r.conditional,
        })
        .collect()
}

fn crop(f: &LatticeMap, w: (f64, f64)) -> Result<LatticeMap, CliError> {
    let (a, b) = (w.0.ceil() as i64, w.1.floor() as i64);
    if a > b {
        return Err(CliError::Input(format!("window {w:?} holds no lattice points")));
    }
    if !(f.contains(a, a) && f.contains(b, b)) {
        return Err(CliError::Input(format!(
            "window [{a}, {b}]² is not covered by the lattice {:?} × {:?}",
            f.x, f.y
        )));
    }
    Ok(LatticeMap::from_fn((a, b), (a, b), |i, j| f.get(i, j).unwrap()))
}

fn panels(f: &LatticeMap, e: &Extension) -> Vec<Scene> {
    let (x0, x1) = (f.x.0 as f64, f.x.1 as f64);
    let (y0, y1) = (f.y.0 as f64, f.y.1 as f64);
    let mut domain = Scene::new(Point::new(x0 - 1.0, y0 - 1.0), Point::new(x1 + 1.0, y1 + 1.0));
    let mut image = Scene::around(f.values.iter().copied());
    let mut grid_line = |a: Point, b: Point, n: usize| {
        let seg = segment_samples(a, b, n);
        domain.path(seg.clone(), FAINT_COLOUR, 0.5);
        for run in image_runs(&e.map, &seg) {
            image.path(run, FAINT_COLOUR, 0.5);
        }
    };
    for i in f.x.0..=f.x.1 {
        grid_line(Point::new(i as f64, y0), Point::new(i as f64, y1), 8 * f.height());
    }
    for j in f.y.0..=f.y.1 {
        grid_line(Point::new(x0, j as f64), Point::new(x1, j as f64), 8 * f.width());
    }
    for h in &e.strips.lines {
        let level = h.k as f64 + 0.5;
        domain.path(vec![Point::new(x0 - 1.0, level), Point::new(x1 + 1.0, level)], CURVE_COLOUR, 1.0);
        let ts: Vec<f64> = (0..=400).map(|i| x0 - 1.0 + (x1 - x0 + 2.0) * i as f64 / 400.0).collect();
        image.path(ts.iter().map(|&t| h.line.eval(t)).collect(), CURVE_COLOUR, 1.0);
    }
    let rad = 0.004 * domain.size();
    for ((i, j), p) in f.points() {
        let colour = if (i + j).rem_euclid(2) == 0 { Y_COLOUR } else { REST_COLOUR };
        domain.circle(Point::new(i as f64, j as f64), rad, colour);
        image.circle(p, rad, colour);
    }
    vec![domain, image]
}

pub fn run(a: &Args, cfg: &mut RunConfig) -> Result<Outcome, CliError> {
    let mut f = read_lattice(&a.lattice)?;
    if let Some(w) = a.window {
        f = crop(&f, w)?;
    }
    cfg.window = a.window;
    cfg.profile = Some(a.profile.name().into());
    cfg.oracle = Some("coons".into());
    let mut params = ExtendParams::new(a.profile.profile());
    params.samples = a.samples;
    params.round_trip = a.round_trip;
    params.thread_samples = a.thread_samples;
    params.p = a.p;
    params.seed = cfg.seed;
    params.tolerance = cfg.tolerance;
    let start = Instant::now();
    let e = main_extend(&f, &params)?;
    let pass = e.pass();
    let failed: Vec<&str> = e.report.iter().filter(|r| !r.pass).map(|r| r.stage.as_str()).collect();

    let mut out = Doc::new("extend");
    out.set("config", &*cfg)?
        .set("pass", pass)?
        .set("l", e.l)?
        .set("x", e.x)?
        .set("y", e.y)?
        .set("extra_rows", e.extra_rows)?
        .set("lattice_error", e.lattice_error)?
        .set("round_trip_error", e.round_trip_error)?
        .set("empirical", e.empirical)?
        .set("injectivity", &e.injectivity)?
        .set("map", &e.map)?;
    match &a.report {
        Some(path) => {
            let mut rep = Doc::new("extend");
            rep.set("config", &*cfg)?
                .set("pass", pass)?
                .set("failed", &failed)?
                .set("stages", stages(&e.report))?;
            rep.write(path)?;
        }
        None => {
            out.set("failed", &failed)?.set("stages", stages(&e.report))?;
        }
    }
    out.write(&a.out)?;
    write_svg(a.svg.as_deref(), &panels(&f, &e))?;
    eprintln!("extend: {} stages in {:.1} s", e.report.len(), start.elapsed().as_secs_f64());
    Ok(Outcome {
        pass,
        summary: format!(
            "L = {:.4}, lattice error {:.3e}, round trip {:.3e}, empirical {:.4}, {} of {} stages pass",
            e.l,
            e.lattice_error,
            e.round_trip_error,
            e.empirical,
            e.report.len() - failed.len(),
            e.report.len()
        ),
    })
}
