use super::{check_positive, image_runs, segment_samples, write_svg, Outcome};
use crate::config::{parse_pair, RunConfig};
use crate::error::CliError;
use crate::io::{self, Doc};
use crate::svg::{Scene, CURVE_COLOUR, FAINT_COLOUR, REST_COLOUR};
use bilip_core::geom::{Point, Polyline};
use bilip_core::strip_ext::{boundary_bilip, check_strip, extend_strip, CoonsOracle, StripBoundary};
use serde::Deserialize;
use std::path::PathBuf;

#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Oracle {
    /// Transfinite bilinear blend of the square boundary.
    Coons,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Boundary JSON: {"bottom": polyline, "top": polyline} with optional
    /// "window" and "l".
    #[arg(long)]
    pub boundary: PathBuf,
    /// Strip height.
    #[arg(long)]
    pub h: f64,
    #[arg(long, value_enum, default_value = "coons")]
    pub oracle: Oracle,
    /// Parameter window "a,b"; defaults to the file or to the common
    /// breakpoint range of the two lines.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub window: Option<(f64, f64)>,
    /// Bilipschitz constant of the boundary map; measured when omitted.
    #[arg(long)]
    pub l: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Pairs sampled for the empirical constants.
    #[arg(long, default_value_t = 20_000)]
    pub samples: usize,
}

#[derive(Deserialize)]
struct BoundaryFile {
    bottom: Polyline,
    top: Polyline,
    #[serde(default)]
    window: Option<(f64, f64)>,
    #[serde(default)]
    l: Option<f64>,
}

fn common_window(a: &Polyline, b: &Polyline) -> Result<(f64, f64), CliError> {
    let (a0, a1) = a.window();
    let (b0, b1) = b.window();
    let w = (a0.max(b0), a1.min(b1));
    if w.0 < w.1 {
        Ok(w)
    } else {
        Err(CliError::Input("the two boundary lines share no parameter range; give --window".into()))
    }
}

pub fn run(a: &Args, cfg: &mut RunConfig) -> Result<Outcome, CliError> {
    check_positive("h", a.h)?;
    let file: BoundaryFile = io::read(&a.boundary, "strip boundary")?;
    let window = match a.window.or(file.window) {
        Some(w) => w,
        None => common_window(&file.bottom, &file.top)?,
    };
    let boundary = StripBoundary::new(file.bottom, file.top, a.h)?;
    let l = match a.l.or(file.l) {
        Some(l) => l,
        None => boundary_bilip(&boundary, window)?.max(1.0) * (1.0 + 1e-9),
    };
    cfg.window = Some(window);
    cfg.oracle = Some("coons".into());
    let ext = extend_strip(&boundary, l, window, &CoonsOracle::default())?;
    let report = check_strip(&ext, window, a.samples, cfg.seed)?;
    let pass = report.pass();
    let mut doc = Doc::new("stripext");
    doc.set("config", &*cfg)?
        .set("pass", pass)?
        .set("l", l)?
        .set("q", ext.q)?
        .set("bound", ext.bound)?
        .set("paper_bound", ext.paper_bound)?
        .set("covered", ext.covered)?
        .set("rungs", &ext.rungs)?
        .set("report", &report)?
        .set("map", &ext.map)?;
    doc.write(&a.out)?;

    let h = a.h;
    let (w0, w1) = window;
    let mut domain = Scene::new(Point::new(w0, -0.1 * h), Point::new(w1, 1.1 * h));
    domain.rect(Point::new(w0, 0.0), Point::new(w1, h), FAINT_COLOUR, Some("#f4f4f4"));
    let mut image = Scene::around(
        (0..=200)
            .map(|i| w0 + (w1 - w0) * i as f64 / 200.0)
            .flat_map(|t| [boundary.bottom.eval(t), boundary.top.eval(t)]),
    );
    for r in &ext.rungs {
        if r.x >= w0 && r.x <= w1 {
            domain.path(vec![Point::new(r.x, 0.0), Point::new(r.y, h)], REST_COLOUR, 1.0);
            image.path(vec![boundary.bottom.eval(r.x), boundary.top.eval(r.y)], REST_COLOUR, 1.0);
        }
    }
    let cols = 32;
    for i in 0..=cols {
        let t = w0 + (w1 - w0) * i as f64 / cols as f64;
        let seg = segment_samples(Point::new(t, 0.0), Point::new(t, h), 32);
        domain.path(seg.clone(), FAINT_COLOUR, 0.5);
        for run in image_runs(&ext.map, &seg) {
            image.path(run, FAINT_COLOUR, 0.5);
        }
    }
    for y in [0.0, h] {
        let seg = segment_samples(Point::new(w0, y), Point::new(w1, y), 400);
        domain.path(seg.clone(), CURVE_COLOUR, 1.5);
        for run in image_runs(&ext.map, &seg) {
            image.path(run, CURVE_COLOUR, 1.5);
        }
    }
    write_svg(a.svg.as_deref(), &[domain, image])?;

    Ok(Outcome {
        pass,
        summary: format!(
            "{} rungs, boundary error {:.3e}, bilip {:.3e} against {:.3e}",
            ext.rungs.len(),
            report.boundary_error,
            report.bilip.bilip(),
            ext.bound.value
        ),
    })
}
