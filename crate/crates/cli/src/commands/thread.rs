use super::{box_bilip, Outcome};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::io::{self, Doc};
use bilip_core::geom::{Point, PointD};
use bilip_core::pipeline::{thread_extend, ThreadInput, ThreadMode};
use serde::Deserialize;
use std::path::PathBuf;

#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Tile shuffles, stopped by the transposition cap.
    Paper,
    /// One tube spin per column.
    Desk,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Thread JSON: {"columns": [a, b], "values": [[x, y], ...], "l": L}.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "desk")]
    pub mode: Mode,
    /// Transposition cap for the full-constant mode.
    #[arg(long, default_value_t = u64::MAX)]
    pub max_program: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Pairs sampled for the empirical constant.
    #[arg(long, default_value_t = 20_000)]
    pub samples: usize,
}

#[derive(Deserialize)]
struct ThreadFile {
    columns: (i64, i64),
    values: Vec<Point>,
    l: u32,
}

pub fn run(a: &Args, cfg: &mut RunConfig) -> Result<Outcome, CliError> {
    let file: ThreadFile = io::read(&a.input, "thread input")?;
    let input = ThreadInput::new(file.columns, file.values, file.l)?;
    let mode = match a.mode {
        Mode::Paper => ThreadMode::Paper { max_program: a.max_program },
        Mode::Desk => ThreadMode::Desk,
    };
    cfg.profile = Some(match a.mode {
        Mode::Paper => "paper".into(),
        Mode::Desk => "desk".into(),
    });
    let th = thread_extend(&input, mode)?;
    let mut data_error = 0.0_f64;
    for (k, v) in input.values.iter().enumerate() {
        let p = th.map.evaluate(&PointD::xy(input.column(k), 0.0))?.to2();
        data_error = data_error.max(p.dist(*v));
    }
    let (a0, a1) = (input.columns.0 as f64 - 2.0, input.columns.1 as f64 + 2.0);
    let n = (4.0 * (a1 - a0)).ceil() as usize;
    let mut walls_fixed = true;
    for i in 0..=n {
        let x = a0 + (a1 - a0) * i as f64 / n as f64;
        for y in [-1.0, 1.0] {
            let z = PointD::xy(x, y);
            walls_fixed &= th.map.evaluate(&z)? == z;
        }
    }
    let est = box_bilip(&th.map, PointD::xy(a0, -1.0), PointD::xy(a1, 1.0), 0.25, a.samples, cfg.seed)?;
    let pass = data_error <= cfg.tolerance && walls_fixed && th.bound.dominates(est.bilip(), 1e-9);
    let mut doc = Doc::new("thread");
    doc.set("config", &*cfg)?
        .set("pass", pass)?
        .set("xi", &th.xi)?
        .set("bound", th.bound)?
        .set("paper_bound", bilip_core::planemap::Bound::from_log2(th.paper_log2))?
        .set("data_error", data_error)?
        .set("walls_fixed", walls_fixed)?
        .set("empirical", est)?
        .set("map", &th.map)?;
    doc.write(&a.out)?;
    Ok(Outcome {
        pass,
        summary: format!(
            "{} columns, data error {data_error:.3e}, bilip {:.3e} against {:.3e}",
            input.values.len(),
            est.bilip(),
            th.bound.value
        ),
    })
}
