use super::{box_bilip, check_positive, Outcome};
use crate::config::{parse_pair, RunConfig};
use crate::error::CliError;
use crate::io::{self, Doc};
use bilip_core::geom::PointD;
use bilip_core::planemap::PlaneMap;
use serde_json::Value;
use std::path::PathBuf;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// A map JSON, bare or under a "map" key as written by the other commands.
    #[arg(long)]
    pub map: PathBuf,
    /// Bound the empirical constant must not exceed.
    #[arg(long)]
    pub bound: f64,
    /// Square sampling window "a,b"; defaults to the lattice window stored
    /// with the map, or to [−8, 8].
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub window: Option<(f64, f64)>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn stored_window(doc: &serde_json::Map<String, Value>) -> Option<((f64, f64), (f64, f64))> {
    let pair = |k: &str| -> Option<(f64, f64)> {
        let v = doc.get(k)?.as_array()?;
        Some((v.first()?.as_f64()?, v.get(1)?.as_f64()?))
    };
    Some((pair("x")?, pair("y")?))
}

pub fn run(a: &Args, cfg: &mut RunConfig) -> Result<Outcome, CliError> {
    check_positive("bound", a.bound)?;
    let value = io::read_value(&a.map)?;
    let (map_value, window) = match value {
        Value::Object(mut obj) if obj.contains_key("map") => {
            let w = stored_window(&obj);
            (obj.remove("map").unwrap(), w)
        }
        v => (v, None),
    };
    let map: PlaneMap = io::from_value(map_value, "map")?;
    if map.dim() != 2 {
        return Err(CliError::Input(format!("map of dimension {} is not planar", map.dim())));
    }
    let (wx, wy) = match (a.window, window) {
        (Some(w), _) => (w, w),
        (None, Some(w)) => w,
        (None, None) => ((-8.0, 8.0), (-8.0, 8.0)),
    };
    if !(wx.0 < wx.1 && wy.0 < wy.1) {
        return Err(CliError::Input(format!("empty window {wx:?} × {wy:?}")));
    }
    cfg.window = Some(wx);
    let near = (wx.1 - wx.0).min(wy.1 - wy.0) / 64.0;
    let est = box_bilip(&map, PointD::xy(wx.0, wy.0), PointD::xy(wx.1, wy.1), near, a.samples, cfg.seed)?;
    let pass = est.bilip() <= a.bound;
    if let Some(path) = &a.out {
        let mut doc = Doc::new("verify");
        doc.set("config", &*cfg)?
            .set("pass", pass)?
            .set("bound", a.bound)?
            .set("window", [wx, wy])?
            .set("empirical", est)?;
        doc.write(path)?;
    }
    Ok(Outcome {
        pass,
        summary: format!(
            "empirical {:.6} (lip {:.6}, inverse {:.6}) against {}",
            est.bilip(),
            est.lip_up,
            est.lip_down,
            a.bound
        ),
    })
}
