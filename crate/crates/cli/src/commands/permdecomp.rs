use super::Outcome;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::io::{self, Doc};
use bilip_core::permlattice::{check_decomposition, decompose, WindowPermutation};
use std::path::PathBuf;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Permutation JSON: {"l", "window", "pairs", "half"}.
    #[arg(long)]
    pub perm: PathBuf,
    /// Tile side T, at least the largest displacement.
    #[arg(long = "T", value_name = "T")]
    pub t: i64,
    /// Lattice dimension, which must match the file.
    #[arg(long)]
    pub l: usize,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(a: &Args, cfg: &mut RunConfig) -> Result<Outcome, CliError> {
    let phi: WindowPermutation = io::read(&a.perm, "permutation")?;
    if phi.l != a.l {
        return Err(CliError::Input(format!("--l {} but the permutation has l = {}", a.l, phi.l)));
    }
    let dec = decompose(&phi, a.t)?;
    check_decomposition(&phi, &dec)?;
    let moved: usize = dec.rounds.iter().map(|r| r.map.len()).sum();
    let mut doc = Doc::new("permdecomp");
    doc.set("config", &*cfg)?
        .set("pass", true)?
        .set("T", dec.t)?
        .set("l", dec.l)?
        .set("factors", dec.rounds.len())?
        .set("offsets", &dec.offsets)?
        .set("rounds", &dec.rounds)?;
    doc.write(&a.out)?;
    Ok(Outcome {
        pass: true,
        summary: format!("{} rounds moving {moved} sites in total", dec.rounds.len()),
    })
}
