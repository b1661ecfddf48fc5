//! `bilip`: builds and verifies the constructions of the toolkit from JSON
//! inputs.
//!
//! Exit code 0 means every declared check passed, 2 means a check failed
//! (the report carries the witness) and 1 means the input was unusable.

mod commands;
mod config;
mod error;
mod io;
mod svg;

use clap::{Parser, Subcommand};
use config::RunConfig;
use error::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "bilip", version, about = "Bilipschitz extension constructions and their verifiers")]
struct Cli {
    /// Seed for every sampler; the BILIP_SEED environment variable overrides it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance for agreement checks.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tolerance: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Separating curve through an s-separated net in a strip.
    Separate(commands::separate::Args),
    /// Decomposition of a bounded-displacement lattice permutation into tile rounds.
    Permdecomp(commands::permdecomp::Args),
    /// Rounding of a net into a slab or onto the integer lattice.
    Roundnet(commands::roundnet::Args),
    /// Extension of a lattice map to one horizontal line.
    Shoreline(commands::shoreline::Args),
    /// Extension of a boundary map to a strip.
    Stripext(commands::stripext::Args),
    /// Extension of a map given on the walls and one lattice row.
    Thread(commands::thread::Args),
    /// Extension of a lattice map to the plane between its outermost lines.
    Extend(commands::extend::Args),
    /// Empirical bilipschitz constant of a stored map against a bound.
    Verify(commands::verify::Args),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Separate(_) => "separate",
            Command::Permdecomp(_) => "permdecomp",
            Command::Roundnet(_) => "roundnet",
            Command::Shoreline(_) => "shoreline",
            Command::Stripext(_) => "stripext",
            Command::Thread(_) => "thread",
            Command::Extend(_) => "extend",
            Command::Verify(_) => "verify",
        }
    }

    fn default_samples(&self) -> usize {
        match self {
            Command::Separate(a) => a.samples,
            Command::Permdecomp(_) => 0,
            Command::Roundnet(a) => a.samples,
            Command::Shoreline(_) => 0,
            Command::Stripext(a) => a.samples,
            Command::Thread(a) => a.samples,
            Command::Extend(a) => a.samples,
            Command::Verify(a) => a.samples,
        }
    }

    /// The file that receives the witness when a construction fails.
    fn report_path(&self) -> Option<&PathBuf> {
        match self {
            Command::Separate(a) => Some(&a.out),
            Command::Permdecomp(a) => Some(&a.out),
            Command::Roundnet(a) => Some(&a.out),
            Command::Shoreline(a) => Some(&a.out),
            Command::Stripext(a) => Some(&a.out),
            Command::Thread(a) => Some(&a.out),
            Command::Extend(a) => a.report.as_ref().or(Some(&a.out)),
            Command::Verify(a) => a.out.as_ref(),
        }
    }

    fn run(&self, cfg: &mut RunConfig) -> Result<commands::Outcome, CliError> {
        match self {
            Command::Separate(a) => commands::separate::run(a, cfg),
            Command::Permdecomp(a) => commands::permdecomp::run(a, cfg),
            Command::Roundnet(a) => commands::roundnet::run(a, cfg),
            Command::Shoreline(a) => commands::shoreline::run(a, cfg),
            Command::Stripext(a) => commands::stripext::run(a, cfg),
            Command::Thread(a) => commands::thread::run(a, cfg),
            Command::Extend(a) => commands::extend::run(a, cfg),
            Command::Verify(a) => commands::verify::run(a, cfg),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let result = RunConfig::new(cli.tolerance, cli.command.default_samples(), cli.seed).and_then(|mut cfg| {
        let out = cli.command.run(&mut cfg);
        if let Err(CliError::Check(msg)) = &out {
            if let Some(path) = cli.command.report_path() {
                let mut doc = io::Doc::new(name);
                let written = doc
                    .set("config", &cfg)
                    .and_then(|d| d.set("pass", false))
                    .and_then(|d| d.set("witness", msg))
                    .and_then(|d| d.write(path));
                if let Err(e) = written {
                    eprintln!("{name}: {e}");
                }
            }
        }
        out
    });
    match result {
        Ok(o) => {
            println!("{name}: {} {}", if o.pass { "PASS" } else { "FAIL" }, o.summary);
            ExitCode::from(if o.pass { 0 } else { 2 })
        }
        Err(e) => {
            eprintln!("{name}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
