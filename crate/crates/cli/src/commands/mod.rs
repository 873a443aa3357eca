mod analysis;
mod data;
mod dynamics;

use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use tensornet_core::centrality::PowerIteration;
use tensornet_core::ingest::NetworkBundle;

pub use analysis::{centrality, factors, surcharge};
pub use data::{build, export, generate};
pub use dynamics::{diffusion, timescale};

use crate::args::SpectralArgs;
use crate::error::CliResult;
use crate::output::Run;

fn config<T: Serialize>(args: &T) -> CliResult<Value> {
    Ok(serde_json::to_value(args)?)
}

fn load_bundle(run: &mut Run, path: &Path) -> CliResult<NetworkBundle> {
    let text = run.read_string(path)?;
    Ok(NetworkBundle::from_json(&text)?)
}

fn power(args: &SpectralArgs) -> PowerIteration {
    PowerIteration { tol: args.tol, max_iter: args.max_iter, teleport: args.teleport }
}
