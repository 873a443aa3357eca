use serde::Serialize;
use serde_json::json;
use tensornet_core::centrality::{CentralityMeasure, MeasureParams, MeasureRegistry};
use tensornet_core::dynamics::{
    algebraic_connectivity, diffuse, supra_laplacian, timescale_centrality_stability, SupraLaplacian, TimescaleConfig,
};
use tensornet_core::ingest::{apply_sign_policy, build_panel, parse_exposures, NetworkBundle};
use tensornet_core::layers::{LayerTaxonomy, SignPolicy};
use tensornet_core::network::{InterlayerSpec, MultilayerNetwork};
use tensornet_core::Error;

use super::{config, load_bundle, power};
use crate::args::{DiffusionArgs, TimescaleArgs};
use crate::error::{CliError, CliResult};
use crate::output::{is_json, report_json, Run};

/// Intra-layer in plus out strength of every replica.
fn replica_strength(net: &MultilayerNetwork) -> Vec<f64> {
    let n = net.n();
    let mut x = vec![0.0; n * net.num_layers()];
    for (k, layer) in net.layers().iter().enumerate() {
        for (&(i, j), &w) in layer.weights() {
            x[k * n + i] += w;
            x[k * n + j] += w;
        }
    }
    x
}

fn initial_state(run: &mut Run, spec: &str, net: &MultilayerNetwork, lap: &SupraLaplacian) -> CliResult<Vec<f64>> {
    let dim = lap.dim();
    match spec {
        "strength" => Ok(replica_strength(net)),
        "uniform" => Ok(vec![1.0; dim]),
        _ if spec.starts_with("bank:") => {
            let i = net.registry().index_of(&spec["bank:".len()..])?;
            let mut x = vec![0.0; dim];
            for k in 0..net.num_layers() {
                x[net.supra_index(i, k)] = 1.0;
            }
            Ok(x)
        }
        path => {
            let text = run.read_string(path.as_ref())?;
            let mut x = vec![0.0; dim];
            for (line, row) in text.lines().enumerate().skip(1).filter(|(_, r)| !r.trim().is_empty()) {
                let (node, value) = row
                    .split_once(',')
                    .ok_or_else(|| Error::Parse { line: line + 1, message: "expected `node,value`".into() })?;
                let idx = lap
                    .labels()
                    .iter()
                    .position(|l| l == node.trim())
                    .ok_or_else(|| Error::UnknownNode(node.trim().to_string()))?;
                x[idx] = value.trim().parse().map_err(|_| Error::Parse {
                    line: line + 1,
                    message: format!("invalid number `{}`", value.trim()),
                })?;
            }
            Ok(x)
        }
    }
}

#[derive(Serialize)]
struct DiffusionReport<'a> {
    dx: f64,
    t_end: f64,
    dt: f64,
    lambda2: f64,
    connected: bool,
    initial_mass: f64,
    final_mass: f64,
    labels: &'a [String],
    times: &'a [f64],
    states: &'a [Vec<f64>],
}

pub fn diffusion(args: DiffusionArgs) -> CliResult<()> {
    let mut run = Run::new("diffusion", config(&args)?, args.output.force);
    let bundle = load_bundle(&mut run, &args.network)?;
    let lap = supra_laplacian(&bundle.network, args.dx)?;
    let max_diag = lap.max_diagonal();
    let dt = args.dt.unwrap_or(if max_diag > 0.0 { 0.5 / max_diag } else { args.t_end });
    run.resolve("dt_resolved", json!(dt));
    let x0 = initial_state(&mut run, &args.initial, &bundle.network, &lap)?;
    run.check_writable(&args.out)?;
    let trajectory = diffuse(&lap, &x0, args.t_end, dt, args.sample_every)?;
    let text = if is_json(&args.out) {
        let conn = algebraic_connectivity(&lap)?;
        report_json(
            &run,
            &DiffusionReport {
                dx: args.dx,
                t_end: args.t_end,
                dt,
                lambda2: conn.lambda2,
                connected: conn.connected,
                initial_mass: x0.iter().sum(),
                final_mass: trajectory.last().iter().sum(),
                labels: &trajectory.labels,
                times: &trajectory.times,
                states: &trajectory.states,
            },
        )?
    } else {
        trajectory.to_csv()
    };
    run.write(&args.out, text)?;
    run.finish(&args.out)
}

fn load_snapshots(run: &mut Run, args: &TimescaleArgs) -> CliResult<Vec<NetworkBundle>> {
    if let Some(path) = &args.exposures {
        let taxonomy = LayerTaxonomy::canonical();
        let records = apply_sign_policy(parse_exposures(run.read(path)?.as_slice(), &taxonomy)?, &SignPolicy::default())?;
        return Ok(build_panel(&records, &[], &InterlayerSpec::Multiplex(args.omega), &taxonomy)?);
    }
    if args.networks.is_empty() {
        return Err(CliError::Usage("pass --networks or --exposures".into()));
    }
    let mut bundles =
        args.networks.iter().map(|p| load_bundle(run, p)).collect::<CliResult<Vec<_>>>()?;
    bundles.sort_by_key(|b| b.period);
    Ok(bundles)
}

pub fn timescale(args: TimescaleArgs) -> CliResult<()> {
    let mut run = Run::new("timescale", config(&args)?, args.output.force);
    let snapshots = load_snapshots(&mut run, &args)?;
    let params = MeasureParams { power: power(&args.spectral), katz_attenuation: args.a, damping: args.damping };
    let registry = MeasureRegistry::with_defaults(&params);
    let measures = args.measure.iter().map(|m| registry.get(m)).collect::<tensornet_core::Result<Vec<&dyn CentralityMeasure>>>()?;
    let cfg = TimescaleConfig { windows: args.windows.clone(), scope: args.scope, orientation: args.orientation, k: args.k };
    run.check_writable(&args.out)?;
    let report = timescale_centrality_stability(&snapshots, &measures, &cfg)?;
    run.write(&args.out, report_json(&run, &report)?)?;
    run.finish(&args.out)
}
