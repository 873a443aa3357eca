use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::ErrorKind;

use serde::Serialize;
use tensornet_core::centrality::{composite_centrality, CentralityResult, MeasureParams, MeasureRegistry};
use tensornet_core::factors::{layer_series, pca, regress_layer_on_components, FactorPanel, FactorRegression, PcaOptions, PcaResult};
use tensornet_core::ingest::{apply_sign_policy, parse_capitals, parse_exposures, parse_factors};
use tensornet_core::layers::{LayerTaxonomy, SignPolicy};
use tensornet_core::network::normalize_by_capital;
use tensornet_core::surcharge::{calibrate_surcharge, SurchargeConfig, TargetingVector};
use tensornet_core::Error;

use super::{config, load_bundle, power};
use crate::args::{CentralityArgs, FactorsArgs, SurchargeArgs, VectorKind};
use crate::error::{CliError, CliResult};
use crate::output::{is_json, report_json, Run};

#[derive(Serialize)]
struct CentralityReport<'a> {
    results: &'a [CentralityResult],
    #[serde(skip_serializing_if = "Option::is_none")]
    composite: Option<&'a CentralityResult>,
}

/// `bank,<m>,<m>_rank,...` for several measures side by side.
fn wide_csv(results: &[&CentralityResult]) -> String {
    let mut out = String::from("bank");
    for r in results {
        let _ = write!(out, ",{0},{0}_rank", r.measure);
    }
    out.push('\n');
    let ranks: Vec<Vec<usize>> = results.iter().map(|r| r.ranks()).collect();
    for (i, bank) in results[0].banks.iter().enumerate() {
        out.push_str(bank);
        for (r, rk) in results.iter().zip(&ranks) {
            let _ = write!(out, ",{},{}", r.scores[i], rk[i]);
        }
        out.push('\n');
    }
    out
}

pub fn centrality(args: CentralityArgs) -> CliResult<()> {
    let mut run = Run::new("centrality", config(&args)?, args.output.force);
    let bundle = load_bundle(&mut run, &args.network)?;
    let net = if args.capital_relative {
        normalize_by_capital(&bundle.network, &bundle.complete_capitals()?)?
    } else {
        bundle.network
    };
    let mut seen = BTreeSet::new();
    if let Some(dup) = args.measure.iter().find(|m| !seen.insert(m.to_ascii_lowercase())) {
        return Err(CliError::Usage(format!("measure `{dup}` requested twice")));
    }
    let params = MeasureParams { power: power(&args.spectral), katz_attenuation: args.a, damping: args.damping };
    let registry = MeasureRegistry::with_defaults(&params);
    let results = args
        .measure
        .iter()
        .map(|m| registry.get(m)?.compute(&net, args.scope, args.orientation))
        .collect::<tensornet_core::Result<Vec<_>>>()?;
    let composite = if args.composite { Some(composite_centrality(&results)?) } else { None };

    run.check_writable(&args.out)?;
    let layer_scores = match &args.layer_scores_out {
        Some(path) => {
            run.check_writable(path)?;
            let csv = results.iter().find_map(CentralityResult::layer_scores_csv).ok_or_else(|| {
                Error::InvalidParameter("layer scores need a spectral measure on the multilayer scope".into())
            })?;
            Some((path, csv))
        }
        None => None,
    };

    let text = if is_json(&args.out) {
        report_json(&run, &CentralityReport { results: &results, composite: composite.as_ref() })?
    } else if results.len() == 1 && composite.is_none() {
        results[0].to_csv()
    } else {
        let mut all: Vec<&CentralityResult> = results.iter().collect();
        all.extend(composite.as_ref());
        wide_csv(&all)
    };
    run.write(&args.out, text)?;
    if let Some((path, csv)) = layer_scores {
        run.write(path, csv)?;
    }
    run.finish(&args.out)
}

pub fn surcharge(args: SurchargeArgs) -> CliResult<()> {
    let mut run = Run::new("surcharge", config(&args)?, args.output.force);
    let mut bundle = load_bundle(&mut run, &args.network)?;
    if let Some(path) = &args.capitals {
        let raw = match run.read(path) {
            Err(CliError::Io { source, .. }) if source.kind() == ErrorKind::NotFound => {
                return Err(Error::CapitalsIncomplete(format!("any bank (`{}` does not exist)", path.display())).into());
            }
            other => other?,
        };
        bundle = bundle.with_capitals(&parse_capitals(raw.as_slice())?);
    }
    let capitals = bundle.complete_capitals()?;
    let cfg = SurchargeConfig {
        threshold: args.threshold,
        vector_kind: match args.vector {
            VectorKind::Eigencentrality => TargetingVector::Eigencentrality,
            VectorKind::Katz => TargetingVector::Katz { a: args.a },
        },
        scope: args.scope,
        tol_lambda: args.tol_lambda,
        tol_c: args.tol_c,
        c_max_initial: args.c_max,
        recompute_vector: args.recompute,
        power: power(&args.spectral),
    };
    run.check_writable(&args.out)?;
    let report = calibrate_surcharge(&bundle.network, &capitals, &cfg)?;
    let text = if is_json(&args.out) { report_json(&run, &report)? } else { report.to_csv() };
    run.write(&args.out, text)?;
    run.finish(&args.out)
}

#[derive(Serialize)]
struct FactorReport {
    periods: Vec<String>,
    options: PcaOptions,
    pca: PcaResult,
    regressions: Vec<FactorRegression>,
}

pub fn factors(args: FactorsArgs) -> CliResult<()> {
    let mut run = Run::new("factors", config(&args)?, args.output.force);
    let obs = parse_factors(run.read(&args.factors)?.as_slice())?;
    let panel = FactorPanel::from_observations(&obs)?;
    let options = PcaOptions { variance_threshold: args.variance, n_components: args.components };
    let result = pca(&panel, &options)?;
    let regressions = match &args.exposures {
        Some(path) => {
            let taxonomy = LayerTaxonomy::canonical();
            let records = apply_sign_policy(parse_exposures(run.read(path)?.as_slice(), &taxonomy)?, &SignPolicy::default())?;
            let layers: Vec<_> =
                taxonomy.layers().iter().filter(|l| records.iter().any(|r| &r.layer == *l)).cloned().collect();
            layer_series(&records, &layers, &panel.periods)
                .into_iter()
                .map(|(layer, series)| regress_layer_on_components(layer, &series, &result))
                .collect::<tensornet_core::Result<Vec<_>>>()?
        }
        None => Vec::new(),
    };
    run.check_writable(&args.out)?;
    if let Some(path) = &args.loadings_out {
        run.check_writable(path)?;
    }
    let report = FactorReport {
        periods: panel.periods.iter().map(ToString::to_string).collect(),
        options,
        pca: result,
        regressions,
    };
    run.write(&args.out, report_json(&run, &report)?)?;
    if let Some(path) = &args.loadings_out {
        run.write(path, report.pca.loadings_csv())?;
    }
    run.finish(&args.out)
}
