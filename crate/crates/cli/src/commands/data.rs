use std::path::{Path, PathBuf};

use tensornet_core::ingest::{
    apply_sign_policy, build_bundle, build_panel, capitals_csv, export_network, exposures_csv, parse_capitals,
    parse_exposures, periods, ExportFormat, NetworkBundle,
};
use tensornet_core::layers::{LayerTaxonomy, SignPolicy, SignRule};
use tensornet_core::network::InterlayerSpec;
use tensornet_core::testbed::{generate_sequence, GenSpec, GraphModel};
use tensornet_core::Error;

use super::{config, load_bundle};
use crate::args::{BuildArgs, ExportArgs, GenerateArgs, Model};
use crate::error::{CliError, CliResult};
use crate::output::Run;

fn bundle_text(bundle: &NetworkBundle) -> CliResult<String> {
    Ok(terminated(bundle.to_json()?))
}

fn terminated(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn parse_sign_rule(spec: &str, taxonomy: &LayerTaxonomy) -> CliResult<(tensornet_core::layers::LayerId, SignRule)> {
    let (layer, rule) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("sign rule `{spec}` is not LAYER=RULE")))?;
    let rule = match rule.trim().to_ascii_lowercase().as_str() {
        "nonnegative" | "nonnegative_only" => SignRule::NonnegativeOnly,
        "long" | "long_only" => SignRule::LongOnly,
        "short" | "short_only" => SignRule::ShortOnly,
        "absolute" => SignRule::Absolute,
        other => return Err(CliError::Usage(format!("unknown sign rule `{other}`"))),
    };
    Ok((taxonomy.resolve(layer)?, rule))
}

pub fn build(args: BuildArgs) -> CliResult<()> {
    let mut run = Run::new("build", config(&args)?, args.output.force);
    let taxonomy = LayerTaxonomy::with_extensions(args.extra_layers.iter().cloned())?;
    let mut policy = SignPolicy::default();
    for spec in &args.sign_rules {
        let (layer, rule) = parse_sign_rule(spec, &taxonomy)?;
        policy = policy.with_override(layer, rule);
    }
    let raw = run.read(&args.exposures)?;
    let records = apply_sign_policy(parse_exposures(raw.as_slice(), &taxonomy)?, &policy)?;
    let capitals = match &args.capitals {
        Some(path) => parse_capitals(run.read(path)?.as_slice())?,
        None => Vec::new(),
    };
    let provenance: Vec<String> = run.inputs().iter().map(|d| format!("{}:sha256={}", d.path, d.sha256)).collect();
    let interlayer = InterlayerSpec::Multiplex(args.omega);

    if let Some(dir) = &args.out_dir {
        let mut bundles = build_panel(&records, &capitals, &interlayer, &taxonomy)?;
        let paths: Vec<PathBuf> = bundles.iter().map(|b| dir.join(format!("{}.json", b.period))).collect();
        for p in &paths {
            run.check_writable(p)?;
        }
        for (b, p) in bundles.iter_mut().zip(&paths) {
            b.provenance = provenance.clone();
            run.write(p, bundle_text(b)?)?;
        }
        return run.finish(&dir.join("build"));
    }

    let out = args.out.as_deref().ok_or_else(|| CliError::Usage("one of --out or --out-dir is required".into()))?;
    let period = match args.period {
        Some(p) => p,
        None => match periods(&records).as_slice() {
            [] => return Err(Error::EmptyNetwork.into()),
            [p] => *p,
            many => {
                return Err(CliError::Usage(format!(
                    "exposures span {} periods; pass --period or use --out-dir",
                    many.len()
                )))
            }
        },
    };
    let mut bundle = build_bundle(&records, &capitals, period, &interlayer, &taxonomy)?;
    bundle.provenance = provenance;
    run.write(out, bundle_text(&bundle)?)?;
    run.finish(out)
}

pub fn export(args: ExportArgs) -> CliResult<()> {
    let mut run = Run::new("export", config(&args)?, args.output.force);
    let format: ExportFormat = args.format.parse()?;
    let bundle = load_bundle(&mut run, &args.network)?;
    run.check_writable(&args.out)?;
    let text = terminated(export_network(&bundle, format)?);
    run.write(&args.out, text)?;
    if let Some(path) = &args.capitals_out {
        run.write(path, capitals_csv(&bundle))?;
    }
    run.finish(&args.out)
}

/// Concatenates per-snapshot CSV texts under a single header.
fn concat_csv<'a>(parts: impl Iterator<Item = &'a str>) -> String {
    let mut out = String::new();
    for (i, part) in parts.enumerate() {
        let mut lines = part.lines();
        let header = lines.next().unwrap_or_default();
        if i == 0 {
            out.push_str(header);
            out.push('\n');
        }
        for line in lines {
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}

pub fn generate(args: GenerateArgs) -> CliResult<()> {
    let model = match args.model {
        Model::Er => GraphModel::ErdosRenyi { p: args.p },
        Model::Cp => GraphModel::CorePeriphery {
            core_size: args.core_size.unwrap_or((args.n / 5).max(1)),
            p_core: args.p_core,
            p_cross: args.p_cross,
            p_periph: args.p_periph,
        },
    };
    let spec = GenSpec {
        model,
        n: args.n,
        l: args.l,
        mu: args.mu,
        sigma: args.sigma,
        omega: args.omega,
        seed: args.seed,
        period: args.period,
    };
    let mut cfg = config(&args)?;
    cfg["spec"] = serde_json::to_value(&spec)?;
    let mut run = Run::new("generate", cfg, args.output.force);
    if args.out.is_none() && args.exposures_out.is_none() && args.capitals_out.is_none() {
        return Err(CliError::Usage("nothing to write: pass --out, --exposures-out or --capitals-out".into()));
    }
    if args.snapshots == 0 {
        return Err(CliError::Usage("--snapshots must be at least 1".into()));
    }
    let bundles = generate_sequence(&spec, args.snapshots)?;

    let mut primary: Option<PathBuf> = None;
    if let Some(out) = &args.out {
        if bundles.len() == 1 {
            run.write(out, bundle_text(&bundles[0])?)?;
            primary = Some(out.clone());
        } else {
            let paths: Vec<PathBuf> = bundles.iter().map(|b| out.join(format!("{}.json", b.period))).collect();
            for p in &paths {
                run.check_writable(p)?;
            }
            for (b, p) in bundles.iter().zip(&paths) {
                run.write(p, bundle_text(b)?)?;
            }
            primary = Some(out.join("generate"));
        }
    }
    if let Some(path) = &args.exposures_out {
        let parts: Vec<String> = bundles.iter().map(exposures_csv).collect();
        run.write(path, concat_csv(parts.iter().map(String::as_str)))?;
        primary.get_or_insert_with(|| path.clone());
    }
    if let Some(path) = &args.capitals_out {
        let parts: Vec<String> = bundles.iter().map(capitals_csv).collect();
        run.write(path, concat_csv(parts.iter().map(String::as_str)))?;
        primary.get_or_insert_with(|| path.clone());
    }
    let primary = primary.expect("at least one output");
    run.finish(Path::new(&primary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_parts_share_one_header() {
        let joined = concat_csv(["h\na\n", "h\nb\nc\n"].into_iter());
        assert_eq!(joined, "h\na\nb\nc\n");
    }

    #[test]
    fn sign_rule_spec() {
        let tax = LayerTaxonomy::canonical();
        let (layer, rule) = parse_sign_rule("cds_net_sold=absolute", &tax).unwrap();
        assert_eq!(layer.name(), "CDS_NET_SOLD");
        assert_eq!(rule, SignRule::Absolute);
        assert!(matches!(parse_sign_rule("CDS_NET_SOLD", &tax), Err(CliError::Usage(_))));
        assert_eq!(parse_sign_rule("FOO=long", &tax).unwrap_err().code(), "unknown_layer");
    }
}
