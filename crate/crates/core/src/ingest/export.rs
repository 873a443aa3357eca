use std::fmt::Write as _;
use std::str::FromStr;

use super::bundle::NetworkBundle;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    GraphMl,
    Dot,
    Csv,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(ExportFormat::Json),
            "graphml" => Ok(ExportFormat::GraphMl),
            "dot" => Ok(ExportFormat::Dot),
            "csv" => Ok(ExportFormat::Csv),
            _ => Err(Error::UnsupportedFormat(s.to_string())),
        }
    }
}

pub fn export_network(bundle: &NetworkBundle, format: ExportFormat) -> Result<String> {
    match format {
        ExportFormat::Json => bundle.to_json(),
        ExportFormat::GraphMl => Ok(to_graphml(bundle)),
        ExportFormat::Dot => Ok(to_dot(bundle)),
        ExportFormat::Csv => Ok(exposures_csv(bundle)),
    }
}

/// Supra-graph edges as `(source label, target label, weight, kind)`.
fn supra_edges(bundle: &NetworkBundle) -> Vec<(String, String, f64, &'static str)> {
    let net = &bundle.network;
    let label = |i: usize, k: usize| format!("{}@{}", net.registry().id(i), net.layer(k).layer());
    let mut edges = Vec::new();
    for (k, layer) in net.layers().iter().enumerate() {
        for (&(i, j), &w) in layer.weights() {
            edges.push((label(i, k), label(j, k), w, "intra"));
        }
    }
    for c in net.couplings() {
        edges.push((label(c.from, c.from_layer), label(c.to, c.to_layer), c.weight, "inter"));
    }
    edges
}

fn node_labels(bundle: &NetworkBundle) -> Vec<(String, String, String)> {
    let net = &bundle.network;
    net.layers()
        .iter()
        .flat_map(|layer| {
            net.registry()
                .ids()
                .iter()
                .map(move |bank| (format!("{bank}@{}", layer.layer()), bank.clone(), layer.layer().to_string()))
        })
        .collect()
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;").replace('\'', "&apos;")
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn to_graphml(bundle: &NetworkBundle) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <key id=\"bank\" for=\"node\" attr.name=\"bank\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"layer\" for=\"node\" attr.name=\"layer\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n");
    out.push_str("  <key id=\"kind\" for=\"edge\" attr.name=\"kind\" attr.type=\"string\"/>\n");
    let _ = writeln!(out, "  <graph id=\"{}\" edgedefault=\"directed\">", bundle.period);
    for (id, bank, layer) in node_labels(bundle) {
        let _ = writeln!(
            out,
            "    <node id=\"{}\"><data key=\"bank\">{}</data><data key=\"layer\">{}</data></node>",
            xml_escape(&id),
            xml_escape(&bank),
            xml_escape(&layer)
        );
    }
    for (src, dst, w, kind) in supra_edges(bundle) {
        let _ = writeln!(
            out,
            "    <edge source=\"{}\" target=\"{}\"><data key=\"weight\">{w}</data><data key=\"kind\">{kind}</data></edge>",
            xml_escape(&src),
            xml_escape(&dst)
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

fn to_dot(bundle: &NetworkBundle) -> String {
    let mut out = String::from("digraph multilayer {\n");
    for (id, _, layer) in node_labels(bundle) {
        let _ = writeln!(out, "  \"{}\" [layer=\"{}\"];", dot_escape(&id), dot_escape(&layer));
    }
    for (src, dst, w, kind) in supra_edges(bundle) {
        let _ = writeln!(out, "  \"{}\" -> \"{}\" [weight={w}, kind={kind}];", dot_escape(&src), dot_escape(&dst));
    }
    out.push_str("}\n");
    out
}

/// Intra-layer weights in the exposures schema. Interlayer couplings have no
/// representation there and are omitted.
pub fn exposures_csv(bundle: &NetworkBundle) -> String {
    let net = &bundle.network;
    let mut out = String::from("period,from_bank,to_bank,layer,amount\n");
    for layer in net.layers() {
        for (&(i, j), &w) in layer.weights() {
            let _ = writeln!(
                out,
                "{},{},{},{},{w}",
                bundle.period,
                net.registry().id(i),
                net.registry().id(j),
                layer.layer()
            );
        }
    }
    out
}

/// Known capitals in the capitals schema.
pub fn capitals_csv(bundle: &NetworkBundle) -> String {
    let mut out = String::from("period,bank,total_capital\n");
    if let Some(caps) = &bundle.capitals {
        for (bank, cap) in bundle.network.registry().ids().iter().zip(caps) {
            if let Some(c) = cap {
                let _ = writeln!(out, "{},{bank},{c}", bundle.period);
            }
        }
    }
    out
}
