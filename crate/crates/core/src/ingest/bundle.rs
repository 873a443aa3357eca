use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::records::{parse_date, CapitalRecord, ExposureRecord};
use crate::error::{Error, Result};
use crate::layers::{LayerId, LayerTaxonomy};
use crate::network::{assemble_multilayer, build_layer_matrix, Coupling, InterlayerSpec, MultilayerNetwork, NodeRegistry};

/// One period's multilayer network together with bank capitals.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkBundle {
    pub period: NaiveDate,
    pub network: MultilayerNetwork,
    /// Aligned with the node registry; `None` when no capital data was supplied.
    pub capitals: Option<Vec<Option<f64>>>,
    pub provenance: Vec<String>,
}

impl NetworkBundle {
    pub fn capitals_complete(&self) -> bool {
        self.capitals.as_ref().is_some_and(|c| c.iter().all(Option::is_some))
    }

    /// Capitals for every bank, or `CapitalsIncomplete` naming the first gap.
    pub fn complete_capitals(&self) -> Result<Vec<f64>> {
        let caps = self
            .capitals
            .as_ref()
            .ok_or_else(|| Error::CapitalsIncomplete("bundle carries no capital data".into()))?;
        caps.iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| Error::CapitalsIncomplete(format!("bank `{}`", self.network.registry().id(i)))))
            .collect()
    }

    /// Replaces the capitals with the records for this bundle's period.
    pub fn with_capitals(mut self, capitals: &[CapitalRecord]) -> Self {
        let reg = self.network.registry();
        let mut caps = vec![None; reg.len()];
        for c in capitals.iter().filter(|c| c.period == self.period) {
            if let Ok(i) = reg.index_of(&c.bank) {
                caps[i] = Some(c.total_capital);
            }
        }
        self.capitals = Some(caps);
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&BundleJson::from_bundle(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<BundleJson>(text)?.into_bundle()
    }
}

/// Builds the bundle for `period` from sign-adjusted exposure records.
///
/// Banks are the union of record and capital identifiers for that period, in
/// lexicographic order. Every taxonomy layer is materialized, empty if absent.
pub fn build_bundle(
    records: &[ExposureRecord],
    capitals: &[CapitalRecord],
    period: NaiveDate,
    interlayer: &InterlayerSpec,
    taxonomy: &LayerTaxonomy,
) -> Result<NetworkBundle> {
    let recs: Vec<&ExposureRecord> = records.iter().filter(|r| r.period == period).collect();
    let caps = capitals.iter().filter(|c| c.period == period);
    let registry = NodeRegistry::from_ids(
        recs.iter()
            .flat_map(|r| [r.from_bank.as_str(), r.to_bank.as_str()])
            .chain(caps.map(|c| c.bank.as_str())),
    );
    assemble(&recs, capitals, period, registry, interlayer, taxonomy)
}

/// One bundle per period, all sharing the registry of every bank seen in
/// any period, so that snapshots can be compared and summed.
pub fn build_panel(
    records: &[ExposureRecord],
    capitals: &[CapitalRecord],
    interlayer: &InterlayerSpec,
    taxonomy: &LayerTaxonomy,
) -> Result<Vec<NetworkBundle>> {
    let registry = NodeRegistry::from_ids(
        records
            .iter()
            .flat_map(|r| [r.from_bank.as_str(), r.to_bank.as_str()])
            .chain(capitals.iter().map(|c| c.bank.as_str())),
    );
    periods(records)
        .into_iter()
        .map(|period| {
            let recs: Vec<&ExposureRecord> = records.iter().filter(|r| r.period == period).collect();
            assemble(&recs, capitals, period, registry.clone(), interlayer, taxonomy)
        })
        .collect()
}

fn assemble(
    recs: &[&ExposureRecord],
    capitals: &[CapitalRecord],
    period: NaiveDate,
    registry: NodeRegistry,
    interlayer: &InterlayerSpec,
    taxonomy: &LayerTaxonomy,
) -> Result<NetworkBundle> {
    if recs.is_empty() {
        return Err(Error::EmptyNetwork);
    }
    for r in recs {
        if taxonomy.index_of(&r.layer).is_none() {
            return Err(Error::UnknownLayer(r.layer.to_string()));
        }
    }
    let layers = taxonomy
        .layers()
        .iter()
        .map(|layer| {
            build_layer_matrix(
                recs.iter()
                    .filter(|r| &r.layer == layer)
                    .map(|r| (r.from_bank.as_str(), r.to_bank.as_str(), r.amount)),
                layer.clone(),
                &registry,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let network = assemble_multilayer(registry, layers, interlayer)?;
    let bundle = NetworkBundle { period, network, capitals: None, provenance: Vec::new() };
    Ok(if capitals.is_empty() {
        bundle
    } else {
        bundle.with_capitals(capitals)
    })
}

/// Distinct periods present in a record set, ascending.
pub fn periods(records: &[ExposureRecord]) -> Vec<NaiveDate> {
    let mut p: Vec<NaiveDate> = records.iter().map(|r| r.period).collect();
    p.sort();
    p.dedup();
    p
}

#[derive(Debug, Serialize, Deserialize)]
struct BundleJson {
    period: String,
    nodes: Vec<String>,
    layers: Vec<LayerId>,
    intra: Vec<Vec<(usize, usize, f64)>>,
    interlayer: Vec<(usize, usize, usize, usize, f64)>,
    capitals: Option<Vec<Option<f64>>>,
    multiplex_flag: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    provenance: Vec<String>,
}

impl BundleJson {
    fn from_bundle(b: &NetworkBundle) -> Self {
        let net = &b.network;
        Self {
            period: b.period.format("%Y-%m-%d").to_string(),
            nodes: net.registry().ids().to_vec(),
            layers: net.layer_ids(),
            intra: net
                .layers()
                .iter()
                .map(|l| l.weights().iter().map(|(&(i, j), &w)| (i, j, w)).collect())
                .collect(),
            interlayer: net.interlayer().iter().map(|(&(i, h, j, k), &w)| (i, h, j, k, w)).collect(),
            capitals: b.capitals.clone(),
            multiplex_flag: net.is_multiplex(),
            provenance: b.provenance.clone(),
        }
    }

    fn into_bundle(self) -> Result<NetworkBundle> {
        let period = parse_date(&self.period, 0)?;
        let registry = NodeRegistry::from_ids(self.nodes.iter().cloned());
        if registry.ids() != self.nodes.as_slice() {
            return Err(Error::InvalidParameter("bundle nodes must be unique and sorted".into()));
        }
        if self.intra.len() != self.layers.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} intra blocks for {} layers",
                self.intra.len(),
                self.layers.len()
            )));
        }
        let n = registry.len();
        let layers = self
            .layers
            .into_iter()
            .zip(self.intra)
            .map(|(id, entries)| {
                let mut seen = BTreeMap::new();
                for &(i, j, w) in &entries {
                    if !(w > 0.0) || seen.insert((i, j), w).is_some() {
                        return Err(Error::InvalidParameter(format!("layer {id}: bad or duplicate entry ({i}, {j}, {w})")));
                    }
                }
                crate::network::LayerMatrix::from_entries(id, n, entries)
            })
            .collect::<Result<Vec<_>>>()?;
        let couplings = self
            .interlayer
            .into_iter()
            .map(|(from, from_layer, to, to_layer, weight)| Coupling { from, from_layer, to, to_layer, weight })
            .collect();
        let network = assemble_multilayer(registry, layers, &InterlayerSpec::Explicit(couplings))?;
        if network.is_multiplex() != self.multiplex_flag {
            return Err(Error::InvalidParameter("multiplex_flag disagrees with interlayer couplings".into()));
        }
        if let Some(c) = &self.capitals {
            if c.len() != n {
                return Err(Error::DimensionMismatch(format!("{} capitals for {n} nodes", c.len())));
            }
        }
        Ok(NetworkBundle { period, network, capitals: self.capitals, provenance: self.provenance })
    }
}
