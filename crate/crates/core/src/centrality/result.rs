use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Orientation, Scope};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    None,
    L1,
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityResult {
    pub measure: String,
    pub scope: Scope,
    pub orientation: Orientation,
    pub banks: Vec<String>,
    pub scores: Vec<f64>,
    /// `N x L` replica scores for multilayer spectral measures.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub layer_scores: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub layer_names: Option<Vec<String>>,
    pub normalization: Normalization,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl CentralityResult {
    pub fn new(
        measure: &str,
        scope: Scope,
        orientation: Orientation,
        banks: Vec<String>,
        scores: Vec<f64>,
        normalization: Normalization,
    ) -> Self {
        Self {
            measure: measure.to_string(),
            scope,
            orientation,
            banks,
            scores,
            layer_scores: None,
            layer_names: None,
            normalization,
            metadata: BTreeMap::new(),
        }
    }

    /// Bank indices from most to least central; equal scores fall back to
    /// lexicographic bank id.
    pub fn ordering(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.scores.len()).collect();
        idx.sort_by(|&a, &b| self.scores[b].total_cmp(&self.scores[a]).then_with(|| self.banks[a].cmp(&self.banks[b])));
        idx
    }

    /// 1-based ordinal rank of every bank.
    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.scores.len()];
        for (pos, i) in self.ordering().into_iter().enumerate() {
            ranks[i] = pos + 1;
        }
        ranks
    }

    /// `bank,score,rank` rows in bank-index order.
    pub fn to_csv(&self) -> String {
        let ranks = self.ranks();
        let mut out = String::from("bank,score,rank\n");
        for ((bank, score), rank) in self.banks.iter().zip(&self.scores).zip(ranks) {
            let _ = writeln!(out, "{bank},{score},{rank}");
        }
        out
    }

    /// `bank,<layer>,...` matrix of replica scores, if present.
    pub fn layer_scores_csv(&self) -> Option<String> {
        let scores = self.layer_scores.as_ref()?;
        let names = self.layer_names.clone().unwrap_or_else(|| {
            (0..scores.first().map_or(0, Vec::len)).map(|k| format!("layer{k}")).collect()
        });
        let mut out = format!("bank,{}\n", names.join(","));
        for (bank, row) in self.banks.iter().zip(scores) {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{bank},{}", cells.join(","));
        }
        Some(out)
    }
}
