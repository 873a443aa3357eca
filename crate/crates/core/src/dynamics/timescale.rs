use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::centrality::{CentralityMeasure, Orientation, Scope};
use crate::error::{Error, Result};
use crate::ingest::NetworkBundle;
use crate::network::MultilayerNetwork;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimescaleConfig {
    /// Aggregation window sizes in snapshots.
    pub windows: Vec<usize>,
    pub scope: Scope,
    pub orientation: Orientation,
    /// Top-k size, capped at the bank count.
    pub k: usize,
}

impl Default for TimescaleConfig {
    fn default() -> Self {
        Self { windows: vec![1], scope: Scope::Projected, orientation: Orientation::Out, k: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockRanking {
    /// First and one-past-last snapshot index.
    pub start: usize,
    pub end: usize,
    pub periods: Vec<String>,
    pub scores: Vec<f64>,
    /// 1-based rank per bank.
    pub ranks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleStability {
    pub tau: usize,
    pub blocks: Vec<BlockRanking>,
    /// Kendall tau-b between consecutive blocks.
    pub consecutive_taus: Vec<f64>,
    /// Mean of `consecutive_taus`; absent with a single block.
    pub stability: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleOverlap {
    pub fine_tau: usize,
    pub coarse_tau: usize,
    /// Mean `|top-k(fine) ∩ top-k(coarse)| / k` over fine blocks that fall in
    /// a coarse block.
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureTimescale {
    pub measure: String,
    pub scales: Vec<ScaleStability>,
    pub topk_overlap: Vec<ScaleOverlap>,
    pub mean_topk_overlap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimescaleReport {
    pub banks: Vec<String>,
    pub snapshots: usize,
    pub k: usize,
    pub config: TimescaleConfig,
    pub measures: Vec<MeasureTimescale>,
    pub metadata: BTreeMap<String, String>,
}

/// Ranks each measure on consecutive blocks of `tau` snapshots for every
/// window, where a block is the elementwise sum of its snapshots. Trailing
/// snapshots that do not fill a block are left out.
pub fn timescale_centrality_stability(
    snapshots: &[NetworkBundle],
    measures: &[&dyn CentralityMeasure],
    config: &TimescaleConfig,
) -> Result<TimescaleReport> {
    if snapshots.len() < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 snapshots, got {}", snapshots.len())));
    }
    let windows: Vec<usize> = config.windows.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if windows.is_empty() || windows.iter().any(|&t| t == 0 || t > snapshots.len()) {
        return Err(Error::InvalidParameter(format!(
            "windows must lie in 1..={}, got {:?}",
            snapshots.len(),
            config.windows
        )));
    }
    if measures.is_empty() {
        return Err(Error::InvalidParameter("no measures requested".into()));
    }
    let first = &snapshots[0].network;
    for (s, b) in snapshots.iter().enumerate().skip(1) {
        if b.network.registry() != first.registry() {
            return Err(Error::InconsistentRegistry(format!("snapshot {s} ({}) has a different bank set", b.period)));
        }
        if b.network.layer_ids() != first.layer_ids() {
            return Err(Error::InconsistentRegistry(format!("snapshot {s} ({}) has a different layer set", b.period)));
        }
    }
    let n = first.n();
    let k = config.k.min(n).max(1);

    let aggregated: Vec<(usize, Vec<(usize, MultilayerNetwork)>)> = windows
        .iter()
        .map(|&tau| {
            let blocks = (0..snapshots.len() / tau)
                .map(|b| {
                    let start = b * tau;
                    MultilayerNetwork::sum(snapshots[start..start + tau].iter().map(|s| &s.network)).map(|net| (start, net))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((tau, blocks))
        })
        .collect::<Result<_>>()?;

    let mut out = Vec::with_capacity(measures.len());
    for measure in measures {
        let mut scales = Vec::with_capacity(windows.len());
        for (tau, blocks) in &aggregated {
            let rankings = blocks
                .iter()
                .map(|(start, net)| {
                    let r = measure.compute(net, config.scope, config.orientation)?;
                    Ok(BlockRanking {
                        start: *start,
                        end: start + tau,
                        periods: snapshots[*start..start + tau].iter().map(|s| s.period.to_string()).collect(),
                        ranks: r.ranks(),
                        scores: r.scores,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let consecutive_taus: Vec<f64> =
                rankings.windows(2).map(|w| kendall_tau_b(&w[0].scores, &w[1].scores)).collect();
            let stability = mean(&consecutive_taus);
            scales.push(ScaleStability { tau: *tau, blocks: rankings, consecutive_taus, stability });
        }
        let mut topk_overlap = Vec::new();
        for (a, fine) in scales.iter().enumerate() {
            for coarse in &scales[a + 1..] {
                let values: Vec<f64> = fine
                    .blocks
                    .iter()
                    .filter_map(|b| {
                        coarse.blocks.get(b.start / coarse.tau).map(|c| top_k_overlap(&b.ranks, &c.ranks, k))
                    })
                    .collect();
                if let Some(overlap) = mean(&values) {
                    topk_overlap.push(ScaleOverlap { fine_tau: fine.tau, coarse_tau: coarse.tau, overlap });
                }
            }
        }
        let mean_topk_overlap = mean(&topk_overlap.iter().map(|o| o.overlap).collect::<Vec<_>>());
        out.push(MeasureTimescale { measure: measure.name().to_string(), scales, topk_overlap, mean_topk_overlap });
    }

    let metadata = BTreeMap::from([
        ("aggregation".to_string(), "sum".to_string()),
        ("rank_correlation".to_string(), "kendall_tau_b".to_string()),
        ("partial_blocks".to_string(), "dropped".to_string()),
    ]);
    Ok(TimescaleReport {
        banks: first.registry().ids().to_vec(),
        snapshots: snapshots.len(),
        k,
        config: TimescaleConfig { windows, ..config.clone() },
        measures: out,
        metadata,
    })
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn top_k_overlap(a: &[usize], b: &[usize], k: usize) -> f64 {
    let top = |r: &[usize]| -> BTreeSet<usize> { (0..r.len()).filter(|&i| r[i] <= k).collect() };
    top(a).intersection(&top(b)).count() as f64 / k as f64
}

/// Kendall tau-b. Two constant vectors count as identical rankings (1); a
/// single constant vector carries no ordering information (0).
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    let (mut concordant, mut discordant) = (0i64, 0i64);
    let (mut ties_x, mut ties_y) = (0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i].total_cmp(&x[j]) as i64;
            let dy = y[i].total_cmp(&y[j]) as i64;
            match (dx, dy) {
                (0, 0) => {}
                (0, _) => ties_x += 1,
                (_, 0) => ties_y += 1,
                _ if dx == dy => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let n0 = concordant + discordant;
    let (nx, ny) = ((n0 + ties_y) as f64, (n0 + ties_x) as f64);
    match (nx == 0.0, ny == 0.0) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.0,
        _ => ((concordant - discordant) as f64 / (nx * ny).sqrt()).clamp(-1.0, 1.0),
    }
}
