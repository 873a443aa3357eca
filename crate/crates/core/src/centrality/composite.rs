use super::{CentralityResult, Normalization};
use crate::error::{Error, Result};

/// Average ranks, 1 = highest score; tied scores share the mean of their positions.
fn average_ranks(scores: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut ranks = vec![0.0; scores.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && scores[idx[end]] == scores[idx[start]] {
            end += 1;
        }
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

/// Borda aggregation of several measures into one score in `[0, 1]`.
///
/// Each measure ranks banks (average ranks on ties); a bank's composite score
/// is `(N - mean_rank) / (N - 1)`, so 1 means ranked first by every measure.
pub fn composite_centrality(results: &[CentralityResult]) -> Result<CentralityResult> {
    let first = results.first().ok_or_else(|| Error::InvalidParameter("composite needs at least one measure".into()))?;
    for r in results {
        if r.banks != first.banks {
            return Err(Error::DimensionMismatch(format!(
                "measure {} covers a different bank set than {}",
                r.measure, first.measure
            )));
        }
    }
    let n = first.banks.len();
    let mut mean_rank = vec![0.0; n];
    for r in results {
        for (m, rank) in mean_rank.iter_mut().zip(average_ranks(&r.scores)) {
            *m += rank / results.len() as f64;
        }
    }
    let scores = if n > 1 {
        mean_rank.iter().map(|r| (n as f64 - r) / (n as f64 - 1.0)).collect()
    } else {
        vec![1.0; n]
    };
    let mut out = CentralityResult::new("composite", first.scope, first.orientation, first.banks.clone(), scores, Normalization::None);
    let inputs: Vec<&str> = results.iter().map(|r| r.measure.as_str()).collect();
    out.metadata.insert("aggregation".into(), "borda_mean_rank".into());
    out.metadata.insert("inputs".into(), inputs.join(","));
    Ok(out)
}
