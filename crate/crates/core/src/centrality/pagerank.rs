use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

pub const DEFAULT_DAMPING: f64 = 0.85;

/// PageRank over the weighted out-links of `a` (row `i` lists the links of
/// node `i`). Dangling nodes spread their mass uniformly. The result sums to 1.
pub fn pagerank(a: &CsrMatrix, damping: f64, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("pagerank needs a square matrix".into()));
    }
    if !(0.0..1.0).contains(&damping) {
        return Err(Error::InvalidParameter(format!("damping must lie in [0, 1), got {damping}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let out_weight = a.row_sums();
    let nf = n as f64;
    let mut rank = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    // l1 error after stopping is at most damping/(1-damping) times the last step.
    let stop = tol * (1.0 - damping);
    let mut delta = f64::INFINITY;
    for _ in 0..max_iter {
        let dangling: f64 = rank.iter().zip(&out_weight).filter(|(_, &w)| w <= 0.0).map(|(r, _)| r).sum();
        let base = (1.0 - damping) / nf + damping * dangling / nf;
        next.iter_mut().for_each(|x| *x = base);
        for i in 0..n {
            if out_weight[i] <= 0.0 {
                continue;
            }
            let share = damping * rank[i] / out_weight[i];
            for (j, w) in a.row(i) {
                next[j] += share * w;
            }
        }
        delta = rank.iter().zip(&next).map(|(r, s)| (r - s).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if delta <= stop {
            let total: f64 = rank.iter().sum();
            rank.iter_mut().for_each(|r| *r /= total);
            return Ok(rank);
        }
    }
    Err(Error::NonConvergence { iterations: max_iter, residual: delta })
}
