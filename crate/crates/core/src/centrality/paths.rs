//! Shortest-path measures on exposure graphs. An edge of weight `w` has
//! length `1 / w`, so stronger exposures are closer.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::sparse::CsrMatrix;

/// Relative tolerance under which two path lengths count as equal.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    Betweenness,
    Closeness,
}

#[derive(Clone, Copy)]
struct Entry {
    dist: f64,
    node: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    // min-heap on distance, then node index
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

pub(crate) fn same_length(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs())
}

struct SingleSource {
    dist: Vec<f64>,
    sigma: Vec<f64>,
    preds: Vec<Vec<usize>>,
    order: Vec<usize>,
}

fn dijkstra(a: &CsrMatrix, source: usize) -> SingleSource {
    let n = a.nrows();
    let mut dist = vec![f64::INFINITY; n];
    let mut sigma = vec![0.0; n];
    let mut preds = vec![Vec::new(); n];
    let mut settled = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    sigma[source] = 1.0;
    heap.push(Entry { dist: 0.0, node: source });
    while let Some(Entry { dist: d, node: v }) = heap.pop() {
        if settled[v] || d > dist[v] {
            continue;
        }
        settled[v] = true;
        order.push(v);
        for (w, weight) in a.row(v) {
            if weight <= 0.0 || settled[w] {
                continue;
            }
            let alt = d + 1.0 / weight;
            if dist[w].is_finite() && same_length(alt, dist[w]) {
                sigma[w] += sigma[v];
                preds[w].push(v);
            } else if alt < dist[w] {
                dist[w] = alt;
                sigma[w] = sigma[v];
                preds[w].clear();
                preds[w].push(v);
                heap.push(Entry { dist: alt, node: w });
            }
        }
    }
    SingleSource { dist, sigma, preds, order }
}

/// Directed betweenness by dependency accumulation, unnormalized: the
/// returned score of `v` is the sum over ordered pairs `(s, t)` with
/// `s != v != t` of the fraction of shortest `s -> t` paths through `v`.
pub fn betweenness(a: &CsrMatrix) -> Vec<f64> {
    let n = a.nrows();
    let mut score = vec![0.0; n];
    for s in 0..n {
        let ss = dijkstra(a, s);
        let mut delta = vec![0.0; n];
        for &w in ss.order.iter().rev() {
            for &v in &ss.preds[w] {
                delta[v] += ss.sigma[v] / ss.sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                score[w] += delta[w];
            }
        }
    }
    score
}

/// Closeness from each node: reachable count over total distance to the
/// reachable nodes; 0 for nodes that reach nobody.
pub fn closeness(a: &CsrMatrix) -> Vec<f64> {
    (0..a.nrows())
        .map(|s| {
            let ss = dijkstra(a, s);
            let (count, total) = ss
                .dist
                .iter()
                .enumerate()
                .filter(|&(t, d)| t != s && d.is_finite())
                .fold((0usize, 0.0), |(c, t), (_, d)| (c + 1, t + d));
            if count == 0 {
                0.0
            } else {
                count as f64 / total
            }
        })
        .collect()
}

pub fn path_centrality(a: &CsrMatrix, kind: PathKind) -> Vec<f64> {
    match kind {
        PathKind::Betweenness => betweenness(a),
        PathKind::Closeness => closeness(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directed_path() {
        let m = CsrMatrix::from_triplets(3, 3, [(0, 1, 1.0), (1, 2, 1.0)]);
        assert_eq!(betweenness(&m), vec![0.0, 1.0, 0.0]);
        let c = closeness(&m);
        assert!((c[0] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(c[1], 1.0);
        assert_eq!(c[2], 0.0);
    }

    #[test]
    fn complete_graph_has_no_brokers() {
        let n = 5;
        let m = CsrMatrix::from_triplets(
            n,
            n,
            (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j, 1.0))),
        );
        assert!(betweenness(&m).iter().all(|&b| b == 0.0));
        assert!(closeness(&m).iter().all(|&c| c == 1.0));
    }

    #[test]
    fn strong_detour_beats_weak_direct_edge() {
        // 0 -> 2 directly with w = 0.25 (length 4) or via 1 with w = 1 (length 2)
        let m = CsrMatrix::from_triplets(3, 3, [(0, 2, 0.25), (0, 1, 1.0), (1, 2, 1.0)]);
        assert_eq!(betweenness(&m), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn tied_paths_split_credit() {
        let m = CsrMatrix::from_triplets(4, 4, [(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)]);
        assert_eq!(betweenness(&m), vec![0.0, 0.5, 0.5, 0.0]);
    }
}
