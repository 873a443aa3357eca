use super::{CentralityResult, Normalization, Orientation, Scope, ScopedMatrix};
use crate::error::Result;
use crate::network::MultilayerNetwork;

/// Degree (`weighted = false`) or strength (`weighted = true`).
///
/// On the multilayer scope this is the multi-degree: contributions of every
/// layer pair, intra and interlayer, summed over each bank's replicas.
pub fn degree_strength(
    net: &MultilayerNetwork,
    scope: Scope,
    orientation: Orientation,
    weighted: bool,
) -> Result<CentralityResult> {
    let scoped = ScopedMatrix::raw(net, scope)?;
    let m = &scoped.matrix;
    let (out, inn): (Vec<f64>, Vec<f64>) = if weighted {
        (m.row_sums(), m.col_sums())
    } else {
        (
            m.row_counts().into_iter().map(|c| c as f64).collect(),
            m.col_counts().into_iter().map(|c| c as f64).collect(),
        )
    };
    let per_index = match orientation {
        Orientation::Out => out,
        Orientation::In => inn,
        Orientation::Total => out.iter().zip(&inn).map(|(a, b)| a + b).collect(),
    };
    let name = if weighted { "strength" } else { "degree" };
    Ok(CentralityResult::new(
        name,
        scope,
        orientation,
        net.registry().ids().to_vec(),
        scoped.fold(&per_index),
        Normalization::None,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layers::{CanonicalLayer, LayerId};
    use crate::network::{assemble_multilayer, InterlayerSpec, LayerMatrix, NodeRegistry};

    fn net(layers: &[&[(usize, usize, f64)]], omega: f64) -> MultilayerNetwork {
        let ls = layers
            .iter()
            .enumerate()
            .map(|(k, e)| {
                LayerMatrix::from_entries(LayerId::Canonical(CanonicalLayer::ALL[k]), 2, e.iter().copied()).unwrap()
            })
            .collect();
        assemble_multilayer(NodeRegistry::from_ids(["A", "B"]), ls, &InterlayerSpec::Multiplex(omega)).unwrap()
    }

    #[test]
    fn row_and_column_sums() {
        let n = net(&[&[(0, 1, 2.0)]], 0.0);
        assert_eq!(degree_strength(&n, Scope::Layer(0), Orientation::Out, true).unwrap().scores, vec![2.0, 0.0]);
        assert_eq!(degree_strength(&n, Scope::Layer(0), Orientation::In, true).unwrap().scores, vec![0.0, 2.0]);
        assert_eq!(degree_strength(&n, Scope::Layer(0), Orientation::Total, false).unwrap().scores, vec![1.0, 1.0]);
    }

    #[test]
    fn multi_degree_of_identical_layers_doubles() {
        let w: &[(usize, usize, f64)] = &[(0, 1, 2.0), (1, 0, 5.0)];
        let n = net(&[w, w], 0.0);
        let single = degree_strength(&n, Scope::Layer(0), Orientation::Out, true).unwrap().scores;
        let multi = degree_strength(&n, Scope::Multilayer, Orientation::Out, true).unwrap().scores;
        assert_eq!(multi, single.iter().map(|s| 2.0 * s).collect::<Vec<_>>());
    }

    #[test]
    fn projected_strength_matches_multilayer_strength() {
        let n = net(&[&[(0, 1, 2.0)], &[(1, 0, 3.0)]], 0.5);
        for o in [Orientation::Out, Orientation::In, Orientation::Total] {
            let p = degree_strength(&n, Scope::Projected, o, true).unwrap().scores;
            let m = degree_strength(&n, Scope::Multilayer, o, true).unwrap().scores;
            assert_eq!(p, m);
        }
    }
}
