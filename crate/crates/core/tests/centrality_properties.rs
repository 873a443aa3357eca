mod common;

use common::{build, network, rel_close};
use proptest::prelude::*;
use tensornet_core::centrality::{
    dominant_eigenpair, katz_centrality, pagerank, CentralityResult, MeasureParams, MeasureRegistry, Orientation,
    PowerIteration, Scope,
};
use tensornet_core::network::{project_monoplex, InterlayerSpec};
use tensornet_core::sparse::CsrMatrix;

/// True when every strict order between two banks (beyond a relative gap
/// of `tol`) is preserved.
fn same_order(a: &CentralityResult, b: &CentralityResult, tol: f64) -> bool {
    let n = a.scores.len();
    (0..n).all(|i| {
        (0..n).all(|j| {
            let (x, y) = (a.scores[i], a.scores[j]);
            let gap = tol * x.abs().max(y.abs());
            !(x > y + gap) || b.scores[i] > b.scores[j]
        })
    })
}

fn strongly_connected(n: usize) -> impl Strategy<Value = CsrMatrix> {
    prop::collection::vec(0.1f64..10.0, n * n).prop_map(move |w| {
        CsrMatrix::from_triplets(n, n, (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| (i, j, w[i * n + j])))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn orderings_survive_scaling(net in network(), s in prop_oneof![Just(0.5), Just(10.0), 0.01f64..100.0]) {
        prop_assume!(net.total_weight() > 0.0);
        // Katz depends on a * W, so its attenuation scales inversely with the weights
        let registry = MeasureRegistry::with_defaults(&MeasureParams { katz_attenuation: 1e-3, ..Default::default() });
        let registry_s = MeasureRegistry::with_defaults(&MeasureParams { katz_attenuation: 1e-3 / s, ..Default::default() });
        let scaled = net.scaled(s);
        for name in registry.names() {
            let (m, ms) = (registry.get(name).unwrap(), registry_s.get(name).unwrap());
            for scope in [Scope::Projected, Scope::Multilayer, Scope::Layer(0)] {
                let (Ok(a), Ok(b)) = (m.compute(&net, scope, Orientation::Out), ms.compute(&scaled, scope, Orientation::Out)) else {
                    continue;
                };
                prop_assert!(same_order(&a, &b, 1e-9), "{name} {scope}: {:?} vs {:?}", a.scores, b.scores);
                if let (Some(la), Some(lb)) = (a.metadata.get("lambda_1"), b.metadata.get("lambda_1")) {
                    let (la, lb): (f64, f64) = (la.parse().unwrap(), lb.parse().unwrap());
                    prop_assert!(rel_close(lb, s * la, 1e-9));
                }
            }
        }
    }

    #[test]
    fn eigenpair_residual(w in (2usize..10).prop_flat_map(strongly_connected)) {
        let cfg = PowerIteration::default();
        let p = dominant_eigenpair(&w, &cfg).unwrap();
        let av = w.mul_vec(&p.vector);
        let res = av.iter().zip(&p.vector).fold(0.0f64, |m, (a, v)| m.max((a - p.value * v).abs()));
        prop_assert!(res <= cfg.tol * p.value);
        prop_assert!((p.vector.iter().cloned().fold(0.0, f64::max) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn katz_first_order(w in (2usize..10).prop_flat_map(strongly_connected)) {
        let a = 1e-6;
        let v = katz_centrality(&w, a, &PowerIteration::default()).unwrap();
        let wu = w.row_sums();
        for (vi, wi) in v.iter().zip(&wu) {
            prop_assert!(rel_close((vi - 1.0) / a, *wi, 1e-4));
        }
    }

    #[test]
    fn katz_near_boundary_follows_eigenvector(w in (3usize..8).prop_flat_map(strongly_connected)) {
        let cfg = PowerIteration::default();
        let p = dominant_eigenpair(&w, &cfg).unwrap();
        let v = katz_centrality(&w, (1.0 - 1e-7) / p.value, &cfg).unwrap();
        let n = v.len();
        for i in 0..n {
            for j in 0..n {
                if p.vector[i] > p.vector[j] * (1.0 + 1e-4) {
                    prop_assert!(v[i] > v[j]);
                }
            }
        }
    }

    #[test]
    fn pagerank_is_a_distribution(net in network(), d in 0.05f64..0.95) {
        let p = pagerank(project_monoplex(&net).matrix(), d, 1e-12, 100_000).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(p.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn multi_degree_is_layer_sum(n in 2usize..7, l in 1usize..5, seed_edges in prop::collection::vec((0usize..7, 0usize..7, 0usize..5, 0.1f64..9.0), 0..30)) {
        let edges: Vec<_> = seed_edges.into_iter().filter(|e| e.0 < n && e.1 < n && e.2 < l).collect();
        let net = build(n, l, &edges, InterlayerSpec::Multiplex(0.0));
        let registry = MeasureRegistry::with_defaults(&MeasureParams::default());
        for orientation in [Orientation::Out, Orientation::In, Orientation::Total] {
            let multi = registry.get("degree").unwrap().compute(&net, Scope::Multilayer, orientation).unwrap();
            let mut summed = vec![0.0; n];
            for k in 0..l {
                let r = registry.get("degree").unwrap().compute(&net, Scope::Layer(k), orientation).unwrap();
                summed.iter_mut().zip(&r.scores).for_each(|(s, x)| *s += x);
            }
            prop_assert_eq!(&multi.scores, &summed);
        }
    }

    #[test]
    fn projected_strength_matches_multilayer(net in network()) {
        let registry = MeasureRegistry::with_defaults(&MeasureParams::default());
        let m = registry.get("strength").unwrap();
        for orientation in [Orientation::Out, Orientation::In, Orientation::Total] {
            let p = m.compute(&net, Scope::Projected, orientation).unwrap();
            let s = m.compute(&net, Scope::Multilayer, orientation).unwrap();
            for (a, b) in p.scores.iter().zip(&s.scores) {
                prop_assert!(rel_close(*a, *b, 1e-9) || (a - b).abs() < 1e-12);
            }
        }
    }
}
