#![allow(dead_code)]

use proptest::prelude::*;
use tensornet_core::layers::LayerId;
use tensornet_core::network::{assemble_multilayer, Coupling, InterlayerSpec, LayerMatrix, MultilayerNetwork, NodeRegistry};

pub type Edge = (usize, usize, usize, f64);

pub fn build(n: usize, l: usize, edges: &[Edge], interlayer: InterlayerSpec) -> MultilayerNetwork {
    let reg = NodeRegistry::from_ids((0..n).map(|i| format!("N{i}")));
    let layers = (0..l)
        .map(|k| {
            let entries = edges.iter().filter(|e| e.2 == k && e.0 != e.1).map(|&(i, j, _, w)| (i, j, w));
            LayerMatrix::from_entries(LayerId::Custom(format!("L{k}")), n, entries).unwrap()
        })
        .collect();
    assemble_multilayer(reg, layers, &interlayer).unwrap()
}

fn edges(n: usize, l: usize, max: usize) -> impl Strategy<Value = Vec<Edge>> {
    prop::collection::vec((0..n, 0..n, 0..l, 0.01f64..100.0), 0..max)
}

/// Small multilayer networks, multiplex or with arbitrary couplings.
pub fn network() -> impl Strategy<Value = MultilayerNetwork> {
    (2usize..=6, 1usize..=4).prop_flat_map(|(n, l)| {
        let couplings = prop::collection::vec((0..n, 0..l, 0..n, 0..l, 0.01f64..5.0), 0..8);
        (edges(n, l, 24), prop_oneof![(0.0f64..3.0).prop_map(Some), Just(None)], couplings).prop_map(
            move |(e, omega, cs)| {
                let spec = match omega {
                    Some(w) => InterlayerSpec::Multiplex(w),
                    None => InterlayerSpec::Explicit(
                        cs.into_iter()
                            .filter(|c| c.1 != c.3)
                            .map(|(from, from_layer, to, to_layer, weight)| Coupling { from, from_layer, to, to_layer, weight })
                            .collect(),
                    ),
                };
                build(n, l, &e, spec)
            },
        )
    })
}

/// Multiplex networks with integer weights, so sums are exact in any order.
pub fn integer_network(n: usize, l: usize) -> impl Strategy<Value = MultilayerNetwork> {
    (prop::collection::vec((0..n, 0..n, 0..l, 1u32..50), 1..20), 0u32..3).prop_map(move |(e, omega)| {
        let e: Vec<Edge> = e.into_iter().map(|(i, j, k, w)| (i, j, k, w as f64)).collect();
        build(n, l, &e, InterlayerSpec::Multiplex(omega as f64))
    })
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
