//! The tensorial multilayer exposure network and its contractions.
//!
//! Storage is sparse coordinate form: each layer keeps its intra-layer weights
//! `w_ij(k)` and the network keeps interlayer couplings `w_ij(h, k)` with
//! `h != k`. The canonical basis tensors are implicit in the index placement.
//!
//! Edge `i -> j` means bank `i` holds an exposure to counterparty `j`.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::layers::LayerId;
use crate::sparse::CsrMatrix;

/// Bijection between bank identifiers and node indices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRegistry {
    ids: Vec<String>,
    index: HashMap<String, usize>,
}

impl NodeRegistry {
    /// Registry with lexicographic index order; duplicates collapse.
    pub fn from_ids<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        ids.sort();
        ids.dedup();
        let index = ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        Self { ids, index }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, index: usize) -> &str {
        &self.ids[index]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownNode(id.to_string()))
    }
}

/// Intra-layer weights of one exposure layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerMatrix {
    layer: LayerId,
    n: usize,
    weights: BTreeMap<(usize, usize), f64>,
}

impl LayerMatrix {
    pub fn empty(layer: LayerId, n: usize) -> Self {
        Self { layer, n, weights: BTreeMap::new() }
    }

    /// Builds a layer from index-addressed entries, summing duplicates and
    /// dropping non-positive amounts.
    pub fn from_entries<I>(layer: LayerId, n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut m = Self::empty(layer, n);
        for (i, j, w) in entries {
            if i >= n || j >= n {
                return Err(Error::DimensionMismatch(format!("edge ({i}, {j}) outside {n} nodes")));
            }
            if i == j {
                return Err(Error::SelfExposure(format!("node {i}")));
            }
            if !w.is_finite() {
                return Err(Error::InvalidAmount { value: w, context: format!("edge ({i}, {j})") });
            }
            if w > 0.0 {
                *m.weights.entry((i, j)).or_insert(0.0) += w;
            }
        }
        Ok(m)
    }

    pub fn layer(&self) -> &LayerId {
        &self.layer
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.weights
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.weights.get(&(i, j)).copied().unwrap_or(0.0)
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    pub fn total(&self) -> f64 {
        self.weights.values().sum()
    }

    pub fn to_csr(&self) -> CsrMatrix {
        CsrMatrix::from_triplets(self.n, self.n, self.weights.iter().map(|(&(i, j), &w)| (i, j, w)))
    }

    fn map_weights(&self, f: impl Fn(usize, f64) -> f64) -> Self {
        let weights = self
            .weights
            .iter()
            .map(|(&(i, j), &w)| ((i, j), f(i, w)))
            .filter(|(_, w)| *w > 0.0)
            .collect();
        Self { layer: self.layer.clone(), n: self.n, weights }
    }
}

/// Builds a layer from identifier-addressed records. Amounts are expected to
/// have been through the layer's sign policy; non-positive ones are dropped.
pub fn build_layer_matrix<I, S>(records: I, layer: LayerId, registry: &NodeRegistry) -> Result<LayerMatrix>
where
    I: IntoIterator<Item = (S, S, f64)>,
    S: AsRef<str>,
{
    let mut entries = Vec::new();
    for (from, to, amount) in records {
        let (from, to) = (from.as_ref(), to.as_ref());
        if !amount.is_finite() {
            return Err(Error::InvalidAmount { value: amount, context: format!("{from} -> {to}") });
        }
        let i = registry.index_of(from)?;
        let j = registry.index_of(to)?;
        if i == j {
            return Err(Error::SelfExposure(from.to_string()));
        }
        entries.push((i, j, amount));
    }
    LayerMatrix::from_entries(layer, registry.len(), entries)
}

/// One interlayer coupling from node `from` in layer `from_layer` to node `to`
/// in layer `to_layer`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub from: usize,
    pub from_layer: usize,
    pub to: usize,
    pub to_layer: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InterlayerSpec {
    /// Each node is coupled to its own replica in every other layer with the
    /// same weight, in both directions.
    Multiplex(f64),
    Explicit(Vec<Coupling>),
}

impl Default for InterlayerSpec {
    fn default() -> Self {
        InterlayerSpec::Multiplex(0.0)
    }
}

type InterlayerKey = (usize, usize, usize, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct MultilayerNetwork {
    registry: NodeRegistry,
    layers: Vec<LayerMatrix>,
    /// `(i, h, j, k) -> w` with `h != k`.
    interlayer: BTreeMap<InterlayerKey, f64>,
    multiplex: bool,
    dimensionless: bool,
}

pub fn assemble_multilayer(
    registry: NodeRegistry,
    layers: Vec<LayerMatrix>,
    interlayer: &InterlayerSpec,
) -> Result<MultilayerNetwork> {
    let n = registry.len();
    if layers.is_empty() {
        return Err(Error::InvalidParameter("a multilayer network needs at least one layer".into()));
    }
    for layer in &layers {
        if layer.n != n {
            return Err(Error::DimensionMismatch(format!(
                "layer {} has {} nodes, registry has {n}",
                layer.layer, layer.n
            )));
        }
    }
    let l = layers.len();
    let mut couplings = BTreeMap::new();
    match interlayer {
        InterlayerSpec::Multiplex(omega) => {
            if !(*omega >= 0.0) || !omega.is_finite() {
                return Err(Error::NegativeCoupling(*omega));
            }
            if *omega > 0.0 {
                for i in 0..n {
                    for h in 0..l {
                        for k in (0..l).filter(|&k| k != h) {
                            couplings.insert((i, h, i, k), *omega);
                        }
                    }
                }
            }
        }
        InterlayerSpec::Explicit(list) => {
            for c in list {
                if !(c.weight >= 0.0) || !c.weight.is_finite() {
                    return Err(Error::NegativeCoupling(c.weight));
                }
                if c.from >= n || c.to >= n || c.from_layer >= l || c.to_layer >= l {
                    return Err(Error::DimensionMismatch(format!("coupling {c:?} outside {n} nodes x {l} layers")));
                }
                if c.from_layer == c.to_layer {
                    return Err(Error::InvalidParameter(format!(
                        "coupling {c:?} stays within one layer; use the layer matrix"
                    )));
                }
                if c.weight > 0.0 {
                    *couplings.entry((c.from, c.from_layer, c.to, c.to_layer)).or_insert(0.0) += c.weight;
                }
            }
        }
    }
    let multiplex = couplings.keys().all(|&(i, _, j, _)| i == j);
    Ok(MultilayerNetwork { registry, layers, interlayer: couplings, multiplex, dimensionless: false })
}

impl MultilayerNetwork {
    pub fn n(&self) -> usize {
        self.registry.len()
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn registry(&self) -> &NodeRegistry {
        &self.registry
    }

    pub fn layers(&self) -> &[LayerMatrix] {
        &self.layers
    }

    pub fn layer(&self, k: usize) -> &LayerMatrix {
        &self.layers[k]
    }

    pub fn layer_ids(&self) -> Vec<LayerId> {
        self.layers.iter().map(|l| l.layer.clone()).collect()
    }

    pub fn interlayer(&self) -> &BTreeMap<(usize, usize, usize, usize), f64> {
        &self.interlayer
    }

    pub fn couplings(&self) -> impl Iterator<Item = Coupling> + '_ {
        self.interlayer.iter().map(|(&(from, from_layer, to, to_layer), &weight)| Coupling {
            from,
            from_layer,
            to,
            to_layer,
            weight,
        })
    }

    pub fn is_multiplex(&self) -> bool {
        self.multiplex
    }

    /// True once weights have been divided by holder capital.
    pub fn is_dimensionless(&self) -> bool {
        self.dimensionless
    }

    pub fn intra_edge_count(&self) -> usize {
        self.layers.iter().map(LayerMatrix::edge_count).sum()
    }

    /// Sum of every intra-layer and interlayer weight, by direct iteration.
    pub fn total_weight(&self) -> f64 {
        self.layers.iter().map(LayerMatrix::total).sum::<f64>() + self.interlayer.values().sum::<f64>()
    }

    /// Layer-major supra index of `(node, layer)`.
    pub fn supra_index(&self, node: usize, layer: usize) -> usize {
        layer * self.n() + node
    }

    /// Elementwise sum of networks sharing registry and layer list.
    pub fn sum<'a, I>(networks: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a MultilayerNetwork>,
    {
        let mut iter = networks.into_iter();
        let first = iter.next().ok_or(Error::EmptyNetwork)?;
        let mut acc = first.clone();
        for net in iter {
            if net.registry != acc.registry {
                return Err(Error::InconsistentRegistry("node registries differ".into()));
            }
            if net.layer_ids() != acc.layer_ids() {
                return Err(Error::InconsistentRegistry("layer lists differ".into()));
            }
            for (dst, src) in acc.layers.iter_mut().zip(&net.layers) {
                for (&key, &w) in &src.weights {
                    *dst.weights.entry(key).or_insert(0.0) += w;
                }
            }
            for (&key, &w) in &net.interlayer {
                *acc.interlayer.entry(key).or_insert(0.0) += w;
            }
            acc.multiplex &= net.multiplex;
            acc.dimensionless |= net.dimensionless;
        }
        Ok(acc)
    }

    /// Same network with every weight multiplied by `s > 0`.
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.layers = self.layers.iter().map(|l| l.map_weights(|_, w| w * s)).collect();
        out.interlayer = self.interlayer.iter().map(|(&k, &w)| (k, w * s)).collect();
        out
    }
}

/// `N*L x N*L` flattening; supra index of `(i, k)` is `k * N + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupraMatrix {
    n: usize,
    l: usize,
    matrix: CsrMatrix,
}

impl SupraMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_layers(&self) -> usize {
        self.l
    }

    pub fn dim(&self) -> usize {
        self.n * self.l
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CsrMatrix {
        self.matrix
    }

    /// Block `(h, k)` as coordinate map in node indices.
    pub fn block(&self, h: usize, k: usize) -> BTreeMap<(usize, usize), f64> {
        let n = self.n;
        (h * n..(h + 1) * n)
            .flat_map(|r| self.matrix.row(r).map(move |(c, w)| (r, c, w)))
            .filter(|&(_, c, _)| c / n == k)
            .map(|(r, c, w)| ((r - h * n, c - k * n), w))
            .collect()
    }
}

pub fn supra_flatten(net: &MultilayerNetwork) -> SupraMatrix {
    let n = net.n();
    let l = net.num_layers();
    let intra = net
        .layers
        .iter()
        .enumerate()
        .flat_map(|(k, layer)| layer.weights.iter().map(move |(&(i, j), &w)| (k * n + i, k * n + j, w)));
    let inter = net.interlayer.iter().map(|(&(i, h, j, k), &w)| (h * n + i, k * n + j, w));
    SupraMatrix { n, l, matrix: CsrMatrix::from_triplets(n * l, n * l, intra.chain(inter)) }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedNetwork {
    matrix: CsrMatrix,
}

impl ProjectedNetwork {
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CsrMatrix {
        self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }
}

/// Contracts both layer indices: `P[i][j] = sum over (h, k) of w_ij(h, k)`.
/// Multiplex self-couplings land on the diagonal.
pub fn project_monoplex(net: &MultilayerNetwork) -> ProjectedNetwork {
    let n = net.n();
    let intra = net.layers.iter().flat_map(|layer| layer.weights.iter().map(|(&(i, j), &w)| (i, j, w)));
    let inter = net.interlayer.iter().map(|(&(i, _, j, _), &w)| (i, j, w));
    ProjectedNetwork { matrix: CsrMatrix::from_triplets(n, n, intra.chain(inter)) }
}

/// `q[h][k]`: total weight of connections from layer `h` to layer `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerAggregate {
    pub q: Vec<Vec<f64>>,
}

impl LayerAggregate {
    pub fn total(&self) -> f64 {
        self.q.iter().flatten().sum()
    }
}

pub fn layer_aggregate(net: &MultilayerNetwork) -> LayerAggregate {
    let l = net.num_layers();
    let mut q = vec![vec![0.0; l]; l];
    for (k, layer) in net.layers.iter().enumerate() {
        q[k][k] = layer.total();
    }
    for (&(_, h, _, k), &w) in &net.interlayer {
        q[h][k] += w;
    }
    LayerAggregate { q }
}

/// Divides every intra-layer weight `w_ij` by the capital of the holder `i`.
/// Interlayer couplings are left unchanged.
pub fn normalize_by_capital(net: &MultilayerNetwork, capitals: &[f64]) -> Result<MultilayerNetwork> {
    if capitals.len() != net.n() {
        return Err(Error::CapitalsIncomplete(format!("{} capitals for {} banks", capitals.len(), net.n())));
    }
    for (i, &c) in capitals.iter().enumerate() {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::NonPositiveCapital { bank: net.registry.id(i).to_string(), value: c });
        }
    }
    let mut out = net.clone();
    out.layers = net.layers.iter().map(|l| l.map_weights(|i, w| w / capitals[i])).collect();
    out.dimensionless = true;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layers::CanonicalLayer;

    fn lid(k: usize) -> LayerId {
        LayerId::Canonical(CanonicalLayer::ALL[k])
    }

    fn reg(n: usize) -> NodeRegistry {
        NodeRegistry::from_ids((0..n).map(|i| format!("B{i}")))
    }

    fn layer(k: usize, n: usize, entries: &[(usize, usize, f64)]) -> LayerMatrix {
        LayerMatrix::from_entries(lid(k), n, entries.iter().copied()).unwrap()
    }

    #[test]
    fn build_layer_matrix_examples() {
        let r = NodeRegistry::from_ids(["A", "B"]);
        let empty: Vec<(&str, &str, f64)> = vec![];
        assert_eq!(build_layer_matrix(empty, lid(0), &r).unwrap().edge_count(), 0);
        let m = build_layer_matrix([("A", "B", 100.0)], lid(0), &r).unwrap();
        assert_eq!(m.weights().iter().collect::<Vec<_>>(), vec![(&(0, 1), &100.0)]);
        let m = build_layer_matrix([("A", "B", 100.0), ("A", "B", 50.0)], lid(0), &r).unwrap();
        assert_eq!(m.get(0, 1), 150.0);
        assert!(matches!(build_layer_matrix([("A", "C", 1.0)], lid(0), &r), Err(Error::UnknownNode(_))));
        assert!(matches!(build_layer_matrix([("A", "B", f64::NAN)], lid(0), &r), Err(Error::InvalidAmount { .. })));
        assert!(matches!(build_layer_matrix([("A", "A", 1.0)], lid(0), &r), Err(Error::SelfExposure(_))));
    }

    #[test]
    fn assemble_examples() {
        let single = assemble_multilayer(reg(2), vec![layer(0, 2, &[])], &InterlayerSpec::Explicit(vec![])).unwrap();
        assert_eq!(single.num_layers(), 1);
        assert!(single.interlayer().is_empty());

        let mp = assemble_multilayer(reg(2), vec![layer(0, 2, &[]), layer(1, 2, &[])], &InterlayerSpec::Multiplex(1.0))
            .unwrap();
        let keys: Vec<_> = mp.interlayer().keys().copied().collect();
        assert_eq!(keys, vec![(0, 0, 0, 1), (0, 1, 0, 0), (1, 0, 1, 1), (1, 1, 1, 0)]);
        assert!(mp.interlayer().values().all(|&w| w == 1.0));
        assert!(mp.is_multiplex());

        let general = assemble_multilayer(
            reg(2),
            vec![layer(0, 2, &[]), layer(1, 2, &[])],
            &InterlayerSpec::Explicit(vec![Coupling { from: 0, from_layer: 0, to: 1, to_layer: 1, weight: 5.0 }]),
        )
        .unwrap();
        assert!(!general.is_multiplex());

        assert!(matches!(
            assemble_multilayer(reg(2), vec![layer(0, 3, &[])], &InterlayerSpec::Multiplex(0.0)),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            assemble_multilayer(reg(2), vec![layer(0, 2, &[])], &InterlayerSpec::Multiplex(-1.0)),
            Err(Error::NegativeCoupling(_))
        ));
    }

    #[test]
    fn supra_examples() {
        let w = [(0, 1, 2.0), (1, 0, 3.0)];
        let single = assemble_multilayer(reg(2), vec![layer(0, 2, &w)], &InterlayerSpec::Multiplex(0.0)).unwrap();
        assert_eq!(supra_flatten(&single).matrix(), &single.layer(0).to_csr());

        let one = assemble_multilayer(reg(1), vec![layer(0, 1, &[]), layer(1, 1, &[])], &InterlayerSpec::Multiplex(3.0))
            .unwrap();
        assert_eq!(supra_flatten(&one).matrix().to_dense(), vec![vec![0.0, 3.0], vec![3.0, 0.0]]);

        let two = assemble_multilayer(reg(2), vec![layer(0, 2, &w), layer(1, 2, &w)], &InterlayerSpec::Multiplex(0.0))
            .unwrap();
        let s = supra_flatten(&two);
        assert_eq!(
            s.matrix().to_dense(),
            vec![
                vec![0.0, 2.0, 0.0, 0.0],
                vec![3.0, 0.0, 0.0, 0.0],
                vec![0.0, 0.0, 0.0, 2.0],
                vec![0.0, 0.0, 3.0, 0.0]
            ]
        );
        assert_eq!(&s.block(1, 1), two.layer(1).weights());
        assert!(s.block(0, 1).is_empty());
    }

    #[test]
    fn projection_examples() {
        let w1 = [(0, 1, 2.0)];
        let w2 = [(0, 1, 1.0), (1, 0, 4.0)];
        let single = assemble_multilayer(reg(2), vec![layer(0, 2, &w1)], &InterlayerSpec::Multiplex(0.0)).unwrap();
        assert_eq!(project_monoplex(&single).matrix(), &single.layer(0).to_csr());

        let sum = assemble_multilayer(reg(2), vec![layer(0, 2, &w1), layer(1, 2, &w2)], &InterlayerSpec::Multiplex(0.0))
            .unwrap();
        assert_eq!(project_monoplex(&sum).matrix().to_dense(), vec![vec![0.0, 3.0], vec![4.0, 0.0]]);

        let mp = assemble_multilayer(reg(2), vec![layer(0, 2, &w1), layer(1, 2, &w2)], &InterlayerSpec::Multiplex(1.0))
            .unwrap();
        assert_eq!(project_monoplex(&mp).matrix().to_dense(), vec![vec![2.0, 3.0], vec![4.0, 2.0]]);
    }

    #[test]
    fn aggregate_examples() {
        let single = assemble_multilayer(reg(3), vec![layer(0, 3, &[(0, 1, 3.0), (2, 1, 4.0)])], &Default::default())
            .unwrap();
        assert_eq!(layer_aggregate(&single).q, vec![vec![7.0]]);
        let two = assemble_multilayer(
            reg(2),
            vec![layer(0, 2, &[(0, 1, 3.0)]), layer(1, 2, &[(1, 0, 5.0)])],
            &InterlayerSpec::Multiplex(0.0),
        )
        .unwrap();
        assert_eq!(layer_aggregate(&two).q, vec![vec![3.0, 0.0], vec![0.0, 5.0]]);
        let mp = assemble_multilayer(reg(2), vec![layer(0, 2, &[]), layer(1, 2, &[])], &InterlayerSpec::Multiplex(1.0))
            .unwrap();
        assert_eq!(layer_aggregate(&mp).q, vec![vec![0.0, 2.0], vec![2.0, 0.0]]);
    }

    #[test]
    fn capital_normalization() {
        let net = assemble_multilayer(reg(2), vec![layer(0, 2, &[(0, 1, 100.0)])], &Default::default()).unwrap();
        let r = normalize_by_capital(&net, &[200.0, 1.0]).unwrap();
        assert_eq!(r.layer(0).get(0, 1), 0.5);
        assert!(r.is_dimensionless());
        let same = normalize_by_capital(&net, &[1.0, 1.0]).unwrap();
        assert_eq!(same.layers(), net.layers());
        assert!(matches!(normalize_by_capital(&net, &[0.0, 1.0]), Err(Error::NonPositiveCapital { .. })));
        assert!(matches!(normalize_by_capital(&net, &[1.0]), Err(Error::CapitalsIncomplete(_))));
    }
}
