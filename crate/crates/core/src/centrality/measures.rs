//! Registry-facing implementations of the built-in measures.

use super::pagerank::pagerank;
use super::paths::{path_centrality, PathKind};
use super::spectral::{dominant_eigenpair, katz_centrality, PowerIteration};
use super::{degree_strength, CentralityMeasure, CentralityResult, Normalization, Orientation, Scope, ScopedMatrix};
use crate::error::Result;
use crate::network::MultilayerNetwork;

pub struct Degree;

impl CentralityMeasure for Degree {
    fn name(&self) -> &'static str {
        "degree"
    }

    fn compute(&self, net: &MultilayerNetwork, scope: Scope, orientation: Orientation) -> Result<CentralityResult> {
        degree_strength(net, scope, orientation, false)
    }
}

pub struct Strength;

impl CentralityMeasure for Strength {
    fn name(&self) -> &'static str {
        "strength"
    }

    fn compute(&self, net: &MultilayerNetwork, scope: Scope, orientation: Orientation) -> Result<CentralityResult> {
        degree_strength(net, scope, orientation, true)
    }
}

fn result(
    net: &MultilayerNetwork,
    scoped: &ScopedMatrix,
    name: &str,
    scope: Scope,
    orientation: Orientation,
    values: &[f64],
    normalization: Normalization,
) -> CentralityResult {
    let mut r = CentralityResult::new(
        name,
        scope,
        orientation,
        net.registry().ids().to_vec(),
        scoped.fold(values),
        if scoped.replicas > 1 { Normalization::None } else { normalization },
    );
    if scoped.replicas > 1 {
        r.metadata.insert("replica_aggregation".into(), "sum".into());
    }
    r
}

/// Dominant right eigenvector of the oriented matrix.
///
/// On the multilayer scope the supra eigenvector is returned as an `N x L`
/// eigentensor in `layer_scores` and each bank's score is its row sum.
pub struct Eigencentrality {
    pub power: PowerIteration,
}

impl CentralityMeasure for Eigencentrality {
    fn name(&self) -> &'static str {
        "eigencentrality"
    }

    fn compute(&self, net: &MultilayerNetwork, scope: Scope, orientation: Orientation) -> Result<CentralityResult> {
        let scoped = ScopedMatrix::resolve(net, scope, orientation)?;
        let pair = dominant_eigenpair(&scoped.matrix, &self.power)?;
        let mut r = result(net, &scoped, self.name(), scope, orientation, &pair.vector, Normalization::Max);
        r.metadata.insert("lambda_1".into(), pair.value.to_string());
        r.metadata.insert("iterations".into(), pair.iterations.to_string());
        if scoped.replicas > 1 {
            r.layer_scores = Some(scoped.layer_matrix(&pair.vector));
            r.layer_names = Some(net.layer_ids().iter().map(|l| l.name().to_string()).collect());
        }
        Ok(r)
    }
}

pub struct Katz {
    pub attenuation: f64,
    pub power: PowerIteration,
}

impl CentralityMeasure for Katz {
    fn name(&self) -> &'static str {
        "katz"
    }

    fn compute(&self, net: &MultilayerNetwork, scope: Scope, orientation: Orientation) -> Result<CentralityResult> {
        let scoped = ScopedMatrix::resolve(net, scope, orientation)?;
        let v = katz_centrality(&scoped.matrix, self.attenuation, &self.power)?;
        let mut r = result(net, &scoped, self.name(), scope, orientation, &v, Normalization::None);
        r.metadata.insert("attenuation".into(), self.attenuation.to_string());
        Ok(r)
    }
}

pub struct PageRank {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl CentralityMeasure for PageRank {
    fn name(&self) -> &'static str {
        "pagerank"
    }

    fn compute(&self, net: &MultilayerNetwork, scope: Scope, orientation: Orientation) -> Result<CentralityResult> {
        let scoped = ScopedMatrix::resolve(net, scope, orientation)?;
        let v = pagerank(&scoped.matrix, self.damping, self.tol, self.max_iter)?;
        let mut r = result(net, &scoped, self.name(), scope, orientation, &v, Normalization::L1);
        // replica sums of an l1-normalized vector still sum to one
        r.normalization = Normalization::L1;
        r.metadata.insert("damping".into(), self.damping.to_string());
        Ok(r)
    }
}

pub struct Betweenness;

impl CentralityMeasure for Betweenness {
    fn name(&self) -> &'static str {
        "betweenness"
    }

    fn compute(&self, net: &MultilayerNetwork, scope: Scope, orientation: Orientation) -> Result<CentralityResult> {
        let scoped = ScopedMatrix::resolve(net, scope, orientation)?;
        let v = path_centrality(&scoped.matrix, PathKind::Betweenness);
        Ok(result(net, &scoped, self.name(), scope, orientation, &v, Normalization::None))
    }
}

pub struct Closeness;

impl CentralityMeasure for Closeness {
    fn name(&self) -> &'static str {
        "closeness"
    }

    fn compute(&self, net: &MultilayerNetwork, scope: Scope, orientation: Orientation) -> Result<CentralityResult> {
        let scoped = ScopedMatrix::resolve(net, scope, orientation)?;
        let v = path_centrality(&scoped.matrix, PathKind::Closeness);
        Ok(result(net, &scoped, self.name(), scope, orientation, &v, Normalization::None))
    }
}
