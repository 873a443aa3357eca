//! Centrality measures on monoplex, projected and multilayer scopes.
//!
//! Each measure implements [`CentralityMeasure`] and is looked up by name in a
//! [`MeasureRegistry`], which is how the CLI and the time-scale analysis
//! select them at runtime.

mod composite;
mod degree;
mod measures;
pub mod pagerank;
pub mod paths;
mod registry;
mod result;
pub mod spectral;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use composite::composite_centrality;
pub use degree::degree_strength;
pub use measures::{Betweenness, Closeness, Degree, Eigencentrality, Katz, PageRank, Strength};
pub use pagerank::pagerank;
pub use paths::{path_centrality, PathKind};
pub use registry::{MeasureParams, MeasureRegistry};
pub use result::{CentralityResult, Normalization};
pub use spectral::{dominant_eigenpair, katz_centrality, spectral_radius, Eigenpair, PowerIteration};

use crate::error::{Error, Result};
use crate::network::{project_monoplex, supra_flatten, MultilayerNetwork};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Layer(usize),
    Projected,
    Multilayer,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Layer(k) => write!(f, "layer:{k}"),
            Scope::Projected => f.write_str("projected"),
            Scope::Multilayer => f.write_str("multilayer"),
        }
    }
}

impl FromStr for Scope {
    type Err = Error;

    /// `projected`, `multilayer` or `layer:<index>`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "projected" => Ok(Scope::Projected),
            "multilayer" => Ok(Scope::Multilayer),
            other => other
                .strip_prefix("layer:")
                .and_then(|k| k.parse().ok())
                .map(Scope::Layer)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown scope `{s}`"))),
        }
    }
}

/// Which direction of the exposure matrix a measure reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Exposures held: rows.
    #[default]
    Out,
    /// Exposures attracted: columns.
    In,
    /// Both directions.
    Total,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Out => "out",
            Orientation::In => "in",
            Orientation::Total => "total",
        })
    }
}

impl FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "out" => Ok(Orientation::Out),
            "in" => Ok(Orientation::In),
            "total" => Ok(Orientation::Total),
            _ => Err(Error::InvalidParameter(format!("unknown orientation `{s}`"))),
        }
    }
}

/// Matrix a measure runs on, plus how to fold its index space back to banks.
#[derive(Debug, Clone)]
pub struct ScopedMatrix {
    pub matrix: CsrMatrix,
    pub n: usize,
    /// 1 for layer and projected scopes, `L` for the supra matrix.
    pub replicas: usize,
}

impl ScopedMatrix {
    /// Raw (unoriented) matrix of the scope.
    pub fn raw(net: &MultilayerNetwork, scope: Scope) -> Result<Self> {
        let n = net.n();
        let (matrix, replicas) = match scope {
            Scope::Layer(k) => {
                if k >= net.num_layers() {
                    return Err(Error::InvalidParameter(format!(
                        "layer {k} out of range for {} layers",
                        net.num_layers()
                    )));
                }
                (net.layer(k).to_csr(), 1)
            }
            Scope::Projected => (project_monoplex(net).into_matrix(), 1),
            Scope::Multilayer => (supra_flatten(net).into_matrix(), net.num_layers()),
        };
        Ok(Self { matrix, n, replicas })
    }

    /// Oriented matrix: `out` as is, `in` transposed, `total` symmetrized sum.
    pub fn resolve(net: &MultilayerNetwork, scope: Scope, orientation: Orientation) -> Result<Self> {
        let mut s = Self::raw(net, scope)?;
        s.matrix = match orientation {
            Orientation::Out => s.matrix,
            Orientation::In => s.matrix.transpose(),
            Orientation::Total => s.matrix.add(&s.matrix.transpose()),
        };
        Ok(s)
    }

    /// Sums replica scores per bank.
    pub fn fold(&self, values: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (idx, v) in values.iter().enumerate() {
            out[idx % self.n] += v;
        }
        out
    }

    /// `N x L` view of a supra-indexed vector.
    pub fn layer_matrix(&self, values: &[f64]) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..self.replicas).map(|k| values[k * self.n + i]).collect()).collect()
    }
}

/// A centrality measure selectable by name.
pub trait CentralityMeasure: Send + Sync {
    fn name(&self) -> &'static str;

    fn compute(&self, net: &MultilayerNetwork, scope: Scope, orientation: Orientation) -> Result<CentralityResult>;
}
