use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::measures::{Betweenness, Closeness, Degree, Eigencentrality, Katz, PageRank, Strength};
use super::pagerank::DEFAULT_DAMPING;
use super::spectral::PowerIteration;
use super::CentralityMeasure;
use crate::error::{Error, Result};

/// Numeric parameters shared by the built-in measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureParams {
    pub power: PowerIteration,
    pub katz_attenuation: f64,
    pub damping: f64,
}

impl Default for MeasureParams {
    fn default() -> Self {
        Self { power: PowerIteration::default(), katz_attenuation: 0.1, damping: DEFAULT_DAMPING }
    }
}

/// Name-keyed collection of centrality measures.
#[derive(Default)]
pub struct MeasureRegistry {
    measures: BTreeMap<&'static str, Box<dyn CentralityMeasure>>,
}

impl MeasureRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// All built-in measures configured with `params`.
    pub fn with_defaults(params: &MeasureParams) -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(Degree));
        reg.register(Box::new(Strength));
        reg.register(Box::new(Eigencentrality { power: params.power }));
        reg.register(Box::new(Katz { attenuation: params.katz_attenuation, power: params.power }));
        reg.register(Box::new(PageRank {
            damping: params.damping,
            tol: params.power.tol,
            max_iter: params.power.max_iter,
        }));
        reg.register(Box::new(Betweenness));
        reg.register(Box::new(Closeness));
        reg
    }

    /// Adds a measure, replacing any previous one with the same name.
    pub fn register(&mut self, measure: Box<dyn CentralityMeasure>) {
        self.measures.insert(measure.name(), measure);
    }

    pub fn get(&self, name: &str) -> Result<&dyn CentralityMeasure> {
        let key = name.trim().to_ascii_lowercase();
        self.measures
            .get(key.as_str())
            .map(|m| m.as_ref())
            .ok_or_else(|| Error::UnknownMeasure(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.measures.keys().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::{CentralityResult, Orientation, Scope};
    use crate::network::MultilayerNetwork;

    struct Constant;

    impl CentralityMeasure for Constant {
        fn name(&self) -> &'static str {
            "constant"
        }

        fn compute(&self, net: &MultilayerNetwork, scope: Scope, o: Orientation) -> Result<CentralityResult> {
            Ok(CentralityResult::new(
                "constant",
                scope,
                o,
                net.registry().ids().to_vec(),
                vec![1.0; net.n()],
                crate::centrality::Normalization::None,
            ))
        }
    }

    #[test]
    fn builtins_and_custom_registration() {
        let mut reg = MeasureRegistry::with_defaults(&MeasureParams::default());
        let names: Vec<_> = reg.names().collect();
        assert_eq!(
            names,
            vec!["betweenness", "closeness", "degree", "eigencentrality", "katz", "pagerank", "strength"]
        );
        assert!(reg.get("PageRank").is_ok());
        assert!(matches!(reg.get("hits"), Err(Error::UnknownMeasure(_))));
        reg.register(Box::new(Constant));
        assert_eq!(reg.get("constant").unwrap().name(), "constant");
    }
}
