//! Seeded synthetic multilayer networks.
//!
//! The generator is xorshift64* seeded through splitmix64:
//!
//! ```text
//! state <- splitmix64(seed)           (0 is replaced by 0x9E3779B97F4A7C15)
//! next:  x ^= x >> 12; x ^= x << 25; x ^= x >> 27; return x * 0x2545F4914F6CDD1D
//! uniform = (next >> 11) * 2^-53      in [0, 1)
//! normal  = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)
//! ```
//!
//! Layer `k` draws from its own stream seeded with
//! `seed ^ (k + 1) * 0x9E3779B97F4A7C15` (wrapping). Within a layer, ordered
//! pairs `(i, j)`, `i != j`, are visited row by row; each pair consumes one
//! uniform for the edge test and, on success, two more for the weight.

use chrono::{Months, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::NetworkBundle;
use crate::layers::{CanonicalLayer, LayerId};
use crate::network::{assemble_multilayer, InterlayerSpec, LayerMatrix, NodeRegistry};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone)]
pub struct XorShift64Star {
    state: u64,
}

impl XorShift64Star {
    pub fn new(seed: u64) -> Self {
        let s = splitmix64(seed);
        Self { state: if s == 0 { GOLDEN } else { s } }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn layer_seed(seed: u64, k: usize) -> u64 {
    seed ^ (k as u64 + 1).wrapping_mul(GOLDEN)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GraphModel {
    ErdosRenyi { p: f64 },
    /// The first `core_size` banks form the core.
    CorePeriphery { core_size: usize, p_core: f64, p_cross: f64, p_periph: f64 },
}

impl GraphModel {
    fn probability(&self, i: usize, j: usize) -> f64 {
        match *self {
            GraphModel::ErdosRenyi { p } => p,
            GraphModel::CorePeriphery { core_size, p_core, p_cross, p_periph } => {
                match (i < core_size, j < core_size) {
                    (true, true) => p_core,
                    (false, false) => p_periph,
                    _ => p_cross,
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub model: GraphModel,
    pub n: usize,
    pub l: usize,
    /// Log-normal weight parameters.
    pub mu: f64,
    pub sigma: f64,
    pub omega: f64,
    pub seed: u64,
    pub period: NaiveDate,
}

impl GenSpec {
    pub fn erdos_renyi(n: usize, l: usize, p: f64, seed: u64) -> Self {
        Self {
            model: GraphModel::ErdosRenyi { p },
            n,
            l,
            mu: 0.0,
            sigma: 1.0,
            omega: 0.0,
            seed,
            period: NaiveDate::from_ymd_opt(2013, 6, 30).expect("valid date"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let probs: Vec<f64> = match self.model {
            GraphModel::ErdosRenyi { p } => vec![p],
            GraphModel::CorePeriphery { core_size, p_core, p_cross, p_periph } => {
                if core_size > self.n {
                    return Err(Error::InvalidParameter(format!("core size {core_size} exceeds n = {}", self.n)));
                }
                vec![p_core, p_cross, p_periph]
            }
        };
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParameter(format!("probabilities must lie in [0, 1], got {probs:?}")));
        }
        if self.n < 2 || self.l < 1 {
            return Err(Error::InvalidParameter(format!("need n >= 2 and l >= 1, got n = {}, l = {}", self.n, self.l)));
        }
        if !self.mu.is_finite() || !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("invalid log-normal parameters ({}, {})", self.mu, self.sigma)));
        }
        if !(self.omega >= 0.0) || !self.omega.is_finite() {
            return Err(Error::NegativeCoupling(self.omega));
        }
        Ok(())
    }
}

/// Layer `k` is the `k`-th canonical layer; beyond ten, `EXTRA_<k>`.
pub fn generated_layer_id(k: usize) -> LayerId {
    CanonicalLayer::ALL
        .get(k)
        .map(|&c| LayerId::Canonical(c))
        .unwrap_or_else(|| LayerId::Custom(format!("EXTRA_{k}")))
}

pub fn bank_id(i: usize, n: usize) -> String {
    let width = (n.saturating_sub(1)).to_string().len().max(3);
    format!("B{i:0width$}")
}

/// Random multilayer bundle with capitals of 1.5 x out-strength.
///
/// A bank without outgoing exposures gets 1.5 x the mean positive
/// out-strength. If no layer receives an edge, a cycle `0 -> 1 -> ... -> 0`
/// is placed on layer 0 with weights drawn from that layer's stream.
pub fn generate_network(spec: &GenSpec) -> Result<NetworkBundle> {
    spec.validate()?;
    let n = spec.n;
    let mut streams: Vec<XorShift64Star> = (0..spec.l).map(|k| XorShift64Star::new(layer_seed(spec.seed, k))).collect();
    let mut entries: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); spec.l];
    for (k, rng) in streams.iter_mut().enumerate() {
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                if rng.uniform() < spec.model.probability(i, j) {
                    entries[k].push((i, j, (spec.mu + spec.sigma * rng.normal()).exp()));
                }
            }
        }
    }
    if entries.iter().all(Vec::is_empty) {
        let rng = &mut streams[0];
        entries[0] = (0..n).map(|i| (i, (i + 1) % n, (spec.mu + spec.sigma * rng.normal()).exp())).collect();
    }
    let mut out_strength = vec![0.0; n];
    for &(i, _, w) in entries.iter().flatten() {
        out_strength[i] += w;
    }
    let positive: Vec<f64> = out_strength.iter().copied().filter(|&s| s > 0.0).collect();
    let fallback = positive.iter().sum::<f64>() / positive.len() as f64;
    let capitals = out_strength.iter().map(|&s| Some(1.5 * if s > 0.0 { s } else { fallback })).collect();

    let registry = NodeRegistry::from_ids((0..n).map(|i| bank_id(i, n)));
    let layers = entries
        .into_iter()
        .enumerate()
        .map(|(k, e)| LayerMatrix::from_entries(generated_layer_id(k), n, e))
        .collect::<Result<Vec<_>>>()?;
    let network = assemble_multilayer(registry, layers, &InterlayerSpec::Multiplex(spec.omega))?;
    Ok(NetworkBundle {
        period: spec.period,
        network,
        capitals: Some(capitals),
        provenance: vec![format!("generated:seed={}", spec.seed)],
    })
}

/// `count` snapshots three months apart; snapshot `t` uses seed
/// `seed + t` (wrapping) and period `period + 3t` months.
pub fn generate_sequence(spec: &GenSpec, count: usize) -> Result<Vec<NetworkBundle>> {
    if count == 0 {
        return Err(Error::InvalidParameter("snapshot count must be at least 1".into()));
    }
    (0..count)
        .map(|t| {
            let period = spec
                .period
                .checked_add_months(Months::new(3 * t as u32))
                .ok_or_else(|| Error::InvalidParameter("snapshot period out of range".into()))?;
            generate_network(&GenSpec { seed: spec.seed.wrapping_add(t as u64), period, ..spec.clone() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_stream() {
        // splitmix64(0) is the published first output of that generator.
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
        let mut a = XorShift64Star::new(7);
        let mut b = XorShift64Star::new(7);
        let xs: Vec<u64> = (0..4).map(|_| a.next_u64()).collect();
        assert_eq!(xs, (0..4).map(|_| b.next_u64()).collect::<Vec<_>>());
        assert_ne!(xs[0], xs[1]);
        let u = XorShift64Star::new(1).uniform();
        assert!((0.0..1.0).contains(&u));
    }

    #[test]
    fn normal_moments() {
        let mut rng = XorShift64Star::new(99);
        let xs: Vec<f64> = (0..20_000).map(|_| rng.normal()).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.03);
        assert!((var - 1.0).abs() < 0.05);
    }

    #[test]
    fn complete_digraph() {
        let b = generate_network(&GenSpec::erdos_renyi(3, 1, 1.0, 5)).unwrap();
        assert_eq!(b.network.intra_edge_count(), 6);
        assert_eq!(b.network.registry().ids(), ["B000", "B001", "B002"]);
        let caps = b.complete_capitals().unwrap();
        let row0: f64 = b.network.layer(0).weights().iter().filter(|((i, _), _)| *i == 0).map(|(_, w)| w).sum();
        assert!((caps[0] - 1.5 * row0).abs() < 1e-12);
    }

    #[test]
    fn zero_probability_gives_a_cycle() {
        let b = generate_network(&GenSpec::erdos_renyi(4, 2, 0.0, 1)).unwrap();
        assert_eq!(b.network.intra_edge_count(), 4);
        let edges: Vec<(usize, usize)> = b.network.layer(0).weights().keys().copied().collect();
        assert_eq!(edges, vec![(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(b.network.layer(1).edge_count(), 0);
    }

    #[test]
    fn same_seed_same_bytes() {
        let spec = GenSpec { omega: 0.5, ..GenSpec::erdos_renyi(12, 3, 0.3, 42) };
        let a = generate_network(&spec).unwrap().to_json().unwrap();
        let b = generate_network(&spec).unwrap().to_json().unwrap();
        assert_eq!(a, b);
        let c = generate_network(&GenSpec { seed: 43, ..spec }).unwrap().to_json().unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sequences_share_banks() {
        let seq = generate_sequence(&GenSpec::erdos_renyi(6, 2, 0.4, 11), 3).unwrap();
        assert_eq!(seq.len(), 3);
        assert_eq!(seq[2].period.to_string(), "2013-12-30");
        assert!(seq.windows(2).all(|w| w[0].network.registry() == w[1].network.registry()));
        assert_eq!(seq[1], generate_network(&GenSpec { period: seq[1].period, ..GenSpec::erdos_renyi(6, 2, 0.4, 12) }).unwrap());
    }

    #[test]
    fn invalid_specs() {
        assert!(generate_network(&GenSpec::erdos_renyi(1, 1, 0.5, 0)).is_err());
        assert!(generate_network(&GenSpec::erdos_renyi(5, 0, 0.5, 0)).is_err());
        assert!(generate_network(&GenSpec::erdos_renyi(5, 1, 1.5, 0)).is_err());
        let cp = GenSpec {
            model: GraphModel::CorePeriphery { core_size: 9, p_core: 0.9, p_cross: 0.3, p_periph: 0.05 },
            ..GenSpec::erdos_renyi(5, 1, 0.0, 0)
        };
        assert!(cp.validate().is_err());
    }

    #[test]
    fn edge_counts_match_expectation() {
        let (n, p) = (40usize, 0.2);
        let b = generate_network(&GenSpec::erdos_renyi(n, 4, p, 2024)).unwrap();
        let trials = (n * (n - 1)) as f64;
        let sd = (trials * p * (1.0 - p)).sqrt();
        for layer in b.network.layers() {
            assert!((layer.edge_count() as f64 - trials * p).abs() <= 4.0 * sd);
        }
    }

    #[test]
    fn core_periphery_density() {
        let spec = GenSpec {
            model: GraphModel::CorePeriphery { core_size: 10, p_core: 1.0, p_cross: 0.0, p_periph: 0.0 },
            ..GenSpec::erdos_renyi(30, 1, 0.0, 3)
        };
        let b = generate_network(&spec).unwrap();
        assert_eq!(b.network.layer(0).edge_count(), 90);
        assert!(b.network.layer(0).weights().keys().all(|&(i, j)| i < 10 && j < 10));
    }
}
