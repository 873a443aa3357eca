//! System stability index and super-spreader capital surcharge calibration.
//!
//! Exposures are divided by the holder's capital and the spectral radius of
//! the resulting matrix is the instability index. A surcharge budget `c` is
//! split across banks in proportion to an l1-normalized centrality vector
//! `v`, added to capital, and `c` is calibrated to the smallest value that
//! brings the index down to the threshold.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::centrality::{katz_centrality, dominant_eigenpair, spectral_radius, PowerIteration, Scope, ScopedMatrix};
use crate::error::{Error, Result};
use crate::network::{normalize_by_capital, MultilayerNetwork};

/// Doubling stops once the bracket exceeds `c_max_initial * 2^60`.
const GROWTH_CAP_EXPONENT: i32 = 60;
const MAX_BISECTION_STEPS: usize = 63;
const MAX_OUTER_ITERATIONS: usize = 50;
const FIXED_POINT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum TargetingVector {
    Eigencentrality,
    Katz { a: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurchargeConfig {
    /// Stability threshold on the spectral radius.
    pub threshold: f64,
    pub vector_kind: TargetingVector,
    pub scope: Scope,
    pub tol_lambda: f64,
    /// Relative bracket width at which bisection stops.
    pub tol_c: f64,
    /// First upper bracket; defaults to total capital.
    pub c_max_initial: Option<f64>,
    pub recompute_vector: bool,
    pub power: PowerIteration,
}

impl Default for SurchargeConfig {
    fn default() -> Self {
        Self {
            threshold: 1.0,
            vector_kind: TargetingVector::Eigencentrality,
            scope: Scope::Projected,
            tol_lambda: 1e-8,
            tol_c: 1e-6,
            c_max_initial: None,
            recompute_vector: false,
            power: PowerIteration::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub c: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurchargeReport {
    pub banks: Vec<String>,
    pub c_star: f64,
    pub surcharges: Vec<f64>,
    /// The l1-normalized targeting vector.
    pub centrality_weights: Vec<f64>,
    pub lambda_before: f64,
    pub lambda_after: f64,
    pub threshold: f64,
    /// Number of λ(c) evaluations in the final calibration.
    pub iterations: usize,
    pub outer_iterations: usize,
    pub trace: Vec<TracePoint>,
    /// Whether λ was non-increasing in c across the trace.
    pub monotone: bool,
    pub config: SurchargeConfig,
}

impl SurchargeReport {
    /// `bank,surcharge,centrality_weight`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bank,surcharge,centrality_weight\n");
        for ((bank, s), w) in self.banks.iter().zip(&self.surcharges).zip(&self.centrality_weights) {
            let _ = writeln!(out, "{bank},{s},{w}");
        }
        out
    }
}

/// Spectral radius of the capital-relative network at `scope`.
pub fn stability_index(net: &MultilayerNetwork, capitals: &[f64], scope: Scope, power: &PowerIteration) -> Result<f64> {
    let relative = normalize_by_capital(net, capitals)?;
    let scoped = ScopedMatrix::raw(&relative, scope)?;
    spectral_radius(&scoped.matrix, power)
}

pub fn apply_surcharge(capitals: &[f64], surcharges: &[f64]) -> Result<Vec<f64>> {
    if capitals.len() != surcharges.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} capitals but {} surcharges",
            capitals.len(),
            surcharges.len()
        )));
    }
    Ok(capitals.iter().zip(surcharges).map(|(c, s)| c + s).collect())
}

/// l1-normalized targeting vector on the capital-relative network, one entry per bank.
pub fn targeting_vector(net: &MultilayerNetwork, capitals: &[f64], config: &SurchargeConfig) -> Result<Vec<f64>> {
    let relative = normalize_by_capital(net, capitals)?;
    let scoped = ScopedMatrix::raw(&relative, config.scope)?;
    let raw = match config.vector_kind {
        TargetingVector::Eigencentrality => dominant_eigenpair(&scoped.matrix, &config.power)?.vector,
        TargetingVector::Katz { a } => katz_centrality(&scoped.matrix, a, &config.power)?,
    };
    let per_bank = scoped.fold(&raw);
    let total: f64 = per_bank.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroMatrix);
    }
    Ok(per_bank.into_iter().map(|v| v / total).collect())
}

fn surcharged(capitals: &[f64], weights: &[f64], c: f64) -> Vec<f64> {
    capitals.iter().zip(weights).map(|(k, v)| k + c * v).collect()
}

struct Calibration {
    c_star: f64,
    lambda_after: f64,
    trace: Vec<TracePoint>,
}

fn calibrate_frozen(
    net: &MultilayerNetwork,
    capitals: &[f64],
    weights: &[f64],
    lambda0: f64,
    config: &SurchargeConfig,
) -> Result<Calibration> {
    let bound = config.threshold + config.tol_lambda;
    let mut trace = vec![TracePoint { c: 0.0, lambda: lambda0 }];
    if lambda0 <= bound {
        return Ok(Calibration { c_star: 0.0, lambda_after: lambda0, trace });
    }
    let probe = |c: f64, trace: &mut Vec<TracePoint>| -> Result<f64> {
        let lambda = stability_index(net, &surcharged(capitals, weights, c), config.scope, &config.power)?;
        trace.push(TracePoint { c, lambda });
        Ok(lambda)
    };

    let initial = config.c_max_initial.unwrap_or_else(|| capitals.iter().sum());
    if !(initial > 0.0) || !initial.is_finite() {
        return Err(Error::InvalidParameter(format!("c_max_initial must be positive, got {initial}")));
    }
    let cap = initial * 2f64.powi(GROWTH_CAP_EXPONENT);
    let (mut lo, mut hi) = (0.0, initial);
    let mut lambda_hi = probe(hi, &mut trace)?;
    while lambda_hi > bound {
        if hi * 2.0 > cap {
            return Err(Error::Unstabilizable { threshold: config.threshold, lambda: lambda_hi, c_max: hi });
        }
        lo = hi;
        hi *= 2.0;
        lambda_hi = probe(hi, &mut trace)?;
    }

    // Stop at a quarter of tol_c so that c_star - tol_c * c_star lies strictly
    // inside the unstable region.
    let mut steps = 0;
    while hi - lo > 0.25 * config.tol_c * hi && steps < MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let lambda = probe(mid, &mut trace)?;
        if lambda <= bound {
            hi = mid;
            lambda_hi = lambda;
        } else {
            lo = mid;
        }
        steps += 1;
    }
    Ok(Calibration { c_star: hi, lambda_after: lambda_hi, trace })
}

fn is_monotone(trace: &[TracePoint]) -> bool {
    let mut pts = trace.to_vec();
    pts.sort_by(|a, b| a.c.total_cmp(&b.c));
    pts.windows(2).all(|w| w[1].lambda <= w[0].lambda * (1.0 + 1e-9) + 1e-15)
}

/// Finds the smallest budget `c` with `λ(c) <= threshold + tol_lambda`, where
/// `λ(c)` is the stability index after adding `c * v_i` to each bank's capital.
pub fn calibrate_surcharge(net: &MultilayerNetwork, capitals: &[f64], config: &SurchargeConfig) -> Result<SurchargeReport> {
    if !(config.threshold > 0.0) || !(config.tol_lambda > 0.0) || !(config.tol_c > 0.0) {
        return Err(Error::InvalidParameter("threshold and tolerances must be positive".into()));
    }
    let lambda_before = stability_index(net, capitals, config.scope, &config.power)?;
    let mut weights = match targeting_vector(net, capitals, config) {
        Ok(v) => v,
        // nothing to target on an acyclic network, which is stable anyway
        Err(Error::ZeroMatrix) if lambda_before <= config.threshold + config.tol_lambda => vec![0.0; net.n()],
        Err(e) => return Err(e),
    };

    let mut outer = 0;
    let calibration = loop {
        outer += 1;
        let cal = calibrate_frozen(net, capitals, &weights, lambda_before, config)?;
        if !config.recompute_vector || cal.c_star == 0.0 {
            break cal;
        }
        let updated = targeting_vector(net, &surcharged(capitals, &weights, cal.c_star), config)?;
        let change = weights.iter().zip(&updated).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if change <= FIXED_POINT_TOL {
            break cal;
        }
        if outer >= MAX_OUTER_ITERATIONS {
            return Err(Error::FixedPointDivergence(outer));
        }
        weights = updated;
    };

    let surcharges = weights.iter().map(|v| calibration.c_star * v).collect();
    Ok(SurchargeReport {
        banks: net.registry().ids().to_vec(),
        c_star: calibration.c_star,
        surcharges,
        centrality_weights: weights,
        lambda_before,
        lambda_after: calibration.lambda_after,
        threshold: config.threshold,
        iterations: calibration.trace.len(),
        outer_iterations: outer,
        monotone: is_monotone(&calibration.trace),
        trace: calibration.trace,
        config: config.clone(),
    })
}
