//! Macro-financial factor attribution: correlation-matrix PCA of a factor
//! panel and per-layer regression of exposure totals on component scores.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use chrono::NaiveDate;
use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{ExposureRecord, FactorObservation};
use crate::layers::LayerId;

/// `T x F` panel of factor values, rows ordered by period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorPanel {
    pub periods: Vec<NaiveDate>,
    pub factor_names: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl FactorPanel {
    pub fn new(periods: Vec<NaiveDate>, factor_names: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != periods.len() || values.iter().any(|r| r.len() != factor_names.len()) {
            return Err(Error::DimensionMismatch(format!(
                "panel of {} periods x {} factors has mismatched rows",
                periods.len(),
                factor_names.len()
            )));
        }
        if periods.len() < 3 || factor_names.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "panel needs at least 3 periods and 1 factor, got {} x {}",
                periods.len(),
                factor_names.len()
            )));
        }
        if let Some(v) = values.iter().flatten().find(|v| !v.is_finite()) {
            return Err(Error::InvalidAmount { value: *v, context: "factor panel".into() });
        }
        Ok(Self { periods, factor_names, values })
    }

    /// Pivots long-form observations; factors sorted by name, periods ascending.
    /// Any period lacking a factor is an error.
    pub fn from_observations(obs: &[FactorObservation]) -> Result<Self> {
        let names: BTreeSet<&str> = obs.iter().map(|o| o.factor.as_str()).collect();
        let mut cells: BTreeMap<NaiveDate, BTreeMap<&str, f64>> = BTreeMap::new();
        for o in obs {
            if cells.entry(o.period).or_default().insert(o.factor.as_str(), o.value).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate value for {} at {}", o.factor, o.period)));
            }
        }
        let mut values = Vec::with_capacity(cells.len());
        for (period, row) in &cells {
            let r = names
                .iter()
                .map(|f| {
                    row.get(f).copied().ok_or_else(|| Error::FactorGap { period: period.to_string(), factor: f.to_string() })
                })
                .collect::<Result<Vec<_>>>()?;
            values.push(r);
        }
        Self::new(cells.into_keys().collect(), names.into_iter().map(str::to_string).collect(), values)
    }

    pub fn num_periods(&self) -> usize {
        self.periods.len()
    }

    pub fn num_factors(&self) -> usize {
        self.factor_names.len()
    }

    fn column(&self, f: usize) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(move |r| r[f])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardized {
    pub panel: FactorPanel,
    pub mean: Vec<f64>,
    pub stddev: Vec<f64>,
}

/// Column z-scores with the sample (`T - 1`) standard deviation.
pub fn standardize_panel(panel: &FactorPanel) -> Result<Standardized> {
    let t = panel.num_periods() as f64;
    let mut mean = Vec::with_capacity(panel.num_factors());
    let mut stddev = Vec::with_capacity(panel.num_factors());
    for f in 0..panel.num_factors() {
        let m = panel.column(f).sum::<f64>() / t;
        let var = panel.column(f).map(|x| (x - m) * (x - m)).sum::<f64>() / (t - 1.0);
        let sd = var.sqrt();
        if !(sd > 1e-12 * m.abs().max(1e-300)) {
            return Err(Error::ConstantFactor(panel.factor_names[f].clone()));
        }
        mean.push(m);
        stddev.push(sd);
    }
    let values = panel
        .values
        .iter()
        .map(|row| row.iter().enumerate().map(|(f, x)| (x - mean[f]) / stddev[f]).collect())
        .collect();
    Ok(Standardized {
        panel: FactorPanel { periods: panel.periods.clone(), factor_names: panel.factor_names.clone(), values },
        mean,
        stddev,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcaOptions {
    /// Retain the fewest components whose cumulative variance ratio reaches this.
    pub variance_threshold: f64,
    /// Fixed component count, overriding the threshold.
    pub n_components: Option<usize>,
}

impl Default for PcaOptions {
    fn default() -> Self {
        Self { variance_threshold: 0.9, n_components: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaResult {
    pub factor_names: Vec<String>,
    /// `F x m`, orthonormal columns.
    pub loadings: Vec<Vec<f64>>,
    /// Retained eigenvalues of the correlation matrix, descending.
    pub explained_variance: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
    /// All `F` eigenvalues; they sum to `F`.
    pub eigenvalues: Vec<f64>,
    /// `T x m`.
    pub scores: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub stddev: Vec<f64>,
}

impl PcaResult {
    pub fn num_components(&self) -> usize {
        self.explained_variance.len()
    }

    pub fn component_scores(&self, c: usize) -> Vec<f64> {
        self.scores.iter().map(|r| r[c]).collect()
    }

    /// `factor,PC1,...,PCm`
    pub fn loadings_csv(&self) -> String {
        let header: Vec<String> = (1..=self.num_components()).map(|c| format!("PC{c}")).collect();
        let mut out = format!("factor,{}\n", header.join(","));
        for (name, row) in self.factor_names.iter().zip(&self.loadings) {
            let cells: Vec<String> = row.iter().map(f64::to_string).collect();
            let _ = writeln!(out, "{name},{}", cells.join(","));
        }
        out
    }
}

/// Principal components of the correlation matrix of `panel` (raw values;
/// standardization happens here and its parameters are kept).
///
/// Each loading column is signed so that its largest-magnitude entry is positive.
pub fn pca(panel: &FactorPanel, options: &PcaOptions) -> Result<PcaResult> {
    let std = standardize_panel(panel)?;
    let t = panel.num_periods();
    let f = panel.num_factors();
    let z = DMatrix::from_fn(t, f, |r, c| std.panel.values[r][c]);
    let corr = (z.transpose() * &z) / (t as f64 - 1.0);
    let eig = SymmetricEigen::try_new(corr, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Eigensolver("symmetric eigendecomposition did not converge".into()))?;

    let mut order: Vec<usize> = (0..f).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k].max(0.0)).collect();
    let total: f64 = eigenvalues.iter().sum();

    let m = match options.n_components {
        Some(m) if m >= 1 && m <= f => m,
        Some(m) => return Err(Error::InvalidParameter(format!("n_components must be in 1..={f}, got {m}"))),
        None => {
            let mut cum = 0.0;
            let mut m = f;
            for (k, ev) in eigenvalues.iter().enumerate() {
                cum += ev / total;
                if cum >= options.variance_threshold - 1e-12 {
                    m = k + 1;
                    break;
                }
            }
            m
        }
    };

    let mut loadings = vec![vec![0.0; m]; f];
    for (c, &k) in order.iter().take(m).enumerate() {
        let col = eig.eigenvectors.column(k);
        let pivot = (0..f).max_by(|&a, &b| col[a].abs().total_cmp(&col[b].abs()).then(b.cmp(&a))).unwrap();
        let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
        for r in 0..f {
            loadings[r][c] = sign * col[r];
        }
    }
    let scores = std
        .panel
        .values
        .iter()
        .map(|row| (0..m).map(|c| row.iter().zip(&loadings).map(|(x, l)| x * l[c]).sum()).collect())
        .collect();
    let explained_variance: Vec<f64> = eigenvalues[..m].to_vec();
    Ok(PcaResult {
        factor_names: panel.factor_names.clone(),
        loadings,
        explained_variance_ratio: explained_variance.iter().map(|v| v / total).collect(),
        explained_variance,
        eigenvalues,
        scores,
        mean: std.mean,
        stddev: std.stddev,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorRegression {
    pub layer: LayerId,
    pub intercept: f64,
    /// One coefficient per retained component.
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
}

/// Least squares of `series` on the component scores plus an intercept.
///
/// Scores are centered and mutually orthogonal, so the fit decomposes into
/// the mean plus independent projections onto each component.
pub fn regress_layer_on_components(layer: LayerId, series: &[f64], pca: &PcaResult) -> Result<FactorRegression> {
    let t = pca.scores.len();
    let m = pca.num_components();
    if series.len() != t {
        return Err(Error::DimensionMismatch(format!("series of length {} for {t} periods", series.len())));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("no retained components".into()));
    }
    if t <= m + 1 {
        return Err(Error::Underdetermined { observations: t, parameters: m + 1 });
    }
    let mean = series.iter().sum::<f64>() / t as f64;
    let centered: Vec<f64> = series.iter().map(|y| y - mean).collect();
    let coefficients: Vec<f64> = (0..m)
        .map(|c| {
            let s = pca.component_scores(c);
            let ss: f64 = s.iter().map(|x| x * x).sum();
            if ss == 0.0 {
                0.0
            } else {
                s.iter().zip(&centered).map(|(a, b)| a * b).sum::<f64>() / ss
            }
        })
        .collect();
    let residuals: Vec<f64> = pca
        .scores
        .iter()
        .zip(&centered)
        .map(|(row, y)| y - row.iter().zip(&coefficients).map(|(s, b)| s * b).sum::<f64>())
        .collect();
    let ss_tot: f64 = centered.iter().map(|y| y * y).sum();
    let ss_res: f64 = residuals.iter().map(|e| e * e).sum();
    let r_squared = if ss_tot > 0.0 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else { 0.0 };
    Ok(FactorRegression { layer, intercept: mean, coefficients, r_squared, residuals })
}

/// Total weight of each layer per period, aligned with `periods`
/// (periods without records contribute 0).
pub fn layer_series(records: &[ExposureRecord], layers: &[LayerId], periods: &[NaiveDate]) -> Vec<(LayerId, Vec<f64>)> {
    layers
        .iter()
        .map(|layer| {
            let series = periods
                .iter()
                .map(|p| records.iter().filter(|r| &r.layer == layer && r.period == *p).map(|r| r.amount).sum())
                .collect();
            (layer.clone(), series)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layers::CanonicalLayer;

    fn dates(t: usize) -> Vec<NaiveDate> {
        (0..t).map(|i| NaiveDate::from_ymd_opt(2000, 1, 1).unwrap() + chrono::Days::new(i as u64)).collect()
    }

    fn panel(cols: &[Vec<f64>]) -> FactorPanel {
        let t = cols[0].len();
        FactorPanel::new(
            dates(t),
            (0..cols.len()).map(|f| format!("F{f}")).collect(),
            (0..t).map(|r| cols.iter().map(|c| c[r]).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn standardize_examples() {
        let s = standardize_panel(&panel(&[vec![1.0, 2.0, 3.0]])).unwrap();
        assert_eq!(s.mean, vec![2.0]);
        assert_eq!(s.stddev, vec![1.0]);
        assert_eq!(s.panel.values, vec![vec![-1.0], vec![0.0], vec![1.0]]);
        let again = standardize_panel(&s.panel).unwrap();
        for (a, b) in again.panel.values.iter().flatten().zip(s.panel.values.iter().flatten()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(matches!(standardize_panel(&panel(&[vec![4.0, 4.0, 4.0]])), Err(Error::ConstantFactor(_))));
    }

    #[test]
    fn perfectly_correlated_pair_is_rank_one() {
        let a = vec![1.0, 3.0, 2.0, 5.0, 4.0];
        let b: Vec<f64> = a.iter().map(|x| 2.0 * x + 7.0).collect();
        let r = pca(&panel(&[a, b]), &PcaOptions::default()).unwrap();
        assert_eq!(r.num_components(), 1);
        assert!((r.explained_variance_ratio[0] - 1.0).abs() < 1e-12);
        assert!((r.eigenvalues.iter().sum::<f64>() - 2.0).abs() < 1e-12);
        assert!(r.loadings[0][0] > 0.0 && r.loadings[1][0] > 0.0);
    }

    #[test]
    fn regression_on_exact_multiple() {
        let p = panel(&[vec![1.0, 3.0, 2.0, 5.0, 4.0, 0.5], vec![2.0, 1.0, 0.0, 3.0, 1.0, 2.5]]);
        let r = pca(&p, &PcaOptions { n_components: Some(2), ..Default::default() }).unwrap();
        let y: Vec<f64> = r.component_scores(0).iter().map(|s| 3.0 * s + 10.0).collect();
        let fit = regress_layer_on_components(LayerId::Canonical(CanonicalLayer::DerivIr), &y, &r).unwrap();
        assert!((fit.coefficients[0] - 3.0).abs() < 1e-12);
        assert!(fit.coefficients[1].abs() < 1e-12);
        assert!((fit.intercept - 10.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);

        let flat = regress_layer_on_components(LayerId::Canonical(CanonicalLayer::DerivIr), &[5.0; 6], &r).unwrap();
        assert!(flat.coefficients.iter().all(|&c| c == 0.0));
        assert_eq!(flat.r_squared, 0.0);
    }

    #[test]
    fn underdetermined_regression() {
        let p = panel(&[vec![1.0, 3.0, 2.0], vec![2.0, 1.0, 0.0]]);
        let r = pca(&p, &PcaOptions { n_components: Some(2), ..Default::default() }).unwrap();
        let e = regress_layer_on_components(LayerId::Canonical(CanonicalLayer::DerivIr), &[1.0, 2.0, 3.0], &r);
        assert!(matches!(e, Err(Error::Underdetermined { .. })));
    }

    #[test]
    fn gaps_are_rejected() {
        let d = dates(3);
        let mut obs: Vec<FactorObservation> = d
            .iter()
            .flat_map(|p| {
                ["DJI", "DAX"].map(|f| FactorObservation { period: *p, factor: f.into(), value: chrono::Datelike::ordinal(p) as f64 })
            })
            .collect();
        assert_eq!(FactorPanel::from_observations(&obs).unwrap().factor_names, vec!["DAX", "DJI"]);
        obs.pop();
        assert!(matches!(FactorPanel::from_observations(&obs), Err(Error::FactorGap { .. })));
    }
}
