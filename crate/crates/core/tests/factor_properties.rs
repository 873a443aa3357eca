use chrono::NaiveDate;
use nalgebra::DMatrix;
use proptest::prelude::*;
use tensornet_core::factors::{pca, regress_layer_on_components, standardize_panel, FactorPanel, PcaOptions};
use tensornet_core::layers::{CanonicalLayer, LayerId};

fn panel() -> impl Strategy<Value = FactorPanel> {
    (8usize..30, 2usize..6).prop_flat_map(|(t, f)| {
        prop::collection::vec(-100.0f64..100.0, t * f).prop_map(move |v| {
            let periods = (0..t).map(|i| NaiveDate::from_ymd_opt(2000, 1, 1).unwrap() + chrono::Months::new(i as u32)).collect();
            let names = (0..f).map(|k| format!("F{k}")).collect();
            FactorPanel::new(periods, names, v.chunks(f).map(<[f64]>::to_vec).collect()).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(80))]

    #[test]
    fn pca_structure(p in panel(), threshold in 0.3f64..1.0) {
        let r = pca(&p, &PcaOptions { variance_threshold: threshold, n_components: None }).unwrap();
        let z = standardize_panel(&p).unwrap().panel.values;
        let (t, f, m) = (p.num_periods(), p.num_factors(), r.num_components());
        for a in 0..m {
            for b in 0..m {
                let dot: f64 = (0..f).map(|i| r.loadings[i][a] * r.loadings[i][b]).sum();
                let identity = if a == b { 1.0 } else { 0.0 };
                prop_assert!((dot - identity).abs() <= 1e-10);
                let cov: f64 = (0..t).map(|s| r.scores[s][a] * r.scores[s][b]).sum::<f64>() / (t as f64 - 1.0);
                let expected = if a == b { r.explained_variance[a] } else { 0.0 };
                prop_assert!((cov - expected).abs() <= 1e-9 * (1.0 + r.explained_variance[0]));
            }
            for s in 0..t {
                let direct: f64 = (0..f).map(|i| z[s][i] * r.loadings[i][a]).sum();
                prop_assert!((direct - r.scores[s][a]).abs() <= 1e-10 * (1.0 + direct.abs()));
            }
        }
        let cum: f64 = r.explained_variance_ratio.iter().sum();
        prop_assert!(cum >= threshold - 1e-12);
        prop_assert!((r.eigenvalues.iter().sum::<f64>() - f as f64).abs() <= 1e-9);
    }

    #[test]
    fn regression_residuals_orthogonal(p in panel(), y in prop::collection::vec(0.0f64..1e6, 30)) {
        let r = pca(&p, &PcaOptions::default()).unwrap();
        let t = p.num_periods();
        prop_assume!(t > r.num_components() + 1);
        let fit = regress_layer_on_components(LayerId::Canonical(CanonicalLayer::DerivFx), &y[..t], &r).unwrap();
        let ynorm: f64 = y[..t].iter().map(|v| v * v).sum::<f64>().sqrt();
        for c in 0..r.num_components() {
            let s = r.component_scores(c);
            let snorm: f64 = s.iter().map(|v| v * v).sum::<f64>().sqrt();
            let dot: f64 = s.iter().zip(&fit.residuals).map(|(a, b)| a * b).sum();
            prop_assert!(dot.abs() <= 1e-8 * snorm * ynorm.max(1.0));
        }
        prop_assert!(fit.residuals.iter().sum::<f64>().abs() <= 1e-8 * ynorm.max(1.0));

        // normal equations on [1 | scores]
        let m = r.num_components();
        let x = DMatrix::from_fn(t, m + 1, |i, j| if j == 0 { 1.0 } else { r.scores[i][j - 1] });
        let yv = DMatrix::from_fn(t, 1, |i, _| y[i]);
        let beta = (x.transpose() * &x).lu().solve(&(x.transpose() * yv)).unwrap();
        prop_assert!((beta[0] - fit.intercept).abs() <= 1e-9 * (1.0 + fit.intercept.abs()));
        for c in 0..m {
            prop_assert!((beta[c + 1] - fit.coefficients[c]).abs() <= 1e-9 * (1.0 + fit.coefficients[c].abs()));
        }
    }
}
