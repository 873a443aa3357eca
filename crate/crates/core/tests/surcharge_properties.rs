use proptest::prelude::*;
use tensornet_core::centrality::{PowerIteration, Scope};
use tensornet_core::network::normalize_by_capital;
use tensornet_core::surcharge::{calibrate_surcharge, stability_index, SurchargeConfig};
use tensornet_core::testbed::{generate_network, GenSpec};

fn instance() -> impl Strategy<Value = GenSpec> {
    (3usize..9, 1usize..4, 0.3f64..0.9, any::<u64>(), 0.0f64..0.5)
        .prop_map(|(n, l, p, seed, omega)| GenSpec { omega, ..GenSpec::erdos_renyi(n, l, p, seed) })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn calibration_is_tight_and_monotone(spec in instance(), frac in 0.3f64..0.9) {
        let b = generate_network(&spec).unwrap();
        let caps = b.complete_capitals().unwrap();
        let cfg0 = SurchargeConfig::default();
        let lambda0 = stability_index(&b.network, &caps, cfg0.scope, &cfg0.power).unwrap();
        prop_assume!(lambda0 > 0.0);
        let cfg = SurchargeConfig { threshold: frac * lambda0, ..cfg0 };
        let r = match calibrate_surcharge(&b.network, &caps, &cfg) {
            Ok(r) => r,
            Err(e) => {
                prop_assert_eq!(e.code(), "unstabilizable");
                return Ok(());
            }
        };
        prop_assert!(r.monotone);
        prop_assert!(r.c_star > 0.0);
        let after: Vec<f64> = caps.iter().zip(&r.surcharges).map(|(c, s)| c + s).collect();
        let lam = stability_index(&b.network, &after, cfg.scope, &cfg.power).unwrap();
        prop_assert!(lam <= cfg.threshold + cfg.tol_lambda);
        let below = (r.c_star - cfg.tol_c * r.c_star).max(0.0);
        let before: Vec<f64> = caps.iter().zip(&r.centrality_weights).map(|(c, v)| c + below * v).collect();
        prop_assert!(stability_index(&b.network, &before, cfg.scope, &cfg.power).unwrap() > cfg.threshold);
        // initial point, at most 61 doubling probes, at most 64 bisection probes
        prop_assert!(r.trace.len() <= 1 + 61 + 64);
    }

    #[test]
    fn homogeneity(spec in instance(), s in prop_oneof![Just(0.5), Just(7.0), 0.1f64..20.0]) {
        let b = generate_network(&spec).unwrap();
        let caps = b.complete_capitals().unwrap();
        let power = PowerIteration::default();
        let lambda0 = stability_index(&b.network, &caps, Scope::Projected, &power).unwrap();
        let cfg = SurchargeConfig { threshold: 0.6 * lambda0, ..Default::default() };
        let scaled_caps: Vec<f64> = caps.iter().map(|c| c * s).collect();
        // exposures only; interlayer couplings are not capital-relative
        let scaled_net = normalize_by_capital(&b.network, &vec![1.0 / s; caps.len()]).unwrap();
        let (Ok(a), Ok(z)) = (
            calibrate_surcharge(&b.network, &caps, &cfg),
            calibrate_surcharge(&scaled_net, &scaled_caps, &cfg),
        ) else {
            return Ok(());
        };
        prop_assert!((z.c_star / s - a.c_star).abs() <= 2.0 * cfg.tol_c * a.c_star, "{} vs {}", z.c_star / s, a.c_star);
    }
}
