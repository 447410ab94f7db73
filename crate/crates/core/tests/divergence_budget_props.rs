// SPDX-License-Identifier: Apache-2.0

//! Rényi divergence laws and the closed-form budget's behavior.

use proptest::prelude::*;
use qrdp::budget::{dominance_check, dp_to_rdp, exact_budget, intuitive_budget, probability_bounds, qdp_epsilon};
use qrdp::channel::{apply_noise, NoiseSpec};
use qrdp::divergence::{max_divergence, postprocess, renyi, RenyiOrder};
use qrdp::measurement::outcome_distribution;
use qrdp::sampling::{random_kernel, random_neighbor_pair, random_povm, random_prob_vector};
use qrdp::AlphaGrid;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn order() -> impl Strategy<Value = RenyiOrder> {
    prop_oneof![
        Just(RenyiOrder::One),
        (1.0001f64..64.0).prop_map(RenyiOrder::Finite),
        Just(RenyiOrder::Infinity),
    ]
}

fn damping_noise() -> impl Strategy<Value = NoiseSpec> {
    prop_oneof![
        (0.0f64..=1.0).prop_map(|gamma| NoiseSpec::Gad { p: 0.5, gamma }),
        (0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(gamma, lambda)| NoiseSpec::Pad { p: 0.5, gamma, lambda }),
        (0.0f64..=1.0).prop_map(|p| NoiseSpec::Dep { p, dim: 2 }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn renyi_is_monotone_in_order(seed in any::<u64>(), n in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, q) = (random_prob_vector(&mut rng, n), random_prob_vector(&mut rng, n));
        let grid: Vec<RenyiOrder> = std::iter::once(RenyiOrder::One)
            .chain([1.01, 1.5, 2.0, 3.0, 8.0, 31.0, 32.0, 33.0, 100.0].map(RenyiOrder::Finite))
            .chain(std::iter::once(RenyiOrder::Infinity))
            .collect();
        let values: Vec<f64> = grid.iter().map(|&a| renyi(&p, &q, a).unwrap()).collect();
        for w in values.windows(2) {
            prop_assert!(w[0] <= w[1] + 1e-12, "{:?}", values);
        }
        prop_assert!(values.iter().all(|&v| v >= -1e-12));
    }

    #[test]
    fn data_processing_inequality(seed in any::<u64>(), n in 2usize..=6, m in 1usize..=6, alpha in order()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, q) = (random_prob_vector(&mut rng, n), random_prob_vector(&mut rng, n));
        let kernel = random_kernel(&mut rng, n, m);
        let before = renyi(&p, &q, alpha).unwrap();
        let after = renyi(&postprocess(&p, &kernel).unwrap(), &postprocess(&q, &kernel).unwrap(), alpha).unwrap();
        prop_assert!(after <= before + 1e-9, "{} > {}", after, before);
    }

    #[test]
    fn additive_over_products(seed in any::<u64>(), n in 2usize..=4, m in 2usize..=4, alpha in order()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p1, q1) = (random_prob_vector(&mut rng, n), random_prob_vector(&mut rng, n));
        let (p2, q2) = (random_prob_vector(&mut rng, m), random_prob_vector(&mut rng, m));
        let joint = renyi(&p1.product(&p2), &q1.product(&q2), alpha).unwrap();
        let split = renyi(&p1, &q1, alpha).unwrap() + renyi(&p2, &q2, alpha).unwrap();
        prop_assert!((joint - split).abs() <= 1e-9 * split.max(1.0));
    }

    #[test]
    fn budget_grows_with_order(noise in damping_noise(), d in 0.01f64..=1.0) {
        let budgets: Vec<f64> = AlphaGrid::default()
            .orders()
            .iter()
            .map(|&a| intuitive_budget(&noise, d, a).unwrap().epsilon)
            .collect();
        for w in budgets.windows(2) {
            prop_assert!(w[0] <= w[1], "{:?}", budgets);
        }
        let eps = qdp_epsilon(&noise, d).unwrap();
        prop_assert!(budgets.iter().all(|&b| b <= eps));
        prop_assert_eq!(*budgets.last().unwrap(), eps);
    }

    #[test]
    fn budget_shrinks_with_noise(a in 0.01f64..0.99, b in 0.01f64..0.99, d in 0.01f64..=1.0, alpha in order()) {
        prop_assume!((a - b).abs() > 1e-3);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let families: [fn(f64) -> NoiseSpec; 4] = [
            |x| NoiseSpec::Gad { p: 0.5, gamma: x },
            |x| NoiseSpec::Pad { p: 0.5, gamma: x, lambda: 0.2 },
            |x| NoiseSpec::Pad { p: 0.5, gamma: 0.3, lambda: x },
            |x| NoiseSpec::Dep { p: x, dim: 2 },
        ];
        for family in families {
            let less = intuitive_budget(&family(lo), d, alpha).unwrap().epsilon;
            let more = intuitive_budget(&family(hi), d, alpha).unwrap().epsilon;
            prop_assert!(more < less, "{:?}: {} !< {}", family(hi), more, less);
        }
    }

    #[test]
    fn conversion_bounded_by_pure_budget(eps in 0.0f64..20.0, alpha in order()) {
        let v = dp_to_rdp(eps, alpha).unwrap();
        prop_assert!((0.0..=eps).contains(&v));
    }

    #[test]
    fn event_probabilities_within_bounds(seed in any::<u64>(), alpha in 1.01f64..50.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = random_neighbor_pair(&mut rng, 2, 0.3);
        let povm = random_povm(&mut rng, 2, 2);
        let p = outcome_distribution(pair.rho(), &povm).unwrap();
        let q = outcome_distribution(pair.sigma(), &povm).unwrap();
        let eps = max_divergence(&p, &q).unwrap().max(max_divergence(&q, &p).unwrap());
        prop_assume!(eps.is_finite());
        for mask in [[false, false], [true, false], [false, true], [true, true]] {
            let (ps, qs) = (p.event_probability(&mask), q.event_probability(&mask));
            let (lower, upper) = probability_bounds(eps, alpha, qs.min(1.0)).unwrap();
            prop_assert!(lower <= ps + 1e-12 && ps <= upper + 1e-12, "{} not in [{}, {}]", ps, lower, upper);
        }
    }

    #[test]
    fn post_processing_never_raises_exact_budget(seed in any::<u64>(), alpha in order(), outputs in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = NoiseSpec::Dep { p: 0.4, dim: 2 };
        let pair = random_neighbor_pair(&mut rng, 2, 0.2);
        let povm = random_povm(&mut rng, 2, 3);
        let budget = exact_budget(&pair, &noise, &povm, alpha).unwrap();
        let p = outcome_distribution(&apply_noise(&noise, pair.rho()).unwrap(), &povm).unwrap();
        let q = outcome_distribution(&apply_noise(&noise, pair.sigma()).unwrap(), &povm).unwrap();
        let kernel = random_kernel(&mut rng, 3, outputs);
        let processed = renyi(&postprocess(&p, &kernel).unwrap(), &postprocess(&q, &kernel).unwrap(), alpha).unwrap();
        prop_assert!(processed <= budget + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_form_dominates_measured_budgets(seed in any::<u64>()) {
        let alphas = [RenyiOrder::Finite(2.0), RenyiOrder::Finite(8.0), RenyiOrder::Infinity];
        for noise in [
            NoiseSpec::Gad { p: 0.5, gamma: 0.3 },
            NoiseSpec::Pad { p: 0.5, gamma: 0.3, lambda: 0.2 },
            NoiseSpec::Dep { p: 0.5, dim: 2 },
        ] {
            let report = dominance_check(&noise, 0.1, &alphas, 40, seed, 1e-9).unwrap();
            prop_assert!(report.holds(), "{}", serde_json::to_string(&report.violations[0]).unwrap());
        }
    }
}
