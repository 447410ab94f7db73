// SPDX-License-Identifier: Apache-2.0

//! Ledger composition laws and fidelity identities.

use proptest::prelude::*;
use qrdp::accountant::{simulate_rounds, AccountingMode, AlphaGrid, Composition, Ledger, QpuTask, ScheduledTask, WorkloadSpec};
use qrdp::channel::{apply_noise, NoiseSpec};
use qrdp::fidelity::{bloch_fidelity, schumacher_fidelity};
use qrdp::sampling::random_qubit_state;
use qrdp::state::trace_distance;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn task_noise() -> impl Strategy<Value = NoiseSpec> {
    prop_oneof![
        (0.05f64..=1.0).prop_map(|gamma| NoiseSpec::Gad { p: 0.5, gamma }),
        (0.05f64..=1.0, 0.0f64..=1.0).prop_map(|(gamma, lambda)| NoiseSpec::Pad { p: 0.5, gamma, lambda }),
        (0.05f64..=1.0).prop_map(|p| NoiseSpec::Dep { p, dim: 2 }),
    ]
}

fn tasks() -> impl Strategy<Value = Vec<QpuTask>> {
    prop::collection::vec((task_noise(), 0.01f64..=1.0), 1..12).prop_map(|specs| {
        specs
            .into_iter()
            .enumerate()
            .map(|(i, (noise, d))| QpuTask::new(format!("t{i}"), noise, d).unwrap())
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn totals_ignore_recording_order(tasks in tasks(), seed in any::<u64>()) {
        let grid = AlphaGrid::default();
        let mut forward = Ledger::new(grid.clone());
        for t in &tasks {
            forward.record(t, AccountingMode::Intuitive).unwrap();
        }
        let mut shuffled = tasks.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut other = Ledger::new(grid);
        for t in &shuffled {
            other.record_adaptive(t, AccountingMode::Intuitive).unwrap();
        }
        prop_assert_eq!(forward.totals(), other.totals());
        for (a, b) in forward.totals().iter().zip(forward.replay_totals()) {
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn arbitrary_contributions_ignore_order(values in prop::collection::vec(0.0f64..1e6, 1..40), seed in any::<u64>()) {
        let grid: AlphaGrid = "2".parse().unwrap();
        let mut a = Ledger::new(grid.clone());
        let mut b = Ledger::new(grid);
        let mut shuffled = values.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        for v in &values {
            a.record_contributions("x", Composition::Basic, vec![*v]).unwrap();
        }
        for v in &shuffled {
            b.record_contributions("x", Composition::Basic, vec![*v]).unwrap();
        }
        prop_assert_eq!(a.totals(), b.totals());
    }

    #[test]
    fn best_dp_shrinks_as_delta_grows(tasks in tasks(), d1 in 1e-12f64..0.999, d2 in 1e-12f64..0.999) {
        let mut ledger = Ledger::new(AlphaGrid::default());
        for t in &tasks {
            ledger.record(t, AccountingMode::Intuitive).unwrap();
        }
        let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(ledger.best_dp(hi).unwrap().0.epsilon <= ledger.best_dp(lo).unwrap().0.epsilon);
    }

    #[test]
    fn cumulative_budget_never_decreases(tasks in tasks(), k in 1usize..=3) {
        let rounds: Vec<Vec<ScheduledTask>> = tasks
            .chunks(k)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .map(|(i, t)| ScheduledTask { qpu: i + 1, task: t.clone() })
                    .collect()
            })
            .collect();
        let workload = WorkloadSpec::new(k, rounds).unwrap();
        let report = simulate_rounds(&workload, &AlphaGrid::default(), 1e-5, AccountingMode::Intuitive).unwrap();
        for w in report.rounds.windows(2) {
            for (a, b) in w[0].cumulative_eps.iter().zip(&w[1].cumulative_eps) {
                prop_assert!(a <= b);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn fidelity_formulas_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (rho, sigma) = (random_qubit_state(&mut rng), random_qubit_state(&mut rng));
        let f = schumacher_fidelity(&rho, &sigma).unwrap();
        prop_assert!((f - bloch_fidelity(&rho, &sigma).unwrap()).abs() <= 1e-10);
        prop_assert!((f - schumacher_fidelity(&sigma, &rho).unwrap()).abs() <= 1e-10);
        prop_assert!((0.0..=1.0).contains(&f));
        // Fuchs-van de Graaf
        let tau = trace_distance(&rho, &sigma).unwrap();
        prop_assert!(1.0 - f.sqrt() <= tau + 1e-9);
        prop_assert!(tau <= (1.0 - f).max(0.0).sqrt() + 1e-9);
        prop_assert!((schumacher_fidelity(&rho, &rho).unwrap() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn fidelity_falls_as_noise_grows(seed in any::<u64>()) {
        let rho = random_qubit_state(&mut ChaCha8Rng::seed_from_u64(seed));
        let families: [fn(f64) -> NoiseSpec; 4] = [
            |x| NoiseSpec::Gad { p: 0.5, gamma: x },
            |x| NoiseSpec::Pad { p: 0.5, gamma: x, lambda: 0.2 },
            |x| NoiseSpec::Pad { p: 0.5, gamma: 0.3, lambda: x },
            |x| NoiseSpec::Dep { p: x, dim: 2 },
        ];
        for family in families {
            let curve: Vec<f64> = (0..=50)
                .map(|i| {
                    let out = apply_noise(&family(i as f64 / 50.0), &rho).unwrap();
                    schumacher_fidelity(&rho, &out).unwrap()
                })
                .collect();
            for w in curve.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-9, "{:?}", family(0.5));
            }
        }
    }
}
