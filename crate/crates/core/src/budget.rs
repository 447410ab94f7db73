// SPDX-License-Identifier: Apache-2.0

//! Privacy budgets for the noise mechanisms.
//!
//! Two routes are provided. [`exact_budget`] measures the Rényi divergence of
//! one concrete state pair and POVM after noise. [`intuitive_budget`] depends
//! only on the noise parameters and the neighbor distance `d`: it takes the
//! mechanism's pure QDP budget and converts it with the tight pure-DP to RDP
//! bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{apply_noise, NoiseParam, NoiseSpec};
use crate::divergence::{renyi, RenyiOrder};
use crate::error::{check_unit_interval, Error, Result};
use crate::measurement::{computational_basis_povm, outcome_distribution, Povm, PovmDocument};
use crate::sampling::{random_neighbor_pair, random_povm};
use crate::state::{NeighborPair, StateDocument};

/// Below this distance from order one, `dp_to_rdp` switches to its series.
const SERIES_GAP: f64 = 1e-6;

/// An `(alpha, epsilon)` Rényi budget. `epsilon` may be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdpBudget {
    pub alpha: RenyiOrder,
    pub epsilon: f64,
}

/// An `(epsilon, delta)` budget; `delta = 0` is pure QDP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpBudget {
    pub epsilon: f64,
    pub delta: f64,
}

/// Divergence of the measured noisy pair, `D_alpha(M(N(rho)) || M(N(sigma)))`.
pub fn exact_budget(pair: &NeighborPair, noise: &NoiseSpec, povm: &Povm, alpha: RenyiOrder) -> Result<f64> {
    let rho = apply_noise(noise, pair.rho())?;
    let sigma = apply_noise(noise, pair.sigma())?;
    let p = outcome_distribution(&rho, povm)?;
    let q = outcome_distribution(&sigma, povm)?;
    renyi(&p, &q, alpha)
}

/// Exact budget in both directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoSidedBudget {
    pub forward: f64,
    pub reverse: f64,
}

impl TwoSidedBudget {
    pub fn max(&self) -> f64 {
        self.forward.max(self.reverse)
    }
}

pub fn exact_budget_two_sided(
    pair: &NeighborPair,
    noise: &NoiseSpec,
    povm: &Povm,
    alpha: RenyiOrder,
) -> Result<TwoSidedBudget> {
    Ok(TwoSidedBudget {
        forward: exact_budget(pair, noise, povm, alpha)?,
        reverse: exact_budget(&pair.swapped(), noise, povm, alpha)?,
    })
}

/// Pure QDP budget of a mechanism for neighbors at trace distance `d`.
///
/// Returns `+inf` when the closed form's denominator vanishes (no damping).
/// The amplitude-damping forms do not involve `p`; they hold for the
/// symmetric thermal bath `p = 1/2`.
pub fn qdp_epsilon(noise: &NoiseSpec, d: f64) -> Result<f64> {
    check_unit_interval("d", d)?;
    noise.validate()?;
    if d == 0.0 {
        return Ok(0.0);
    }
    // ln(1 + 2 d c / (1 - c)) with c the coherence contraction factor.
    let damping = |keep: f64, loss: f64| {
        if loss == 0.0 {
            f64::INFINITY
        } else {
            (2.0 * d * keep / loss).ln_1p()
        }
    };
    Ok(match *noise {
        NoiseSpec::Gad { gamma, .. } => {
            let keep = (1.0 - gamma).sqrt();
            // 1 - sqrt(1 - gamma) without cancellation
            damping(keep, gamma / (1.0 + keep))
        }
        NoiseSpec::Pad { gamma, lambda, .. } => {
            let keep = ((1.0 - gamma) * (1.0 - lambda)).sqrt();
            damping(keep, (gamma + lambda - gamma * lambda) / (1.0 + keep))
        }
        NoiseSpec::Dep { p, dim } => {
            if p == 0.0 {
                f64::INFINITY
            } else {
                ((1.0 - p) / p * d * dim as f64).ln_1p()
            }
        }
        NoiseSpec::Pd { .. } => return Err(Error::NoClosedForm("pd")),
    })
}

/// Tight Rényi budget of a pure `eps`-DP mechanism:
/// `eps - ln((1 + e^-eps) / (1 + e^-(2 alpha - 1) eps)) / (alpha - 1)`.
pub fn dp_to_rdp(eps: f64, alpha: RenyiOrder) -> Result<f64> {
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::ParamOutOfRange {
            name: "epsilon",
            value: eps,
            expected: ">= 0",
        });
    }
    if eps == 0.0 || eps == f64::INFINITY {
        return Ok(eps);
    }
    // Privacy loss is +-eps; near order one expand its cumulant generating
    // function: mean eps tanh(eps/2), variance eps^2 sech^2(eps/2).
    let mean = eps * (eps / 2.0).tanh();
    let value = match alpha {
        RenyiOrder::Infinity => eps,
        RenyiOrder::One => mean,
        RenyiOrder::Finite(a) if a <= 1.0 => return Err(Error::InvalidOrder(a)),
        RenyiOrder::Finite(a) if a - 1.0 < SERIES_GAP => {
            let sech = 1.0 / (eps / 2.0).cosh();
            mean + (a - 1.0) * 0.5 * eps * eps * sech * sech
        }
        RenyiOrder::Finite(a) => {
            let num = (-eps).exp().ln_1p();
            let den = (-(2.0 * a - 1.0) * eps).exp().ln_1p();
            eps - (num - den) / (a - 1.0)
        }
    };
    Ok(value.clamp(0.0, eps))
}

/// Closed-form Rényi budget from noise parameters alone.
pub fn intuitive_budget(noise: &NoiseSpec, d: f64, alpha: RenyiOrder) -> Result<RdpBudget> {
    let eps = qdp_epsilon(noise, d)?;
    Ok(RdpBudget {
        alpha,
        epsilon: dp_to_rdp(eps, alpha)?,
    })
}

/// `(alpha, eps)`-QRDP implies `(eps + ln(1/delta) / (alpha - 1), delta)`-QDP.
pub fn rdp_to_dp(budget: RdpBudget, delta: f64) -> Result<DpBudget> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    let epsilon = match budget.alpha {
        RenyiOrder::Infinity => budget.epsilon,
        // Order one gives no finite conversion.
        RenyiOrder::One => f64::INFINITY,
        RenyiOrder::Finite(a) => budget.epsilon + (1.0 / delta).ln() / (a - 1.0),
    };
    Ok(DpBudget { epsilon, delta })
}

/// Event-probability sandwich implied by an `(alpha, eps)` budget: given
/// `q = Pr[sigma-side outcome in S]`, returns bounds on the rho-side probability,
/// `e^-eps q^(alpha/(alpha-1)) <= p <= (e^eps q)^((alpha-1)/alpha)`.
pub fn probability_bounds(eps: f64, alpha: f64, q: f64) -> Result<(f64, f64)> {
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::ParamOutOfRange {
            name: "epsilon",
            value: eps,
            expected: ">= 0",
        });
    }
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidOrder(alpha));
    }
    check_unit_interval("q", q)?;
    let lower = (-eps).exp() * q.powf(alpha / (alpha - 1.0));
    let upper = (eps.exp() * q).powf((alpha - 1.0) / alpha).min(1.0);
    Ok((lower, upper))
}

/// Evenly spaced values from `lo` to `hi` inclusive; a single step yields `[lo]`.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        n => (0..n)
            .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BudgetRow {
    pub param: f64,
    pub alpha: RenyiOrder,
    pub eps_hat: f64,
}

/// Intuitive budgets over a parameter grid, parameter-major.
pub fn budget_sweep(
    base: &NoiseSpec,
    param: NoiseParam,
    values: &[f64],
    d: f64,
    alphas: &[RenyiOrder],
) -> Result<Vec<BudgetRow>> {
    let mut rows = Vec::with_capacity(values.len() * alphas.len());
    for &value in values {
        let spec = base.with_param(param, value)?;
        let eps = qdp_epsilon(&spec, d)?;
        for &alpha in alphas {
            rows.push(BudgetRow {
                param: value,
                alpha,
                eps_hat: dp_to_rdp(eps, alpha)?,
            });
        }
    }
    Ok(rows)
}

/// Best divergence found by [`search_budget`], with the instance achieving it.
#[derive(Debug, Clone)]
pub struct BudgetSearch {
    pub best: f64,
    pub witness_pair: NeighborPair,
    pub witness_povm: Povm,
    pub evaluations: usize,
}

/// Randomized lower bound on the worst-case budget: tries the given pair
/// under random POVMs, and fresh random pairs at the same bound under random
/// POVMs. The true supremum over all measurements is at least `best`.
pub fn search_budget(
    pair: &NeighborPair,
    noise: &NoiseSpec,
    alpha: RenyiOrder,
    trials: usize,
    seed: u64,
) -> Result<BudgetSearch> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = pair.dim();
    let basis = computational_basis_povm(dim);
    let mut best = BudgetSearch {
        best: exact_budget(pair, noise, &basis, alpha)?,
        witness_pair: pair.clone(),
        witness_povm: basis,
        evaluations: 1,
    };
    for trial in 0..trials {
        let candidate = if trial % 2 == 0 {
            pair.clone()
        } else {
            random_neighbor_pair(&mut rng, dim, pair.d_bound())
        };
        let outcomes = rng.random_range(2..=4);
        let povm = random_povm(&mut rng, dim, outcomes);
        let value = exact_budget(&candidate, noise, &povm, alpha)?;
        best.evaluations += 1;
        if value > best.best {
            best.best = value;
            best.witness_pair = candidate;
            best.witness_povm = povm;
        }
    }
    Ok(best)
}

/// Instance where the exact budget exceeded the closed-form bound.
#[derive(Debug, Clone, Serialize)]
pub struct DominanceWitness {
    pub trial: usize,
    pub alpha: RenyiOrder,
    pub exact: f64,
    pub bound: f64,
    pub rho: StateDocument,
    pub sigma: StateDocument,
    pub povm: PovmDocument,
}

#[derive(Debug, Clone, Serialize)]
pub struct DominanceReport {
    pub noise: NoiseSpec,
    pub d: f64,
    pub trials: usize,
    /// Largest `exact - bound` seen (negative when the bound always held).
    pub worst_gap: f64,
    pub violations: Vec<DominanceWitness>,
}

impl DominanceReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `exact_budget <= intuitive_budget + slack` over random neighbor
/// pairs at distance at most `d` and random POVMs. Violations are collected
/// with their full instance, not discarded.
pub fn dominance_check(
    noise: &NoiseSpec,
    d: f64,
    alphas: &[RenyiOrder],
    trials: usize,
    seed: u64,
    slack: f64,
) -> Result<DominanceReport> {
    let dim = match noise {
        NoiseSpec::Dep { dim, .. } => *dim,
        _ => 2,
    };
    let bounds = alphas
        .iter()
        .map(|&a| intuitive_budget(noise, d, a).map(|b| b.epsilon))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = DominanceReport {
        noise: *noise,
        d,
        trials,
        worst_gap: f64::NEG_INFINITY,
        violations: Vec::new(),
    };
    for trial in 0..trials {
        let pair = random_neighbor_pair(&mut rng, dim, d);
        let outcomes = rng.random_range(2..=4);
        let povm = random_povm(&mut rng, dim, outcomes);
        for (&alpha, &bound) in alphas.iter().zip(&bounds) {
            let exact = exact_budget(&pair, noise, &povm, alpha)?;
            let gap = exact - bound;
            report.worst_gap = report.worst_gap.max(gap);
            if gap > slack {
                report.violations.push(DominanceWitness {
                    trial,
                    alpha,
                    exact,
                    bound,
                    rho: pair.rho().into(),
                    sigma: pair.sigma().into(),
                    povm: (&povm).into(),
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::ProbVector;
    use crate::state::DensityMatrix;

    const DEP: NoiseSpec = NoiseSpec::Dep { p: 0.5, dim: 2 };

    fn reference_pair() -> NeighborPair {
        NeighborPair::new(
            DensityMatrix::from_real(2, &[0.3, 0.2, 0.2, 0.7]).unwrap(),
            DensityMatrix::from_real(2, &[0.4, 0.1, 0.1, 0.6]).unwrap(),
            0.15,
        )
        .unwrap()
    }

    #[test]
    fn exact_budget_identical_states() {
        let rho = DensityMatrix::from_real(2, &[0.3, 0.2, 0.2, 0.7]).unwrap();
        let pair = NeighborPair::new(rho.clone(), rho, 0.1).unwrap();
        let povm = computational_basis_povm(2);
        for noise in [DEP, NoiseSpec::Gad { p: 0.5, gamma: 0.3 }, NoiseSpec::Pd { lambda: 0.4 }] {
            for alpha in [RenyiOrder::Finite(2.0), RenyiOrder::Infinity] {
                assert_eq!(exact_budget(&pair, &noise, &povm, alpha).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn exact_budget_reference_instance() {
        let povm = computational_basis_povm(2);
        let d2 = exact_budget(&reference_pair(), &DEP, &povm, RenyiOrder::Finite(2.0)).unwrap();
        assert!((d2 - (0.16f64 / 0.45 + 0.36 / 0.55).ln()).abs() < 1e-12);
        let dinf = exact_budget(&reference_pair(), &DEP, &povm, RenyiOrder::Infinity).unwrap();
        assert!((dinf - (0.6f64 / 0.55).ln()).abs() < 1e-12);
        let both = exact_budget_two_sided(&reference_pair(), &DEP, &povm, RenyiOrder::Infinity).unwrap();
        assert!((both.reverse - (0.45f64 / 0.4).ln()).abs() < 1e-12);
        assert_eq!(both.max(), both.reverse);
    }

    #[test]
    fn qdp_epsilon_examples() {
        assert!((qdp_epsilon(&DEP, 0.1).unwrap() - 1.2f64.ln()).abs() < 1e-15);
        assert_eq!(qdp_epsilon(&NoiseSpec::Gad { p: 0.5, gamma: 1.0 }, 0.1).unwrap(), 0.0);
        for noise in [DEP, NoiseSpec::Gad { p: 0.5, gamma: 0.3 }, NoiseSpec::Pad { p: 0.5, gamma: 0.3, lambda: 0.2 }] {
            assert_eq!(qdp_epsilon(&noise, 0.0).unwrap(), 0.0);
        }
        assert_eq!(qdp_epsilon(&NoiseSpec::Gad { p: 0.5, gamma: 0.0 }, 0.1).unwrap(), f64::INFINITY);
        assert_eq!(
            qdp_epsilon(&NoiseSpec::Pad { p: 0.5, gamma: 0.0, lambda: 0.0 }, 0.1).unwrap(),
            f64::INFINITY
        );
        assert_eq!(qdp_epsilon(&NoiseSpec::Dep { p: 0.0, dim: 2 }, 0.1).unwrap(), f64::INFINITY);
        assert!(matches!(qdp_epsilon(&NoiseSpec::Pd { lambda: 0.5 }, 0.1), Err(Error::NoClosedForm("pd"))));
        assert!(matches!(qdp_epsilon(&DEP, 1.5), Err(Error::ParamOutOfRange { name: "d", .. })));
    }

    #[test]
    fn qdp_epsilon_matches_printed_forms() {
        let (d, gamma, lambda) = (0.1, 0.3, 0.2);
        let c = (1.0f64 - gamma).sqrt();
        let gad = (1.0 + 2.0 * d * c / (1.0 - c)).ln();
        assert!((qdp_epsilon(&NoiseSpec::Gad { p: 0.5, gamma }, d).unwrap() - gad).abs() < 1e-14);
        let c = (1.0f64 - gamma).sqrt() * (1.0f64 - lambda).sqrt();
        let pad = (1.0 + 2.0 * d * c / (1.0 - c)).ln();
        assert!((qdp_epsilon(&NoiseSpec::Pad { p: 0.5, gamma, lambda }, d).unwrap() - pad).abs() < 1e-14);
    }

    #[test]
    fn dp_to_rdp_examples() {
        for alpha in [RenyiOrder::One, RenyiOrder::Finite(2.0), RenyiOrder::Infinity] {
            assert_eq!(dp_to_rdp(0.0, alpha).unwrap(), 0.0);
        }
        assert_eq!(dp_to_rdp(0.7, RenyiOrder::Infinity).unwrap(), 0.7);
        let eps = 1.2f64.ln();
        let expected = eps - ((1.0 + 1.0 / 1.2) / (1.0 + 1.0 / 1.2f64.powi(3))).ln();
        assert!((dp_to_rdp(eps, RenyiOrder::Finite(2.0)).unwrap() - expected).abs() < 1e-15);
        assert!(dp_to_rdp(-0.1, RenyiOrder::Finite(2.0)).is_err());
        assert_eq!(dp_to_rdp(f64::INFINITY, RenyiOrder::Finite(2.0)).unwrap(), f64::INFINITY);
    }

    #[test]
    fn dp_to_rdp_equals_randomized_response_divergence() {
        // The bound is attained by the binary pair (e^eps, 1) / (1, e^eps).
        for eps in [0.01, 0.3, 1.0, 4.0] {
            let z = 1.0 + f64::exp(eps);
            let p = ProbVector::new(vec![eps.exp() / z, 1.0 / z]).unwrap();
            let q = ProbVector::new(vec![1.0 / z, eps.exp() / z]).unwrap();
            for a in [1.25, 1.5, 2.0, 3.0, 8.0, 16.0] {
                let alpha = RenyiOrder::Finite(a);
                let direct = renyi(&p, &q, alpha).unwrap();
                assert!((dp_to_rdp(eps, alpha).unwrap() - direct).abs() < 1e-12, "eps {eps} alpha {a}");
            }
            let kl = renyi(&p, &q, RenyiOrder::One).unwrap();
            assert!((dp_to_rdp(eps, RenyiOrder::One).unwrap() - kl).abs() < 1e-12);
        }
    }

    #[test]
    fn dp_to_rdp_series_is_continuous() {
        let eps = 0.8;
        // Reference values from 40-digit arithmetic on the closed form.
        let below = dp_to_rdp(eps, RenyiOrder::Finite(1.0 + 0.9e-6)).unwrap();
        let above = dp_to_rdp(eps, RenyiOrder::Finite(1.0 + 1.1e-6)).unwrap();
        assert!((below - 0.30395941622810536).abs() < 1e-12);
        assert!((above - 0.3039594709889655).abs() < 1e-9);
        let one = dp_to_rdp(eps, RenyiOrder::One).unwrap();
        assert!((below - one).abs() < 1e-6);
    }

    #[test]
    fn rdp_to_dp_examples() {
        let b = RdpBudget { alpha: RenyiOrder::Finite(2.0), epsilon: 0.5 };
        assert!((rdp_to_dp(b, 0.01).unwrap().epsilon - (0.5 + 100f64.ln())).abs() < 1e-14);
        assert!((rdp_to_dp(b, 1.0 - 1e-15).unwrap().epsilon - 0.5).abs() < 1e-12);
        let pure = RdpBudget { alpha: RenyiOrder::Infinity, epsilon: 0.5 };
        assert_eq!(rdp_to_dp(pure, 0.01).unwrap(), DpBudget { epsilon: 0.5, delta: 0.01 });
        assert!(matches!(rdp_to_dp(b, 0.0), Err(Error::DeltaOutOfRange(_))));
        assert!(matches!(rdp_to_dp(b, 1.0), Err(Error::DeltaOutOfRange(_))));
    }

    #[test]
    fn probability_bounds_examples() {
        assert_eq!(probability_bounds(0.0, 2.0, 1.0).unwrap(), (1.0, 1.0));
        let (lo, hi) = probability_bounds(0.0, 2.0, 0.25).unwrap();
        assert!((lo - 0.0625).abs() < 1e-15 && (hi - 0.5).abs() < 1e-15);
        let (lo, hi) = probability_bounds(0.1, 2.0, 0.5).unwrap();
        assert!((lo - (-0.1f64).exp() * 0.25).abs() < 1e-15);
        assert!((hi - (0.1f64.exp() * 0.5).sqrt()).abs() < 1e-15);
        assert_eq!(probability_bounds(5.0, 2.0, 0.9).unwrap().1, 1.0);
        assert!(probability_bounds(0.1, 1.0, 0.5).is_err());
        assert!(probability_bounds(0.1, 2.0, 1.5).is_err());
    }

    #[test]
    fn gamma_sweep_decreases() {
        let values = linspace(0.1, 0.9, 9);
        let rows = budget_sweep(
            &NoiseSpec::Gad { p: 0.5, gamma: 0.3 },
            NoiseParam::Gamma,
            &values,
            0.1,
            &[RenyiOrder::Finite(2.0)],
        )
        .unwrap();
        assert_eq!(rows.len(), 9);
        assert!(rows.windows(2).all(|w| w[1].eps_hat < w[0].eps_hat));
        let full = intuitive_budget(&NoiseSpec::Gad { p: 0.5, gamma: 1.0 }, 0.4, RenyiOrder::Finite(8.0)).unwrap();
        assert_eq!(full.epsilon, 0.0);
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.1, 0.9, 1), vec![0.1]);
        let v = linspace(0.1, 0.9, 9);
        assert_eq!((v[0], v[8]), (0.1, 0.9));
        assert!((v[4] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn search_finds_at_least_the_basis_value() {
        let povm = computational_basis_povm(2);
        let base = exact_budget(&reference_pair(), &DEP, &povm, RenyiOrder::Finite(2.0)).unwrap();
        let found = search_budget(&reference_pair(), &DEP, RenyiOrder::Finite(2.0), 200, 7).unwrap();
        assert!(found.best >= base);
        assert_eq!(found.evaluations, 201);
        let again = search_budget(&reference_pair(), &DEP, RenyiOrder::Finite(2.0), 200, 7).unwrap();
        assert_eq!(found.best, again.best);
        let bound = intuitive_budget(&DEP, 0.15, RenyiOrder::Finite(2.0)).unwrap().epsilon;
        assert!(found.best <= bound + 1e-9);
    }

    #[test]
    fn dominance_reports_witnesses_for_undamped_z_axis() {
        // With lambda > gamma the z-axis contracts less than the coherences,
        // so the PAD closed form can be beaten; the report must say so.
        let noise = NoiseSpec::Pad { p: 0.5, gamma: 0.05, lambda: 0.95 };
        let report = dominance_check(&noise, 0.1, &[RenyiOrder::Infinity], 400, 1, 1e-9).unwrap();
        assert!(!report.holds());
        let w = &report.violations[0];
        assert!(w.exact > w.bound);
    }
}
