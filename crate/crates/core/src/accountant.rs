// SPDX-License-Identifier: Apache-2.0

//! Budget ledger and the multi-QPU round simulator.
//!
//! Budgets compose additively at every fixed Rényi order, for independent
//! (basic) and adaptive composition alike. The ledger keeps each order's total
//! as an exactly rounded sum, so totals do not depend on recording order.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::{exact_budget, intuitive_budget, rdp_to_dp, DpBudget, RdpBudget};
use crate::channel::NoiseSpec;
use crate::divergence::RenyiOrder;
use crate::error::{Error, Result};
use crate::measurement::{computational_basis_povm, Povm, PovmDocument};
use crate::report::csv_float;
use crate::state::{NeighborPair, StateDocument};

/// Strictly ascending list of Rényi orders, optionally ending at infinity.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct AlphaGrid {
    orders: Vec<RenyiOrder>,
}

impl AlphaGrid {
    pub fn new(orders: Vec<RenyiOrder>) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::InvalidGrid("no orders".into()));
        }
        for order in &orders {
            if let RenyiOrder::Finite(a) = *order {
                RenyiOrder::finite(a)?;
            }
        }
        if let Some(w) = orders.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidGrid(format!("{} is not below {}", w[0], w[1])));
        }
        Ok(Self { orders })
    }

    pub fn orders(&self) -> &[RenyiOrder] {
        &self.orders
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }
}

impl Default for AlphaGrid {
    /// `{1.25, 1.5, 2, 3, 4, 8, 16, 32, 64, inf}`.
    fn default() -> Self {
        let mut orders: Vec<RenyiOrder> = [1.25, 1.5, 2.0, 3.0, 4.0, 8.0, 16.0, 32.0, 64.0]
            .into_iter()
            .map(RenyiOrder::Finite)
            .collect();
        orders.push(RenyiOrder::Infinity);
        Self { orders }
    }
}

impl FromStr for AlphaGrid {
    type Err = Error;

    /// Comma-separated orders, e.g. `2,4,8,inf`.
    fn from_str(s: &str) -> Result<Self> {
        let orders = s
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<RenyiOrder>>>()?;
        Self::new(orders)
    }
}

impl<'de> Deserialize<'de> for AlphaGrid {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let orders = Vec::<RenyiOrder>::deserialize(deserializer)?;
        AlphaGrid::new(orders).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for AlphaGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.orders.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// Correctly rounded running sum (Shewchuk's non-overlapping partials).
/// The result is independent of the order in which terms are added.
#[derive(Debug, Clone, Default)]
struct ExactSum {
    partials: Vec<f64>,
    infinite: bool,
}

impl ExactSum {
    fn add(&mut self, value: f64) {
        if value == f64::INFINITY {
            self.infinite = true;
            return;
        }
        let mut x = value;
        let mut kept = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        self.partials.truncate(kept);
        self.partials.push(x);
    }

    fn value(&self) -> f64 {
        if self.infinite {
            return f64::INFINITY;
        }
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            let y = p[n - 1];
            n -= 1;
            hi = x + y;
            lo = y - (hi - x);
            if lo != 0.0 {
                break;
            }
        }
        // Round half-even across the remaining partials.
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
        hi
    }
}

/// How a budget entered the ledger. The arithmetic is identical; the tag is
/// kept for audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Composition {
    Basic,
    Adaptive,
}

/// Which budget a task contributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccountingMode {
    /// Closed-form budget from the noise parameters.
    #[default]
    Intuitive,
    /// Divergence of the task's own state pair and POVM.
    Exact,
}

impl FromStr for AccountingMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "intuitive" => Ok(AccountingMode::Intuitive),
            "exact" => Ok(AccountingMode::Exact),
            other => Err(format!("unknown accounting mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExactInputs {
    pub pair: NeighborPair,
    pub povm: Povm,
}

/// One circuit execution whose privacy cost is accounted.
#[derive(Debug, Clone)]
pub struct QpuTask {
    pub task_id: String,
    pub noise: NoiseSpec,
    pub d: f64,
    pub exact: Option<ExactInputs>,
}

impl QpuTask {
    pub fn new(task_id: impl Into<String>, noise: NoiseSpec, d: f64) -> Result<Self> {
        if !(d > 0.0 && d <= 1.0) {
            return Err(Error::ParamOutOfRange {
                name: "d",
                value: d,
                expected: "(0, 1]",
            });
        }
        noise.validate()?;
        Ok(Self {
            task_id: task_id.into(),
            noise,
            d,
            exact: None,
        })
    }

    pub fn with_exact(mut self, pair: NeighborPair, povm: Povm) -> Self {
        self.exact = Some(ExactInputs { pair, povm });
        self
    }

    /// The task's budget at every order of `grid`.
    pub fn budgets(&self, grid: &AlphaGrid, mode: AccountingMode) -> Result<Vec<f64>> {
        grid.orders()
            .iter()
            .map(|&alpha| match mode {
                AccountingMode::Intuitive => intuitive_budget(&self.noise, self.d, alpha).map(|b| b.epsilon),
                AccountingMode::Exact => {
                    let inputs = self
                        .exact
                        .as_ref()
                        .ok_or_else(|| Error::MissingExactInputs(self.task_id.clone()))?;
                    exact_budget(&inputs.pair, &self.noise, &inputs.povm, alpha)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub task_id: String,
    pub composition: Composition,
    pub contributions: Vec<f64>,
}

/// Per-order accumulated budgets with a replayable history.
#[derive(Debug, Clone)]
pub struct Ledger {
    grid: AlphaGrid,
    sums: Vec<ExactSum>,
    history: Vec<LedgerEntry>,
}

impl Ledger {
    pub fn new(grid: AlphaGrid) -> Self {
        let sums = vec![ExactSum::default(); grid.len()];
        Self {
            grid,
            sums,
            history: Vec::new(),
        }
    }

    pub fn grid(&self) -> &AlphaGrid {
        &self.grid
    }

    pub fn history(&self) -> &[LedgerEntry] {
        &self.history
    }

    pub fn totals(&self) -> Vec<f64> {
        self.sums.iter().map(ExactSum::value).collect()
    }

    /// Total at each order as `RdpBudget`s.
    pub fn budgets(&self) -> Vec<RdpBudget> {
        self.grid
            .orders()
            .iter()
            .zip(self.totals())
            .map(|(&alpha, epsilon)| RdpBudget { alpha, epsilon })
            .collect()
    }

    /// Adds precomputed per-order budgets.
    pub fn record_contributions(
        &mut self,
        task_id: impl Into<String>,
        composition: Composition,
        contributions: Vec<f64>,
    ) -> Result<()> {
        if contributions.len() != self.grid.len() {
            return Err(Error::LengthMismatch {
                left: contributions.len(),
                right: self.grid.len(),
            });
        }
        if let Some(&bad) = contributions.iter().find(|x| x.is_nan() || **x < 0.0) {
            return Err(Error::ParamOutOfRange {
                name: "epsilon",
                value: bad,
                expected: ">= 0",
            });
        }
        for (sum, &eps) in self.sums.iter_mut().zip(&contributions) {
            sum.add(eps);
        }
        self.history.push(LedgerEntry {
            task_id: task_id.into(),
            composition,
            contributions,
        });
        Ok(())
    }

    /// Basic composition: the task's budgets add to the totals.
    pub fn record(&mut self, task: &QpuTask, mode: AccountingMode) -> Result<()> {
        let budgets = task.budgets(&self.grid, mode)?;
        self.record_contributions(task.task_id.clone(), Composition::Basic, budgets)
    }

    /// Adaptive composition: same arithmetic as [`Ledger::record`], tagged
    /// for audit.
    pub fn record_adaptive(&mut self, task: &QpuTask, mode: AccountingMode) -> Result<()> {
        let budgets = task.budgets(&self.grid, mode)?;
        self.record_contributions(task.task_id.clone(), Composition::Adaptive, budgets)
    }

    /// Recomputes the totals from history with plain left-to-right sums.
    pub fn replay_totals(&self) -> Vec<f64> {
        let mut totals = vec![0.0; self.grid.len()];
        for entry in &self.history {
            for (t, c) in totals.iter_mut().zip(&entry.contributions) {
                *t += c;
            }
        }
        totals
    }

    /// Smallest `(eps, delta)` conversion over the grid; ties go to the
    /// smaller order.
    pub fn best_dp(&self, delta: f64) -> Result<(DpBudget, RenyiOrder)> {
        let mut best: Option<(DpBudget, RenyiOrder)> = None;
        for budget in self.budgets() {
            let dp = rdp_to_dp(budget, delta)?;
            if best.is_none_or(|(b, _)| dp.epsilon < b.epsilon) {
                best = Some((dp, budget.alpha));
            }
        }
        Ok(best.expect("grid is nonempty"))
    }
}

#[derive(Debug, Clone)]
pub struct ScheduledTask {
    /// 1-based QPU index.
    pub qpu: usize,
    pub task: QpuTask,
}

/// Rounds of tasks spread over `k_qpus` processors.
#[derive(Debug, Clone)]
pub struct WorkloadSpec {
    k_qpus: usize,
    rounds: Vec<Vec<ScheduledTask>>,
}

impl WorkloadSpec {
    /// Rejects schedules that use a QPU outside `1..=k_qpus` or put two
    /// tasks on one QPU in the same round.
    pub fn new(k_qpus: usize, rounds: Vec<Vec<ScheduledTask>>) -> Result<Self> {
        if k_qpus == 0 {
            return Err(Error::ScheduleConflict {
                round: 0,
                reason: "k_qpus must be at least 1".into(),
            });
        }
        for (i, round) in rounds.iter().enumerate() {
            let mut busy = vec![None::<&str>; k_qpus];
            for st in round {
                if st.qpu == 0 || st.qpu > k_qpus {
                    return Err(Error::ScheduleConflict {
                        round: i + 1,
                        reason: format!("task `{}` assigned to QPU {} of {k_qpus}", st.task.task_id, st.qpu),
                    });
                }
                if let Some(other) = busy[st.qpu - 1] {
                    return Err(Error::ScheduleConflict {
                        round: i + 1,
                        reason: format!("tasks `{other}` and `{}` both on QPU {}", st.task.task_id, st.qpu),
                    });
                }
                busy[st.qpu - 1] = Some(&st.task.task_id);
            }
        }
        Ok(Self { k_qpus, rounds })
    }

    pub fn k_qpus(&self) -> usize {
        self.k_qpus
    }

    pub fn rounds(&self) -> &[Vec<ScheduledTask>] {
        &self.rounds
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RoundReport {
    pub round: usize,
    pub round_eps: Vec<f64>,
    pub cumulative_eps: Vec<f64>,
    pub best_dp: DpBudget,
    pub best_alpha: RenyiOrder,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SimulationReport {
    pub k_qpus: usize,
    pub delta: f64,
    pub mode: AccountingMode,
    pub grid: AlphaGrid,
    pub rounds: Vec<RoundReport>,
}

impl SimulationReport {
    /// One line per `(round, alpha)`:
    /// `round,alpha,round_eps,cumulative_eps,best_dp_eps,best_alpha`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,alpha,round_eps,cumulative_eps,best_dp_eps,best_alpha\n");
        for r in &self.rounds {
            for (j, alpha) in self.grid.orders().iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.round,
                    alpha,
                    csv_float(r.round_eps[j]),
                    csv_float(r.cumulative_eps[j]),
                    csv_float(r.best_dp.epsilon),
                    r.best_alpha
                ));
            }
        }
        out
    }

    pub fn final_round(&self) -> Option<&RoundReport> {
        self.rounds.last()
    }
}

/// Runs the workload round by round. Task budgets inside a round are computed
/// in parallel and merged in task order.
pub fn simulate_rounds(
    workload: &WorkloadSpec,
    grid: &AlphaGrid,
    delta: f64,
    mode: AccountingMode,
) -> Result<SimulationReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    let mut ledger = Ledger::new(grid.clone());
    let mut rounds = Vec::with_capacity(workload.rounds.len());
    for (i, round) in workload.rounds.iter().enumerate() {
        let budgets = round
            .par_iter()
            .map(|st| st.task.budgets(grid, mode))
            .collect::<Result<Vec<_>>>()?;
        let mut round_sums = vec![ExactSum::default(); grid.len()];
        for (st, contributions) in round.iter().zip(budgets) {
            for (sum, &eps) in round_sums.iter_mut().zip(&contributions) {
                sum.add(eps);
            }
            ledger.record_contributions(st.task.task_id.clone(), Composition::Basic, contributions)?;
        }
        let (best_dp, best_alpha) = ledger.best_dp(delta)?;
        rounds.push(RoundReport {
            round: i + 1,
            round_eps: round_sums.iter().map(ExactSum::value).collect(),
            cumulative_eps: ledger.totals(),
            best_dp,
            best_alpha,
        });
    }
    Ok(SimulationReport {
        k_qpus: workload.k_qpus,
        delta,
        mode,
        grid: grid.clone(),
        rounds,
    })
}

/// JSON form of a workload.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorkloadDocument {
    pub k_qpus: usize,
    pub rounds: Vec<Vec<TaskDocument>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaskDocument {
    pub task_id: String,
    pub noise: NoiseSpec,
    pub d: f64,
    pub qpu: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactDocument>,
}

/// State pair and POVM for exact accounting; the POVM defaults to the
/// computational basis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExactDocument {
    pub rho: StateDocument,
    pub sigma: StateDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub povm: Option<PovmDocument>,
}

impl TaskDocument {
    pub fn into_task(self) -> Result<ScheduledTask> {
        let mut task = QpuTask::new(self.task_id, self.noise, self.d)?;
        if let Some(exact) = self.exact {
            let rho = exact.rho.into_state()?;
            let sigma = exact.sigma.into_state()?;
            let povm = match exact.povm {
                Some(doc) => doc.into_povm()?,
                None => computational_basis_povm(rho.dim()),
            };
            let pair = NeighborPair::new(rho, sigma, self.d)?;
            task = task.with_exact(pair, povm);
        }
        Ok(ScheduledTask { qpu: self.qpu, task })
    }
}

impl WorkloadDocument {
    pub fn into_workload(self) -> Result<WorkloadSpec> {
        let rounds = self
            .rounds
            .into_iter()
            .map(|round| round.into_iter().map(TaskDocument::into_task).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        WorkloadSpec::new(self.k_qpus, rounds)
    }
}
