// SPDX-License-Identifier: Apache-2.0

//! Rényi differential privacy accounting for noisy quantum devices.
//!
//! The crate models states, noise channels and measurements exactly, measures
//! the Rényi divergence between measured neighbor outputs, and composes the
//! resulting budgets across circuit runs and QPUs.

// Negated comparisons are deliberate: NaN must fail range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod accountant;
pub mod budget;
pub mod channel;
pub mod divergence;
pub mod error;
pub mod fidelity;
pub mod linalg;
pub mod measurement;
pub mod report;
pub mod sampling;
pub mod state;
pub mod tolerance;

pub use accountant::{
    simulate_rounds, AccountingMode, AlphaGrid, Composition, Ledger, QpuTask, SimulationReport, WorkloadDocument,
    WorkloadSpec,
};
pub use budget::{
    dp_to_rdp, exact_budget, exact_budget_two_sided, intuitive_budget, qdp_epsilon, rdp_to_dp, DpBudget, RdpBudget,
};
pub use channel::{apply_noise, KrausChannel, NoiseParam, NoiseSpec};
pub use divergence::{kl, max_divergence, renyi, RenyiOrder};
pub use error::{Error, Result};
pub use fidelity::{bloch_fidelity, bloch_vector, schumacher_fidelity, BlochVector};
pub use linalg::{ComplexMatrix, ComplexScalar};
pub use measurement::{computational_basis_povm, outcome_distribution, Povm, ProbVector};
pub use state::{trace_distance, DensityMatrix, NeighborPair};
pub use tolerance::{Tolerances, TOL};
