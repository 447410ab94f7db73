// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the accounting library.
///
/// Variants carry the measured quantity that broke the invariant so callers
/// can report it verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |H - H^dagger| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semi-definite: minimum eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("trace is not one: Tr = {trace} (deviation {deviation:e})")]
    TraceNotOne { trace: f64, deviation: f64 },

    #[error("eigensolver did not converge within {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("tensor product dimension {dim} exceeds the maximum {max}")]
    DimensionOverflow { dim: usize, max: usize },

    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),

    #[error("parameter `{name}` = {value} is out of range ({expected})")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("Kraus operators violate completeness: max |sum E^dagger E - I| = {deviation:e}")]
    ChannelNotTracePreserving { deviation: f64 },

    #[error("POVM elements do not sum to identity: max deviation {deviation:e}")]
    PovmIncomplete { deviation: f64 },

    #[error("outcome {outcome} has imaginary probability residue {residue:e}")]
    ImaginaryProbability { outcome: usize, residue: f64 },

    #[error("probability vector is invalid: {0}")]
    InvalidDistribution(String),

    #[error("distribution lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("kernel row {row} is not a distribution: {reason}")]
    NotStochastic { row: usize, reason: String },

    #[error("Renyi order {0} is invalid: finite orders must be > 1")]
    InvalidOrder(f64),

    #[error("alpha grid is invalid: {0}")]
    InvalidGrid(String),

    #[error("delta = {0} must lie strictly between 0 and 1")]
    DeltaOutOfRange(f64),

    #[error("trace distance {distance} exceeds the neighbor bound d = {bound}")]
    NeighborBoundExceeded { distance: f64, bound: f64 },

    #[error("no closed-form QDP budget exists for the {0} mechanism")]
    NoClosedForm(&'static str),

    #[error("task `{0}` has no state pair and POVM for exact accounting")]
    MissingExactInputs(String),

    #[error("schedule conflict in round {round}: {reason}")]
    ScheduleConflict { round: usize, reason: String },

    #[error("operation requires a single qubit, got dimension {0}")]
    NotQubit(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange {
            name,
            value,
            expected: "[0, 1]",
        })
    }
}
