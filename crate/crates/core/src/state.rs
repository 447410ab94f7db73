// SPDX-License-Identifier: Apache-2.0

//! Density matrices, trace distance and neighboring state pairs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix};
use crate::tolerance::TOL;

/// A validated quantum state: Hermitian, positive semi-definite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Strict validation. The error names the first violated invariant.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let deviation = mat.hermitian_deviation();
        if deviation > TOL.herm {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = mat.trace().re;
        if (trace - 1.0).abs() > TOL.trace {
            return Err(Error::TraceNotOne {
                trace,
                deviation: (trace - 1.0).abs(),
            });
        }
        check_psd(&mat)?;
        Ok(Self { mat })
    }

    /// Like [`DensityMatrix::new`] but symmetrizes round-off and renormalizes
    /// trace drift up to `1e-6`. Used on channel outputs.
    pub fn new_lenient(mat: ComplexMatrix) -> Result<Self> {
        let deviation = mat.hermitian_deviation();
        if deviation > TOL.herm {
            return Err(Error::NotHermitian { deviation });
        }
        let mat = mat.hermitian_part();
        let trace = mat.trace().re;
        let drift = (trace - 1.0).abs();
        if drift > TOL.lenient_trace {
            return Err(Error::TraceNotOne { trace, deviation: drift });
        }
        let mat = if drift > 0.0 { mat.scale(1.0 / trace) } else { mat };
        check_psd(&mat)?;
        Ok(Self { mat })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real(dim, entries)?)
    }

    /// `|psi><psi|` for a normalized (or normalizable) vector.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::MalformedMatrix("state vector has zero or non-finite norm".into()));
        }
        let scaled: Vec<Complex64> = amplitudes.iter().map(|z| z / norm).collect();
        Self::new_lenient(ComplexMatrix::outer(&scaled))
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat).expect("validated state is Hermitian")
    }

    /// Convex combination `t * self + (1 - t) * other`.
    pub fn mix(&self, other: &Self, t: f64) -> Result<Self> {
        self.mat.check_same_dim(&other.mat)?;
        crate::error::check_unit_interval("t", t)?;
        Self::new_lenient(&self.mat.scale(t) + &other.mat.scale(1.0 - t))
    }
}

fn check_psd(mat: &ComplexMatrix) -> Result<()> {
    let min = hermitian_eigenvalues(mat)?.first().copied().unwrap_or(0.0);
    if min < -TOL.psd {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    Ok(())
}

/// `Tr|rho - sigma| / 2`. Exactly symmetric: the arguments are put in a
/// canonical order first so both calls round identically.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    rho.mat.check_same_dim(&sigma.mat)?;
    let key = |m: &ComplexMatrix| m.entries().iter().flat_map(|z| [z.re, z.im]).collect::<Vec<f64>>();
    let swap = key(&rho.mat)
        .iter()
        .zip(key(&sigma.mat).iter())
        .map(|(a, b)| a.total_cmp(b))
        .find(|o| o.is_ne())
        .is_some_and(|o| o.is_gt());
    let (a, b) = if swap { (sigma, rho) } else { (rho, sigma) };
    let diff = &a.mat - &b.mat;
    let eig = hermitian_eigenvalues(&diff)?;
    let tau = 0.5 * eig.iter().map(|x| x.abs()).sum::<f64>();
    Ok(tau.clamp(0.0, 1.0))
}

/// Two same-dimension states certified to lie within trace distance `d_bound`.
#[derive(Debug, Clone)]
pub struct NeighborPair {
    rho: DensityMatrix,
    sigma: DensityMatrix,
    d_bound: f64,
}

impl NeighborPair {
    pub fn new(rho: DensityMatrix, sigma: DensityMatrix, d_bound: f64) -> Result<Self> {
        if !(d_bound > 0.0 && d_bound <= 1.0) {
            return Err(Error::ParamOutOfRange {
                name: "d",
                value: d_bound,
                expected: "(0, 1]",
            });
        }
        let distance = trace_distance(&rho, &sigma)?;
        if distance > d_bound + TOL.recon {
            return Err(Error::NeighborBoundExceeded {
                distance,
                bound: d_bound,
            });
        }
        Ok(Self { rho, sigma, d_bound })
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn sigma(&self) -> &DensityMatrix {
        &self.sigma
    }

    pub fn d_bound(&self) -> f64 {
        self.d_bound
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    /// `rho - sigma`; for qubits its entries are the `delta_a`, `delta_b`
    /// offsets between the two states.
    pub fn difference(&self) -> ComplexMatrix {
        &self.rho.mat - &self.sigma.mat
    }

    pub fn distance(&self) -> f64 {
        trace_distance(&self.rho, &self.sigma).expect("pair dimensions checked at construction")
    }

    pub fn swapped(&self) -> Self {
        Self {
            rho: self.sigma.clone(),
            sigma: self.rho.clone(),
            d_bound: self.d_bound,
        }
    }
}

/// JSON document `{"dim": 2, "entries": [[[re, im], ...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateDocument {
    pub dim: usize,
    pub entries: ComplexMatrix,
}

impl StateDocument {
    pub fn into_state(self) -> Result<DensityMatrix> {
        if self.entries.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: self.entries.dim(),
            });
        }
        DensityMatrix::new(self.entries)
    }
}

impl From<&DensityMatrix> for StateDocument {
    fn from(state: &DensityMatrix) -> Self {
        Self {
            dim: state.dim(),
            entries: state.matrix().clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rho_prime() -> DensityMatrix {
        DensityMatrix::from_real(2, &[0.3, 0.2, 0.2, 0.7]).unwrap()
    }

    fn sigma_prime() -> DensityMatrix {
        DensityMatrix::from_real(2, &[0.4, 0.1, 0.1, 0.6]).unwrap()
    }

    #[test]
    fn validates_example_state() {
        assert_eq!(rho_prime().dim(), 2);
    }

    #[test]
    fn rejects_bad_trace() {
        let err = DensityMatrix::new(ComplexMatrix::diag(&[0.5, 0.6])).unwrap_err();
        match err {
            Error::TraceNotOne { trace, .. } => assert!((trace - 1.1).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_negative_eigenvalue() {
        let err = DensityMatrix::new(ComplexMatrix::diag(&[1.2, -0.2])).unwrap_err();
        assert!(matches!(err, Error::NotPsd { min_eigenvalue } if (min_eigenvalue + 0.2).abs() < 1e-12));
    }

    #[test]
    fn rejects_non_hermitian() {
        let err = DensityMatrix::from_real(2, &[0.5, 0.1, 0.0, 0.5]).unwrap_err();
        assert!(matches!(err, Error::NotHermitian { .. }));
    }

    #[test]
    fn lenient_renormalizes_small_drift() {
        let m = ComplexMatrix::diag(&[0.5 + 5e-7, 0.5]);
        assert!(DensityMatrix::new(m.clone()).is_err());
        let s = DensityMatrix::new_lenient(m).unwrap();
        assert!((s.matrix().trace().re - 1.0).abs() < 1e-15);
        assert!(DensityMatrix::new_lenient(ComplexMatrix::diag(&[0.6, 0.5])).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let r = rho_prime();
        assert_eq!(trace_distance(&r, &r).unwrap(), 0.0);
        let tau = trace_distance(&r, &sigma_prime()).unwrap();
        assert!((tau - 0.02f64.sqrt()).abs() < 1e-12);
        let zero = DensityMatrix::from_real(2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let one = DensityMatrix::from_real(2, &[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn trace_distance_dimension_mismatch() {
        let r = rho_prime();
        let q = DensityMatrix::maximally_mixed(4);
        assert!(matches!(trace_distance(&r, &q), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn neighbor_pair_bound() {
        let pair = NeighborPair::new(rho_prime(), sigma_prime(), 0.15).unwrap();
        let diff = pair.difference();
        assert!((diff[(0, 0)].re + 0.1).abs() < 1e-15);
        assert!((diff[(0, 1)].re - 0.1).abs() < 1e-15);
        assert!(matches!(
            NeighborPair::new(rho_prime(), sigma_prime(), 0.1),
            Err(Error::NeighborBoundExceeded { .. })
        ));
        assert!(NeighborPair::new(rho_prime(), sigma_prime(), 0.0).is_err());
    }

    #[test]
    fn state_document_round_trip() {
        let doc = StateDocument::from(&rho_prime());
        let text = serde_json::to_string(&doc).unwrap();
        assert_eq!(text, r#"{"dim":2,"entries":[[[0.3,0.0],[0.2,0.0]],[[0.2,0.0],[0.7,0.0]]]}"#);
        let back: StateDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_state().unwrap(), rho_prime());
    }

    #[test]
    fn state_document_dim_mismatch() {
        let doc: StateDocument = serde_json::from_str(r#"{"dim":3,"entries":[[[1,0],[0,0]],[[0,0],[0,0]]]}"#).unwrap();
        assert!(matches!(doc.into_state(), Err(Error::DimensionMismatch { .. })));
    }
}
