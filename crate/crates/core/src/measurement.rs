// SPDX-License-Identifier: Apache-2.0

//! POVMs and the outcome distributions they induce.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix};
use crate::state::DensityMatrix;
use crate::tolerance::TOL;

/// A measurement `{M_m}` of PSD elements summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::MalformedMatrix("POVM needs at least one element".into()))?;
        let dim = first.dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for el in &elements {
            first.check_same_dim(el)?;
            let deviation = el.hermitian_deviation();
            if deviation > TOL.herm {
                return Err(Error::NotHermitian { deviation });
            }
            let min = hermitian_eigenvalues(el)?[0];
            if min < -TOL.psd {
                return Err(Error::NotPsd { min_eigenvalue: min });
            }
            sum = &sum + el;
        }
        let deviation = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if deviation > TOL.completeness {
            return Err(Error::PovmIncomplete { deviation });
        }
        Ok(Self { dim, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Projectors onto the computational basis states.
pub fn computational_basis_povm(dim: usize) -> Povm {
    assert!(dim >= 1, "POVM dimension must be positive");
    let elements = (0..dim)
        .map(|i| {
            let mut d = vec![0.0; dim];
            d[i] = 1.0;
            ComplexMatrix::diag(&d)
        })
        .collect();
    Povm { dim, elements }
}

/// A probability distribution over a finite outcome set.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProbVector {
    probs: Vec<f64>,
}

impl ProbVector {
    /// Clamps entries in `[-1e-12, 0)` to zero and requires the sum to be one
    /// within `1e-9`.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("no outcomes".into()));
        }
        let mut clean = Vec::with_capacity(probs.len());
        for (i, p) in probs.into_iter().enumerate() {
            if !p.is_finite() || p < -TOL.neg_prob {
                return Err(Error::InvalidDistribution(format!("entry {i} = {p}")));
            }
            clean.push(p.max(0.0));
        }
        let sum: f64 = clean.iter().sum();
        if (sum - 1.0).abs() > TOL.trace {
            return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
        }
        Ok(Self { probs: clean })
    }

    /// Rescales nonnegative weights to sum to one.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().map(|w| w.max(0.0)).sum();
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::InvalidDistribution("weights have no positive mass".into()));
        }
        Self::new(weights.into_iter().map(|w| w.max(0.0) / sum).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Outer-product (independent joint) distribution, first index major.
    pub fn product(&self, other: &ProbVector) -> ProbVector {
        let probs = self
            .probs
            .iter()
            .flat_map(|&p| other.probs.iter().map(move |&q| p * q))
            .collect();
        ProbVector { probs }
    }

    /// Probability of an outcome subset given as a bit mask over outcomes.
    pub fn event_probability(&self, subset: &[bool]) -> f64 {
        self.probs
            .iter()
            .zip(subset)
            .filter(|(_, &inside)| inside)
            .map(|(p, _)| p)
            .sum()
    }
}

impl<'de> Deserialize<'de> for ProbVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let probs = Vec::<f64>::deserialize(deserializer)?;
        ProbVector::new(probs).map_err(serde::de::Error::custom)
    }
}

/// `p_m = Tr(M_m rho)`.
pub fn outcome_distribution(rho: &DensityMatrix, povm: &Povm) -> Result<ProbVector> {
    if rho.dim() != povm.dim {
        return Err(Error::DimensionMismatch {
            expected: povm.dim,
            found: rho.dim(),
        });
    }
    let mut probs = Vec::with_capacity(povm.len());
    for (outcome, el) in povm.elements.iter().enumerate() {
        let mut tr = num_complex::Complex64::new(0.0, 0.0);
        // Tr(M rho) = sum_ij M_ij rho_ji
        for i in 0..povm.dim {
            for j in 0..povm.dim {
                tr += el[(i, j)] * rho.matrix()[(j, i)];
            }
        }
        if tr.im.abs() > TOL.imag_prob {
            return Err(Error::ImaginaryProbability {
                outcome,
                residue: tr.im.abs(),
            });
        }
        probs.push(tr.re);
    }
    let clamped: Vec<f64> = probs.iter().map(|p| p.max(0.0)).collect();
    let sum: f64 = clamped.iter().sum();
    ProbVector::new(clamped.into_iter().map(|p| p / sum).collect())
}

/// JSON document `{"dim": 2, "elements": [matrix, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmDocument {
    pub dim: usize,
    pub elements: Vec<ComplexMatrix>,
}

impl PovmDocument {
    pub fn into_povm(self) -> Result<Povm> {
        if let Some(el) = self.elements.iter().find(|el| el.dim() != self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: el.dim(),
            });
        }
        Povm::new(self.elements)
    }
}

impl From<&Povm> for PovmDocument {
    fn from(povm: &Povm) -> Self {
        Self {
            dim: povm.dim,
            elements: povm.elements.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn computational_basis() {
        let povm = computational_basis_povm(2);
        assert_eq!(povm.elements()[0], ComplexMatrix::diag(&[1.0, 0.0]));
        assert_eq!(povm.elements()[1], ComplexMatrix::diag(&[0.0, 1.0]));
        let four = computational_basis_povm(4);
        assert_eq!(four.len(), 4);
        let sum = four.elements().iter().fold(ComplexMatrix::zeros(4), |acc, m| &acc + m);
        assert_eq!(sum, ComplexMatrix::identity(4));
        assert!(Povm::new(four.elements().to_vec()).is_ok());
    }

    #[test]
    fn diagonal_read_off() {
        let rho = DensityMatrix::new(ComplexMatrix::diag(&[0.4, 0.6])).unwrap();
        let p = outcome_distribution(&rho, &computational_basis_povm(2)).unwrap();
        assert_eq!(p.probs(), &[0.4, 0.6]);
        let rho = DensityMatrix::from_real(2, &[0.3, 0.2, 0.2, 0.7]).unwrap();
        let p = outcome_distribution(&rho, &computational_basis_povm(2)).unwrap();
        assert!((p.probs()[0] - 0.3).abs() < 1e-15 && (p.probs()[1] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn trivial_povm() {
        let rho = DensityMatrix::from_real(2, &[0.3, 0.2, 0.2, 0.7]).unwrap();
        let povm = Povm::new(vec![ComplexMatrix::identity(2)]).unwrap();
        assert_eq!(outcome_distribution(&rho, &povm).unwrap().probs(), &[1.0]);
    }

    #[test]
    fn invalid_povms() {
        assert!(matches!(
            Povm::new(vec![ComplexMatrix::diag(&[1.0, 0.0])]),
            Err(Error::PovmIncomplete { .. })
        ));
        assert!(matches!(
            Povm::new(vec![ComplexMatrix::diag(&[1.5, 0.5]), ComplexMatrix::diag(&[-0.5, 0.5])]),
            Err(Error::NotPsd { .. })
        ));
        let skew = ComplexMatrix::from_real(2, &[0.5, 0.2, 0.0, 0.5]).unwrap();
        assert!(matches!(Povm::new(vec![skew]), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn dimension_mismatch() {
        let rho = DensityMatrix::maximally_mixed(4);
        assert!(matches!(
            outcome_distribution(&rho, &computational_basis_povm(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn prob_vector_validation() {
        assert!(ProbVector::new(vec![0.5, 0.6]).is_err());
        assert_eq!(ProbVector::new(vec![1.0 + 1e-13, -1e-13]).unwrap().probs()[1], 0.0);
        assert!(ProbVector::new(vec![1.1, -0.1]).is_err());
        let joint = ProbVector::new(vec![0.25, 0.75]).unwrap().product(&ProbVector::new(vec![0.5, 0.5]).unwrap());
        assert_eq!(joint.probs(), &[0.125, 0.125, 0.375, 0.375]);
    }
}
