// SPDX-License-Identifier: Apache-2.0

//! Numerical tolerances shared by every module.

/// One record for all thresholds so that validation, channel checks and
/// the eigensolver agree on what "close enough" means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max entry of `|H - H^dagger|` accepted as Hermitian.
    pub herm: f64,
    /// Eigenvalues in `[-psd, 0)` are clamped to zero.
    pub psd: f64,
    /// Reconstruction accuracy promised by the eigensolver and `psd_sqrt`.
    pub recon: f64,
    /// Allowed `|Tr(rho) - 1|` for strict validation.
    pub trace: f64,
    /// Trace drift that lenient validation silently renormalizes.
    pub lenient_trace: f64,
    /// Max entry of `|sum E^dagger E - I|` (or `|sum M - I|` for a POVM).
    pub completeness: f64,
    /// Imaginary residue accepted on `Tr(M rho)`.
    pub imag_prob: f64,
    /// Negative probabilities above this are clamped to zero.
    pub neg_prob: f64,
    /// Jacobi stops when the off-diagonal Frobenius norm drops below this
    /// (scaled by `max(1, ||H||_F)`).
    pub jacobi_off: f64,
    /// Hard cap on Jacobi sweeps.
    pub jacobi_max_sweeps: usize,
    /// Largest dimension a tensor product may produce.
    pub max_dim: usize,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        herm: 1e-10,
        psd: 1e-10,
        recon: 1e-9,
        trace: 1e-9,
        lenient_trace: 1e-6,
        completeness: 1e-9,
        imag_prob: 1e-10,
        neg_prob: 1e-12,
        jacobi_off: 1e-12,
        jacobi_max_sweeps: 100,
        max_dim: 1 << 10,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

pub const TOL: Tolerances = Tolerances::DEFAULT;
