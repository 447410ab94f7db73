// SPDX-License-Identifier: Apache-2.0

//! Fidelity between states and the privacy-utility trade-off of a noise family.

use rayon::prelude::*;
use serde::Serialize;

use crate::budget::{intuitive_budget, linspace};
use crate::channel::{apply_noise, NoiseParam, NoiseSpec};
use crate::divergence::RenyiOrder;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, psd_sqrt};
use crate::report::csv_float;
use crate::state::DensityMatrix;

/// Overshoot past one that is silently clamped.
const FIDELITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }
}

/// `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
pub fn schumacher_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let root = psd_sqrt(rho.matrix())?;
    let inner = root.conjugate(sigma.matrix()).hermitian_part();
    let outer = psd_sqrt(&inner)?;
    let tr: f64 = hermitian_eigenvalues(&outer)?.iter().map(|v| v.max(0.0)).sum();
    Ok(clamp_fidelity(tr * tr))
}

fn clamp_fidelity(f: f64) -> f64 {
    debug_assert!(f <= 1.0 + FIDELITY_SLACK, "fidelity {f} overshoots one");
    f.clamp(0.0, 1.0)
}

/// Pauli coordinates of a qubit state.
pub fn bloch_vector(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::NotQubit(rho.dim()));
    }
    let m = rho.matrix();
    let off = m[(0, 1)];
    Ok(BlochVector {
        x: 2.0 * off.re,
        y: -2.0 * off.im,
        z: m[(0, 0)].re - m[(1, 1)].re,
    })
}

/// Qubit fidelity `(1 + r.s + sqrt((1 - |r|^2)(1 - |s|^2))) / 2`.
pub fn bloch_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let r = bloch_vector(rho)?;
    let s = bloch_vector(sigma)?;
    let purity = ((1.0 - r.norm_sq()).max(0.0) * (1.0 - s.norm_sq()).max(0.0)).sqrt();
    Ok(clamp_fidelity((1.0 + r.dot(&s) + purity) / 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UtilityRow {
    pub param: f64,
    pub alpha: RenyiOrder,
    pub eps_hat: f64,
    pub fidelity: f64,
}

/// Budget and fidelity `F(rho_ref, N(rho_ref))` on `steps` evenly spaced
/// values of one noise parameter. Rows are parameter-major, ascending.
#[allow(clippy::too_many_arguments)]
pub fn utility_privacy_sweep(
    base: &NoiseSpec,
    param: NoiseParam,
    lo: f64,
    hi: f64,
    steps: usize,
    rho_ref: &DensityMatrix,
    d: f64,
    alphas: &[RenyiOrder],
) -> Result<Vec<UtilityRow>> {
    if steps < 2 {
        return Err(Error::InvalidGrid(format!("sweep needs at least 2 steps, got {steps}")));
    }
    if !(lo <= hi) {
        return Err(Error::InvalidGrid(format!("empty range [{lo}, {hi}]")));
    }
    if rho_ref.dim() != 2 {
        return Err(Error::NotQubit(rho_ref.dim()));
    }
    let per_value = linspace(lo, hi, steps)
        .into_par_iter()
        .map(|value| {
            let spec = base.with_param(param, value)?;
            let fidelity = schumacher_fidelity(rho_ref, &apply_noise(&spec, rho_ref)?)?;
            alphas
                .iter()
                .map(|&alpha| {
                    Ok(UtilityRow {
                        param: value,
                        alpha,
                        eps_hat: intuitive_budget(&spec, d, alpha)?.epsilon,
                        fidelity,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_value.into_iter().flatten().collect())
}

/// `param,alpha,eps_hat,fidelity`
pub fn utility_csv(rows: &[UtilityRow]) -> String {
    let mut out = String::from("param,alpha,eps_hat,fidelity\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            csv_float(r.param),
            r.alpha,
            csv_float(r.eps_hat),
            csv_float(r.fidelity)
        ));
    }
    out
}
