// SPDX-License-Identifier: Apache-2.0

//! Noise channels: generalized amplitude damping, phase damping, their
//! composition, and depolarizing noise.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Error, Result};
use crate::linalg::{hermitian_eigenvalues, tensor_product, ComplexMatrix};
use crate::state::DensityMatrix;
use crate::tolerance::TOL;

/// A CPTP map in Kraus form, `rho -> sum_k E_k rho E_k^dagger`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim: usize,
    ops: Vec<ComplexMatrix>,
}

/// Largest entry of `|sum_k E_k^dagger E_k - I|`.
pub fn completeness_deviation(ops: &[ComplexMatrix]) -> Result<f64> {
    let first = ops
        .first()
        .ok_or_else(|| Error::MalformedMatrix("channel needs at least one Kraus operator".into()))?;
    let dim = first.dim();
    let mut sum = ComplexMatrix::zeros(dim);
    for op in ops {
        first.check_same_dim(op)?;
        sum = &sum + &(&op.adjoint() * op);
    }
    Ok(sum.max_abs_diff(&ComplexMatrix::identity(dim)))
}

impl KrausChannel {
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let deviation = completeness_deviation(&ops)?;
        if deviation > TOL.completeness {
            return Err(Error::ChannelNotTracePreserving { deviation });
        }
        Ok(Self { dim: ops[0].dim(), ops })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            ops: vec![ComplexMatrix::identity(dim)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn completeness_deviation(&self) -> f64 {
        completeness_deviation(&self.ops).expect("validated at construction")
    }

    /// Kraus set of `outer ∘ self` (self acts first).
    pub fn then(&self, outer: &KrausChannel) -> Result<KrausChannel> {
        if self.dim != outer.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: outer.dim,
            });
        }
        let mut ops = Vec::with_capacity(self.ops.len() * outer.ops.len());
        for g in &outer.ops {
            for p in &self.ops {
                let op = g * p;
                if op.frobenius_norm() > 0.0 {
                    ops.push(op);
                }
            }
        }
        KrausChannel::new(ops)
    }

    /// Lifts a single-qubit channel onto qubit `qubit` of an `n_qubits`
    /// register. Qubit 0 is the most significant tensor factor.
    pub fn embed(&self, n_qubits: usize, qubit: usize) -> Result<KrausChannel> {
        if self.dim != 2 {
            return Err(Error::NotQubit(self.dim));
        }
        if qubit >= n_qubits {
            return Err(Error::ParamOutOfRange {
                name: "qubit",
                value: qubit as f64,
                expected: "an index below the register size",
            });
        }
        if n_qubits == 1 {
            return Ok(self.clone());
        }
        let left = ComplexMatrix::identity(1 << qubit);
        let right = ComplexMatrix::identity(1 << (n_qubits - qubit - 1));
        let ops = self
            .ops
            .iter()
            .map(|op| tensor_product(&tensor_product(&left, op)?, &right))
            .collect::<Result<Vec<_>>>()?;
        KrausChannel::new(ops)
    }
}

fn real2(a: f64, b: f64, c: f64, d: f64) -> ComplexMatrix {
    ComplexMatrix::from_real(2, &[a, b, c, d]).expect("finite 2x2 literal")
}

/// Generalized amplitude damping on one qubit.
pub fn gad_channel(p: f64, gamma: f64) -> Result<KrausChannel> {
    check_unit_interval("p", p)?;
    check_unit_interval("gamma", gamma)?;
    let (sp, sq) = (p.sqrt(), (1.0 - p).sqrt());
    let (keep, jump) = ((1.0 - gamma).sqrt(), gamma.sqrt());
    KrausChannel::new(vec![
        real2(sp, 0.0, 0.0, sp * keep),
        real2(0.0, sp * jump, 0.0, 0.0),
        real2(sq * keep, 0.0, 0.0, sq),
        real2(0.0, 0.0, sq * jump, 0.0),
    ])
}

/// Phase damping on one qubit.
pub fn pd_channel(lambda: f64) -> Result<KrausChannel> {
    check_unit_interval("lambda", lambda)?;
    KrausChannel::new(vec![
        real2(1.0, 0.0, 0.0, (1.0 - lambda).sqrt()),
        real2(0.0, 0.0, 0.0, lambda.sqrt()),
    ])
}

/// Phase damping followed by generalized amplitude damping.
pub fn pad_channel(p: f64, gamma: f64, lambda: f64) -> Result<KrausChannel> {
    let gad = gad_channel(p, gamma)?;
    let pd = pd_channel(lambda)?;
    pd.then(&gad)
}

/// `p I / D + (1 - p) rho`.
pub fn dep_apply(rho: &DensityMatrix, p: f64, dim: usize) -> Result<DensityMatrix> {
    check_unit_interval("p", p)?;
    if dim != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: dim,
        });
    }
    let mixed = ComplexMatrix::identity(dim).scale(p / dim as f64);
    DensityMatrix::new_lenient(&mixed + &rho.matrix().scale(1.0 - p))
}

pub fn apply_channel(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if ch.dim != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim,
            found: rho.dim(),
        });
    }
    let mut out = ComplexMatrix::zeros(ch.dim);
    for op in &ch.ops {
        out = &out + &op.conjugate(rho.matrix());
    }
    DensityMatrix::new_lenient(out)
}

/// Parameters of one of the four supported noise mechanisms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum NoiseSpec {
    Gad {
        p: f64,
        gamma: f64,
    },
    Pd {
        lambda: f64,
    },
    Pad {
        p: f64,
        gamma: f64,
        lambda: f64,
    },
    Dep {
        p: f64,
        #[serde(rename = "D")]
        dim: usize,
    },
}

/// The single parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseParam {
    P,
    Gamma,
    Lambda,
}

impl fmt::Display for NoiseParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseParam::P => "p",
            NoiseParam::Gamma => "gamma",
            NoiseParam::Lambda => "lambda",
        })
    }
}

impl std::str::FromStr for NoiseParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "p" => Ok(NoiseParam::P),
            "gamma" => Ok(NoiseParam::Gamma),
            "lambda" => Ok(NoiseParam::Lambda),
            other => Err(format!("unknown noise parameter `{other}` (expected p, gamma or lambda)")),
        }
    }
}

impl NoiseSpec {
    pub fn name(&self) -> &'static str {
        match self {
            NoiseSpec::Gad { .. } => "gad",
            NoiseSpec::Pd { .. } => "pd",
            NoiseSpec::Pad { .. } => "pad",
            NoiseSpec::Dep { .. } => "dep",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseSpec::Gad { p, gamma } => {
                check_unit_interval("p", p)?;
                check_unit_interval("gamma", gamma)
            }
            NoiseSpec::Pd { lambda } => check_unit_interval("lambda", lambda),
            NoiseSpec::Pad { p, gamma, lambda } => {
                check_unit_interval("p", p)?;
                check_unit_interval("gamma", gamma)?;
                check_unit_interval("lambda", lambda)
            }
            NoiseSpec::Dep { p, dim } => {
                check_unit_interval("p", p)?;
                if dim == 0 {
                    return Err(Error::ParamOutOfRange {
                        name: "D",
                        value: 0.0,
                        expected: ">= 1",
                    });
                }
                Ok(())
            }
        }
    }

    /// Single-qubit Kraus form; `None` for depolarizing noise, which is
    /// applied through its affine form.
    pub fn kraus_channel(&self) -> Result<Option<KrausChannel>> {
        match *self {
            NoiseSpec::Gad { p, gamma } => gad_channel(p, gamma).map(Some),
            NoiseSpec::Pd { lambda } => pd_channel(lambda).map(Some),
            NoiseSpec::Pad { p, gamma, lambda } => pad_channel(p, gamma, lambda).map(Some),
            NoiseSpec::Dep { .. } => {
                self.validate()?;
                Ok(None)
            }
        }
    }

    pub fn param(&self, param: NoiseParam) -> Option<f64> {
        match (*self, param) {
            (NoiseSpec::Gad { p, .. } | NoiseSpec::Pad { p, .. } | NoiseSpec::Dep { p, .. }, NoiseParam::P) => Some(p),
            (NoiseSpec::Gad { gamma, .. } | NoiseSpec::Pad { gamma, .. }, NoiseParam::Gamma) => Some(gamma),
            (NoiseSpec::Pd { lambda } | NoiseSpec::Pad { lambda, .. }, NoiseParam::Lambda) => Some(lambda),
            _ => None,
        }
    }

    /// Copy of `self` with one parameter replaced.
    pub fn with_param(&self, param: NoiseParam, value: f64) -> Result<NoiseSpec> {
        if self.param(param).is_none() {
            return Err(Error::ParamOutOfRange {
                name: "param",
                value,
                expected: "a parameter of the chosen mechanism",
            });
        }
        let mut spec = *self;
        match (&mut spec, param) {
            (NoiseSpec::Gad { p, .. } | NoiseSpec::Pad { p, .. } | NoiseSpec::Dep { p, .. }, NoiseParam::P) => *p = value,
            (NoiseSpec::Gad { gamma, .. } | NoiseSpec::Pad { gamma, .. }, NoiseParam::Gamma) => *gamma = value,
            (NoiseSpec::Pd { lambda } | NoiseSpec::Pad { lambda, .. }, NoiseParam::Lambda) => *lambda = value,
            _ => unreachable!(),
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Applies the mechanism's noise to `rho`, on qubit 0 for multi-qubit states.
pub fn apply_noise(spec: &NoiseSpec, rho: &DensityMatrix) -> Result<DensityMatrix> {
    apply_noise_on(spec, rho, 0)
}

pub fn apply_noise_on(spec: &NoiseSpec, rho: &DensityMatrix, qubit: usize) -> Result<DensityMatrix> {
    match spec.kraus_channel()? {
        None => {
            let NoiseSpec::Dep { p, dim } = *spec else {
                unreachable!("only depolarizing noise lacks a Kraus form")
            };
            dep_apply(rho, p, dim)
        }
        Some(ch) => {
            let dim = rho.dim();
            if dim == 2 && qubit == 0 {
                return apply_channel(&ch, rho);
            }
            if !dim.is_power_of_two() || dim < 2 {
                return Err(Error::DimensionMismatch { expected: 2, found: dim });
            }
            let n_qubits = dim.trailing_zeros() as usize;
            apply_channel(&ch.embed(n_qubits, qubit)?, rho)
        }
    }
}

/// JSON channel document. Mechanisms use their parameters; arbitrary
/// channels list their Kraus operators.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ChannelDocument {
    Gad {
        p: f64,
        gamma: f64,
    },
    Pd {
        lambda: f64,
    },
    Pad {
        p: f64,
        gamma: f64,
        lambda: f64,
    },
    Dep {
        p: f64,
        #[serde(rename = "D")]
        dim: usize,
    },
    Kraus {
        ops: Vec<ComplexMatrix>,
    },
}

impl ChannelDocument {
    pub fn noise_spec(&self) -> Option<NoiseSpec> {
        match *self {
            ChannelDocument::Gad { p, gamma } => Some(NoiseSpec::Gad { p, gamma }),
            ChannelDocument::Pd { lambda } => Some(NoiseSpec::Pd { lambda }),
            ChannelDocument::Pad { p, gamma, lambda } => Some(NoiseSpec::Pad { p, gamma, lambda }),
            ChannelDocument::Dep { p, dim } => Some(NoiseSpec::Dep { p, dim }),
            ChannelDocument::Kraus { .. } => None,
        }
    }
}

impl From<NoiseSpec> for ChannelDocument {
    fn from(spec: NoiseSpec) -> Self {
        match spec {
            NoiseSpec::Gad { p, gamma } => ChannelDocument::Gad { p, gamma },
            NoiseSpec::Pd { lambda } => ChannelDocument::Pd { lambda },
            NoiseSpec::Pad { p, gamma, lambda } => ChannelDocument::Pad { p, gamma, lambda },
            NoiseSpec::Dep { p, dim } => ChannelDocument::Dep { p, dim },
        }
    }
}

/// Outcome of a CPTP audit.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelAudit {
    pub dim: usize,
    /// `None` for channels without a Kraus form (depolarizing).
    pub completeness_deviation: Option<f64>,
    pub max_trace_deviation: f64,
    pub min_output_eigenvalue: f64,
    pub probes: usize,
    pub passed: bool,
}

/// Probe states whose span is all Hermitian matrices: basis projectors and
/// the `|+>`, `|+i>` superpositions of every basis pair.
pub fn probe_states(dim: usize) -> Vec<ComplexMatrix> {
    let zero = Complex64::new(0.0, 0.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::new();
    for i in 0..dim {
        let mut v = vec![zero; dim];
        v[i] = Complex64::new(1.0, 0.0);
        out.push(ComplexMatrix::outer(&v));
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            for phase in [Complex64::new(h, 0.0), Complex64::new(0.0, h)] {
                let mut v = vec![zero; dim];
                v[i] = Complex64::new(h, 0.0);
                v[j] = phase;
                out.push(ComplexMatrix::outer(&v));
            }
        }
    }
    out
}

fn audit_outputs(
    dim: usize,
    completeness: Option<f64>,
    map: impl Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
) -> Result<ChannelAudit> {
    let probes = probe_states(dim);
    let mut max_trace_deviation = 0.0_f64;
    let mut min_output_eigenvalue = f64::INFINITY;
    for probe in &probes {
        let out = map(probe)?;
        max_trace_deviation = max_trace_deviation.max((out.trace().re - 1.0).abs());
        let eig = hermitian_eigenvalues(&out.hermitian_part())?;
        min_output_eigenvalue = min_output_eigenvalue.min(eig[0]);
    }
    let passed = completeness.is_none_or(|d| d <= TOL.completeness)
        && max_trace_deviation <= TOL.completeness
        && min_output_eigenvalue >= -TOL.recon;
    Ok(ChannelAudit {
        dim,
        completeness_deviation: completeness,
        max_trace_deviation,
        min_output_eigenvalue,
        probes: probes.len(),
        passed,
    })
}

/// Audits raw Kraus operators without requiring them to be valid.
pub fn audit_kraus(ops: &[ComplexMatrix]) -> Result<ChannelAudit> {
    let deviation = completeness_deviation(ops)?;
    let dim = ops[0].dim();
    audit_outputs(dim, Some(deviation), |rho| {
        let mut out = ComplexMatrix::zeros(dim);
        for op in ops {
            out = &out + &op.conjugate(rho);
        }
        Ok(out)
    })
}

/// Audits a mechanism acting on states of dimension `dim`.
pub fn audit_noise(spec: &NoiseSpec, dim: usize) -> Result<ChannelAudit> {
    match spec.kraus_channel()? {
        Some(ch) => {
            let ch = if dim == 2 {
                ch
            } else {
                if !dim.is_power_of_two() {
                    return Err(Error::DimensionMismatch { expected: 2, found: dim });
                }
                ch.embed(dim.trailing_zeros() as usize, 0)?
            };
            audit_kraus(ch.kraus_ops())
        }
        None => {
            let NoiseSpec::Dep { p, dim: d } = *spec else { unreachable!() };
            if d != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: d });
            }
            audit_outputs(dim, None, |rho| {
                let mixed = ComplexMatrix::identity(dim).scale(p / dim as f64);
                Ok(&mixed + &rho.scale(1.0 - p))
            })
        }
    }
}
