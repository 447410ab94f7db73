// SPDX-License-Identifier: Apache-2.0

//! Rényi, Kullback-Leibler and max divergences between outcome distributions.
//!
//! All logarithms are natural. Infinite divergences (support violations) are
//! reported as `f64::INFINITY`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::measurement::ProbVector;

/// Orders at or above this are evaluated in log space.
const LOG_SPACE_ORDER: f64 = 32.0;

/// Order of a Rényi divergence: the KL limit, a finite order above one, or
/// the max-divergence endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RenyiOrder {
    One,
    Finite(f64),
    Infinity,
}

impl RenyiOrder {
    /// A finite order; must be strictly greater than one.
    pub fn finite(alpha: f64) -> Result<Self> {
        if alpha > 1.0 && alpha.is_finite() {
            Ok(RenyiOrder::Finite(alpha))
        } else {
            Err(Error::InvalidOrder(alpha))
        }
    }

    /// Maps `1` to [`RenyiOrder::One`] and `+inf` to [`RenyiOrder::Infinity`].
    pub fn from_f64(alpha: f64) -> Result<Self> {
        if alpha == 1.0 {
            Ok(RenyiOrder::One)
        } else if alpha == f64::INFINITY {
            Ok(RenyiOrder::Infinity)
        } else {
            Self::finite(alpha)
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            RenyiOrder::One => 1.0,
            RenyiOrder::Finite(a) => a,
            RenyiOrder::Infinity => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, RenyiOrder::Infinity)
    }
}

impl PartialOrd for RenyiOrder {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value().partial_cmp(&other.value())
    }
}

impl fmt::Display for RenyiOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RenyiOrder::One => f.write_str("1"),
            RenyiOrder::Finite(a) => write!(f, "{a}"),
            RenyiOrder::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for RenyiOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(RenyiOrder::Infinity),
            text => {
                let alpha: f64 = text.parse().map_err(|_| Error::InvalidOrder(f64::NAN))?;
                Self::from_f64(alpha)
            }
        }
    }
}

impl Serialize for RenyiOrder {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RenyiOrder::Infinity => serializer.serialize_str("inf"),
            other => serializer.serialize_f64(other.value()),
        }
    }
}

impl<'de> Deserialize<'de> for RenyiOrder {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(a) => RenyiOrder::from_f64(a),
            Raw::Text(t) => t.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

fn check_lengths(p: &ProbVector, q: &ProbVector) -> Result<()> {
    if p.len() == q.len() {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        })
    }
}

fn support_violated(p: &ProbVector, q: &ProbVector) -> bool {
    p.probs().iter().zip(q.probs()).any(|(&pm, &qm)| pm > 0.0 && qm == 0.0)
}

/// `D_alpha(P || Q)`.
///
/// For finite orders this is `ln(sum_m P_m^alpha Q_m^(1-alpha)) / (alpha - 1)`;
/// outcomes with `P_m = 0` contribute nothing.
pub fn renyi(p: &ProbVector, q: &ProbVector, order: RenyiOrder) -> Result<f64> {
    check_lengths(p, q)?;
    let alpha = match order {
        RenyiOrder::One => return kl(p, q),
        RenyiOrder::Infinity => return max_divergence(p, q),
        RenyiOrder::Finite(a) => RenyiOrder::finite(a)?.value(),
    };
    if support_violated(p, q) {
        return Ok(f64::INFINITY);
    }
    let terms = p.probs().iter().zip(q.probs()).filter(|(&pm, _)| pm > 0.0);
    let value = if alpha >= LOG_SPACE_ORDER {
        let logs: Vec<f64> = terms.map(|(&pm, &qm)| alpha * pm.ln() + (1.0 - alpha) * qm.ln()).collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln();
        lse / (alpha - 1.0)
    } else {
        let sum: f64 = terms.map(|(&pm, &qm)| pm * (pm / qm).powf(alpha - 1.0)).sum();
        sum.ln() / (alpha - 1.0)
    };
    Ok(value.max(0.0))
}

/// `sum_m P_m ln(P_m / Q_m)`.
pub fn kl(p: &ProbVector, q: &ProbVector) -> Result<f64> {
    check_lengths(p, q)?;
    if support_violated(p, q) {
        return Ok(f64::INFINITY);
    }
    let value: f64 = p
        .probs()
        .iter()
        .zip(q.probs())
        .filter(|(&pm, _)| pm > 0.0)
        .map(|(&pm, &qm)| pm * (pm / qm).ln())
        .sum();
    Ok(value.max(0.0))
}

/// `max_{m : P_m > 0} ln(P_m / Q_m)`.
pub fn max_divergence(p: &ProbVector, q: &ProbVector) -> Result<f64> {
    check_lengths(p, q)?;
    if support_violated(p, q) {
        return Ok(f64::INFINITY);
    }
    let value = p
        .probs()
        .iter()
        .zip(q.probs())
        .filter(|(&pm, _)| pm > 0.0)
        .map(|(&pm, &qm)| (pm / qm).ln())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(value.max(0.0))
}

/// Row-stochastic matrix: row `i` is the output distribution for input `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticKernel {
    rows: Vec<Vec<f64>>,
    outputs: usize,
}

impl StochasticKernel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let outputs = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || outputs == 0 {
            return Err(Error::NotStochastic {
                row: 0,
                reason: "kernel is empty".into(),
            });
        }
        for (row, entries) in rows.iter().enumerate() {
            if entries.len() != outputs {
                return Err(Error::NotStochastic {
                    row,
                    reason: format!("has {} entries, expected {outputs}", entries.len()),
                });
            }
            if let Some(bad) = entries.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
                return Err(Error::NotStochastic {
                    row,
                    reason: format!("entry {bad} is not a probability"),
                });
            }
            let sum: f64 = entries.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::NotStochastic {
                    row,
                    reason: format!("sums to {sum}"),
                });
            }
        }
        Ok(Self { rows, outputs })
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { rows, outputs: n }
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

/// Pushforward `P K` of a distribution through a stochastic kernel.
pub fn postprocess(p: &ProbVector, kernel: &StochasticKernel) -> Result<ProbVector> {
    if p.len() != kernel.inputs() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: kernel.inputs(),
        });
    }
    let mut out = vec![0.0; kernel.outputs];
    for (&pi, row) in p.probs().iter().zip(&kernel.rows) {
        for (o, &k) in out.iter_mut().zip(row) {
            *o += pi * k;
        }
    }
    ProbVector::normalized(out)
}
