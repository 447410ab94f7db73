// SPDX-License-Identifier: Apache-2.0

//! Random states, measurements and distributions for property checks and
//! the randomized budget search.
//!
//! All generators take the caller's RNG so runs are reproducible from a seed.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::divergence::StochasticKernel;
use crate::linalg::{hermitian_eig, ComplexMatrix};
use crate::measurement::{Povm, ProbVector};
use crate::state::{trace_distance, DensityMatrix, NeighborPair};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let data = (0..dim * dim)
        .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
        .collect();
    ComplexMatrix::new(dim, data).expect("gaussian entries are finite")
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ginibre(rng, dim).hermitian_part()
}

/// `G G^dagger` for a Ginibre `G`; full rank with probability one.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = ginibre(rng, dim);
    (&g * &g.adjoint()).hermitian_part()
}

/// Haar-ish unitary `exp(iH)` for a random Hermitian `H`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let h = random_hermitian(rng, dim);
    let eig = hermitian_eig(&h).expect("hermitian by construction");
    let mut u = ComplexMatrix::zeros(dim);
    for (k, &lambda) in eig.values.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, lambda);
        for i in 0..dim {
            for j in 0..dim {
                u[(i, j)] += eig.vectors[(i, k)] * phase * eig.vectors[(j, k)].conj();
            }
        }
    }
    u
}

/// Mixed state from the induced (Hilbert-Schmidt) measure.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let w = random_psd(rng, dim);
    let tr = w.trace().re;
    DensityMatrix::new_lenient(w.scale(1.0 / tr)).expect("normalized PSD matrix")
}

/// Qubit state with a Bloch vector uniform in the unit ball.
pub fn random_qubit_state<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    let dir = [gaussian(rng), gaussian(rng), gaussian(rng)];
    let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let radius = rng.random::<f64>().cbrt();
    let [x, y, z] = dir.map(|c| c * radius / norm);
    qubit_from_bloch(x, y, z)
}

/// `(I + x X + y Y + z Z) / 2`.
pub fn qubit_from_bloch(x: f64, y: f64, z: f64) -> DensityMatrix {
    let m = ComplexMatrix::from_rows(vec![
        vec![Complex64::new((1.0 + z) / 2.0, 0.0), Complex64::new(x / 2.0, -y / 2.0)],
        vec![Complex64::new(x / 2.0, y / 2.0), Complex64::new((1.0 - z) / 2.0, 0.0)],
    ])
    .expect("2x2");
    DensityMatrix::new_lenient(m).expect("Bloch vector inside the unit ball")
}

/// POVM with `outcomes` elements: `M_i = S^{-1/2} A_i S^{-1/2}` where the
/// `A_i` are random PSD matrices and `S = sum_i A_i`.
pub fn random_povm<R: Rng + ?Sized>(rng: &mut R, dim: usize, outcomes: usize) -> Povm {
    let parts: Vec<ComplexMatrix> = (0..outcomes).map(|_| random_psd(rng, dim)).collect();
    let total = parts.iter().fold(ComplexMatrix::zeros(dim), |acc, a| &acc + a);
    let inv_sqrt = hermitian_eig(&total)
        .expect("hermitian by construction")
        .map_spectrum(|x| 1.0 / x.sqrt());
    let elements = parts
        .iter()
        .map(|a| (&(&inv_sqrt * a) * &inv_sqrt).hermitian_part())
        .collect();
    Povm::new(elements).expect("normalized random POVM")
}

/// Dirichlet(1, ..., 1) draw over `n` outcomes.
pub fn random_prob_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ProbVector {
    let weights: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln() + 1e-12).collect();
    ProbVector::normalized(weights).expect("positive weights")
}

pub fn random_kernel<R: Rng + ?Sized>(rng: &mut R, inputs: usize, outputs: usize) -> StochasticKernel {
    let rows = (0..inputs)
        .map(|_| random_prob_vector(rng, outputs).probs().to_vec())
        .collect();
    StochasticKernel::new(rows).expect("rows are distributions")
}

/// A pair at trace distance at most `d`: `sigma` is pulled from a random
/// state `rho` toward another random state. Half of the draws sit exactly on
/// the bound (when reachable).
pub fn random_neighbor_pair<R: Rng + ?Sized>(rng: &mut R, dim: usize, d: f64) -> NeighborPair {
    let draw = |rng: &mut R| {
        if dim == 2 {
            random_qubit_state(rng)
        } else {
            random_density_matrix(rng, dim)
        }
    };
    let rho = draw(rng);
    let target = draw(rng);
    let far = trace_distance(&rho, &target).expect("same dimension");
    let reach = if far > 0.0 { (d / far).min(1.0) } else { 0.0 };
    let t = if rng.random::<bool>() { reach } else { reach * rng.random::<f64>() };
    let sigma = target.mix(&rho, t).expect("t in [0, 1]");
    NeighborPair::new(rho, sigma, d).expect("distance is t * far <= d")
}
