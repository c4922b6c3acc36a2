//! Dense `2^L` state-vector simulation of quench dynamics.
//!
//! Amplitudes live in the z-product basis; site 0 is the least significant
//! bit of an index. The Ising term is diagonal in the x-product basis, which
//! is reached with one Walsh-Hadamard transform.

mod checkpoint;
mod fwht;
mod quench;
mod trotter;

pub use checkpoint::{read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use fwht::{fwht, fwht_in_place, Butterfly};
pub use quench::{run_quench, CorrelatorSeries, MemoryBudget, Quench, QuenchRecord};
pub use trotter::{trotter_step, PhaseTable, Propagator, TrotterPlan};

pub(crate) use fwht::fwht_unnormalized;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{CouplingMatrix, HamiltonianSpec};
use crate::numeric::pairwise_sum;

const REDUCE_CHUNK: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    sites: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(sites: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let expected = 1usize << sites;
        if amplitudes.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: amplitudes.len(),
            });
        }
        Ok(Self { sites, amplitudes })
    }

    /// Computational basis state `|index>`.
    pub fn basis(sites: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << sites];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { sites, amplitudes }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        expectation_diagonal(&self.amplitudes, |_| 1.0).sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            let inv = n.recip();
            self.amplitudes.par_iter_mut().for_each(|a| *a *= inv);
        }
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        let partial: Vec<Complex64> = self
            .amplitudes
            .par_chunks(REDUCE_CHUNK)
            .zip(other.amplitudes.par_chunks(REDUCE_CHUNK))
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum())
            .collect();
        let re: Vec<f64> = partial.iter().map(|c| c.re).collect();
        let im: Vec<f64> = partial.iter().map(|c| c.im).collect();
        Complex64::new(pairwise_sum(&re), pairwise_sum(&im))
    }

    /// The same state expressed in the x-product basis.
    pub fn to_x_basis(&self) -> StateVector {
        let mut out = self.clone();
        fwht(&mut out);
        out
    }
}

/// `sum_k |a_k|^2 f(k)` with a fixed reduction tree.
pub(crate) fn expectation_diagonal<F>(amplitudes: &[Complex64], f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let partial: Vec<f64> = amplitudes
        .par_chunks(REDUCE_CHUNK)
        .enumerate()
        .map(|(c, chunk)| {
            let base = c * REDUCE_CHUNK;
            chunk
                .iter()
                .enumerate()
                .map(|(k, a)| a.norm_sqr() * f(base + k))
                .sum::<f64>()
        })
        .collect();
    pairwise_sum(&partial)
}

/// `|-> ... ->`: every spin along +x, i.e. the uniform superposition.
pub fn prepare_polarized_x(sites: usize) -> StateVector {
    let dim = 1usize << sites;
    let a = (dim as f64).sqrt().recip();
    StateVector {
        sites,
        amplitudes: vec![Complex64::new(a, 0.0); dim],
    }
}

#[inline]
fn rotate_one(x: usize, sites: usize) -> usize {
    let mask = (1usize << sites) - 1;
    ((x << 1) | (x >> (sites - 1))) & mask
}

/// `(1/L) sum_i s_i s_{i+1}` for an x-basis configuration on a ring.
#[inline]
pub(crate) fn nearest_neighbor_bond_average(x: usize, sites: usize) -> f64 {
    let broken = (x ^ rotate_one(x, sites)).count_ones() as f64;
    (sites as f64 - 2.0 * broken) / sites as f64
}

/// Same as [`measure_g`] but on amplitudes already in the x basis.
pub(crate) fn g_from_x_basis(x_amplitudes: &[Complex64], sites: usize) -> f64 {
    expectation_diagonal(x_amplitudes, |x| nearest_neighbor_bond_average(x, sites))
}

/// Nearest-neighbour correlator `(1/L) sum_i <X_i X_{i+1}>` with periodic
/// wraparound, evaluated in the x basis.
pub fn measure_g(state: &StateVector, spec: &HamiltonianSpec) -> Result<f64> {
    if state.sites != spec.sites {
        return Err(Error::LengthMismatch {
            expected: spec.sites,
            found: state.sites,
        });
    }
    let x = state.to_x_basis();
    Ok(g_from_x_basis(&x.amplitudes, state.sites))
}

/// `<X_i X_{i+1}>` for each bond `i = 0..L` (the last bond wraps around).
pub fn bond_correlators(state: &StateVector) -> Vec<f64> {
    let l = state.sites;
    let x = state.to_x_basis();
    (0..l)
        .map(|i| {
            let j = (i + 1) % l;
            expectation_diagonal(
                &x.amplitudes,
                |k| {
                    if ((k >> i) ^ (k >> j)) & 1 == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                },
            )
        })
        .collect()
}

/// `<H>` for the Ising couplings plus the transverse field.
pub fn energy(state: &StateVector, couplings: &CouplingMatrix, field: f64) -> f64 {
    let l = state.sites;
    let zeeman = expectation_diagonal(&state.amplitudes, |k| field * (l as f64 - 2.0 * k.count_ones() as f64));
    let x = state.to_x_basis();
    let kernel = couplings.energy_kernel();
    let ising = expectation_diagonal(&x.amplitudes, |k| kernel.energy(k));
    zeeman + ising
}
