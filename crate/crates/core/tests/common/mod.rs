//! Dense-matrix oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use quenchlab::statevector::StateVector;
use quenchlab::{build_couplings, HamiltonianSpec};

/// `H` built from explicit Pauli strings in the z basis.
pub fn dense_hamiltonian(spec: &HamiltonianSpec) -> DMatrix<f64> {
    let l = spec.sites;
    let dim = 1usize << l;
    let couplings = build_couplings(spec).unwrap();
    let mut h = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        h[(k, k)] += spec.field * (l as f64 - 2.0 * k.count_ones() as f64);
        for (i, j, c) in couplings.bonds() {
            h[(k ^ (1 << i) ^ (1 << j), k)] -= c;
        }
    }
    h
}

/// Exact `exp(-i H t)` applied through the spectral decomposition.
pub struct DenseEvolution {
    eig: SymmetricEigen<f64, nalgebra::Dyn>,
}

impl DenseEvolution {
    pub fn new(spec: &HamiltonianSpec) -> Self {
        Self {
            eig: SymmetricEigen::new(dense_hamiltonian(spec)),
        }
    }

    pub fn evolve(&self, state: &StateVector, t: f64) -> StateVector {
        let v = &self.eig.eigenvectors;
        let psi = DVector::from_iterator(state.dim(), state.amplitudes().iter().copied());
        let vc = v.map(|x| Complex64::new(x, 0.0));
        let mut coeffs = vc.transpose() * psi;
        for (c, e) in coeffs.iter_mut().zip(self.eig.eigenvalues.iter()) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        let out = vc * coeffs;
        StateVector::from_amplitudes(state.sites(), out.iter().copied().collect()).unwrap()
    }
}

pub fn max_amplitude_error(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
