//! Ground states by Lanczos iteration and the Binder cumulant of the
//! x-magnetisation.
//!
//! The Hamiltonian is real in the z basis, so vectors are `f64`. The field
//! term is diagonal there; the Ising term is applied in the x basis through
//! a pair of Walsh-Hadamard transforms. Iteration is restricted to the
//! parity sector that contains the ground state.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{build_couplings, HamiltonianSpec};
use crate::numeric::pairwise_sum;
use crate::scaling::{
    aggregate_crossings, pairwise_crossings, CriticalPointEstimate, CrossingDirection, EstimateMethod,
};
use crate::statevector::{fwht_unnormalized, MemoryBudget};

pub const MAX_ITERATIONS: usize = 500;
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// Eigenvalue of `prod_i sigma^z_i`, i.e. parity of the number of down
/// spins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn contains(self, index: usize) -> bool {
        index.count_ones().is_multiple_of(2) == (self == Parity::Even)
    }

    /// Sector of the all-down state, which the field favours.
    pub fn ground(sites: usize) -> Self {
        if sites.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Matrix-free `H` acting on real z-basis vectors.
pub struct Hamiltonian {
    sites: usize,
    field: f64,
    /// Ising energies in the x basis, pre-scaled by `2^{-L}`.
    ising: Vec<f64>,
}

impl Hamiltonian {
    pub fn new(spec: &HamiltonianSpec) -> Result<Self> {
        spec.validate()?;
        let couplings = build_couplings(spec)?;
        let scale = ((1usize << spec.sites) as f64).recip();
        let mut ising = couplings.ising_energy_table();
        ising.par_iter_mut().for_each(|e| *e *= scale);
        Ok(Self {
            sites: spec.sites,
            field: spec.field,
            ising,
        })
    }

    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    /// `out = H v`.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        out.copy_from_slice(v);
        fwht_unnormalized(out);
        out.par_iter_mut().zip(self.ising.par_iter()).for_each(|(o, e)| *o *= e);
        fwht_unnormalized(out);
        let l = self.sites as f64;
        let b = self.field;
        out.par_iter_mut()
            .zip(v.par_iter())
            .enumerate()
            .for_each(|(k, (o, x))| *o += b * (l - 2.0 * k.count_ones() as f64) * x);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let partial: Vec<f64> = a
        .par_chunks(4096)
        .zip(b.par_chunks(4096))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum())
        .collect();
    pairwise_sum(&partial)
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.par_iter_mut().zip(x.par_iter()).for_each(|(y, x)| *y += alpha * x);
}

fn scale(v: &mut [f64], s: f64) {
    v.par_iter_mut().for_each(|x| *x *= s);
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub sites: usize,
    pub energy: f64,
    /// Normalised z-basis amplitudes.
    pub vector: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Lowest eigenpair in a parity sector, by Lanczos with full
/// reorthogonalisation. The start vector is uniform on the sector with a
/// small deterministic modulation.
pub fn lanczos_ground_state(h: &Hamiltonian, parity: Parity) -> Result<GroundState> {
    let dim = h.dim();
    let mut v0: Vec<f64> = (0..dim)
        .into_par_iter()
        .map(|k| {
            if parity.contains(k) {
                1.0 + 1e-2 * ((k as f64) * 0.618_033_988_749_895).fract()
            } else {
                0.0
            }
        })
        .collect();
    let n0 = dot(&v0, &v0).sqrt();
    scale(&mut v0, n0.recip());

    let project = |w: &mut [f64]| {
        w.par_iter_mut().enumerate().for_each(|(k, x)| {
            if !parity.contains(k) {
                *x = 0.0;
            }
        })
    };

    let mut basis: Vec<Vec<f64>> = vec![v0];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; dim];
    let mut last_residual = f64::INFINITY;

    for m in 0..MAX_ITERATIONS {
        h.apply(&basis[m], &mut w);
        project(&mut w);
        let a = dot(&basis[m], &w);
        alphas.push(a);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                axpy(-c, q, &mut w);
            }
        }
        let b = dot(&w, &w).sqrt();

        let k = alphas.len();
        let t = DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                alphas[i]
            } else if i + 1 == j {
                betas[i]
            } else if j + 1 == i {
                betas[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let imin = eig.eigenvalues.imin();
        let residual = (b * eig.eigenvectors[(k - 1, imin)]).abs();
        last_residual = residual;

        let exhausted = b <= 1e-14 * a.abs().max(1.0);
        if residual <= RESIDUAL_TOLERANCE || exhausted {
            let mut vector = vec![0.0; dim];
            for (i, q) in basis.iter().enumerate() {
                axpy(eig.eigenvectors[(i, imin)], q, &mut vector);
            }
            let nv = dot(&vector, &vector).sqrt();
            scale(&mut vector, nv.recip());
            return Ok(GroundState {
                sites: h.sites,
                energy: eig.eigenvalues[imin],
                vector,
                iterations: m + 1,
                residual,
            });
        }
        betas.push(b);
        let mut next = std::mem::replace(&mut w, vec![0.0; dim]);
        scale(&mut next, b.recip());
        basis.push(next);
    }
    Err(Error::NotConverged {
        iterations: MAX_ITERATIONS,
        residual: last_residual,
    })
}

pub fn ground_state(spec: &HamiltonianSpec) -> Result<GroundState> {
    MemoryBudget::from_env().check(spec.sites)?;
    let h = Hamiltonian::new(spec)?;
    lanczos_ground_state(&h, Parity::ground(spec.sites))
}

/// `U_4 = 1 - <M^4> / (3 <M^2>^2)` with `M = (1/L) sum_i sigma^x_i`.
pub fn binder_cumulant(vector: &[f64], sites: usize) -> Result<f64> {
    let dim = 1usize << sites;
    if vector.len() != dim {
        return Err(Error::LengthMismatch {
            expected: dim,
            found: vector.len(),
        });
    }
    let mut x = vector.to_vec();
    fwht_unnormalized(&mut x);
    let l = sites as f64;
    let moments: Vec<(f64, f64)> = x
        .par_chunks(4096)
        .enumerate()
        .map(|(c, chunk)| {
            chunk.iter().enumerate().fold((0.0, 0.0), |(m2, m4), (k, a)| {
                let idx = c * 4096 + k;
                let m = (l - 2.0 * idx.count_ones() as f64) / l;
                let p = a * a;
                (m2 + p * m * m, m4 + p * m.powi(4))
            })
        })
        .collect();
    let norm = dot(vector, vector) * dim as f64;
    let m2 = pairwise_sum(&moments.iter().map(|m| m.0).collect::<Vec<_>>()) / norm;
    let m4 = pairwise_sum(&moments.iter().map(|m| m.1).collect::<Vec<_>>()) / norm;
    if m2 < 1e-12 {
        return Err(Error::DegenerateDenominator { m2 });
    }
    Ok(1.0 - m4 / (3.0 * m2 * m2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinderCurve {
    pub sites: usize,
    pub b_grid: Vec<f64>,
    pub u4: Vec<f64>,
}

/// Ground-state Binder cumulant across a field grid.
pub fn binder_curve(template: &HamiltonianSpec, b_grid: &[f64]) -> Result<BinderCurve> {
    MemoryBudget::from_env().check(template.sites)?;
    let u4 = b_grid
        .par_iter()
        .map(|&b| {
            let gs = ground_state(&template.with_field(b))?;
            binder_cumulant(&gs.vector, gs.sites)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BinderCurve {
        sites: template.sites,
        b_grid: b_grid.to_vec(),
        u4,
    })
}

/// Ground-state critical field from pairwise crossings of Binder curves for
/// different sizes on a shared grid.
pub fn binder_crossing(curves: &[BinderCurve]) -> Result<CriticalPointEstimate> {
    if curves.len() < 2 {
        return Err(Error::InvalidConfig("need Binder curves for at least two sizes".into()));
    }
    let grid = &curves[0].b_grid;
    if curves.iter().any(|c| &c.b_grid != grid) {
        return Err(Error::InvalidConfig("Binder curves must share a field grid".into()));
    }
    let labelled: Vec<(f64, &[f64])> = curves.iter().map(|c| (c.sites as f64, c.u4.as_slice())).collect();
    let pairs = pairwise_crossings(grid, &labelled, CrossingDirection::Falling)?;
    Ok(aggregate_crossings(&pairs, EstimateMethod::BinderCrossing))
}
