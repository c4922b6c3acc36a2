//! Fourth-order split-operator propagation.
//!
//! The second-order base step is `F(tau/2) W I(tau) W F(tau/2)`, where `F`
//! is the field phase (diagonal in z), `I` the Ising phase (diagonal in x)
//! and `W` the Walsh-Hadamard transform. Five base steps with weights
//! `(p, p, 1-4p, p, p)`, `p = 1/(4 - 4^{1/3})`, give the fourth-order
//! triple-jump composition. Neighbouring field half-kicks are merged, so a
//! full step costs six field kicks, five Ising kicks and ten transforms.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{fwht_unnormalized, StateVector};
use crate::error::{Error, Result};
use crate::model::{build_couplings, EnergyKernel, HamiltonianSpec};

/// Above this size the Ising phases are evaluated on the fly instead of
/// being stored as two `2^L` tables.
const MAX_TABULATED_SITES: usize = 24;

const KICK_CHUNK: usize = 1 << 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrotterPlan {
    pub dt: f64,
    pub stage_coefficients: [f64; 5],
}

impl TrotterPlan {
    pub fn fourth_order(dt: f64) -> Self {
        let p = 1.0 / (4.0 - 4f64.cbrt());
        Self {
            dt,
            stage_coefficients: [p, p, 1.0 - 4.0 * p, p, p],
        }
    }

    pub fn order(&self) -> usize {
        4
    }

    pub fn is_palindromic(&self) -> bool {
        let c = &self.stage_coefficients;
        (0..5).all(|k| c[k] == c[4 - k])
    }

    fn outer(&self) -> f64 {
        self.stage_coefficients[0]
    }

    fn middle(&self) -> f64 {
        self.stage_coefficients[2]
    }
}

/// Field phase for `B sum_i Z_i`, which only depends on the popcount.
fn field_phases(sites: usize, field: f64, tau: f64) -> Vec<Complex64> {
    (0..=sites)
        .map(|pc| {
            let e = field * (sites as f64 - 2.0 * pc as f64);
            Complex64::from_polar(1.0, -e * tau)
        })
        .collect()
}

enum IsingPhases {
    /// Phases for the outer and middle stage weights, each including the
    /// `2^{-L}` normalisation of the two surrounding transforms.
    Tabulated {
        outer: Vec<Complex64>,
        middle: Vec<Complex64>,
    },
    Streamed {
        kernel: EnergyKernel,
        outer_tau: f64,
        middle_tau: f64,
        norm: f64,
    },
}

/// Diagonal phases of one propagation step for a given Hamiltonian.
pub struct PhaseTable {
    sites: usize,
    /// Field kicks by popcount for `p/2`, `p` and `(1-3p)/2` times `dt`.
    field: [Vec<Complex64>; 3],
    ising: IsingPhases,
}

impl PhaseTable {
    pub fn new(spec: &HamiltonianSpec, plan: &TrotterPlan) -> Result<Self> {
        let couplings = build_couplings(spec)?;
        let (p, q) = (plan.outer(), plan.middle());
        let dt = plan.dt;
        let l = spec.sites;
        let field = [
            field_phases(l, spec.field, 0.5 * p * dt),
            field_phases(l, spec.field, p * dt),
            field_phases(l, spec.field, 0.5 * (p + q) * dt),
        ];
        let norm = (1usize << l) as f64;
        let ising = if l <= MAX_TABULATED_SITES {
            let energies = couplings.ising_energy_table();
            let table = |tau: f64| -> Vec<Complex64> {
                energies
                    .par_iter()
                    .map(|&e| Complex64::from_polar(norm.recip(), -e * tau))
                    .collect()
            };
            IsingPhases::Tabulated {
                outer: table(p * dt),
                middle: table(q * dt),
            }
        } else {
            IsingPhases::Streamed {
                kernel: couplings.energy_kernel(),
                outer_tau: p * dt,
                middle_tau: q * dt,
                norm,
            }
        };
        Ok(Self { sites: l, field, ising })
    }

    /// Bytes held by the tables for `sites` spins.
    pub fn resident_bytes(sites: usize) -> u64 {
        if sites <= MAX_TABULATED_SITES {
            2 * 16 * (1u64 << sites)
        } else {
            0
        }
    }

    fn field_kick(&self, amps: &mut [Complex64], which: usize) {
        let table = &self.field[which];
        let low: Vec<u32> = (0..KICK_CHUNK.min(amps.len()))
            .map(|k| (k as u32).count_ones())
            .collect();
        amps.par_chunks_mut(KICK_CHUNK).enumerate().for_each(|(c, chunk)| {
            let base = (c * KICK_CHUNK).count_ones();
            for (a, pc) in chunk.iter_mut().zip(&low) {
                *a *= table[(base + pc) as usize];
            }
        });
    }

    fn ising_kick(&self, amps: &mut [Complex64], middle: bool) {
        match &self.ising {
            IsingPhases::Tabulated { outer, middle: mid } => {
                let table = if middle { mid } else { outer };
                amps.par_chunks_mut(KICK_CHUNK)
                    .zip(table.par_chunks(KICK_CHUNK))
                    .for_each(|(a, t)| {
                        for (x, y) in a.iter_mut().zip(t) {
                            *x *= *y;
                        }
                    });
            }
            IsingPhases::Streamed {
                kernel,
                outer_tau,
                middle_tau,
                norm,
            } => {
                let tau = if middle { *middle_tau } else { *outer_tau };
                let scale = norm.recip();
                amps.par_chunks_mut(KICK_CHUNK).enumerate().for_each(|(c, chunk)| {
                    let base = c * KICK_CHUNK;
                    for (k, a) in chunk.iter_mut().enumerate() {
                        *a *= Complex64::from_polar(scale, -kernel.energy(base + k) * tau);
                    }
                });
            }
        }
    }

    /// `W I W`: Ising kick conjugated by transforms.
    fn ising_sandwich(&self, amps: &mut [Complex64], middle: bool) {
        fwht_unnormalized(amps);
        self.ising_kick(amps, middle);
        fwht_unnormalized(amps);
    }

    fn full_step(&self, amps: &mut [Complex64]) {
        self.field_kick(amps, 0);
        self.ising_sandwich(amps, false);
        self.field_kick(amps, 1);
        self.ising_sandwich(amps, false);
        self.field_kick(amps, 2);
        self.ising_sandwich(amps, true);
        self.field_kick(amps, 2);
        self.ising_sandwich(amps, false);
        self.field_kick(amps, 1);
        self.ising_sandwich(amps, false);
        self.field_kick(amps, 0);
    }
}

/// A phase table bound to one Hamiltonian and step size.
pub struct Propagator {
    table: PhaseTable,
    plan: TrotterPlan,
}

impl Propagator {
    pub fn new(spec: &HamiltonianSpec, plan: TrotterPlan) -> Result<Self> {
        Ok(Self {
            table: PhaseTable::new(spec, &plan)?,
            plan,
        })
    }

    pub fn plan(&self) -> &TrotterPlan {
        &self.plan
    }

    pub fn step(&self, state: &mut StateVector) -> Result<()> {
        if state.sites() != self.table.sites {
            return Err(Error::LengthMismatch {
                expected: self.table.sites,
                found: state.sites(),
            });
        }
        self.table.full_step(state.amplitudes_mut());
        Ok(())
    }

    pub fn steps(&self, state: &mut StateVector, count: usize) -> Result<()> {
        for _ in 0..count {
            self.step(state)?;
        }
        Ok(())
    }
}

/// One fourth-order step. Builds the phase table on every call; use a
/// [`Propagator`] to evolve over many steps.
pub fn trotter_step(state: &mut StateVector, spec: &HamiltonianSpec, plan: &TrotterPlan) -> Result<()> {
    Propagator::new(spec, *plan)?.step(state)
}
