//! Quench dynamics and critical-point analysis for transverse-field Ising
//! chains.
//!
//! The crate has three numerical backends and two analysis layers:
//!
//! - [`free_fermion`]: exact finite-size analytics for the nearest-neighbour
//!   chain (dispersion, time-averaged correlator, GGE stationary values).
//! - [`statevector`]: dense `2^L` evolution with a fourth-order
//!   split-operator scheme and Walsh-Hadamard basis changes, for the
//!   next-nearest-neighbour and long-range chains.
//! - [`groundstate`]: Lanczos ground states and Binder cumulants.
//! - [`scaling`]: finite-time scaling of `dG_av/dB` (curve crossings and
//!   scaling collapse).
//! - [`meanfield`]: first-order mean-field critical fields.
//!
//! All energies are in units of `J`.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod free_fermion;
pub mod groundstate;
pub mod io;
pub mod meanfield;
pub mod model;
pub mod numeric;
pub mod scaling;
pub mod statevector;

pub use error::{Error, Result};
pub use model::{
    build_couplings, classical_ising_energy, Boundary, CouplingMatrix, HamiltonianSpec, InitialState, ModelFamily,
    QuenchConfig,
};
