//! Exact free-fermion analytics for the nearest-neighbour chain.
//!
//! After a Jordan-Wigner transformation the chain splits into two fermion
//! parity sectors with antiperiodic and periodic momenta. The fully
//! x-polarized initial state has equal weight in both, and the
//! nearest-neighbour correlator never mixes them, so every finite-`L`
//! time-dependent quantity here is the average of the two sector sums.
//! Each sector sum runs over the full zone with weight `1/(2L)`, which is the
//! positive-momentum sum with weight `1/L` once the unpaired `q = 0, pi`
//! modes of the periodic sector are counted at half weight.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;

/// Below this gap a mode is treated as gapless.
const GAPLESS: f64 = 1e-8;

/// Fermion-parity sector of the Jordan-Wigner chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParitySector {
    /// Even parity, `q = (2n+1) pi / L`.
    Antiperiodic,
    /// Odd parity, `q = 2 pi n / L`.
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MomentumGrid {
    sites: usize,
    sector: ParitySector,
}

impl MomentumGrid {
    pub fn new(sites: usize, sector: ParitySector) -> Result<Self> {
        if sites < 2 || !sites.is_multiple_of(2) {
            return Err(Error::InvalidSpec(format!(
                "free-fermion sums need an even chain length, got L = {sites}"
            )));
        }
        Ok(Self { sites, sector })
    }

    pub fn antiperiodic(sites: usize) -> Result<Self> {
        Self::new(sites, ParitySector::Antiperiodic)
    }

    pub fn periodic(sites: usize) -> Result<Self> {
        Self::new(sites, ParitySector::Periodic)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn sector(&self) -> ParitySector {
        self.sector
    }

    /// Positive half of the zone. For the antiperiodic sector these are the
    /// `L/2` momenta `(2n+1) pi / L`, all inside `(0, pi)`; the periodic
    /// sector also carries the self-conjugate endpoints `0` and `pi`.
    pub fn positive_momenta(&self) -> Vec<f64> {
        let l = self.sites as f64;
        match self.sector {
            ParitySector::Antiperiodic => (0..self.sites / 2).map(|n| (2 * n + 1) as f64 * PI / l).collect(),
            ParitySector::Periodic => (0..=self.sites / 2).map(|n| 2.0 * PI * n as f64 / l).collect(),
        }
    }

    /// All `L` momenta of the sector, in `[0, 2 pi)`.
    pub fn full_zone(&self) -> Vec<f64> {
        let l = self.sites as f64;
        let offset = match self.sector {
            ParitySector::Antiperiodic => 1,
            ParitySector::Periodic => 0,
        };
        (0..self.sites).map(|n| (2 * n + offset) as f64 * PI / l).collect()
    }

    /// Per-mode data over the full zone for the given occupations.
    pub fn modes(&self, field: f64, coupling: f64, occupations: &[f64]) -> Result<Vec<ModeData>> {
        check_occupations(self, occupations)?;
        Ok(self
            .full_zone()
            .into_iter()
            .zip(occupations)
            .map(|(q, &occupation)| ModeData {
                q,
                omega: dispersion(field, coupling, q),
                occupation,
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeData {
    pub q: f64,
    pub omega: f64,
    pub occupation: f64,
}

/// `B^2 - 2 B J cos q + J^2`, written to avoid cancellation near the gap.
#[inline]
fn gap_squared(field: f64, coupling: f64, q: f64) -> f64 {
    let s = (0.5 * q).sin();
    (field - coupling).powi(2) + 4.0 * field * coupling * s * s
}

/// `J - B cos q`, cancellation-free near `q = 0`.
#[inline]
fn bogoliubov_numerator(field: f64, coupling: f64, q: f64) -> f64 {
    let s = (0.5 * q).sin();
    (coupling - field) + 2.0 * field * s * s
}

/// Quasiparticle energy `omega_q = 2 sqrt(B^2 - 2 B J cos q + J^2)`.
pub fn dispersion(field: f64, coupling: f64, q: f64) -> f64 {
    2.0 * gap_squared(field, coupling, q).sqrt()
}

/// `(1 - j0(z)) / omega^2` with `z = 2 omega t`, and its omega-derivative.
fn averaged_kernel(omega: f64, t: f64) -> (f64, f64) {
    let z = 2.0 * omega * t;
    if z < 0.5 {
        // (1 - j0(z)) / z^2 = sum_k (-1)^k z^(2k) / (2k+3)!
        const INV_FACT: [f64; 6] = [
            1.0 / 6.0,
            1.0 / 120.0,
            1.0 / 5040.0,
            1.0 / 362_880.0,
            1.0 / 39_916_800.0,
            1.0 / 6_227_020_800.0,
        ];
        let z2 = z * z;
        let mut value = 0.0;
        let mut slope = 0.0; // d/dz of the series
        let mut pow = 1.0;
        for (k, c) in INV_FACT.iter().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            value += sign * c * pow;
            if k + 1 < INV_FACT.len() {
                let next = INV_FACT[k + 1];
                slope += -sign * next * (2 * (k + 1)) as f64 * pow * z;
            }
            pow *= z2;
        }
        let scale = 4.0 * t * t;
        (scale * value, scale * slope * 2.0 * t)
    } else {
        let (sin, cos) = z.sin_cos();
        let j0 = sin / z;
        let dj0 = cos / z - sin / (z * z);
        let w2 = omega * omega;
        let value = (1.0 - j0) / w2;
        let slope = -2.0 * (1.0 - j0) / (w2 * omega) - 2.0 * t * dj0 / w2;
        (value, slope)
    }
}

/// Full-zone summand of the time-averaged correlator,
/// `2 - 8 B^2 sin^2 q (1 - j0(2 omega t)) / omega^2`.
fn averaged_term(field: f64, coupling: f64, q: f64, t: f64) -> f64 {
    let s = q.sin();
    if s == 0.0 {
        return 2.0;
    }
    let (kernel, _) = averaged_kernel(dispersion(field, coupling, q), t);
    2.0 - 8.0 * field * field * s * s * kernel
}

fn averaged_term_derivative(field: f64, coupling: f64, q: f64, t: f64) -> f64 {
    let s = q.sin();
    if s == 0.0 {
        return 0.0;
    }
    let omega = dispersion(field, coupling, q);
    let (kernel, dkernel) = averaged_kernel(omega, t);
    let domega = 4.0 * (field - coupling * q.cos()) / omega;
    let s2 = s * s;
    -16.0 * field * s2 * kernel - 8.0 * field * field * s2 * dkernel * domega
}

fn instantaneous_term(field: f64, coupling: f64, q: f64, t: f64) -> f64 {
    let s = q.sin();
    if s == 0.0 {
        return 2.0;
    }
    let omega = dispersion(field, coupling, q);
    let x = omega * t;
    // sin^2(omega t) / omega^2, finite as omega -> 0
    let ratio = if x.abs() < 1e-4 {
        t * t * (1.0 - x * x / 3.0)
    } else {
        (x.sin() / omega).powi(2)
    };
    2.0 - 16.0 * field * field * s * s * ratio
}

fn sector_sum(grid: &MomentumGrid, term: impl Fn(f64) -> f64) -> f64 {
    let terms: Vec<f64> = grid.full_zone().into_iter().map(term).collect();
    pairwise_sum(&terms) / (2 * grid.sites()) as f64
}

fn both_sectors(sites: usize, term: impl Fn(f64) -> f64) -> Result<f64> {
    let ap = MomentumGrid::antiperiodic(sites)?;
    let p = MomentumGrid::periodic(sites)?;
    Ok(0.5 * (sector_sum(&ap, &term) + sector_sum(&p, &term)))
}

/// Time-averaged correlator restricted to one parity sector.
pub fn g_av_sector(field: f64, coupling: f64, grid: &MomentumGrid, t: f64) -> f64 {
    sector_sum(grid, |q| averaged_term(field, coupling, q, t))
}

/// Running time average `G_av(t)` of the nearest-neighbour correlator after a
/// quench from the x-polarized state, exact at finite even `L`.
pub fn g_av_exact(field: f64, coupling: f64, sites: usize, t: f64) -> Result<f64> {
    both_sectors(sites, |q| averaged_term(field, coupling, q, t))
}

/// Instantaneous correlator `G(t)`, exact at finite even `L`.
pub fn g_exact(field: f64, coupling: f64, sites: usize, t: f64) -> Result<f64> {
    both_sectors(sites, |q| instantaneous_term(field, coupling, q, t))
}

/// `t -> infinity` limit of [`g_av_exact`] at fixed `L`.
pub fn g_av_stationary(field: f64, coupling: f64, sites: usize) -> Result<f64> {
    both_sectors(sites, |q| {
        if q.sin() == 0.0 {
            return 2.0;
        }
        let w = dispersion(field, coupling, q);
        8.0 * bogoliubov_numerator(field, coupling, q).powi(2) / (w * w)
    })
}

/// `dG_av/dB` by term-wise differentiation of the momentum sum.
pub fn dgdb_exact(field: f64, coupling: f64, sites: usize, t: f64) -> Result<f64> {
    both_sectors(sites, |q| averaged_term_derivative(field, coupling, q, t))
}

/// Thermodynamic-limit stationary correlator: `1 - B^2/(2J^2)` below the
/// critical field and `1/2` above.
pub fn g_inf(field: f64, coupling: f64) -> f64 {
    if field <= coupling {
        1.0 - field * field / (2.0 * coupling * coupling)
    } else {
        0.5
    }
}

fn check_occupations(grid: &MomentumGrid, occupations: &[f64]) -> Result<()> {
    if occupations.len() != grid.sites() {
        return Err(Error::LengthMismatch {
            expected: grid.sites(),
            found: occupations.len(),
        });
    }
    if let Some(bad) = occupations.iter().find(|n| !(0.0..=1.0).contains(*n)) {
        return Err(Error::InvalidConfig(format!("occupation {bad} outside [0, 1]")));
    }
    Ok(())
}

/// Stationary correlator of the generalized Gibbs ensemble fixed by the mode
/// occupations `<I_q>` (full zone, in [`MomentumGrid::full_zone`] order).
pub fn gge_correlator(field: f64, coupling: f64, grid: &MomentumGrid, occupations: &[f64]) -> Result<f64> {
    check_occupations(grid, occupations)?;
    let scale = GAPLESS * coupling;
    let terms = grid
        .full_zone()
        .into_iter()
        .zip(occupations)
        .map(|(q, &n)| {
            let omega = dispersion(field, coupling, q);
            let bracket = 1.0 - 2.0 * n;
            if omega < scale {
                if bracket.abs() > 1e-6 {
                    return Err(Error::SingularMode { q, bracket });
                }
                if omega == 0.0 {
                    return Ok(0.0);
                }
            }
            Ok(2.0 * bogoliubov_numerator(field, coupling, q) / omega * bracket)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&terms) / grid.sites() as f64)
}

/// Mode occupations of the x-polarized state (the `B = 0` ground state)
/// with respect to the quasiparticles at field `B`.
///
/// A mode that is exactly gapless takes its `B -> J^-` value.
pub fn polarized_occupations(field: f64, coupling: f64, grid: &MomentumGrid) -> Vec<f64> {
    grid.full_zone()
        .into_iter()
        .map(|q| {
            let omega = dispersion(field, coupling, q);
            if omega == 0.0 {
                return 0.0;
            }
            let cos_mismatch = 2.0 * bogoliubov_numerator(field, coupling, q) / omega;
            (0.5 * (1.0 - cos_mismatch)).clamp(0.0, 1.0)
        })
        .collect()
}

/// Occupations `(1 - tanh(beta omega_q / 2)) / 2` of a thermal state of the
/// quench Hamiltonian itself.
pub fn thermal_occupations(field: f64, coupling: f64, beta: f64, grid: &MomentumGrid) -> Vec<f64> {
    grid.full_zone()
        .into_iter()
        .map(|q| {
            let omega = dispersion(field, coupling, q);
            if omega == 0.0 {
                0.5
            } else {
                0.5 * (1.0 - (0.5 * beta * omega).tanh())
            }
        })
        .collect()
}

/// Lowest-order finite-time scaling form `f(x) = -1/2 + x` of `J dG_av/dB`,
/// with `x = (B - B_c) t`.
pub fn scaling_function_reference(epsilon_t: f64) -> f64 {
    -0.5 + epsilon_t
}

/// Ground-state energy in the even-parity sector, `-(1/2) sum_q omega_q`.
pub fn ground_state_energy(field: f64, coupling: f64, sites: usize) -> Result<f64> {
    let grid = MomentumGrid::antiperiodic(sites)?;
    let omegas: Vec<f64> = grid
        .full_zone()
        .into_iter()
        .map(|q| dispersion(field, coupling, q))
        .collect();
    Ok(-0.5 * pairwise_sum(&omegas))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{DMatrix, SymmetricEigen};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dispersion_values() {
        assert_eq!(dispersion(1.0, 1.0, 0.0), 0.0);
        assert_relative_eq!(dispersion(1.0, 1.0, PI), 4.0, epsilon = 1e-14);
        assert_relative_eq!(dispersion(0.0, 1.0, PI / 2.0), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn grids() {
        let g = MomentumGrid::antiperiodic(8).unwrap();
        let pos = g.positive_momenta();
        assert_eq!(pos.len(), 4);
        assert!(pos.iter().all(|&q| q > 0.0 && q < PI));
        assert_eq!(g.full_zone().len(), 8);
        assert_eq!(MomentumGrid::periodic(8).unwrap().positive_momenta().len(), 5);
        assert!(MomentumGrid::antiperiodic(7).is_err());
    }

    #[test]
    fn stationary_limits() {
        assert_eq!(g_inf(0.0, 1.0), 1.0);
        assert_eq!(g_inf(0.5, 1.0), 0.875);
        assert_eq!(g_inf(1.0, 1.0), 0.5);
        assert_eq!(g_inf(2.0, 1.0), 0.5);
        assert_relative_eq!(g_av_exact(2.0, 1.0, 1000, 1e4).unwrap(), 0.5, epsilon = 5e-3);
    }

    #[test]
    fn zero_field_and_zero_time() {
        for l in [4, 10, 64] {
            for t in [0.0, 0.3, 7.0] {
                assert_relative_eq!(g_av_exact(0.0, 1.0, l, t).unwrap(), 1.0, epsilon = 1e-14);
            }
            for b in [0.3, 1.0, 2.5] {
                assert_relative_eq!(g_av_exact(b, 1.0, l, 0.0).unwrap(), 1.0, epsilon = 1e-14);
                assert_relative_eq!(g_exact(b, 1.0, l, 0.0).unwrap(), 1.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn gge_examples() {
        let g = MomentumGrid::antiperiodic(16).unwrap();
        assert_relative_eq!(gge_correlator(0.0, 1.0, &g, &[0.0; 16]).unwrap(), 1.0, epsilon = 1e-14);
        assert_eq!(gge_correlator(0.7, 1.0, &g, &[0.5; 16]).unwrap(), 0.0);

        let big = MomentumGrid::antiperiodic(2000).unwrap();
        let occ = polarized_occupations(1.0, 1.0, &big);
        assert_relative_eq!(gge_correlator(1.0, 1.0, &big, &occ).unwrap(), 0.5, epsilon = 2e-3);
        assert!(gge_correlator(1.0, 1.0, &big, &occ[1..]).is_err());
    }

    #[test]
    fn gapless_mode_requires_cancelling_bracket() {
        let p = MomentumGrid::periodic(8).unwrap();
        let occ = polarized_occupations(1.0, 1.0, &p);
        assert!(matches!(
            gge_correlator(1.0, 1.0, &p, &occ),
            Err(Error::SingularMode { .. })
        ));
        let thermal = thermal_occupations(1.0, 1.0, 2.0, &p);
        assert!(gge_correlator(1.0, 1.0, &p, &thermal).is_ok());
    }

    #[test]
    fn polarized_occupation_examples() {
        let g = MomentumGrid::antiperiodic(12).unwrap();
        assert!(polarized_occupations(0.0, 1.0, &g).iter().all(|&n| n.abs() < 1e-15));
        // B = J, q -> 0
        let omega = dispersion(1.0, 1.0, 1e-6);
        let n = 0.5 * (1.0 - 2.0 * bogoliubov_numerator(1.0, 1.0, 1e-6) / omega);
        assert!((n - 0.5).abs() < 1e-4);
    }

    #[test]
    fn thermal_occupation_examples() {
        let g = MomentumGrid::antiperiodic(12).unwrap();
        assert!(thermal_occupations(0.7, 1.0, 0.0, &g).iter().all(|&n| n == 0.5));
        assert!(thermal_occupations(0.7, 1.0, f64::INFINITY, &g)
            .iter()
            .all(|&n| n == 0.0));
        // omega = 2 at B = 0
        let n = thermal_occupations(0.0, 1.0, 1.0, &g)[0];
        assert_relative_eq!(n, 0.5 * (1.0 - 1f64.tanh()), epsilon = 1e-15);
        assert!((n - 0.11920).abs() < 1e-5);
    }

    #[test]
    fn gge_matches_stationary_sum_per_sector() {
        for l in [6, 8, 20, 100] {
            for b in [0.3, 0.7, 0.999, 1.3, 2.0] {
                let ap = MomentumGrid::antiperiodic(l).unwrap();
                let p = MomentumGrid::periodic(l).unwrap();
                let gge_ap = gge_correlator(b, 1.0, &ap, &polarized_occupations(b, 1.0, &ap)).unwrap();
                let gge_p = gge_correlator(b, 1.0, &p, &polarized_occupations(b, 1.0, &p)).unwrap();
                let stat = g_av_stationary(b, 1.0, l).unwrap();
                assert!((0.5 * (gge_ap + gge_p) - stat).abs() < 1e-10);
                // long-time average of the antiperiodic sector alone
                let late = g_av_sector(b, 1.0, &ap, 1e12);
                assert!((late - gge_ap).abs() < 1e-10, "L={l} B={b}: {late} vs {gge_ap}");
            }
        }
    }

    #[test]
    fn derivative_at_zero_field() {
        assert!(dgdb_exact(0.0, 1.0, 200, 50.0).unwrap().abs() < 1e-14);
    }

    #[test]
    fn derivative_near_critical_value() {
        for t in [4.0, 6.0, 8.0, 10.0] {
            let d = dgdb_exact(1.0, 1.0, 100, t).unwrap();
            assert!((d + 0.5).abs() < 0.05, "t={t}: {d}");
        }
    }

    fn central_difference(b: f64, l: usize, t: f64) -> f64 {
        let h = 1e-5;
        (g_av_exact(b + h, 1.0, l, t).unwrap() - g_av_exact(b - h, 1.0, l, t).unwrap()) / (2.0 * h)
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let analytic = dgdb_exact(1.02, 1.0, 100, 10.0).unwrap();
        let fd = central_difference(1.02, 100, 10.0);
        assert!(((analytic - fd) / fd).abs() < 1e-6, "{analytic} vs {fd}");

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let b = rng.gen_range(0.05..2.0);
            let t = rng.gen_range(0.01..12.0);
            let analytic = dgdb_exact(b, 1.0, 40, t).unwrap();
            let fd = central_difference(b, 40, t);
            let scale = fd.abs().max(1e-2);
            assert!((analytic - fd).abs() / scale < 1e-6, "B={b} t={t}: {analytic} vs {fd}");
        }
    }

    #[test]
    fn time_average_of_instantaneous_series() {
        // Simpson quadrature of g_exact reproduces g_av_exact.
        let (b, l, t) = (0.7, 12, 3.0);
        let n = 3000;
        let h = t / n as f64;
        let f: Vec<f64> = (0..=n).map(|k| g_exact(b, 1.0, l, k as f64 * h).unwrap()).collect();
        let avg = crate::numeric::running_time_average(&f, h);
        assert!((avg[n] - g_av_exact(b, 1.0, l, t).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn scaling_reference() {
        assert_eq!(scaling_function_reference(0.0), -0.5);
        assert_relative_eq!(scaling_function_reference(0.1), -0.4, epsilon = 1e-15);
        assert_relative_eq!(scaling_function_reference(-0.2), -0.7, epsilon = 1e-15);
    }

    /// Real-space Bogoliubov-de Gennes matrix of the even-parity sector
    /// (antiperiodic wraparound), Nambu basis (c_1..c_L, c_1^+..c_L^+),
    /// normalised so that its positive eigenvalues are the quasiparticle
    /// energies.
    fn bdg_matrix(l: usize, field: f64) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(l, l);
        let mut p = DMatrix::zeros(l, l);
        for i in 0..l {
            a[(i, i)] = 2.0 * field;
            let j = (i + 1) % l;
            let sign = if j == 0 { -1.0 } else { 1.0 };
            a[(i, j)] += -sign;
            a[(j, i)] += -sign;
            p[(i, j)] += -sign;
            p[(j, i)] -= -sign;
        }
        let mut h = DMatrix::zeros(2 * l, 2 * l);
        h.view_mut((0, 0), (l, l)).copy_from(&a);
        h.view_mut((l, l), (l, l)).copy_from(&(-&a));
        h.view_mut((0, l), (l, l)).copy_from(&p);
        h.view_mut((l, 0), (l, l)).copy_from(&(-&p));
        h
    }

    #[test]
    fn occupations_match_bogoliubov_oracle() {
        let (l, b) = (8, 0.7);
        let initial = SymmetricEigen::new(bdg_matrix(l, 0.0));
        let quench = SymmetricEigen::new(bdg_matrix(l, b));

        // Projector onto negative-energy states of the initial Hamiltonian.
        let mut minus = DMatrix::zeros(2 * l, 2 * l);
        for k in 0..2 * l {
            if initial.eigenvalues[k] < 0.0 {
                let v = initial.eigenvectors.column(k);
                minus += v * v.transpose();
            }
        }
        let mut oracle: Vec<(f64, f64)> = (0..2 * l)
            .filter(|&k| quench.eigenvalues[k] > 0.0)
            .map(|k| {
                let v = quench.eigenvectors.column(k);
                (quench.eigenvalues[k], (v.transpose() * &minus * v)[(0, 0)])
            })
            .collect();
        oracle.sort_by(|x, y| x.partial_cmp(y).unwrap());

        let grid = MomentumGrid::antiperiodic(l).unwrap();
        let mut ours: Vec<(f64, f64)> = grid
            .full_zone()
            .into_iter()
            .map(|q| dispersion(b, 1.0, q))
            .zip(polarized_occupations(b, 1.0, &grid))
            .collect();
        ours.sort_by(|x, y| x.partial_cmp(y).unwrap());

        assert_eq!(oracle.len(), ours.len());
        for ((e_o, n_o), (e, n)) in oracle.iter().zip(&ours) {
            assert!((e_o - e).abs() < 1e-10, "energy {e_o} vs {e}");
            // degenerate +-q pairs share one occupation
            assert!((n_o - n).abs() < 1e-10, "occupation {n_o} vs {n}");
        }
    }

    proptest! {
        #[test]
        fn correlator_bounded(b in 0.0f64..3.0, t in 0.0f64..50.0, half in 2usize..40) {
            let g = g_av_exact(b, 1.0, 2 * half, t).unwrap();
            prop_assert!(g.abs() <= 1.0 + 1e-12);
            let inst = g_exact(b, 1.0, 2 * half, t).unwrap();
            prop_assert!(inst.abs() <= 1.0 + 1e-12);
        }

        #[test]
        fn approaches_thermodynamic_limit(b in prop_oneof![0.0f64..0.8, 1.2f64..3.0]) {
            let g = g_av_exact(b, 1.0, 2000, 1e5).unwrap();
            prop_assert!((g - g_inf(b, 1.0)).abs() < 2e-3);
        }
    }
}
