use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::trotter::PhaseTable;
use super::{energy, fwht_unnormalized, g_from_x_basis, prepare_polarized_x, Propagator, StateVector, TrotterPlan};
use crate::error::{Error, Result};
use crate::model::{build_couplings, HamiltonianSpec, InitialState, QuenchConfig};
use crate::numeric::running_time_average;

pub const MEM_BUDGET_ENV: &str = "QUENCHLAB_MEM_BUDGET_BYTES";
const DEFAULT_BUDGET: u64 = 4 << 30;
const DEFAULT_MAX_SITES: usize = 26;

/// Cap on state-vector allocations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryBudget {
    pub bytes: u64,
    pub max_sites: usize,
}

impl Default for MemoryBudget {
    fn default() -> Self {
        Self {
            bytes: DEFAULT_BUDGET,
            max_sites: DEFAULT_MAX_SITES,
        }
    }
}

impl MemoryBudget {
    /// Default budget, overridden by `QUENCHLAB_MEM_BUDGET_BYTES` when set.
    pub fn from_env() -> Self {
        let mut budget = Self::default();
        if let Some(bytes) = std::env::var(MEM_BUDGET_ENV).ok().and_then(|v| v.trim().parse().ok()) {
            budget.bytes = bytes;
        }
        budget
    }

    /// Working set of one evolution: state, scratch copy and phase tables.
    pub fn required_bytes(sites: usize) -> u64 {
        let amps = 16u64.saturating_mul(1u64 << sites.min(62));
        amps.saturating_mul(2).saturating_add(PhaseTable::resident_bytes(sites))
    }

    pub fn check(&self, sites: usize) -> Result<()> {
        let requested = Self::required_bytes(sites);
        if sites > self.max_sites || requested > self.bytes {
            return Err(Error::MemoryBudget {
                sites,
                requested,
                budget: self.bytes,
            });
        }
        Ok(())
    }
}

/// Sampled correlator `G(t)` and its running time average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSeries {
    pub times: Vec<f64>,
    pub g: Vec<f64>,
    pub g_av: Vec<f64>,
}

impl CorrelatorSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `G_av` at a sampled time, matched to within `1e-9`.
    pub fn g_av_at(&self, t: f64) -> Option<f64> {
        self.times
            .iter()
            .position(|&s| (s - t).abs() <= 1e-9 * t.abs().max(1.0))
            .map(|k| self.g_av[k])
    }
}

pub struct QuenchRecord {
    pub series: CorrelatorSeries,
    /// `<H>` at every sample, when requested.
    pub energies: Option<Vec<f64>>,
    pub final_state: StateVector,
}

/// A configured quench from the x-polarized state.
pub struct Quench {
    spec: HamiltonianSpec,
    config: QuenchConfig,
    budget: MemoryBudget,
    track_energy: bool,
}

impl Quench {
    pub fn new(spec: &HamiltonianSpec, config: &QuenchConfig) -> Result<Self> {
        spec.validate()?;
        config.validate()?;
        if config.initial_state != InitialState::PolarizedX {
            return Err(Error::InvalidConfig(
                "state-vector quenches start from the x-polarized state".into(),
            ));
        }
        Ok(Self {
            spec: spec.clone(),
            config: config.clone(),
            budget: MemoryBudget::from_env(),
            track_energy: false,
        })
    }

    pub fn with_budget(mut self, budget: MemoryBudget) -> Self {
        self.budget = budget;
        self
    }

    pub fn track_energy(mut self, on: bool) -> Self {
        self.track_energy = on;
        self
    }

    pub fn run(&self) -> Result<QuenchRecord> {
        let l = self.spec.sites;
        self.budget.check(l)?;
        let steps = self.config.steps()?;
        let stride = self.config.sample_stride;
        if steps % stride != 0 {
            return Err(Error::InvalidConfig(format!(
                "{steps} steps are not a multiple of sample_stride = {stride}"
            )));
        }
        let plan = TrotterPlan::fourth_order(self.config.dt);
        let propagator = Propagator::new(&self.spec, plan)?;
        let couplings = build_couplings(&self.spec)?;

        let mut state = prepare_polarized_x(l);
        let mut scratch = vec![Complex64::new(0.0, 0.0); state.dim()];
        let norm = (state.dim() as f64).recip();
        let mut measure = |s: &StateVector| {
            scratch.copy_from_slice(s.amplitudes());
            fwht_unnormalized(&mut scratch);
            g_from_x_basis(&scratch, l) * norm
        };

        let samples = steps / stride;
        let mut times = Vec::with_capacity(samples + 1);
        let mut g = Vec::with_capacity(samples + 1);
        let mut energies = self.track_energy.then(Vec::new);
        times.push(0.0);
        g.push(measure(&state));
        if let Some(e) = energies.as_mut() {
            e.push(energy(&state, &couplings, self.spec.field));
        }
        for k in 1..=samples {
            propagator.steps(&mut state, stride)?;
            times.push((k * stride) as f64 * self.config.dt);
            g.push(measure(&state));
            if let Some(e) = energies.as_mut() {
                e.push(energy(&state, &couplings, self.spec.field));
            }
        }
        let g_av = running_time_average(&g, stride as f64 * self.config.dt);
        Ok(QuenchRecord {
            series: CorrelatorSeries { times, g, g_av },
            energies,
            final_state: state,
        })
    }
}

/// Evolve the x-polarized state and record `G(t)` and `G_av(t)` every
/// `sample_stride` steps. The running average uses fourth-order quadrature
/// on the sample grid.
pub fn run_quench(spec: &HamiltonianSpec, config: &QuenchConfig) -> Result<CorrelatorSeries> {
    Ok(Quench::new(spec, config)?.run()?.series)
}
