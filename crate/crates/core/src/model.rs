//! Hamiltonian specifications, coupling matrices and quench configurations.
//!
//! Energies are measured in units of the nearest-neighbour coupling `J`, so
//! every public field and time argument is a dimensionless ratio (`B/J`,
//! `J t`, ...). Site 0 is the least significant bit of a basis index.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interaction range of the Ising term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelFamily {
    NearestNeighbor,
    NextNearestNeighbor,
    LongRange,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    #[default]
    Periodic,
    Open,
}

/// Transverse-field Ising chain
/// `H = -sum_{i<j} J_ij X_i X_j + B sum_i Z_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub family: ModelFamily,
    #[serde(rename = "J")]
    pub coupling: f64,
    /// Relative next-nearest-neighbour coupling; ignored for other families.
    #[serde(rename = "Delta", default)]
    pub delta: f64,
    /// Power-law exponent; ignored unless `family` is `LongRange`.
    #[serde(default)]
    pub alpha: f64,
    #[serde(rename = "B")]
    pub field: f64,
    #[serde(rename = "L")]
    pub sites: usize,
    #[serde(default)]
    pub boundary: Boundary,
}

impl HamiltonianSpec {
    pub fn nearest_neighbor(sites: usize, field: f64) -> Self {
        Self {
            family: ModelFamily::NearestNeighbor,
            coupling: 1.0,
            delta: 0.0,
            alpha: 0.0,
            field,
            sites,
            boundary: Boundary::Periodic,
        }
    }

    pub fn next_nearest_neighbor(sites: usize, delta: f64, field: f64) -> Self {
        Self {
            family: ModelFamily::NextNearestNeighbor,
            delta,
            ..Self::nearest_neighbor(sites, field)
        }
    }

    pub fn long_range(sites: usize, alpha: f64, field: f64) -> Self {
        Self {
            family: ModelFamily::LongRange,
            alpha,
            ..Self::nearest_neighbor(sites, field)
        }
    }

    pub fn with_field(&self, field: f64) -> Self {
        Self { field, ..self.clone() }
    }

    pub fn with_boundary(&self, boundary: Boundary) -> Self {
        Self {
            boundary,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 3 {
            return Err(Error::InvalidSpec(format!(
                "L = {} but at least 3 sites are required",
                self.sites
            )));
        }
        if !(self.coupling > 0.0 && self.coupling.is_finite()) {
            return Err(Error::InvalidSpec(format!("J = {} must be positive", self.coupling)));
        }
        if !(self.field >= 0.0 && self.field.is_finite()) {
            return Err(Error::InvalidSpec(format!("B = {} must be non-negative", self.field)));
        }
        match self.family {
            ModelFamily::NextNearestNeighbor if !(self.delta >= 0.0 && self.delta.is_finite()) => Err(
                Error::InvalidSpec(format!("Delta = {} must be non-negative", self.delta)),
            ),
            ModelFamily::LongRange if !(self.alpha > 0.0 && self.alpha.is_finite()) => {
                Err(Error::InvalidSpec(format!("alpha = {} must be positive", self.alpha)))
            }
            ModelFamily::LongRange if self.boundary == Boundary::Open => Err(Error::InvalidSpec(
                "the long-range image coupling is only defined for periodic chains".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Symmetric Ising couplings `J_ij`, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    sites: usize,
    entries: Vec<f64>,
}

impl CouplingMatrix {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.sites + j]
    }

    fn add(&mut self, i: usize, j: usize, value: f64) {
        let n = self.sites;
        self.entries[i * n + j] += value;
        self.entries[j * n + i] += value;
    }

    /// Non-zero pairs `(i, j, J_ij)` with `i < j`.
    pub fn bonds(&self) -> Vec<(usize, usize, f64)> {
        let n = self.sites;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let c = self.get(i, j);
                if c != 0.0 {
                    out.push((i, j, c));
                }
            }
        }
        out
    }

    /// `-sum_{i<j} J_ij s_i s_j` for the x-basis configuration encoded in the
    /// bits of `index` (bit 0 means `s = +1`).
    pub fn ising_energy_of_index(&self, index: usize) -> f64 {
        self.energy_kernel().energy(index)
    }

    /// Ising energies of all `2^L` x-basis configurations.
    pub fn ising_energy_table(&self) -> Vec<f64> {
        let kernel = self.energy_kernel();
        let dim = 1usize << self.sites;
        let mut table = vec![0.0; dim];
        table.par_chunks_mut(1 << 12).enumerate().for_each(|(chunk, slot)| {
            let base = chunk << 12;
            for (k, e) in slot.iter_mut().enumerate() {
                *e = kernel.energy(base + k);
            }
        });
        table
    }

    pub(crate) fn energy_kernel(&self) -> EnergyKernel {
        let bonds = self.bonds();
        EnergyKernel {
            offset: -bonds.iter().map(|b| b.2).sum::<f64>(),
            masks: bonds
                .into_iter()
                .map(|(i, j, c)| ((1usize << i) | (1usize << j), 2.0 * c))
                .collect(),
        }
    }
}

/// Bond list flattened to bitmasks: a bond contributes `+2 J_ij` on top of
/// the fully aligned energy whenever exactly one of its two bits is set.
pub(crate) struct EnergyKernel {
    offset: f64,
    masks: Vec<(usize, f64)>,
}

impl EnergyKernel {
    #[inline]
    pub(crate) fn energy(&self, index: usize) -> f64 {
        let mut e = self.offset;
        for &(mask, w) in &self.masks {
            if (index & mask).count_ones() == 1 {
                e += w;
            }
        }
        e
    }
}

pub fn build_couplings(spec: &HamiltonianSpec) -> Result<CouplingMatrix> {
    spec.validate()?;
    let n = spec.sites;
    let mut m = CouplingMatrix {
        sites: n,
        entries: vec![0.0; n * n],
    };
    let periodic = spec.boundary == Boundary::Periodic;
    let j = spec.coupling;
    match spec.family {
        ModelFamily::NearestNeighbor | ModelFamily::NextNearestNeighbor => {
            let mut shells = vec![(1, j)];
            if spec.family == ModelFamily::NextNearestNeighbor && spec.delta != 0.0 {
                shells.push((2, j * spec.delta));
            }
            // One term per site and shell, so short rings accumulate
            // coincident pairs the way the site sum does.
            for (dist, c) in shells {
                for i in 0..n {
                    if i + dist < n {
                        m.add(i, i + dist, c);
                    } else if periodic {
                        m.add(i, (i + dist) % n, c);
                    }
                }
            }
        }
        ModelFamily::LongRange => {
            let alpha = spec.alpha;
            for i in 0..n {
                for k in i + 1..n {
                    let d = (k - i) as f64;
                    let c = j * (d.powf(-alpha) + (n as f64 - d).powf(-alpha));
                    m.add(i, k, c);
                }
            }
        }
    }
    Ok(m)
}

/// Ising energy of an explicit x-basis bitstring (`0` is `+1`, `1` is `-1`).
pub fn classical_ising_energy(config: &[u8], couplings: &CouplingMatrix) -> Result<f64> {
    if config.len() != couplings.sites() {
        return Err(Error::LengthMismatch {
            expected: couplings.sites(),
            found: config.len(),
        });
    }
    let spin = |b: u8| 1.0 - 2.0 * f64::from(b & 1);
    Ok(-couplings
        .bonds()
        .iter()
        .map(|&(i, j, c)| c * spin(config[i]) * spin(config[j]))
        .sum::<f64>())
}

/// Parse a string of `0`/`1` characters into a bit configuration.
pub fn parse_bitstring(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::InvalidSpec(format!("bad bit character {other:?}"))),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    PolarizedX,
    Thermal {
        beta: f64,
    },
    /// Explicit mode occupations over the full Brillouin zone.
    CustomOccupations(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawQuenchConfig", into = "RawQuenchConfig")]
pub struct QuenchConfig {
    pub initial_state: InitialState,
    pub t_max: f64,
    pub dt: f64,
    pub b_grid: Vec<f64>,
    pub sample_stride: usize,
}

impl Default for QuenchConfig {
    fn default() -> Self {
        Self {
            initial_state: InitialState::PolarizedX,
            t_max: 9.0,
            dt: 0.01,
            b_grid: Vec::new(),
            sample_stride: 1,
        }
    }
}

impl QuenchConfig {
    pub fn new(t_max: f64, dt: f64) -> Self {
        Self {
            t_max,
            dt,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("dt = {} must be positive", self.dt)));
        }
        // t_max = 0 is the degenerate single-sample run.
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) || (self.t_max > 0.0 && self.dt > self.t_max) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < dt <= t_max, got dt = {}, t_max = {}",
                self.dt, self.t_max
            )));
        }
        if self.sample_stride == 0 {
            return Err(Error::InvalidConfig("sample_stride must be at least 1".into()));
        }
        if self.b_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidConfig("b_grid must be strictly increasing".into()));
        }
        match &self.initial_state {
            InitialState::Thermal { beta } if !(*beta >= 0.0) => {
                Err(Error::InvalidConfig(format!("beta = {beta} must be non-negative")))
            }
            InitialState::CustomOccupations(occ) if occ.iter().any(|n| !(0.0..=1.0).contains(n)) => {
                Err(Error::InvalidConfig("occupations must lie in [0, 1]".into()))
            }
            _ => Ok(()),
        }
    }

    /// Number of integration steps to reach `t_max`; `t_max` must be an
    /// integer multiple of `dt`.
    pub fn steps(&self) -> Result<usize> {
        self.validate()?;
        let ratio = self.t_max / self.dt;
        let n = ratio.round();
        if (ratio - n).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::InvalidConfig(format!(
                "t_max = {} is not a multiple of dt = {}",
                self.t_max, self.dt
            )));
        }
        Ok(n as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum InitialStateTag {
    PolarizedX,
    Thermal,
    CustomOccupations,
}

#[derive(Serialize, Deserialize)]
struct RawQuenchConfig {
    #[serde(default = "default_initial_tag")]
    initial_state: InitialStateTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    occupations: Option<Vec<f64>>,
    t_max: f64,
    dt: f64,
    #[serde(default)]
    b_grid: Vec<f64>,
    #[serde(default = "default_stride")]
    sample_stride: usize,
}

fn default_initial_tag() -> InitialStateTag {
    InitialStateTag::PolarizedX
}

fn default_stride() -> usize {
    1
}

impl TryFrom<RawQuenchConfig> for QuenchConfig {
    type Error = Error;

    fn try_from(raw: RawQuenchConfig) -> Result<Self> {
        let initial_state = match raw.initial_state {
            InitialStateTag::PolarizedX => InitialState::PolarizedX,
            InitialStateTag::Thermal => InitialState::Thermal {
                beta: raw
                    .beta
                    .ok_or_else(|| Error::InvalidConfig("Thermal initial state needs beta".into()))?,
            },
            InitialStateTag::CustomOccupations => InitialState::CustomOccupations(
                raw.occupations
                    .ok_or_else(|| Error::InvalidConfig("CustomOccupations needs an occupations list".into()))?,
            ),
        };
        let cfg = QuenchConfig {
            initial_state,
            t_max: raw.t_max,
            dt: raw.dt,
            b_grid: raw.b_grid,
            sample_stride: raw.sample_stride,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl From<QuenchConfig> for RawQuenchConfig {
    fn from(cfg: QuenchConfig) -> Self {
        let (initial_state, beta, occupations) = match cfg.initial_state {
            InitialState::PolarizedX => (InitialStateTag::PolarizedX, None, None),
            InitialState::Thermal { beta } => (InitialStateTag::Thermal, Some(beta), None),
            InitialState::CustomOccupations(occ) => (InitialStateTag::CustomOccupations, None, Some(occ)),
        };
        RawQuenchConfig {
            initial_state,
            beta,
            occupations,
            t_max: cfg.t_max,
            dt: cfg.dt,
            b_grid: cfg.b_grid,
            sample_stride: cfg.sample_stride,
        }
    }
}
