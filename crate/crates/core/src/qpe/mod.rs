//! Phase estimation with an equal-superposition second register.
//!
//! Two engines produce the exact joint distribution over (phase bin `k`,
//! second-register state `b`): [`run_spectral`] evaluates the closed form from
//! an eigendecomposition, [`run_dense`] simulates the circuit on the full
//! statevector. Both place eigenvalues on the phase register through a
//! [`PhaseMap`].

mod dense;
mod kernel;
mod measure;
mod spectral;

pub use dense::{run_dense, run_dense_with_spectrum};
pub use kernel::{kernel_amplitude, nearest_bin};
pub use measure::{condition_on_zero, sample, spectral_summary, MeasurementSummary};
pub use spectral::run_spectral;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::{default_guard, phase_encode, PhaseMap, Spectrum};

pub const MAX_SPECTRAL_M: u32 = 24;
pub const MAX_DENSE_M: u32 = 12;
pub const MAX_DENSE_QUBITS: usize = 8;
/// Largest joint distribution (bins times states) either engine materializes.
pub const MAX_JOINT_LEN: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Dense,
    Spectral,
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dense" => Ok(Engine::Dense),
            "spectral" => Ok(Engine::Spectral),
            _ => Err(Error::config(format!("unknown engine {s:?}"))),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Dense => "dense",
            Engine::Spectral => "spectral",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpeConfig {
    /// Phase-register qubits.
    pub m: u32,
    pub output_hadamards: bool,
    /// Phase-encoding guard; `None` means `2^-m`.
    pub guard: Option<f64>,
    pub engine: Engine,
    /// Use these eigenphases instead of encoding the spectrum.
    pub phase_map: Option<PhaseMap>,
}

impl QpeConfig {
    pub fn new(m: u32) -> Self {
        Self {
            m,
            output_hadamards: true,
            guard: None,
            engine: Engine::Spectral,
            phase_map: None,
        }
    }

    pub fn with_output_hadamards(mut self, on: bool) -> Self {
        self.output_hadamards = on;
        self
    }

    pub fn with_engine(mut self, engine: Engine) -> Self {
        self.engine = engine;
        self
    }

    pub fn with_phase_map(mut self, map: PhaseMap) -> Self {
        self.phase_map = Some(map);
        self
    }

    pub fn bins(&self) -> usize {
        1 << self.m
    }

    pub(crate) fn resolve_phase_map(&self, spectrum: &Spectrum) -> Result<PhaseMap> {
        match &self.phase_map {
            Some(map) if map.len() != spectrum.order() => Err(Error::config(format!(
                "phase map has {} phases for {} eigenvalues",
                map.len(),
                spectrum.order()
            ))),
            Some(map) => Ok(map.clone()),
            None => phase_encode(spectrum, self.guard.unwrap_or_else(|| default_guard(self.m))),
        }
    }

    pub(crate) fn check_spectral(&self, order: usize) -> Result<usize> {
        if !(1..=MAX_SPECTRAL_M).contains(&self.m) {
            return Err(Error::config(format!("m = {} outside 1..={MAX_SPECTRAL_M}", self.m)));
        }
        qubits_of(order)
    }
}

fn qubits_of(order: usize) -> Result<usize> {
    if order.is_power_of_two() {
        Ok(order.trailing_zeros() as usize)
    } else {
        Err(Error::config(format!("matrix order {order} is not a power of two")))
    }
}

/// Exact outcome probabilities over (phase bin `k`, second-register state `b`).
///
/// `b` is in the standard basis of the register as measured, i.e. after the
/// output Hadamards when those are enabled.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    m: u32,
    qubits: usize,
    output_hadamards: bool,
    phase_map: PhaseMap,
    /// Row-major: `probs[k * 2^n + b]`.
    probs: Vec<f64>,
}

/// Amplitudes with magnitude below this are reported as probability zero.
pub const AMPLITUDE_FLOOR: f64 = 1e-15;

impl JointDistribution {
    pub(crate) fn from_amplitudes(
        m: u32,
        qubits: usize,
        output_hadamards: bool,
        phase_map: PhaseMap,
        probs: Vec<f64>,
    ) -> Self {
        Self {
            m,
            qubits,
            output_hadamards,
            phase_map,
            probs,
        }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn bins(&self) -> usize {
        1 << self.m
    }

    pub fn states(&self) -> usize {
        1 << self.qubits
    }

    pub fn output_hadamards(&self) -> bool {
        self.output_hadamards
    }

    pub fn phase_map(&self) -> &PhaseMap {
        &self.phase_map
    }

    pub fn prob(&self, k: usize, b: usize) -> f64 {
        self.probs[k * self.states() + b]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Distribution of the phase register with the second register ignored.
    pub fn phase_marginal(&self) -> Vec<f64> {
        self.probs
            .chunks_exact(self.states())
            .map(|row| row.iter().sum())
            .collect()
    }

    pub fn tv_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.probs.len(), other.probs.len(), "shape mismatch");
        0.5 * self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

pub(crate) fn probability_of(amp: num_complex::Complex64) -> f64 {
    if amp.norm() < AMPLITUDE_FLOOR {
        0.0
    } else {
        amp.norm_sqr()
    }
}

/// In-place normalized Walsh-Hadamard transform (`H^{(x)n}`).
pub(crate) fn walsh_hadamard<T>(v: &mut [T])
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let n = v.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
    let norm = (n as f64).sqrt().recip();
    for x in v.iter_mut() {
        *x = *x * norm;
    }
}
