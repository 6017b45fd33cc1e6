use std::f64::consts::TAU;

use super::Spectrum;
use crate::error::{Error, Result};

/// Affine map from eigenvalues to eigenphases of `U = exp(i t (H - offset I))`.
///
/// The scale leaves a guard band of `2 pi delta` below `2 pi` so the extreme
/// eigenvalues never alias onto each other.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMap {
    pub scale: f64,
    pub offset: f64,
    pub guard: f64,
    pub phases: Vec<f64>,
}

impl PhaseMap {
    /// A map with explicitly chosen phases (scale 1, offset 0). Used to place
    /// eigenphases exactly on register bins.
    pub fn explicit(phases: Vec<f64>) -> Result<Self> {
        if let Some(p) = phases.iter().find(|p| !(0.0..TAU).contains(*p)) {
            return Err(Error::config(format!("phase {p} outside [0, 2pi)")));
        }
        Ok(Self {
            scale: 1.0,
            offset: 0.0,
            guard: 0.0,
            phases,
        })
    }

    pub fn eigenvalue_of(&self, phase: f64) -> f64 {
        phase / self.scale + self.offset
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }
}

/// Guard used when only the register size is known.
pub fn default_guard(m: u32) -> f64 {
    (-(m as f64)).exp2()
}

pub fn phase_encode(spectrum: &Spectrum, guard: f64) -> Result<PhaseMap> {
    if !(0.0..1.0).contains(&guard) {
        return Err(Error::config(format!("guard {guard} outside [0, 1)")));
    }
    let lo = spectrum.min_eigenvalue();
    let hi = spectrum.max_eigenvalue();
    let scale = if hi > lo { TAU * (1.0 - guard) / (hi - lo) } else { 1.0 };
    let phases = spectrum
        .eigenvalues()
        .iter()
        .map(|l| {
            let p = if hi > lo { scale * (l - lo) } else { 0.0 };
            // only reachable with a zero guard
            if p >= TAU { p - TAU } else { p }
        })
        .collect();
    Ok(PhaseMap {
        scale,
        offset: lo,
        guard,
        phases,
    })
}
