use std::f64::consts::TAU;

use num_complex::Complex64;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use super::{kernel_amplitude, nearest_bin, JointDistribution, QpeConfig};
use crate::error::{Error, Result};
use crate::generators::stream_rng;
use crate::matrix::{PhaseMap, Spectrum};
use crate::probability::AlphaVector;

/// What an experimenter sees after measuring the second register in the
/// Hadamard basis and keeping the all-zero outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSummary {
    pub m: u32,
    /// Probability the second register reads `0...0`.
    pub p_zero: f64,
    /// Phase-register distribution given the all-zero outcome.
    pub conditional: Vec<f64>,
    /// Phase-register distribution ignoring the second register.
    pub phase_marginal: Vec<f64>,
    pub top_bin: usize,
    /// Eigenvalue mapped back from the top conditional bin.
    pub eigenvalue_estimate: f64,
    /// Bin nearest to the principal eigenphase.
    pub principal_bin: usize,
    /// Conditional probability of the principal bin.
    pub principal_mass: f64,
}

fn summarize(
    m: u32,
    zero_column: Vec<f64>,
    phase_marginal: Vec<f64>,
    map: &PhaseMap,
) -> Result<MeasurementSummary> {
    let p_zero: f64 = zero_column.iter().sum();
    if p_zero.is_nan() || p_zero < 1e-300 {
        return Err(Error::DegenerateConditioning { p_zero });
    }
    let conditional: Vec<f64> = zero_column.iter().map(|p| p / p_zero).collect();
    // first maximum wins on ties
    let top_bin = conditional
        .iter()
        .enumerate()
        .fold(0, |best, (k, p)| if *p > conditional[best] { k } else { best });
    let bins = conditional.len();
    let eigenvalue_estimate = map.eigenvalue_of(TAU * top_bin as f64 / bins as f64);
    let principal_phase = *map.phases.last().expect("non-empty phase map");
    let principal_bin = nearest_bin(principal_phase, m);
    Ok(MeasurementSummary {
        m,
        p_zero,
        principal_mass: conditional[principal_bin],
        conditional,
        phase_marginal,
        top_bin,
        eigenvalue_estimate,
        principal_bin,
    })
}

/// Conditions a Hadamard-basis joint distribution on `b = 0`.
pub fn condition_on_zero(dist: &JointDistribution) -> Result<MeasurementSummary> {
    if !dist.output_hadamards() {
        return Err(Error::config(
            "conditioning on the all-zero outcome needs the output Hadamards",
        ));
    }
    let zero_column = (0..dist.bins()).map(|k| dist.prob(k, 0)).collect();
    summarize(dist.m(), zero_column, dist.phase_marginal(), dist.phase_map())
}

/// The same summary straight from the spectrum in O(2^m N), without the
/// joint distribution:
/// `p(k, 0) = |sum_j A_k(phi_j) alpha_j^2|^2` and
/// `p(k) = sum_j |A_k(phi_j)|^2 alpha_j^2`.
pub fn spectral_summary(
    spectrum: &Spectrum,
    alphas: &AlphaVector,
    cfg: &QpeConfig,
) -> Result<MeasurementSummary> {
    cfg.check_spectral(spectrum.order())?;
    let map = cfg.resolve_phase_map(spectrum)?;
    let (zero_column, marginal): (Vec<f64>, Vec<f64>) = (0..cfg.bins() as u64)
        .into_par_iter()
        .map(|k| {
            let mut coherent = Complex64::default();
            let mut incoherent = 0.0;
            for (phase, a) in map.phases.iter().zip(&alphas.alphas) {
                let amp = kernel_amplitude(*phase, k, cfg.m);
                coherent += amp * (a * a);
                incoherent += amp.norm_sqr() * a * a;
            }
            (coherent.norm_sqr(), incoherent)
        })
        .unzip();
    summarize(cfg.m, zero_column, marginal, &map)
}

/// Multinomial sample of `shots` outcomes, as counts in the same (k, b)
/// layout as the distribution. Deterministic for a given seed.
pub fn sample(dist: &JointDistribution, shots: u64, seed: u64) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(Error::config("shots must be at least 1"));
    }
    let probs = dist.probs();
    let mut rng = stream_rng(seed, 0);
    let mut counts = vec![0u64; probs.len()];
    let last = probs.iter().rposition(|p| *p > 0.0).unwrap_or(0);
    let mut remaining = shots;
    let mut mass_left: f64 = probs.iter().sum();
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i == last {
            counts[i] = remaining;
            break;
        }
        if p <= 0.0 {
            continue;
        }
        let q = (p / mass_left).clamp(0.0, 1.0);
        let c = Binomial::new(remaining, q)
            .map_err(|e| Error::config(format!("binomial draw: {e}")))?
            .sample(&mut rng);
        counts[i] = c;
        remaining -= c;
        mass_left -= p;
    }
    Ok(counts)
}
