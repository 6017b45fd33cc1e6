use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::{probability_of, walsh_hadamard, JointDistribution, QpeConfig, MAX_DENSE_M, MAX_DENSE_QUBITS};
use crate::error::{Error, Result};
use crate::matrix::{eigendecompose, Spectrum, SymmetricMatrix};

/// Statevector simulation of the circuit on `m + n` qubits.
pub fn run_dense(m: &SymmetricMatrix, cfg: &QpeConfig) -> Result<JointDistribution> {
    check_dense(m.order(), cfg)?;
    let spectrum = eigendecompose(m)?;
    run_dense_with_spectrum(&spectrum, cfg)
}

/// As [`run_dense`], with `U` synthesized from an existing eigendecomposition.
///
/// Steps: Hadamards on both registers; for each phase qubit `j`, apply
/// `U^(2^j) = V diag(exp(i 2^j phi)) V^T` to the second register on the
/// branches where that qubit is set; inverse QFT on the phase register as a
/// DFT along the phase index; optional Hadamards on the second register.
pub fn run_dense_with_spectrum(spectrum: &Spectrum, cfg: &QpeConfig) -> Result<JointDistribution> {
    let order = spectrum.order();
    let qubits = check_dense(order, cfg)?;
    let map = cfg.resolve_phase_map(spectrum)?;
    let bins = cfg.bins();

    let amp0 = Complex64::new(((bins * order) as f64).sqrt().recip(), 0.0);
    let mut state = vec![amp0; bins * order];

    for j in 0..cfg.m {
        let power = (1u64 << j) as f64;
        let unitary = evolution_power(spectrum, &map.phases, power);
        let bit = 1usize << j;
        state
            .par_chunks_mut(order)
            .enumerate()
            .filter(|(x, _)| x & bit != 0)
            .for_each(|(_, psi)| apply(&unitary, psi));
    }

    // inverse QFT along the phase index: out[k] = 2^-m/2 sum_x exp(-2 pi i x k / 2^m) in[x]
    let fft = FftPlanner::<f64>::new().plan_fft_forward(bins);
    let scale = (bins as f64).sqrt().recip();
    let mut column = vec![Complex64::default(); bins];
    for b in 0..order {
        for (x, c) in column.iter_mut().enumerate() {
            *c = state[x * order + b];
        }
        fft.process(&mut column);
        for (k, c) in column.iter().enumerate() {
            state[k * order + b] = c * scale;
        }
    }

    if cfg.output_hadamards {
        state.par_chunks_mut(order).for_each(walsh_hadamard);
    }

    let probs = state.into_iter().map(probability_of).collect();
    Ok(JointDistribution::from_amplitudes(cfg.m, qubits, cfg.output_hadamards, map, probs))
}

fn check_dense(order: usize, cfg: &QpeConfig) -> Result<usize> {
    let qubits = super::qubits_of(order)?;
    if !(1..=MAX_DENSE_M).contains(&cfg.m) || qubits > MAX_DENSE_QUBITS {
        return Err(Error::config(format!(
            "dense engine needs 1 <= m <= {MAX_DENSE_M} and n <= {MAX_DENSE_QUBITS} (got m = {}, n = {qubits})",
            cfg.m
        )));
    }
    Ok(qubits)
}

/// Row-major `V diag(exp(i power phi)) V^T`.
fn evolution_power(spectrum: &Spectrum, phases: &[f64], power: f64) -> Vec<Complex64> {
    let n = spectrum.order();
    let factors: Vec<Complex64> = phases
        .iter()
        .map(|p| Complex64::from_polar(1.0, (p * power).rem_euclid(TAU)))
        .collect();
    let mut u = vec![Complex64::default(); n * n];
    for (v, f) in spectrum.eigenvectors().zip(&factors) {
        for a in 0..n {
            let fa = f * v[a];
            for (b, &vb) in v.iter().enumerate() {
                u[a * n + b] += fa * vb;
            }
        }
    }
    u
}

fn apply(unitary: &[Complex64], psi: &mut [Complex64]) {
    let n = psi.len();
    let out: Vec<Complex64> = (0..n)
        .map(|a| {
            unitary[a * n..(a + 1) * n]
                .iter()
                .zip(psi.iter())
                .map(|(u, p)| u * p)
                .sum()
        })
        .collect();
    psi.copy_from_slice(&out);
}
