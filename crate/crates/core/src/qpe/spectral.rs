use num_complex::Complex64;
use rayon::prelude::*;

use super::{kernel_amplitude, probability_of, walsh_hadamard, JointDistribution, QpeConfig, MAX_JOINT_LEN};
use crate::error::{Error, Result};
use crate::matrix::Spectrum;
use crate::probability::AlphaVector;

/// Closed-form joint distribution:
/// `p(k, b) = |sum_j A_k(phi_j) alpha_j w_j[b]|^2` where `w_j` is eigenvector
/// `j`, or its Walsh-Hadamard transform when output Hadamards are applied.
pub fn run_spectral(
    spectrum: &Spectrum,
    alphas: &AlphaVector,
    cfg: &QpeConfig,
) -> Result<JointDistribution> {
    let order = spectrum.order();
    let qubits = cfg.check_spectral(order)?;
    if alphas.len() != order {
        return Err(Error::config("alpha vector does not match the spectrum"));
    }
    let bins = cfg.bins();
    if bins.saturating_mul(order) > MAX_JOINT_LEN {
        return Err(Error::config(format!(
            "joint distribution of {bins} x {order} outcomes exceeds {MAX_JOINT_LEN}; use the summary instead"
        )));
    }
    let map = cfg.resolve_phase_map(spectrum)?;

    let basis: Vec<Vec<f64>> = spectrum
        .eigenvectors()
        .map(|v| {
            let mut w = v.to_vec();
            if cfg.output_hadamards {
                walsh_hadamard(&mut w);
            }
            w
        })
        .collect();

    let mut probs = vec![0.0; bins * order];
    probs.par_chunks_mut(order).enumerate().for_each(|(k, row)| {
        let mut amps = vec![Complex64::default(); order];
        for (j, w) in basis.iter().enumerate() {
            let c = kernel_amplitude(map.phases[j], k as u64, cfg.m) * alphas.alphas[j];
            if c == Complex64::default() {
                continue;
            }
            for (a, &x) in amps.iter_mut().zip(w) {
                *a += c * x;
            }
        }
        for (p, a) in row.iter_mut().zip(amps) {
            *p = probability_of(a);
        }
    });
    Ok(JointDistribution::from_amplitudes(cfg.m, qubits, cfg.output_hadamards, map, probs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::PhaseMap;
    use crate::probability::eigenvector_sums;
    use std::f64::consts::TAU;

    /// 4x4 spectrum from a Hadamard-like orthonormal basis with distinct overlaps.
    fn rotated_spectrum() -> Spectrum {
        let (c, s) = (0.8f64, 0.6f64);
        let h = 0.5;
        // rotate the uniform vector into a mix of two Walsh vectors
        let u = [h, h, h, h];
        let w1 = [h, -h, h, -h];
        let v0: Vec<f64> = u.iter().zip(&w1).map(|(a, b)| c * a + s * b).collect();
        let v1: Vec<f64> = u.iter().zip(&w1).map(|(a, b)| -s * a + c * b).collect();
        let v2 = vec![h, h, -h, -h];
        let v3 = vec![h, -h, -h, h];
        Spectrum::from_parts(vec![0.0, 1.0, 2.0, 3.0], vec![v1, v2, v3, v0]).unwrap()
    }

    #[test]
    fn exact_phases_give_point_masses() {
        let spec = rotated_spectrum();
        let alphas = eigenvector_sums(&spec);
        let m = 3;
        let bins_of = [1usize, 2, 5, 7];
        let map = PhaseMap::explicit(bins_of.iter().map(|k| TAU * *k as f64 / 8.0).collect()).unwrap();
        let plain = run_spectral(&spec, &alphas, &QpeConfig::new(m).with_output_hadamards(false).with_phase_map(map.clone()))
            .unwrap();
        let marginal = plain.phase_marginal();
        for (j, &k) in bins_of.iter().enumerate() {
            assert!((marginal[k] - alphas.alphas[j].powi(2)).abs() < 1e-12);
        }
        let had = run_spectral(&spec, &alphas, &QpeConfig::new(m).with_phase_map(map)).unwrap();
        let p_zero: f64 = (0..8).map(|k| had.prob(k, 0)).sum();
        let want: f64 = alphas.alphas.iter().map(|a| a.powi(4)).sum();
        assert!((p_zero - want).abs() < 1e-12);
        assert!((had.total() - 1.0).abs() < 1e-12 && (plain.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sign_flips_do_not_change_output() {
        let spec = rotated_spectrum();
        let cfg = QpeConfig::new(4);
        let base = run_spectral(&spec, &eigenvector_sums(&spec), &cfg).unwrap();
        let mut flipped = spec.clone();
        flipped.flip_sign(0);
        flipped.flip_sign(3);
        let other = run_spectral(&flipped, &eigenvector_sums(&flipped), &cfg).unwrap();
        assert!(base.tv_distance(&other) < 1e-12);
    }

    #[test]
    fn bounds_are_enforced() {
        let spec = rotated_spectrum();
        let alphas = eigenvector_sums(&spec);
        assert!(run_spectral(&spec, &alphas, &QpeConfig::new(0)).is_err());
        assert!(run_spectral(&spec, &alphas, &QpeConfig::new(25)).is_err());
        assert!(run_spectral(&spec, &alphas, &QpeConfig::new(23)).is_err());
        let short = PhaseMap::explicit(vec![0.0, 1.0]).unwrap();
        assert!(run_spectral(&spec, &alphas, &QpeConfig::new(3).with_phase_map(short)).is_err());
    }
}
