use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

/// `sin(pi x)` with exact zeros at the integers.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    let a = r.abs();
    if a == 0.0 || a == 1.0 {
        return 0.0;
    }
    let s = if a > 0.5 { (PI * (1.0 - a)).sin() } else { (PI * a).sin() };
    s.copysign(r)
}

/// Amplitude of phase-register bin `k` for eigenphase `phase` after the
/// inverse QFT on `m` qubits:
///
/// `A_k(phase) = 2^-m * sum_{x < 2^m} exp(i x (phase - 2 pi k / 2^m))`
///
/// evaluated in closed form. Exactly 1 when the phase sits on bin `k`.
pub fn kernel_amplitude(phase: f64, k: u64, m: u32) -> Complex64 {
    let bins = (m as f64).exp2();
    // offset from bin k in units of bins, reduced to [-bins/2, bins/2]
    let mut u = phase * bins / TAU - k as f64;
    u -= bins * (u / bins).round();
    if u == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let magnitude = sin_pi(u) / (bins * sin_pi(u / bins));
    Complex64::from_polar(magnitude, PI * u * (bins - 1.0) / bins)
}

/// Nearest register bin to a phase.
pub fn nearest_bin(phase: f64, m: u32) -> usize {
    let bins = 1u64 << m;
    ((phase * bins as f64 / TAU).round() as u64 % bins) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn direct_sum(phase: f64, k: u64, m: u32) -> Complex64 {
        let bins = 1u64 << m;
        let delta = phase - TAU * k as f64 / bins as f64;
        (0..bins)
            .map(|x| Complex64::from_polar(1.0, x as f64 * delta))
            .sum::<Complex64>()
            / bins as f64
    }

    #[test]
    fn matches_direct_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let m = rng.random_range(1..=7);
            let phase = rng.random_range(0.0..TAU);
            let k = rng.random_range(0..(1u64 << m));
            let got = kernel_amplitude(phase, k, m);
            let want = direct_sum(phase, k, m);
            assert!((got - want).norm() < 1e-12, "m={m} phase={phase} k={k}: {got} vs {want}");
        }
    }

    #[test]
    fn exact_bin_is_point_mass() {
        for m in 1..=6u32 {
            let bins = 1u64 << m;
            for k in 0..bins {
                let phase = TAU * k as f64 / bins as f64;
                assert!((kernel_amplitude(phase, k, m) - 1.0).norm() < 1e-13);
                for other in (0..bins).filter(|o| *o != k) {
                    assert!(kernel_amplitude(phase, other, m).norm() < 1e-14);
                }
            }
        }
        assert_eq!(kernel_amplitude(0.0, 0, 4), Complex64::new(1.0, 0.0));
        assert_eq!(kernel_amplitude(0.0, 3, 4), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn bins_are_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let m = rng.random_range(1..=10);
            let phase = rng.random_range(0.0..TAU);
            let total: f64 = (0..(1u64 << m)).map(|k| kernel_amplitude(phase, k, m).norm_sqr()).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_qubit_quarter_turn() {
        let a0 = kernel_amplitude(PI / 2.0, 0, 1).norm_sqr();
        let a1 = kernel_amplitude(PI / 2.0, 1, 1).norm_sqr();
        assert!((a0 - 0.5).abs() < 1e-15 && (a1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn nearest_bin_wraps() {
        assert_eq!(nearest_bin(TAU * 3.0 / 8.0, 3), 3);
        assert_eq!(nearest_bin(TAU - 1e-9, 3), 0);
    }
}
