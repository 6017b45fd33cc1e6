use std::f64::consts::TAU;

use perron_pea::fixtures::near_diagonal_4x4;
use perron_pea::generators::{build_local_hamiltonian, gen_local_spec, gen_random_symmetric, LocalModel};
use perron_pea::matrix::{eigendecompose, PhaseMap, Spectrum, SymmetricMatrix};
use perron_pea::probability::{analyze, eigenvector_sums, success_probabilities};
use perron_pea::qpe::{
    condition_on_zero, nearest_bin, run_dense, run_spectral, sample, spectral_summary, Engine, QpeConfig,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fixture value of the all-zero probability, from the published eigenvectors.
const FIXTURE_P_REG2: f64 = 0.28816;

fn case(seed: u64) -> SymmetricMatrix {
    let n = 1 + seed as usize % 4;
    if seed.is_multiple_of(2) || n < 3 {
        gen_random_symmetric(1 << n, 0.6, seed).unwrap()
    } else {
        build_local_hamiltonian(&gen_local_spec(n, LocalModel::H2, seed).unwrap()).unwrap()
    }
}

#[test]
fn dense_and_spectral_agree() {
    for seed in 0..20u64 {
        let m = case(seed);
        let a = analyze(&m).unwrap();
        for bits in [1, 3, 6] {
            for hadamards in [true, false] {
                let cfg = QpeConfig::new(bits).with_output_hadamards(hadamards);
                let d = run_dense(&m, &cfg.clone().with_engine(Engine::Dense)).unwrap();
                let s = run_spectral(&a.spectrum, &a.alphas, &cfg).unwrap();
                assert!((d.total() - 1.0).abs() < 1e-10 && (s.total() - 1.0).abs() < 1e-10);
                let tv = d.tv_distance(&s);
                assert!(tv <= 1e-9, "seed {seed} m {bits} hadamards {hadamards}: tv {tv}");
            }
        }
    }
}

/// Orthonormal basis of order `n` with eigenphases placed on distinct bins.
fn exact_phase_case(n: usize, bits: u32, seed: u64) -> (Spectrum, QpeConfig, Vec<usize>) {
    let spectrum = eigendecompose(&gen_random_symmetric(n, 0.8, seed).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bins: Vec<usize> = (0..1 << bits).collect();
    bins.shuffle(&mut rng);
    bins.truncate(n);
    let phases = bins.iter().map(|&k| TAU * k as f64 / (1u64 << bits) as f64).collect();
    let cfg = QpeConfig::new(bits).with_phase_map(PhaseMap::explicit(phases).unwrap());
    (spectrum, cfg, bins)
}

#[test]
fn exact_phases_reproduce_closed_forms() {
    for seed in 0..20u64 {
        let bits = 3 + (seed % 4) as u32;
        let n = if bits == 3 { 4 } else { 8 };
        let (spectrum, cfg, bins) = exact_phase_case(n, bits, seed);
        let alphas = eigenvector_sums(&spectrum);
        let exact = success_probabilities(&alphas);

        let dist = run_spectral(&spectrum, &alphas, &cfg).unwrap();
        let marginal = dist.phase_marginal();
        for (j, &k) in bins.iter().enumerate() {
            assert!((marginal[k] - alphas.alphas[j].powi(2)).abs() < 1e-12);
        }
        let summary = condition_on_zero(&dist).unwrap();
        assert!((summary.p_zero - exact.p_reg2).abs() < 1e-12, "seed {seed}");
        assert!((summary.principal_mass - exact.p_reg1).abs() < 1e-12, "seed {seed}");

        let fast = spectral_summary(&spectrum, &alphas, &cfg).unwrap();
        assert!((fast.p_zero - summary.p_zero).abs() < 1e-12);
        assert!((fast.principal_mass - summary.principal_mass).abs() < 1e-12);

        let plain = run_spectral(&spectrum, &alphas, &cfg.clone().with_output_hadamards(false)).unwrap();
        let principal = bins[alphas.principal_index];
        assert!((plain.phase_marginal()[principal] - exact.alpha1_sq).abs() < 1e-12);
    }
}

#[test]
fn sign_flips_leave_engines_unchanged() {
    let m = gen_random_symmetric(8, 0.7, 4).unwrap();
    let spectrum = eigendecompose(&m).unwrap();
    let mut flipped = spectrum.clone();
    flipped.flip_sign(0);
    flipped.flip_sign(5);
    let cfg = QpeConfig::new(5);
    let a = run_spectral(&spectrum, &eigenvector_sums(&spectrum), &cfg).unwrap();
    let b = run_spectral(&flipped, &eigenvector_sums(&flipped), &cfg).unwrap();
    assert!(a.probs().iter().zip(b.probs()).all(|(x, y)| (x - y).abs() <= 1e-12));
}

#[test]
fn fixture_converges_with_register_size() {
    let a = analyze(&near_diagonal_4x4()).unwrap();
    let errors: Vec<f64> = [6, 8, 10, 12]
        .iter()
        .map(|&bits| {
            let s = spectral_summary(&a.spectrum, &a.alphas, &QpeConfig::new(bits)).unwrap();
            (s.p_zero - a.report.p_reg2).abs()
        })
        .collect();
    assert!(errors.windows(2).all(|w| w[1] <= w[0]), "{errors:?}");

    let s12 = spectral_summary(&a.spectrum, &a.alphas, &QpeConfig::new(12)).unwrap();
    assert!((s12.p_zero - FIXTURE_P_REG2).abs() <= 2e-3, "{}", s12.p_zero);

    // the most likely conditional readout is not the principal eigenvalue
    let s10 = spectral_summary(&a.spectrum, &a.alphas, &QpeConfig::new(10)).unwrap();
    assert!((s10.eigenvalue_estimate - 14.4411).abs() < 0.02, "{}", s10.eigenvalue_estimate);
    assert_ne!(s10.top_bin, s10.principal_bin);
}

#[test]
fn dense_matches_fixture_readout() {
    let m = near_diagonal_4x4();
    let dist = run_dense(&m, &QpeConfig::new(8).with_engine(Engine::Dense)).unwrap();
    let s = condition_on_zero(&dist).unwrap();
    let a = analyze(&m).unwrap();
    let fast = spectral_summary(&a.spectrum, &a.alphas, &QpeConfig::new(8)).unwrap();
    assert!((s.p_zero - fast.p_zero).abs() < 1e-10);
    assert_eq!(s.principal_bin, nearest_bin(dist.phase_map().phases[3], 8));
}

#[test]
fn sampled_frequencies_within_four_sigma() {
    let a = analyze(&near_diagonal_4x4()).unwrap();
    let dist = run_spectral(&a.spectrum, &a.alphas, &QpeConfig::new(3)).unwrap();
    let shots = 100_000u64;
    let counts = sample(&dist, shots, 77).unwrap();
    assert_eq!(counts.iter().sum::<u64>(), shots);
    for (c, p) in counts.iter().zip(dist.probs()) {
        let mean = shots as f64 * p;
        let sd = (shots as f64 * p * (1.0 - p)).sqrt();
        assert!((*c as f64 - mean).abs() <= 4.0 * sd + 1e-9, "count {c}, expected {mean} +- {sd}");
    }
    assert_eq!(counts, sample(&dist, shots, 77).unwrap());
    assert_eq!(sample(&dist, 1, 3).unwrap().iter().sum::<u64>(), 1);
    assert!(sample(&dist, 0, 3).is_err());
}
