use perron_pea::generators::gen_random_symmetric;
use perron_pea::matrix::{check_structure, eigendecompose, SymmetricMatrix};
use perron_pea::probability::{eigenvector_sums, estimate_probabilities, full_report, success_probabilities};
use proptest::prelude::*;

fn same_up_to_sign(a: &[f64], b: &[f64], tol: f64) -> bool {
    let plus = a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol);
    let minus = a.iter().zip(b).all(|(x, y)| (x + y).abs() <= tol);
    plus || minus
}

fn gap(eigs: &[f64]) -> f64 {
    eigs.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

fn matrix() -> impl Strategy<Value = SymmetricMatrix> {
    (2usize..=10, 0.3f64..=1.0, any::<u64>())
        .prop_map(|(n, d, seed)| gen_random_symmetric(n, d, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shift_moves_eigenvalues_only(m in matrix(), c in -5.0f64..5.0) {
        let a = eigendecompose(&m).unwrap();
        let b = eigendecompose(&m.shifted(c)).unwrap();
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            prop_assert!((y - x - c).abs() <= 1e-9);
        }
        if gap(a.eigenvalues()) > 1e-6 {
            for j in 0..m.order() {
                prop_assert!(same_up_to_sign(a.eigenvector(j), b.eigenvector(j), 1e-7));
            }
        }
        let (r, s) = (full_report(&m).unwrap(), full_report(&m.shifted(c)).unwrap());
        prop_assert!((r.alpha1_sq - s.alpha1_sq).abs() <= 1e-9);
        prop_assert!((r.p_reg2 - s.p_reg2).abs() <= 1e-9);
        prop_assert!((r.p_reg1 - s.p_reg1).abs() <= 1e-9);
    }

    #[test]
    fn scaling_scales_eigenvalues(m in matrix(), gamma in 0.05f64..20.0) {
        let a = eigendecompose(&m).unwrap();
        let b = eigendecompose(&m.scaled(gamma)).unwrap();
        let tol = 1e-9 * (1.0 + gamma) * (1.0 + a.max_eigenvalue().abs().max(a.min_eigenvalue().abs()));
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            prop_assert!((y - gamma * x).abs() <= tol);
        }
        if gap(a.eigenvalues()) > 1e-6 {
            for j in 0..m.order() {
                prop_assert!(same_up_to_sign(a.eigenvector(j), b.eigenvector(j), 1e-7));
            }
        }
        let (e, f) = (estimate_probabilities(&m).unwrap(), estimate_probabilities(&m.scaled(gamma)).unwrap());
        prop_assert!((e.alpha1_sq_est - f.alpha1_sq_est).abs() <= 1e-12);
        prop_assert!((e.p_reg2_est - f.p_reg2_est).abs() <= 1e-12);
        prop_assert!((e.p_reg1_est - f.p_reg1_est).abs() <= 1e-12);
    }

    #[test]
    fn sign_flips_leave_probabilities_unchanged(m in matrix(), flips in any::<u16>()) {
        let s = eigendecompose(&m).unwrap();
        let mut t = s.clone();
        for j in 0..m.order() {
            if flips >> (j % 16) & 1 == 1 {
                t.flip_sign(j);
            }
        }
        let (p, q) = (success_probabilities(&eigenvector_sums(&s)), success_probabilities(&eigenvector_sums(&t)));
        prop_assert!((p.alpha1_sq - q.alpha1_sq).abs() <= 1e-15);
        prop_assert!((p.p_reg2 - q.p_reg2).abs() <= 1e-15);
        prop_assert!((p.p_reg1 - q.p_reg1).abs() <= 1e-15);
    }

    #[test]
    fn parseval_and_bounds(m in matrix()) {
        let s = eigendecompose(&m).unwrap();
        let alphas = eigenvector_sums(&s);
        let n = m.order() as f64;
        let sq: f64 = alphas.alphas.iter().map(|a| a * a).sum();
        let quartic: f64 = alphas.alphas.iter().map(|a| a.powi(4)).sum();
        prop_assert!((sq - 1.0).abs() <= 1e-10);
        prop_assert!(quartic >= 1.0 / n - 1e-12 && quartic <= 1.0 + 1e-12);
        let r = full_report(&m).unwrap();
        prop_assert!(r.bound_ok() && r.parseval_ok());
        prop_assert!(r.p_reg1 >= r.alpha1_sq * r.alpha1_sq - 1e-15 && r.p_reg1 <= 1.0 + 1e-12);
        for v in [r.alpha1_sq_est, r.p_reg2_est, r.p_reg1_est] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }
}

/// Connectivity by repeated squaring of the boolean adjacency matrix.
fn closure_irreducible(n: usize, adj: &[bool]) -> bool {
    let mut reach: Vec<bool> = (0..n * n).map(|k| adj[k] || k / n == k % n).collect();
    for _ in 0..n {
        let prev = reach.clone();
        for i in 0..n {
            for j in 0..n {
                reach[i * n + j] = (0..n).any(|k| prev[i * n + k] && prev[k * n + j]);
            }
        }
    }
    reach.iter().all(|&r| r)
}

#[test]
fn irreducibility_matches_transitive_closure() {
    for n in 1..=5usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        for pattern in 0u32..(1 << pairs.len()) {
            let mut adj = vec![false; n * n];
            let mut m = SymmetricMatrix::identity(n).unwrap();
            for (bit, &(i, j)) in pairs.iter().enumerate() {
                if pattern >> bit & 1 == 1 {
                    adj[i * n + j] = true;
                    adj[j * n + i] = true;
                    m.set(i, j, 1.0).unwrap();
                }
            }
            assert_eq!(
                check_structure(&m).irreducible,
                closure_irreducible(n, &adj),
                "order {n}, pattern {pattern:b}"
            );
        }
    }
}

#[test]
fn eigensolver_residuals_on_seeded_matrices() {
    for seed in 0..100u64 {
        let n = 2 + (seed as usize % 40);
        let m = gen_random_symmetric(n, 0.5, seed).unwrap();
        let s = eigendecompose(&m).unwrap();
        let scale = 1.0 + s.max_eigenvalue().abs().max(s.min_eigenvalue().abs());
        assert!(s.residual_norm() <= 1e-10 * scale, "seed {seed}: {}", s.residual_norm());
        assert!(s.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        for a in 0..n {
            for b in 0..n {
                let dot: f64 = s.eigenvector(a).iter().zip(s.eigenvector(b)).map(|(x, y)| x * y).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - want).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn report_is_finite_at_order_512() {
    let m = gen_random_symmetric(512, 0.5, 2024).unwrap();
    let r = full_report(&m).unwrap();
    for v in [r.alpha1_sq, r.p_reg2, r.p_reg1, r.alpha1_sq_est, r.p_reg2_est, r.p_reg1_est] {
        assert!((0.0..=1.0).contains(&v));
    }
    assert!(r.p_reg2 >= 1.0 / 512.0);
    assert!(r.epsilon_forward.is_finite());
}
