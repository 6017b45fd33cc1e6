//! Success probabilities of equal-superposition phase estimation.
//!
//! With the second register prepared in the uniform state, eigenvalue `j`
//! appears with probability `alpha_j^2`, where `alpha_j` is the normalized
//! coefficient sum of eigenvector `j`. Re-measuring the second register in the
//! Hadamard basis and keeping the all-zero outcome happens with probability
//! `P_reg2 = sum_j alpha_j^4`, after which the principal eigenvalue is read
//! with probability `P_reg1 = alpha_1^4 / P_reg2`.
//!
//! The estimators predict these numbers from column sums alone: the closer
//! the matrix is to a stochastic one (equal column sums), the closer the
//! principal eigenvector is to the uniform state.

use crate::error::Result;
use crate::matrix::{
    check_structure, eigendecompose, nonneg_shift, principal_eigenpair, shifted_column_sums,
    stochastic_scaling_with_spectrum, PrincipalPair, Spectrum, SymmetricMatrix,
};

/// Overlaps of the eigenvectors with the uniform state.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaVector {
    pub alphas: Vec<f64>,
    pub principal_index: usize,
}

impl AlphaVector {
    pub fn principal(&self) -> f64 {
        self.alphas[self.principal_index]
    }

    /// `|sum_j alpha_j^2 - 1|`.
    pub fn parseval_defect(&self) -> f64 {
        (self.alphas.iter().map(|a| a * a).sum::<f64>() - 1.0).abs()
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }
}

/// `alpha_j = (1/sqrt N) sum_i v_j[i]`, using the eigenvector signs stored in
/// the spectrum.
pub fn eigenvector_sums(spectrum: &Spectrum) -> AlphaVector {
    let norm = (spectrum.order() as f64).sqrt().recip();
    AlphaVector {
        alphas: spectrum
            .eigenvectors()
            .map(|v| v.iter().sum::<f64>() * norm)
            .collect(),
        principal_index: spectrum.principal_index(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessProbabilities {
    /// Principal eigenvalue read out without output Hadamards.
    pub alpha1_sq: f64,
    /// Second register reads all zeros in the Hadamard basis.
    pub p_reg2: f64,
    /// Principal eigenvalue read out given the all-zero outcome.
    pub p_reg1: f64,
}

pub fn success_probabilities(alphas: &AlphaVector) -> SuccessProbabilities {
    let n = alphas.len() as f64;
    let alpha1_sq = alphas.principal().powi(2);
    let raw: f64 = alphas.alphas.iter().map(|a| a.powi(4)).sum();
    debug_assert!(
        raw >= 1.0 / n - 1e-12 && raw <= 1.0 + 1e-12,
        "P_reg2 = {raw} violates 1/N <= P_reg2 <= 1"
    );
    // Cauchy-Schwarz guarantees the bound; the clamp only absorbs rounding
    let p_reg2 = raw.clamp(1.0 / n, 1.0);
    SuccessProbabilities {
        alpha1_sq,
        p_reg2,
        p_reg1: alpha1_sq * alpha1_sq / p_reg2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimates {
    pub alpha1_sq_est: f64,
    pub p_reg2_est: f64,
    pub p_reg1_est: f64,
    /// Variance of the unit-normalized column sums.
    pub sigma1: f64,
    /// Variance of the unit-normalized inverse column sums.
    pub sigma2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

/// Population variance (Welford), exactly zero for identical entries.
fn population_variance(xs: &[f64]) -> f64 {
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (k, &x) in xs.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (x - mean);
    }
    (m2 / xs.len() as f64).max(0.0)
}

fn unit_normalized(xs: &[f64]) -> Vec<f64> {
    let norm = xs.iter().map(|x| x * x).sum::<f64>().sqrt();
    xs.iter().map(|x| x / norm).collect()
}

/// A-priori estimates from the column sums of the shifted matrix. Both the
/// sums and their inverses are scaled to unit Euclidean norm before taking
/// variances, so the estimates are invariant under positive scaling of `m`.
pub fn estimate_probabilities(m: &SymmetricMatrix) -> Result<Estimates> {
    let (_, sums, _) = shifted_column_sums(m)?;
    let n = sums.len() as f64;
    let inverses: Vec<f64> = sums.iter().map(|s| 1.0 / s).collect();
    let sigma1 = population_variance(&unit_normalized(&sums));
    let sigma2 = population_variance(&unit_normalized(&inverses));

    let lambda = |sigma: f64| (1.0 / n - sigma) / (1.0 / n + sigma);
    let lambda1 = lambda(sigma1);
    let lambda2 = lambda(sigma2);
    let p_reg2_est = ((lambda1 + lambda2) / 2.0).clamp(0.0, 1.0);
    let alpha1_sq_est = (((1.0 - n * sigma1) + (1.0 - n * sigma2)) / 2.0).clamp(0.0, 1.0);
    let p_reg1_est = if p_reg2_est == 0.0 {
        0.0
    } else {
        (alpha1_sq_est * alpha1_sq_est / p_reg2_est).clamp(0.0, 1.0)
    };
    Ok(Estimates {
        alpha1_sq_est,
        p_reg2_est,
        p_reg1_est,
        sigma1,
        sigma2,
        lambda1,
        lambda2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioBound {
    /// Largest over smallest nonzero entry of the shifted matrix.
    pub bound: f64,
    /// Largest over smallest principal eigenvector entry.
    pub actual: f64,
    /// The bound is only guaranteed for strictly positive matrices.
    pub applicable: bool,
}

pub fn ratio_bound(m: &SymmetricMatrix, principal: &PrincipalPair) -> RatioBound {
    let actual = principal.max_entry() / principal.min_entry();
    let Ok((shifted, _)) = nonneg_shift(m) else {
        return RatioBound {
            bound: f64::NAN,
            actual,
            applicable: false,
        };
    };
    let (lo, hi) = shifted
        .as_slice()
        .iter()
        .filter(|v| **v != 0.0)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let applicable = check_structure(&shifted).strictly_positive;
    let bound = hi / lo;
    if applicable {
        debug_assert!(actual <= bound * (1.0 + 1e-9), "ratio {actual} exceeds bound {bound}");
    }
    RatioBound {
        bound,
        actual,
        applicable,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityReport {
    pub order: usize,
    pub principal_eigenvalue: f64,
    pub alpha1_sq: f64,
    pub p_reg2: f64,
    pub p_reg1: f64,
    pub alpha1_sq_est: f64,
    pub p_reg2_est: f64,
    pub p_reg1_est: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub ratio_bound: f64,
    pub ratio_actual: f64,
    pub ratio_applicable: bool,
    pub epsilon_forward: f64,
    pub epsilon_inverse: f64,
    pub shift: f64,
    pub parseval_defect: f64,
}

impl ProbabilityReport {
    /// `1/N <= P_reg2 <= 1`.
    pub fn bound_ok(&self) -> bool {
        let lo = 1.0 / self.order as f64;
        self.p_reg2 >= lo && self.p_reg2 <= 1.0
    }

    pub fn parseval_ok(&self) -> bool {
        self.parseval_defect <= 1e-10
    }

    pub fn computed(&self) -> SuccessProbabilities {
        SuccessProbabilities {
            alpha1_sq: self.alpha1_sq,
            p_reg2: self.p_reg2,
            p_reg1: self.p_reg1,
        }
    }
}

/// Everything derived from one matrix: the report plus the intermediate
/// spectrum and overlaps, which the phase-estimation engines reuse.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub report: ProbabilityReport,
    pub spectrum: Spectrum,
    pub alphas: AlphaVector,
    pub principal: PrincipalPair,
}

pub fn analyze(m: &SymmetricMatrix) -> Result<Analysis> {
    let structure = check_structure(m);
    structure.require_perron()?;
    let spectrum = eigendecompose(m)?;
    let principal = principal_eigenpair(&spectrum, &structure)?;
    let alphas = eigenvector_sums(&spectrum);
    let computed = success_probabilities(&alphas);
    let est = estimate_probabilities(m)?;
    let ratio = ratio_bound(m, &principal);
    let scaling = stochastic_scaling_with_spectrum(m, &spectrum)?;
    let report = ProbabilityReport {
        order: m.order(),
        principal_eigenvalue: principal.value,
        alpha1_sq: computed.alpha1_sq,
        p_reg2: computed.p_reg2,
        p_reg1: computed.p_reg1,
        alpha1_sq_est: est.alpha1_sq_est,
        p_reg2_est: est.p_reg2_est,
        p_reg1_est: est.p_reg1_est,
        sigma1: est.sigma1,
        sigma2: est.sigma2,
        lambda1: est.lambda1,
        lambda2: est.lambda2,
        ratio_bound: ratio.bound,
        ratio_actual: ratio.actual,
        ratio_applicable: ratio.applicable,
        epsilon_forward: scaling.epsilon_forward,
        epsilon_inverse: scaling.epsilon_inverse,
        shift: scaling.shift_used,
        parseval_defect: alphas.parseval_defect(),
    };
    Ok(Analysis {
        report,
        spectrum,
        alphas,
        principal,
    })
}

pub fn full_report(m: &SymmetricMatrix) -> Result<ProbabilityReport> {
    analyze(m).map(|a| a.report)
}
