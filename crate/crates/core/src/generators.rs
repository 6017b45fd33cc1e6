//! Seeded random ensembles: sparse symmetric matrices with non-negative
//! off-diagonals, and 3-local X/Z Hamiltonians.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`). A generator call seeds the
//! stream with `seed` and uses stream ids for retries; ensemble trials derive
//! their seed from the master seed with [`trial_seed`].

use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::{check_structure, SymmetricMatrix};

pub const MAX_IRREDUCIBLE_RETRIES: usize = 100;

/// Largest qubit count `build_local_hamiltonian` accepts by default.
pub const DEFAULT_QUBIT_CAP: usize = 13;

/// SplitMix64 finalizer applied to `master + trial`.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    let mut z = master.wrapping_add(trial.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Random symmetric matrix: each strictly-upper position is present with
/// probability `density` and uniform on (0, 1); the diagonal is standard
/// normal. Reducible draws are discarded and redrawn on a fresh stream.
pub fn gen_random_symmetric(order: usize, density: f64, seed: u64) -> Result<SymmetricMatrix> {
    if order < 2 {
        return Err(Error::config("random symmetric matrices need order >= 2"));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::config(format!("density {density} outside (0, 1]")));
    }
    for attempt in 0..MAX_IRREDUCIBLE_RETRIES {
        let mut rng = stream_rng(seed, attempt as u64);
        let mut m = SymmetricMatrix::zeros(order)?;
        for i in 0..order {
            for j in (i + 1)..order {
                if rng.random_bool(density) {
                    let v: f64 = rng.sample(Open01);
                    m.set(i, j, v)?;
                }
            }
        }
        for i in 0..order {
            let d: f64 = rng.sample(StandardNormal);
            m.set(i, i, d)?;
        }
        if check_structure(&m).irreducible {
            if attempt > 0 {
                log::debug!("seed {seed}: rejected {attempt} reducible draws");
            }
            return Ok(m);
        }
    }
    Err(Error::IrreducibleGenerationFailure {
        attempts: MAX_IRREDUCIBLE_RETRIES,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LocalModel {
    /// Three-body X and Z strings only.
    H1,
    /// One-, two- and three-body X and Z strings.
    H2,
}

impl fmt::Display for LocalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LocalModel::H1 => "H1",
            LocalModel::H2 => "H2",
        })
    }
}

impl FromStr for LocalModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "H1" => Ok(LocalModel::H1),
            "H2" => Ok(LocalModel::H2),
            _ => Err(Error::config(format!("unknown local model {s:?}"))),
        }
    }
}

/// One Pauli string: the product of X (or Z) on the qubits set in `mask`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    pub mask: u64,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalHamiltonianSpec {
    qubits: usize,
    model: LocalModel,
    x_terms: Vec<PauliTerm>,
    z_terms: Vec<PauliTerm>,
}

impl LocalHamiltonianSpec {
    /// Validates the terms. Repeated masks of the same kind are merged by
    /// summing their coefficients, keeping the first occurrence's position.
    pub fn new(
        qubits: usize,
        model: LocalModel,
        x_terms: Vec<PauliTerm>,
        z_terms: Vec<PauliTerm>,
    ) -> Result<Self> {
        if qubits == 0 || qubits > 63 {
            return Err(Error::config(format!("qubit count {qubits} outside 1..=63")));
        }
        let x_terms = merge_terms(x_terms);
        let z_terms = merge_terms(z_terms);
        for (kind, terms) in [("X", &x_terms), ("Z", &z_terms)] {
            for t in terms {
                let weight = t.mask.count_ones();
                if t.mask == 0 || t.mask >> qubits != 0 {
                    return Err(Error::config(format!(
                        "{kind} mask {:#x} is empty or touches qubits beyond {qubits}",
                        t.mask
                    )));
                }
                if weight > 3 || (model == LocalModel::H1 && weight != 3) {
                    return Err(Error::config(format!(
                        "{kind} mask {:#x} has weight {weight}, not allowed for model {model}",
                        t.mask
                    )));
                }
                if !t.coeff.is_finite() {
                    return Err(Error::config(format!("{kind} coefficient is not finite")));
                }
            }
        }
        if let Some(t) = x_terms.iter().find(|t| t.coeff < 0.0) {
            return Err(Error::config(format!(
                "X coefficient {} on mask {:#x} is negative; the Hamiltonian would not be stoquastic",
                t.coeff, t.mask
            )));
        }
        Ok(Self {
            qubits,
            model,
            x_terms,
            z_terms,
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn model(&self) -> LocalModel {
        self.model
    }

    pub fn x_terms(&self) -> &[PauliTerm] {
        &self.x_terms
    }

    pub fn z_terms(&self) -> &[PauliTerm] {
        &self.z_terms
    }
}

fn merge_terms(terms: Vec<PauliTerm>) -> Vec<PauliTerm> {
    let mut out: Vec<PauliTerm> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.iter_mut().find(|o| o.mask == t.mask) {
            Some(o) => o.coeff += t.coeff,
            None => out.push(t),
        }
    }
    out
}

/// All masks with `weight` bits set among the low `qubits` bits, in
/// lexicographic order of the qubit tuples `i < j < k`.
fn tuples(qubits: usize, weight: usize) -> Vec<u64> {
    let mut out = Vec::new();
    match weight {
        1 => out.extend((0..qubits).map(|i| 1u64 << i)),
        2 => {
            for i in 0..qubits {
                for j in (i + 1)..qubits {
                    out.push((1 << i) | (1 << j));
                }
            }
        }
        3 => {
            for i in 0..qubits {
                for j in (i + 1)..qubits {
                    for k in (j + 1)..qubits {
                        out.push((1 << i) | (1 << j) | (1 << k));
                    }
                }
            }
        }
        _ => unreachable!("locality is at most 3"),
    }
    out
}

/// Random local Hamiltonian: one X and one Z string per qubit tuple, X
/// coefficients uniform on [0, 1] and Z coefficients uniform on [-1, 1].
/// `H1` uses triples only; `H2` adds single qubits and pairs.
pub fn gen_local_spec(qubits: usize, model: LocalModel, seed: u64) -> Result<LocalHamiltonianSpec> {
    if qubits < 3 {
        return Err(Error::config("local Hamiltonians need at least 3 qubits"));
    }
    let weights: &[usize] = match model {
        LocalModel::H1 => &[3],
        LocalModel::H2 => &[1, 2, 3],
    };
    let mut rng = stream_rng(seed, 0);
    let mut x_terms = Vec::new();
    let mut z_terms = Vec::new();
    for &w in weights {
        for mask in tuples(qubits, w) {
            let k: f64 = rng.random_range(0.0..=1.0);
            let j: f64 = rng.random_range(-1.0..=1.0);
            x_terms.push(PauliTerm { mask, coeff: k });
            z_terms.push(PauliTerm { mask, coeff: j });
        }
    }
    LocalHamiltonianSpec::new(qubits, model, x_terms, z_terms)
}

pub fn build_local_hamiltonian(spec: &LocalHamiltonianSpec) -> Result<SymmetricMatrix> {
    build_local_hamiltonian_capped(spec, DEFAULT_QUBIT_CAP)
}

/// Dense matrix of the spec in the computational basis, qubit `q` being bit
/// `q` of the basis index. An X string with mask `x` couples `a` and `a ^ x`;
/// a Z string contributes `J * (-1)^popcount(a & z)` to the diagonal.
pub fn build_local_hamiltonian_capped(
    spec: &LocalHamiltonianSpec,
    cap: usize,
) -> Result<SymmetricMatrix> {
    if spec.qubits > cap {
        return Err(Error::DimensionOverflow {
            qubits: spec.qubits,
            cap,
        });
    }
    let order = 1usize << spec.qubits;
    let mut m = SymmetricMatrix::zeros(order)?;
    for a in 0..order {
        let diag: f64 = spec
            .z_terms
            .iter()
            .map(|t| {
                if (a as u64 & t.mask).count_ones().is_multiple_of(2) {
                    t.coeff
                } else {
                    -t.coeff
                }
            })
            .sum();
        m.add_to(a, a, diag);
        for t in &spec.x_terms {
            let b = a ^ t.mask as usize;
            if a < b {
                m.add_to(a, b, t.coeff);
            }
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnsembleKind {
    RandomSymmetric,
    LocalH1,
    LocalH2,
}

impl EnsembleKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EnsembleKind::RandomSymmetric => "random-symmetric",
            EnsembleKind::LocalH1 => "local-H1",
            EnsembleKind::LocalH2 => "local-H2",
        }
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random-symmetric" | "random" => Ok(EnsembleKind::RandomSymmetric),
            "local-h1" | "h1" => Ok(EnsembleKind::LocalH1),
            "local-h2" | "h2" => Ok(EnsembleKind::LocalH2),
            _ => Err(Error::config(format!("unknown ensemble kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub kind: EnsembleKind,
    /// Matrix order N; a power of two for the local kinds.
    pub order: usize,
    /// Random-symmetric only.
    pub density: f64,
    pub trial_count: usize,
    pub seed: u64,
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trial_count == 0 {
            return Err(Error::config("trial_count must be at least 1"));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::config(format!("density {} outside (0, 1]", self.density)));
        }
        match self.kind {
            EnsembleKind::RandomSymmetric if self.order < 2 => {
                Err(Error::config("random symmetric ensembles need N >= 2"))
            }
            EnsembleKind::LocalH1 | EnsembleKind::LocalH2
                if !self.order.is_power_of_two() || self.order < 8 =>
            {
                Err(Error::config(format!(
                    "local Hamiltonian ensembles need N = 2^n with n >= 3 (got {})",
                    self.order
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn qubits(&self) -> Option<usize> {
        self.order
            .is_power_of_two()
            .then(|| self.order.trailing_zeros() as usize)
    }

    pub fn seed_for(&self, trial: usize) -> u64 {
        trial_seed(self.seed, trial as u64)
    }

    pub fn generate(&self, trial: usize) -> Result<SymmetricMatrix> {
        let seed = self.seed_for(trial);
        match self.kind {
            EnsembleKind::RandomSymmetric => gen_random_symmetric(self.order, self.density, seed),
            EnsembleKind::LocalH1 | EnsembleKind::LocalH2 => {
                let model = if self.kind == EnsembleKind::LocalH1 {
                    LocalModel::H1
                } else {
                    LocalModel::H2
                };
                let n = self.qubits().ok_or_else(|| Error::config("N is not a power of two"))?;
                build_local_hamiltonian(&gen_local_spec(n, model, seed)?)
            }
        }
    }
}
