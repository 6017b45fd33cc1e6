use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, Par};

use super::{StructureReport, SymmetricMatrix};
use crate::error::{Error, Result};

/// Full eigendecomposition of a symmetric matrix.
///
/// Eigenvalues are ascending; column `j` of the eigenvector matrix pairs with
/// eigenvalue `j`, so the principal pair sits at index `order - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    /// Column-major, `order * order`.
    eigenvectors: Vec<f64>,
    residual_norm: f64,
}

impl Spectrum {
    /// Assembles a spectrum from explicit eigenpairs, e.g. for constructed
    /// test spectra. Columns are kept with the signs given; the residual is
    /// zero because there is no source matrix.
    pub fn from_parts(eigenvalues: Vec<f64>, columns: Vec<Vec<f64>>) -> Result<Self> {
        let n = eigenvalues.len();
        if n == 0 || columns.len() != n || columns.iter().any(|c| c.len() != n) {
            return Err(Error::config("spectrum needs N eigenvalues and N columns of length N"));
        }
        if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::config("eigenvalues must be ascending"));
        }
        for a in 0..n {
            for b in a..n {
                let dot: f64 = columns[a].iter().zip(&columns[b]).map(|(x, y)| x * y).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                if (dot - want).abs() > 1e-10 {
                    return Err(Error::config(format!(
                        "eigenvector columns {a} and {b} are not orthonormal (dot = {dot})"
                    )));
                }
            }
        }
        Ok(Self {
            eigenvalues,
            eigenvectors: columns.concat(),
            residual_norm: 0.0,
        })
    }

    pub fn order(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, j: usize) -> &[f64] {
        let n = self.order();
        &self.eigenvectors[j * n..(j + 1) * n]
    }

    pub fn eigenvectors(&self) -> impl Iterator<Item = &[f64]> {
        self.eigenvectors.chunks_exact(self.order())
    }

    pub fn residual_norm(&self) -> f64 {
        self.residual_norm
    }

    pub fn principal_index(&self) -> usize {
        self.order() - 1
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.order() - 1]
    }

    /// Negates eigenvector `j`.
    pub fn flip_sign(&mut self, j: usize) {
        let n = self.order();
        for v in &mut self.eigenvectors[j * n..(j + 1) * n] {
            *v = -*v;
        }
    }

    /// Applies the sign convention to every column: coefficient sum positive,
    /// or, when the sum vanishes, first nonzero entry positive.
    pub fn canonicalize_signs(&mut self) {
        for j in 0..self.order() {
            if needs_flip(self.eigenvector(j)) {
                self.flip_sign(j);
            }
        }
    }
}

fn needs_flip(v: &[f64]) -> bool {
    let sum: f64 = v.iter().sum();
    if sum.abs() > 1e-12 {
        sum < 0.0
    } else {
        v.iter()
            .find(|x| x.abs() > super::ZERO_TOL)
            .is_some_and(|x| *x < 0.0)
    }
}

/// Dense symmetric eigendecomposition (Householder tridiagonalization plus a
/// divide-and-conquer tridiagonal solver), run sequentially so results do not
/// depend on the thread count.
pub fn eigendecompose(m: &SymmetricMatrix) -> Result<Spectrum> {
    let n = m.order();
    let a = m.to_faer();
    let mut s = faer::diag::Diag::<f64>::zeros(n);
    let mut u = Mat::<f64>::zeros(n, n);
    let par = Par::Seq;
    let mut buf = MemBuffer::new(evd::self_adjoint_evd_scratch::<f64>(
        n,
        ComputeEigenvectors::Yes,
        par,
        Default::default(),
    ));
    evd::self_adjoint_evd(
        a.as_ref(),
        s.as_mut(),
        Some(u.as_mut()),
        par,
        MemStack::new(&mut buf),
        Default::default(),
    )
    .map_err(|_| Error::ConvergenceFailure {
        residual: f64::NAN,
        tolerance: f64::NAN,
    })?;

    let eigenvalues: Vec<f64> = s.column_vector().iter().copied().collect();

    // residual: max_j ||H v_j - lambda_j v_j||_2
    let mut hv = Mat::<f64>::zeros(n, n);
    matmul(hv.as_mut(), Accum::Replace, a.as_ref(), u.as_ref(), 1.0, par);
    let residual_norm = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| {
                    let r = hv[(i, j)] - eigenvalues[j] * u[(i, j)];
                    r * r
                })
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0f64, f64::max);

    let max_abs = eigenvalues.iter().fold(0.0f64, |acc, l| acc.max(l.abs()));
    let tolerance = 1e-8 * (1.0 + max_abs);
    if residual_norm.is_nan() || residual_norm > tolerance {
        return Err(Error::ConvergenceFailure { residual: residual_norm, tolerance });
    }

    let mut eigenvectors = Vec::with_capacity(n * n);
    for j in 0..n {
        eigenvectors.extend(u.col(j).iter().copied());
    }
    let mut spectrum = Spectrum {
        eigenvalues,
        eigenvectors,
        residual_norm,
    };
    spectrum.canonicalize_signs();
    Ok(spectrum)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub index: usize,
    /// Entries that came out slightly negative after sign fixing (numerical noise).
    pub negative_entries: Vec<usize>,
}

impl PrincipalPair {
    pub fn min_entry(&self) -> f64 {
        self.vector.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry(&self) -> f64 {
        self.vector.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// The algebraically largest eigenpair with the Perron vector made positive.
pub fn principal_eigenpair(
    spectrum: &Spectrum,
    structure: &StructureReport,
) -> Result<PrincipalPair> {
    structure.require_perron()?;
    let index = spectrum.principal_index();
    let mut vector = spectrum.eigenvector(index).to_vec();
    if needs_flip(&vector) {
        vector.iter_mut().for_each(|v| *v = -*v);
    }
    if let Some((i, &v)) = vector.iter().enumerate().find(|(_, v)| **v < -1e-6) {
        return Err(Error::PerronViolation { index: i, value: v });
    }
    let negative_entries = vector
        .iter()
        .enumerate()
        .filter(|(_, v)| **v < 0.0)
        .map(|(i, _)| i)
        .collect::<Vec<_>>();
    if !negative_entries.is_empty() {
        log::debug!("principal eigenvector has {} negative noise entries", negative_entries.len());
    }
    Ok(PrincipalPair {
        value: spectrum.eigenvalues()[index],
        vector,
        index,
        negative_entries,
    })
}
