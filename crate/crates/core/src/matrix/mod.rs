//! Dense symmetric operators and the structural checks, scalings and
//! decompositions the rest of the crate builds on.

mod eigen;
mod phase;
mod split;

pub use eigen::{eigendecompose, principal_eigenpair, PrincipalPair, Spectrum};
pub use phase::{default_guard, phase_encode, PhaseMap};
pub use split::{hermitian_split, ComplexMatrix, HermitianSplit};

use std::collections::VecDeque;

use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;

use crate::error::{Error, Result};

/// Magnitudes at or below this are treated as structural zeros.
pub const ZERO_TOL: f64 = 1e-14;

/// Column sums at or below this cannot be inverted by the stochastic scaling.
pub const COLUMN_SUM_TOL: f64 = 1e-12;

/// A real symmetric matrix stored densely in row-major order.
///
/// Every constructor writes `(i, j)` and `(j, i)` from the same value, so the
/// two copies are bit-identical.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    order: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        Ok(Self {
            order,
            data: vec![0.0; order * order],
        })
    }

    pub fn identity(order: usize) -> Result<Self> {
        Self::diagonal(&vec![1.0; order])
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d)?;
        }
        Ok(m)
    }

    /// Builds a matrix from its upper triangle: `f(i, j)` is called for `i <= j`.
    pub fn from_upper_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut m = Self::zeros(order)?;
        for i in 0..order {
            for j in i..order {
                m.set(i, j, f(i, j))?;
            }
        }
        Ok(m)
    }

    /// Builds a matrix from `(i, j, value)` triples with `i <= j`. Repeated
    /// positions overwrite.
    pub fn from_upper_entries(
        order: usize,
        entries: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut m = Self::zeros(order)?;
        for (i, j, v) in entries {
            if i > j || j >= order {
                return Err(Error::config(format!(
                    "entry ({i}, {j}) is not in the upper triangle of an order-{order} matrix"
                )));
            }
            m.set(i, j, v)?;
        }
        Ok(m)
    }

    /// Builds a matrix from full rows; the rows must already be exactly symmetric.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let order = rows.len();
        for r in rows {
            if r.as_ref().len() != order {
                return Err(Error::NotSquare {
                    rows: order,
                    cols: r.as_ref().len(),
                });
            }
        }
        for i in 0..order {
            for j in 0..i {
                if rows[i].as_ref()[j] != rows[j].as_ref()[i] {
                    return Err(Error::config(format!("entries ({i}, {j}) and ({j}, {i}) differ")));
                }
            }
        }
        Self::from_upper_fn(order, |i, j| rows[i].as_ref()[j])
    }

    /// Sets `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::NonFinite { row: i, col: j });
        }
        let n = self.order;
        self.data[i * n + j] = value;
        self.data[j * n + i] = value;
        Ok(())
    }

    pub(crate) fn add_to(&mut self, i: usize, j: usize, value: f64) {
        let n = self.order;
        let v = self.data[i * n + j] + value;
        self.data[i * n + j] = v;
        self.data[j * n + i] = v;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `log2(order)` when the order is a power of two.
    pub fn qubit_count(&self) -> Option<usize> {
        self.order
            .is_power_of_two()
            .then(|| self.order.trailing_zeros() as usize)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.order..(i + 1) * self.order]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diagonal_entries(&self) -> Vec<f64> {
        (0..self.order).map(|i| self.get(i, i)).collect()
    }

    /// Nonzero entries of the upper triangle including the diagonal, row by row.
    pub fn upper_nonzeros(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.order;
        (0..n).flat_map(move |i| {
            (i..n).filter_map(move |j| {
                let v = self.get(i, j);
                (v != 0.0).then_some((i, j, v))
            })
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            order: self.order,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// `self + shift * I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.order {
            out.data[i * self.order + i] += shift;
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub(crate) fn to_faer(&self) -> Mat<f64> {
        Mat::from_fn(self.order, self.order, |i, j| self.get(i, j))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructureReport {
    pub offdiag_nonnegative: bool,
    pub irreducible: bool,
    pub strictly_positive: bool,
}

impl StructureReport {
    /// Off-diagonal non-negative and irreducible: the Perron-Frobenius setting.
    pub fn is_perron(&self) -> bool {
        self.offdiag_nonnegative && self.irreducible
    }

    pub fn require_perron(&self) -> Result<()> {
        if !self.offdiag_nonnegative {
            Err(Error::NotStoquastic)
        } else if !self.irreducible {
            Err(Error::Reducible)
        } else {
            Ok(())
        }
    }
}

pub fn check_structure(m: &SymmetricMatrix) -> StructureReport {
    let n = m.order();
    let mut offdiag_nonnegative = true;
    let mut strictly_positive = true;
    for i in 0..n {
        for (j, &v) in m.row(i).iter().enumerate() {
            if i != j && v < 0.0 {
                offdiag_nonnegative = false;
            }
            if v <= 0.0 {
                strictly_positive = false;
            }
        }
    }
    StructureReport {
        offdiag_nonnegative,
        irreducible: is_connected(m),
        strictly_positive,
    }
}

/// Breadth-first search over the undirected graph of nonzero off-diagonal entries.
fn is_connected(m: &SymmetricMatrix) -> bool {
    let n = m.order();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut reached = 1;
    while let Some(i) = queue.pop_front() {
        for (j, &v) in m.row(i).iter().enumerate() {
            if !seen[j] && j != i && v.abs() > ZERO_TOL {
                seen[j] = true;
                reached += 1;
                queue.push_back(j);
            }
        }
    }
    reached == n
}

/// Shifts the diagonal up just enough to make the matrix entrywise
/// non-negative. Eigenvectors are unchanged and eigenvalues move by `c`.
pub fn nonneg_shift(m: &SymmetricMatrix) -> Result<(SymmetricMatrix, f64)> {
    let n = m.order();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = m.get(i, j);
            if v < 0.0 {
                return Err(Error::NegativeOffDiagonal { row: i, col: j, value: v });
            }
        }
    }
    let min_diag = m.diagonal_entries().into_iter().fold(f64::INFINITY, f64::min);
    let c = (-min_diag).max(0.0);
    if c == 0.0 {
        Ok((m.clone(), 0.0))
    } else {
        Ok((m.shifted(c), c))
    }
}

/// `s[i] = sum_j m[j][i]`.
pub fn column_sums(m: &SymmetricMatrix) -> Vec<f64> {
    let n = m.order();
    (0..n)
        .map(|col| (0..n).map(|row| m.get(row, col)).sum())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingResult {
    /// Column sums of the shifted matrix; the diagonal of `D^-1`.
    pub column_sums: Vec<f64>,
    /// Inverse column sums; the diagonal of `D`.
    pub scaling_diagonal: Vec<f64>,
    /// `||H - HD||_F / ||H||_F` on the shifted matrix.
    pub epsilon_forward: f64,
    /// `||H^-1 - D^-1 H^-1||_F / ||H^-1||_F`; NaN when the shifted matrix is singular.
    pub epsilon_inverse: f64,
    pub shift_used: f64,
}

struct ForwardScaling {
    shifted: SymmetricMatrix,
    column_sums: Vec<f64>,
    scaling_diagonal: Vec<f64>,
    epsilon_forward: f64,
    shift_used: f64,
}

/// Column sums after [`nonneg_shift`], rejecting any sum too small to invert.
/// Returns the shifted matrix, its column sums and the shift.
pub fn shifted_column_sums(m: &SymmetricMatrix) -> Result<(SymmetricMatrix, Vec<f64>, f64)> {
    let (shifted, shift) = nonneg_shift(m)?;
    let sums = column_sums(&shifted);
    if let Some((column, &sum)) = sums.iter().enumerate().find(|(_, s)| **s <= COLUMN_SUM_TOL) {
        return Err(Error::ZeroColumnSum { column, sum });
    }
    Ok((shifted, sums, shift))
}

fn forward_scaling(m: &SymmetricMatrix) -> Result<ForwardScaling> {
    let (shifted, sums, shift_used) = shifted_column_sums(m)?;
    let scaling_diagonal: Vec<f64> = sums.iter().map(|s| 1.0 / s).collect();

    let n = shifted.order();
    let mut diff_sq = 0.0;
    for i in 0..n {
        for (j, &h) in shifted.row(i).iter().enumerate() {
            let d = h * (1.0 - scaling_diagonal[j]);
            diff_sq += d * d;
        }
    }
    let epsilon_forward = diff_sq.sqrt() / shifted.frobenius_norm();
    Ok(ForwardScaling {
        shifted,
        column_sums: sums,
        scaling_diagonal,
        epsilon_forward,
        shift_used,
    })
}

/// Shifts the matrix to be non-negative, then computes the diagonal scaling
/// that makes every column sum to one along with the forward and inverse
/// relative perturbation errors. The inverse is formed by an LU factorization.
pub fn stochastic_scaling(m: &SymmetricMatrix) -> Result<ScalingResult> {
    let fwd = forward_scaling(m)?;
    let n = fwd.shifted.order();
    let inv = fwd.shifted.to_faer().partial_piv_lu().inverse();

    let mut num = 0.0;
    let mut den = 0.0;
    let mut finite = true;
    for i in 0..n {
        let w = 1.0 - fwd.column_sums[i];
        for j in 0..n {
            let x = inv[(i, j)];
            finite &= x.is_finite();
            num += (w * x) * (w * x);
            den += x * x;
        }
    }
    let epsilon_inverse = if finite && den > 0.0 && den.is_finite() {
        (num / den).sqrt()
    } else {
        f64::NAN
    };
    Ok(ScalingResult {
        column_sums: fwd.column_sums,
        scaling_diagonal: fwd.scaling_diagonal,
        epsilon_forward: fwd.epsilon_forward,
        epsilon_inverse,
        shift_used: fwd.shift_used,
    })
}

/// Same result as [`stochastic_scaling`], with the inverse error evaluated from
/// an existing eigendecomposition of `m` in O(N^2):
/// `||row_i(H^-1)||^2 = sum_l v_l[i]^2 / mu_l^2` where `mu_l` are the shifted eigenvalues.
pub fn stochastic_scaling_with_spectrum(
    m: &SymmetricMatrix,
    spectrum: &Spectrum,
) -> Result<ScalingResult> {
    let fwd = forward_scaling(m)?;
    let n = fwd.shifted.order();
    let shifted_eigs: Vec<f64> = spectrum
        .eigenvalues()
        .iter()
        .map(|l| l + fwd.shift_used)
        .collect();
    let max_abs = shifted_eigs.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    let singular = shifted_eigs.iter().any(|l| l.abs() <= 1e-12 * max_abs.max(1.0));

    let epsilon_inverse = if singular {
        f64::NAN
    } else {
        let inv_sq: Vec<f64> = shifted_eigs.iter().map(|l| 1.0 / (l * l)).collect();
        let den: f64 = inv_sq.iter().sum();
        let mut row_norm_sq = vec![0.0; n];
        for (l, w) in inv_sq.iter().enumerate() {
            for (acc, v) in row_norm_sq.iter_mut().zip(spectrum.eigenvector(l)) {
                *acc += v * v * w;
            }
        }
        let num: f64 = row_norm_sq
            .iter()
            .zip(&fwd.column_sums)
            .map(|(r, s)| (1.0 - s) * (1.0 - s) * r)
            .sum();
        (num / den).sqrt()
    };
    Ok(ScalingResult {
        column_sums: fwd.column_sums,
        scaling_diagonal: fwd.scaling_diagonal,
        epsilon_forward: fwd.epsilon_forward,
        epsilon_inverse,
        shift_used: fwd.shift_used,
    })
}
