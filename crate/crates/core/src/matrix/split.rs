use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    order: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let data = (0..order * order).map(|k| f(k / order, k % order)).collect();
        Self { order, data }
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.as_ref().len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: rows.first().map_or(0, |r| r.as_ref().len()),
            });
        }
        Ok(Self::from_fn(n, |i, j| Complex64::new(rows[i].as_ref()[j], 0.0)))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.order + j]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.order, |i, j| self.get(j, i).conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let n = self.order;
        Self::from_fn(n, |i, j| (0..n).map(|k| self.get(i, k) * rhs.get(k, j)).sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct HermitianSplit {
    pub hermitian: ComplexMatrix,
    pub skew: ComplexMatrix,
    /// `||A^dagger A - A A^dagger||_F`; zero iff `A` is normal.
    pub normality_defect: f64,
}

/// Splits `A` into `(A + A^dagger)/2` and `(A - A^dagger)/2`.
pub fn hermitian_split(a: &ComplexMatrix) -> HermitianSplit {
    let n = a.order();
    let mut h = vec![Complex64::default(); n * n];
    let mut s = vec![Complex64::default(); n * n];
    for i in 0..n {
        for j in i..n {
            let aij = a.get(i, j);
            let aji = a.get(j, i);
            let hij = (aij + aji.conj()) * 0.5;
            let sij = (aij - aji.conj()) * 0.5;
            h[i * n + j] = hij;
            s[i * n + j] = sij;
            if i == j {
                h[i * n + i] = Complex64::new(hij.re, 0.0);
                s[i * n + i] = Complex64::new(0.0, sij.im);
            } else {
                h[j * n + i] = hij.conj();
                s[j * n + i] = -sij.conj();
            }
        }
    }
    let ad = a.adjoint();
    let lhs = ad.matmul(a);
    let rhs = a.matmul(&ad);
    let normality_defect = lhs
        .data
        .iter()
        .zip(&rhs.data)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    HermitianSplit {
        hermitian: ComplexMatrix { order: n, data: h },
        skew: ComplexMatrix { order: n, data: s },
        normality_defect,
    }
}
