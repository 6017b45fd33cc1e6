//! Small matrices with known, published behaviour.

use crate::matrix::SymmetricMatrix;

/// A 4x4 non-negative matrix whose eigenvectors are close to the identity
/// columns. Its principal eigenvector does *not* have the largest
/// coefficient sum, so equal-superposition phase estimation favours a
/// non-principal eigenvalue (14.4411) after conditioning.
///
/// Eigenvalues: 5.3537, 12.0193, 14.4411, 21.8753.
pub fn near_diagonal_4x4() -> SymmetricMatrix {
    SymmetricMatrix::from_rows(&[
        [21.8214, 0.0, 0.6118, 0.4983],
        [0.0, 14.2944, 0.4983, 0.6118],
        [0.6118, 0.4983, 12.1626, 0.0],
        [0.4983, 0.6118, 0.0, 5.4111],
    ])
    .expect("fixture is symmetric")
}

/// Published eigenvalues of [`near_diagonal_4x4`], ascending.
pub const NEAR_DIAGONAL_EIGENVALUES: [f64; 4] = [5.3537, 12.0193, 14.4411, 21.8753];

/// Published eigenvector coefficient-sum magnitudes of [`near_diagonal_4x4`],
/// in ascending-eigenvalue order.
pub const NEAR_DIAGONAL_SUMS: [f64; 4] = [0.90578, 0.68529, 1.22675, 1.09773];

/// Published eigenvectors of [`near_diagonal_4x4`], one array per eigenvector,
/// in ascending-eigenvalue order.
pub const NEAR_DIAGONAL_EIGENVECTORS: [[f64; 4]; 4] = [
    [0.0304613, 0.0686662, -0.0077623, -0.9971443],
    [0.0597207, 0.2074209, -0.9761393, 0.0237068],
    [0.0215934, -0.9758165, -0.2076080, -0.0649217],
    [0.9975166, 0.0066086, 0.0631720, 0.0304360],
];
