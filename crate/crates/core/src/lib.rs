//! Equal-superposition phase estimation for irreducible symmetric matrices
//! with non-negative off-diagonal entries.
//!
//! The crate computes the success probability of reading the principal
//! (Perron) eigenvalue three ways: exactly from the eigendecomposition
//! ([`probability`]), by simulating the circuit ([`qpe`]), and a priori from
//! column sums ([`probability::estimate_probabilities`]). [`generators`] and
//! [`experiment`] reproduce random-ensemble comparisons of the three.

pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod generators;
pub mod io;
pub mod matrix;
pub mod plot;
pub mod probability;
pub mod qpe;
pub mod report;

pub use error::{Error, Result};
pub use matrix::{SymmetricMatrix, Spectrum};
pub use probability::{full_report, ProbabilityReport};
