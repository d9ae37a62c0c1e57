//! Finite-truncation spectral triples on generalized crossed products.
//!
//! The crate builds matrix models of a Dirac-Rieffel operator on a torus, of the
//! vertical operator on the module of spectral subspaces, and of the lifted
//! operator obtained from a two-sided Hermitian connexion. Every algebraic
//! identity involved can be checked numerically.

pub mod base;
pub mod bimodule;
pub mod cli;
pub mod clifford;
pub mod connexion;
pub mod error;
pub mod fourier;
pub mod gcp;
pub mod instance;
pub mod lift;
pub mod operator;
pub mod qhm;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex64;
pub type CMatrix = nalgebra::DMatrix<C64>;

/// `e(t) = exp(2 pi i t)`.
pub fn e(t: f64) -> C64 {
    C64::from_polar(1.0, std::f64::consts::TAU * t)
}
