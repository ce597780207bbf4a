//! Simulation of GHZ-state generation for groups of qutrits distributed over
//! coupled cavities.
//!
//! Core types are generic over the real scalar ([`Real`]: `f32` or `f64`);
//! the aliases below fix the precision for everyday use.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod hilbert;
pub mod protocol;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

pub type C64 = num_complex::Complex64;
pub type Operator = hilbert::OperatorMatrix<f64>;
pub type Operator32 = hilbert::OperatorMatrix<f32>;
pub type State = hilbert::QuantumState<f64>;
pub type State32 = hilbert::QuantumState<f32>;
pub type Hamiltonian = hamiltonian::ModulatedHamiltonian<f64>;
pub type Hamiltonian32 = hamiltonian::ModulatedHamiltonian<f32>;
