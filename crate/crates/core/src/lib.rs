//! Spin-correlated radical pair dynamics.
//!
//! Builds symmetry-reduced Hamiltonians for radicals with one or two groups of
//! equivalent nuclei, evolves the singlet state exactly, applies
//! infinite-temperature relaxation, cross-checks circuit realizations against
//! the direct matrix path and turns singlet traces into TR-MFE ratio curves.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`). The aliases at
//! the bottom of this file pin the common `f64` instantiations.

pub mod circuit;
pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod pipeline;
pub mod postprocess;
pub mod relaxation;
pub mod scalar;
pub mod spin;
pub mod system;
pub mod validation;

pub use error::{Error, Result};
pub use scalar::Real;
pub use spin::HalfInt;

pub type SpinSystemSpecF64 = system::SpinSystemSpec<f64>;
pub type BlockHamiltonianF64 = hamiltonian::BlockHamiltonian<f64>;
pub type DensityMatrixF64 = dynamics::DensityMatrix<f64>;
pub type TimeSeriesF64 = dynamics::TimeSeries<f64>;
pub type KrausChannelF64 = relaxation::KrausChannel<f64>;
pub type RelaxationParamsF64 = relaxation::RelaxationParams<f64>;
pub type CircuitF64 = circuit::Circuit<f64>;
pub type FluorescenceParamsF64 = postprocess::FluorescenceParams<f64>;

pub type SpinSystemSpecF32 = system::SpinSystemSpec<f32>;
pub type BlockHamiltonianF32 = hamiltonian::BlockHamiltonian<f32>;
pub type DensityMatrixF32 = dynamics::DensityMatrix<f32>;
pub type TimeSeriesF32 = dynamics::TimeSeries<f32>;
