//! Radical-pair Hamiltonians in several representations.
//!
//! Every builder returns a [`BlockHamiltonian`] on the register layout
//! `index = e2 * 2 * nuclear_dim + nuclear * 2 + e1`: the cation electron is
//! site 0, the nuclear register sits above it and the anion electron is the
//! most significant site. Entries are angular frequencies in rad/ns.

mod full;
mod partitioned;
mod pauli;
mod reduced;
mod two_group;

pub use full::{build_full_one_group, build_full_product_space, total_spin_state, FULL_ORACLE_MAX_NUCLEI};
pub use partitioned::{
    build_partitioned, build_partitioned_state, partition_parameters, pauli_decompose_partitioned,
    PartitionParameters,
};
pub use pauli::{pauli_decompose, reconstruct, PauliString, PauliTerm};
pub use reduced::{build_degenerate_one_group, build_reduced_one_group, NuclearOrdering};
pub use two_group::{build_two_group_block, inner_spins, SectorPadding};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_deviation, is_zero_row, qubit_count};
use crate::scalar::{to_f64, CMatrix, Real};
use crate::spin::{HalfInt, SpinHalf};
use nalgebra::ComplexField;

/// Hermiticity tolerance relative to the largest entry.
pub const HERMITIAN_TOLERANCE: f64 = 1e-13;

/// What a nuclear register index stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NuclearLabel {
    /// Computational product state of individual nuclei (bit `k` = nucleus `k`).
    Product(usize),
    /// Total-spin state `|I, m>`; `copy` distinguishes degenerate multiplets.
    Total { spin: HalfInt, m: HalfInt, copy: u64 },
    /// Two-group state `|I2, m2> |I1, m1>`.
    Pair { outer_spin: HalfInt, outer_m: HalfInt, inner_spin: HalfInt, inner_m: HalfInt },
    /// A state of the partition whose hyperfine couplings are dropped.
    Truncated,
    /// Zero padding up to a power of two.
    Padding,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StateLabel {
    pub nuclear: NuclearLabel,
    pub cation: SpinHalf,
    pub anion: SpinHalf,
    /// Number of physical states this basis vector stands in for.
    pub degeneracy: u64,
}

impl StateLabel {
    pub fn is_padding(&self) -> bool {
        self.nuclear == NuclearLabel::Padding
    }
}

/// Hermitian Hamiltonian with a labelled basis.
#[derive(Clone, Debug)]
pub struct BlockHamiltonian<T: Real> {
    matrix: CMatrix<T>,
    labels: Vec<StateLabel>,
    nuclear_dim: usize,
}

impl<T: Real> BlockHamiltonian<T> {
    /// Validates dimension, Hermiticity and padding before wrapping.
    pub fn new(matrix: CMatrix<T>, labels: Vec<StateLabel>, nuclear_dim: usize) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: matrix.ncols() });
        }
        qubit_count(dim)?;
        if dim != 4 * nuclear_dim {
            return Err(Error::DimensionMismatch { expected: 4 * nuclear_dim, found: dim });
        }
        if labels.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: labels.len() });
        }
        let scale = matrix.iter().fold(1.0f64, |acc, z| acc.max(to_f64(z.modulus())));
        let dev = to_f64(hermitian_deviation(&matrix));
        if dev > HERMITIAN_TOLERANCE * scale {
            return Err(Error::NotHermitian(dev));
        }
        for (i, label) in labels.iter().enumerate() {
            if label.is_padding() && !is_zero_row(&matrix, i) {
                return Err(Error::InvalidArgument(format!("padded row {i} is not zero")));
            }
        }
        Ok(BlockHamiltonian { matrix, labels, nuclear_dim })
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn labels(&self) -> &[StateLabel] {
        &self.labels
    }

    /// Dimension of the (padded) nuclear register.
    pub fn nuclear_dim(&self) -> usize {
        self.nuclear_dim
    }

    pub fn site_count(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    /// `(cation, anion)` electron sites.
    pub fn electron_sites(&self) -> (usize, usize) {
        (0, self.site_count() - 1)
    }

    /// Number of basis vectors that are zero padding.
    pub fn padded_rows(&self) -> usize {
        self.labels.iter().filter(|l| l.is_padding()).count()
    }

    /// Number of padded nuclear register slots.
    pub fn padded_nuclear_slots(&self) -> usize {
        self.padded_rows() / 4
    }

    pub fn index(&self, nuclear: usize, cation: SpinHalf, anion: SpinHalf) -> usize {
        layout_index(self.nuclear_dim, nuclear, cation, anion)
    }
}

#[inline]
pub(crate) fn layout_index(nuclear_dim: usize, nuclear: usize, cation: SpinHalf, anion: SpinHalf) -> usize {
    anion.bit() * 2 * nuclear_dim + nuclear * 2 + cation.bit()
}

/// Labels for every register index, given a label per nuclear slot.
pub(crate) fn expand_labels(nuclear: &[(NuclearLabel, u64)]) -> Vec<StateLabel> {
    let mut out = Vec::with_capacity(4 * nuclear.len());
    for anion in [SpinHalf::Up, SpinHalf::Down] {
        for &(label, degeneracy) in nuclear {
            for cation in [SpinHalf::Up, SpinHalf::Down] {
                out.push(StateLabel { nuclear: label, cation, anion, degeneracy });
            }
        }
    }
    out
}

/// `+1` for spin up, `-1` for spin down.
#[inline]
pub(crate) fn z_sign<T: Real>(s: SpinHalf) -> T {
    match s {
        SpinHalf::Up => T::one(),
        SpinHalf::Down => -T::one(),
    }
}
