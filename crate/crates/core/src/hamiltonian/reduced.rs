//! One-group Hamiltonian in the total nuclear spin basis.

use super::{expand_labels, layout_index, BlockHamiltonian, NuclearLabel};
use crate::error::{Error, Result};
use crate::scalar::{cr, CMatrix, Real};
use crate::spin::{cg_block_matrix, exchange_eigenvalues, spin_addition_counts, HalfInt, MultiplicityRow, SpinHalf};
use crate::system::SpinSystemSpec;
use nalgebra::DMatrix;

/// Ordering of the `|I, m>` nuclear states: descending `I`, copy by copy,
/// descending `m` inside each multiplet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NuclearOrdering {
    nuclei: usize,
    row: MultiplicityRow,
    entries: Vec<(HalfInt, HalfInt, u64)>,
    degenerate: bool,
}

impl NuclearOrdering {
    /// One multiplet per distinct total spin.
    pub fn reduced(nuclei: usize) -> Result<Self> {
        Self::build(nuclei, false)
    }

    /// Every multiplet repeated by its multiplicity (`2^n` states).
    pub fn degenerate(nuclei: usize) -> Result<Self> {
        Self::build(nuclei, true)
    }

    fn build(nuclei: usize, degenerate: bool) -> Result<Self> {
        let row = spin_addition_counts(nuclei)?;
        let mut entries = Vec::new();
        for (&spin, &count) in row.iter().rev() {
            let copies = if degenerate { count } else { 1 };
            for copy in 0..copies {
                for m in spin.projections() {
                    entries.push((spin, m, copy));
                }
            }
        }
        Ok(NuclearOrdering { nuclei, row, entries, degenerate })
    }

    pub fn nuclei(&self) -> usize {
        self.nuclei
    }

    pub fn multiplicities(&self) -> &MultiplicityRow {
        &self.row
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Register size after padding to a power of two.
    pub fn padded_len(&self) -> usize {
        self.entries.len().next_power_of_two()
    }

    /// Register width in qubits.
    pub fn qubits(&self) -> usize {
        self.padded_len().trailing_zeros() as usize
    }

    pub fn index_of(&self, spin: HalfInt, m: HalfInt, copy: u64) -> Option<usize> {
        self.entries.iter().position(|&(s, mm, c)| s == spin && mm == m && c == copy)
    }

    pub fn label_of(&self, index: usize) -> Option<(HalfInt, HalfInt, u64)> {
        self.entries.get(index).copied()
    }

    /// Index rendered as a bit string of the register width.
    pub fn bit_string(&self, index: usize) -> String {
        let width = if self.degenerate { self.nuclei } else { self.qubits() };
        format!("{index:0width$b}")
    }

    pub fn entries(&self) -> &[(HalfInt, HalfInt, u64)] {
        &self.entries
    }
}

/// `H~ = a U Lambda U` over the nuclear ordering, then the Zeeman terms.
fn build_from_ordering<T: Real>(spec: &SpinSystemSpec<T>, ordering: &NuclearOrdering) -> Result<BlockHamiltonian<T>> {
    let nuclear_dim = ordering.padded_len();
    let dim = 4 * nuclear_dim;
    let a = spec.hfc_angular(0);
    let mut h = CMatrix::<T>::zeros(dim, dim);

    let mut start = 0;
    while start < ordering.len() {
        let (spin, _, _) = ordering.entries[start];
        let block = exchange_block::<T>(spin)? * a;
        let width = block.nrows();
        for anion in [SpinHalf::Up, SpinHalf::Down] {
            let offset = layout_index(nuclear_dim, start, SpinHalf::Up, anion);
            for r in 0..width {
                for c in 0..width {
                    h[(offset + r, offset + c)] = cr(block[(r, c)]);
                }
            }
        }
        start += spin.multiplicity();
    }

    let (z1, z2) = (spec.zeeman_cation(), spec.zeeman_anion());
    for anion in [SpinHalf::Up, SpinHalf::Down] {
        for nuc in 0..ordering.len() {
            for cation in [SpinHalf::Up, SpinHalf::Down] {
                let i = layout_index(nuclear_dim, nuc, cation, anion);
                h[(i, i)] -= cr(z1 * super::z_sign(cation) + z2 * super::z_sign(anion));
            }
        }
    }

    let mut nuclear: Vec<_> = ordering
        .entries
        .iter()
        .map(|&(spin, m, copy)| {
            let weight = if ordering.degenerate { 1 } else { ordering.row[&spin] };
            (NuclearLabel::Total { spin, m, copy }, weight)
        })
        .collect();
    nuclear.resize(nuclear_dim, (NuclearLabel::Padding, 0));
    BlockHamiltonian::new(h, expand_labels(&nuclear), nuclear_dim)
}

/// `U Lambda U` for `I (x) 1/2` in the product basis, units of `a`.
pub(crate) fn exchange_block<T: Real>(spin: HalfInt) -> Result<DMatrix<T>> {
    let u = cg_block_matrix::<T>(spin)?;
    let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(exchange_eigenvalues::<T>(spin)?));
    Ok(&u * lam * &u)
}

fn one_group<T: Real>(spec: &SpinSystemSpec<T>) -> Result<usize> {
    spec.validate()?;
    match spec.groups.as_slice() {
        [g] => Ok(g.count),
        _ => Err(Error::InvalidSpec("expected exactly one nuclear group".into())),
    }
}

/// One multiplet per total spin, padded to a power of two. For eight nuclei
/// this is the 25-state register padded to 32 (a 128-dimensional matrix).
pub fn build_reduced_one_group<T: Real>(spec: &SpinSystemSpec<T>) -> Result<BlockHamiltonian<T>> {
    let n = one_group(spec)?;
    build_from_ordering(spec, &NuclearOrdering::reduced(n)?)
}

/// Every degenerate multiplet kept; same spectrum as the product-space
/// oracle but block diagonal.
pub fn build_degenerate_one_group<T: Real>(spec: &SpinSystemSpec<T>) -> Result<BlockHamiltonian<T>> {
    let n = one_group(spec)?;
    build_from_ordering(spec, &NuclearOrdering::degenerate(n)?)
}
