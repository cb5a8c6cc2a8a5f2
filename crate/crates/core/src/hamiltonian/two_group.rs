//! Sector blocks for two groups of equivalent nuclei at fixed total spin of
//! the larger group.

use super::reduced::exchange_block;
use super::{BlockHamiltonian, NuclearLabel, StateLabel};
use crate::error::{Error, Result};
use crate::scalar::{cr, CMatrix, Real};
use crate::spin::{spin_addition_counts, HalfInt, SpinHalf};
use crate::system::SpinSystemSpec;

/// Bookkeeping needed to undo the zero padding of one sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SectorPadding {
    /// Padded nuclear register slots.
    pub padded_count: usize,
    /// Nuclear register size `2^q`.
    pub sector_dim: usize,
    /// Number of degenerate copies of this sector.
    pub degeneracy: u64,
}

/// Total spins of the first group, descending. Only groups where every
/// total spin occurs once (one or two nuclei) are supported.
pub fn inner_spins(nuclei: usize) -> Result<Vec<HalfInt>> {
    let row = spin_addition_counts(nuclei)?;
    if row.values().any(|&c| c != 1) {
        return Err(Error::InvalidSpec(format!(
            "first group of {nuclei} nuclei has repeated total spins; one or two nuclei supported"
        )));
    }
    Ok(row.keys().rev().copied().collect())
}

/// Block for fixed `I2` (total spin of the second group).
///
/// Basis: `m2` descending, then each `|I1, m1>` (I1 descending, m1
/// descending), then the cation spin. The cation couples to the first
/// group through `1 (x) CG Lambda CG` and to the second through the
/// embedded `CG_{I2}` blocks, one per `|I1, m1>` slot.
pub fn build_two_group_block<T: Real>(outer: HalfInt, spec: &SpinSystemSpec<T>) -> Result<(BlockHamiltonian<T>, SectorPadding)> {
    spec.validate()?;
    let (g1, g2) = match spec.groups.as_slice() {
        [a, b] => (a, b),
        _ => return Err(Error::InvalidSpec("sector blocks need exactly two nuclear groups".into())),
    };
    let outer_row = spin_addition_counts(g2.count)?;
    let degeneracy = *outer_row
        .get(&outer)
        .ok_or_else(|| Error::InvalidArgument(format!("I2 = {outer} does not occur for {} nuclei", g2.count)))?;
    let inner = inner_spins(g1.count)?;
    let slots: Vec<(HalfInt, HalfInt)> = inner.iter().flat_map(|&s| s.projections().map(move |m| (s, m))).collect();
    let k = slots.len();
    let outer_ms: Vec<HalfInt> = outer.projections().collect();
    let real = outer_ms.len() * k;
    let nuclear_dim = real.next_power_of_two().max(1);
    let prime_dim = 2 * real;

    let (a1, a2) = (spec.hfc_angular(0), spec.hfc_angular(1));
    let mut hp = CMatrix::<T>::zeros(prime_dim, prime_dim);

    // first group: 1_{2 I2 + 1} (x) (CG_I1 Lambda CG_I1 (+) ...)
    let mut inner_block = CMatrix::<T>::zeros(2 * k, 2 * k);
    let mut start = 0;
    for &s in &inner {
        let b = exchange_block::<T>(s)? * a1;
        for r in 0..b.nrows() {
            for c in 0..b.ncols() {
                inner_block[(start + r, start + c)] = cr(b[(r, c)]);
            }
        }
        start += b.nrows();
    }
    for mi in 0..outer_ms.len() {
        let off = mi * 2 * k;
        hp.view_mut((off, off), (2 * k, 2 * k)).copy_from(&inner_block);
    }

    // second group: CG_{I2} Lambda CG_{I2} embedded once per inner slot
    let outer_block = exchange_block::<T>(outer)? * a2;
    let place = |p: usize, slot: usize| (p / 2) * 2 * k + 2 * slot + p % 2;
    for slot in 0..k {
        for r in 0..outer_block.nrows() {
            for c in 0..outer_block.ncols() {
                let v = outer_block[(r, c)];
                if v != T::zero() {
                    hp[(place(r, slot), place(c, slot))] += cr(v);
                }
            }
        }
    }

    let (z1, z2) = (spec.zeeman_cation(), spec.zeeman_anion());
    let dim = 4 * nuclear_dim;
    let mut h = CMatrix::<T>::zeros(dim, dim);
    for anion in [SpinHalf::Up, SpinHalf::Down] {
        let off = anion.bit() * 2 * nuclear_dim;
        h.view_mut((off, off), (prime_dim, prime_dim)).copy_from(&hp);
        for i in 0..prime_dim {
            let cation = SpinHalf::from_bit(i);
            h[(off + i, off + i)] -= cr(z1 * super::z_sign(cation) + z2 * super::z_sign(anion));
        }
    }

    let mut labels = Vec::with_capacity(dim);
    for anion in [SpinHalf::Up, SpinHalf::Down] {
        for nuc in 0..nuclear_dim {
            let nuclear = if nuc < real {
                let (inner_spin, inner_m) = slots[nuc % k];
                NuclearLabel::Pair { outer_spin: outer, outer_m: outer_ms[nuc / k], inner_spin, inner_m }
            } else {
                NuclearLabel::Padding
            };
            let weight = if nuc < real { degeneracy } else { 0 };
            for cation in [SpinHalf::Up, SpinHalf::Down] {
                labels.push(StateLabel { nuclear, cation, anion, degeneracy: weight });
            }
        }
    }
    let padding = SectorPadding { padded_count: nuclear_dim - real, sector_dim: nuclear_dim, degeneracy };
    Ok((BlockHamiltonian::new(h, labels, nuclear_dim)?, padding))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{NuclearGroup, RelaxationTimes};

    fn dmb() -> SpinSystemSpec<f64> {
        SpinSystemSpec::new(
            vec![NuclearGroup::from_gauss(2, 6.5), NuclearGroup::from_gauss(12, 16.6)],
            2.0028,
            2.0028,
            0.0,
            RelaxationTimes::none(),
        )
        .unwrap()
    }

    #[test]
    fn sector_sizes_and_padding() {
        let want = [(6, 64, 12), (5, 64, 20), (4, 64, 28), (3, 32, 4), (2, 32, 12), (1, 16, 4), (0, 4, 0)];
        for (i2, dim, pad) in want {
            let (h, p) = build_two_group_block(HalfInt::integer(i2), &dmb()).unwrap();
            assert_eq!((p.sector_dim, p.padded_count), (dim, pad), "I2 = {i2}");
            assert_eq!(h.dim(), 4 * dim);
            assert_eq!(h.padded_nuclear_slots(), pad);
        }
        let (h, _) = build_two_group_block(HalfInt::integer(1), &dmb()).unwrap();
        assert_eq!(h.dim(), 64);
    }

    #[test]
    fn stretched_corner_eigenvalues() {
        // |I2=6, m2=6>|1,1>|up> is an eigenstate with a1/2 + 3 a2
        let s = dmb();
        let (h, _) = build_two_group_block(HalfInt::integer(6), &s).unwrap();
        let want = 0.5 * s.hfc_angular(0) + 3.0 * s.hfc_angular(1);
        assert!((h.matrix()[(0, 0)].re - want).abs() < 1e-13);
        let row_off: f64 = (1..h.dim()).map(|j| h.matrix()[(0, j)].norm()).sum();
        assert!(row_off < 1e-14);
    }

    #[test]
    fn rejects_out_of_range_sector() {
        assert!(build_two_group_block(HalfInt::integer(7), &dmb()).is_err());
        assert!(inner_spins(3).is_err());
    }
}
