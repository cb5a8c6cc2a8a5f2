//! Eight-dimensional partitions of the one-group Hamiltonian: one nuclear
//! qubit and both electrons.

use super::{BlockHamiltonian, NuclearLabel, PauliTerm, StateLabel};
use crate::error::{Error, Result};
use crate::scalar::{cr, lit, CMatrix, Real};
use crate::spin::{spin_addition_counts, HalfInt, SpinHalf};
use crate::system::SpinSystemSpec;

/// Mixing amplitudes and exchange eigenvalues (units of `a`) of the 2x2
/// block reached from `|I, I>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartitionParameters<T> {
    pub x: T,
    pub y: T,
    pub lambda1: T,
    pub lambda2: T,
}

/// Parameters for the partition seeded by `|I, I>` of an `nuclei`-spin group.
pub fn partition_parameters<T: Real>(spin: HalfInt, nuclei: usize) -> Result<PartitionParameters<T>> {
    check_spin(spin, nuclei)?;
    let i = spin.value();
    if spin == HalfInt::ZERO {
        return Ok(PartitionParameters { x: T::one(), y: T::zero(), lambda1: T::zero(), lambda2: T::zero() });
    }
    Ok(PartitionParameters {
        x: lit((1.0 / (2.0 * i + 1.0)).sqrt()),
        y: lit((2.0 * i / (2.0 * i + 1.0)).sqrt()),
        lambda1: lit(i / 2.0),
        lambda2: lit(-(i + 1.0) / 2.0),
    })
}

fn check_spin(spin: HalfInt, nuclei: usize) -> Result<()> {
    let row = spin_addition_counts(nuclei)?;
    if !row.contains_key(&spin) {
        return Err(Error::InvalidArgument(format!("total spin {spin} does not occur for {nuclei} nuclei")));
    }
    Ok(())
}

fn single_group<T: Real>(spec: &SpinSystemSpec<T>) -> Result<usize> {
    spec.validate()?;
    match spec.groups.as_slice() {
        [g] => Ok(g.count),
        _ => Err(Error::InvalidSpec("partitions need exactly one nuclear group".into())),
    }
}

/// Exchange block on `(|M + 1/2, down>, |M - 1/2, up>)`, units of `a`.
fn pair_block(spin: HalfInt, total_m: HalfInt) -> [[f64; 2]; 2] {
    let (i, m) = (spin.value(), total_m.value());
    let n = 2.0 * i + 1.0;
    let x = ((i - m + 0.5) / n).sqrt();
    let y = ((i + m + 0.5) / n).sqrt();
    let (l1, l2) = (i / 2.0, -(i + 1.0) / 2.0);
    let off = x * y * (l1 - l2);
    [[x * x * l1 + y * y * l2, off], [off, y * y * l1 + x * x * l2]]
}

/// Partition containing `|I, m>` with either cation spin.
///
/// Inner basis (nuclear qubit, cation qubit): `|m,up>`, `|m,down>`,
/// `|m-1,up>`, `|m+1,down>`. The last two carry no hyperfine coupling when
/// they fall outside the multiplet.
pub fn build_partitioned_state<T: Real>(spin: HalfInt, m: HalfInt, spec: &SpinSystemSpec<T>) -> Result<BlockHamiltonian<T>> {
    let nuclei = single_group(spec)?;
    check_spin(spin, nuclei)?;
    if m.abs() > spin || (spin - m).twice() % 2 != 0 {
        return Err(Error::InvalidArgument(format!("m = {m} invalid for I = {spin}")));
    }
    let stretched = spin.value() / 2.0;
    let mut inner = [[0.0f64; 4]; 4];
    let has_lower = m > -spin;
    let has_upper = m < spin;
    if has_lower {
        let b = pair_block(spin, m - HalfInt::HALF);
        inner[1][1] = b[0][0];
        inner[1][2] = b[0][1];
        inner[2][1] = b[1][0];
        inner[2][2] = b[1][1];
    } else {
        inner[1][1] = stretched;
    }
    if has_upper {
        let b = pair_block(spin, m + HalfInt::HALF);
        inner[3][3] = b[0][0];
        inner[3][0] = b[0][1];
        inner[0][3] = b[1][0];
        inner[0][0] = b[1][1];
    } else {
        inner[0][0] = stretched;
    }

    let a = spec.hfc_angular(0);
    let (z1, z2) = (spec.zeeman_cation(), spec.zeeman_anion());
    let mut h = CMatrix::<T>::zeros(8, 8);
    for anion in [SpinHalf::Up, SpinHalf::Down] {
        let off = anion.bit() * 4;
        for r in 0..4 {
            for c in 0..4 {
                h[(off + r, off + c)] = cr(a * lit(inner[r][c]));
            }
            let cation = SpinHalf::from_bit(r);
            h[(off + r, off + r)] -= cr(z1 * super::z_sign(cation) + z2 * super::z_sign(anion));
        }
    }

    let degeneracy = spin_addition_counts(nuclei)?[&spin];
    let total = |mm: HalfInt| NuclearLabel::Total { spin, m: mm, copy: 0 };
    let slot = [
        total(m),
        total(m),
        if has_lower { total(m - HalfInt::integer(1)) } else { NuclearLabel::Truncated },
        if has_upper { total(m + HalfInt::integer(1)) } else { NuclearLabel::Truncated },
    ];
    let mut labels = Vec::with_capacity(8);
    for anion in [SpinHalf::Up, SpinHalf::Down] {
        for (j, &nuclear) in slot.iter().enumerate() {
            labels.push(StateLabel { nuclear, cation: SpinHalf::from_bit(j), anion, degeneracy });
        }
    }
    BlockHamiltonian::new(h, labels, 2)
}

/// Partition seeded by `|I, I>`.
pub fn build_partitioned<T: Real>(spin: HalfInt, spec: &SpinSystemSpec<T>) -> Result<BlockHamiltonian<T>> {
    build_partitioned_state(spin, spin, spec)
}

/// Closed-form Pauli expansion of [`build_partitioned`]: the seven strings
/// III, IZI, IIZ, IZZ, IXX, IYY, ZII (site order anion, nucleus, cation).
pub fn pauli_decompose_partitioned<T: Real>(spin: HalfInt, spec: &SpinSystemSpec<T>) -> Result<Vec<PauliTerm<T>>> {
    let nuclei = single_group(spec)?;
    let p = partition_parameters::<T>(spin, nuclei)?;
    let a = spec.hfc_angular(0);
    let quarter: T = lit(0.25);
    let split = p.lambda1 - p.lambda2;
    let skew = split * (p.x * p.x - p.y * p.y);
    let flip = a * split * p.x * p.y * lit(0.5);
    let terms = [
        (a * (p.lambda1 * lit(2.0) + p.lambda2) * quarter, "III"),
        (a * (p.lambda1 + skew) * quarter, "IZI"),
        (a * (p.lambda1 - skew) * quarter - spec.zeeman_cation(), "IIZ"),
        (-a * p.lambda2 * quarter, "IZZ"),
        (flip, "IXX"),
        (flip, "IYY"),
        (-spec.zeeman_anion(), "ZII"),
    ];
    terms.iter().map(|&(c, s)| PauliTerm::new(c, s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::reconstruct;
    use crate::linalg::max_abs_diff;
    use crate::system::{NuclearGroup, RelaxationTimes};

    fn spec(field: f64) -> SpinSystemSpec<f64> {
        SpinSystemSpec::new(vec![NuclearGroup::new(8, 2.49)], 2.0028, 2.0028, field, RelaxationTimes::none()).unwrap()
    }

    #[test]
    fn parameter_rows() {
        let p = partition_parameters::<f64>(HalfInt::integer(4), 8).unwrap();
        assert!((p.x - (1.0f64 / 9.0).sqrt()).abs() < 1e-15 && (p.y - (8.0f64 / 9.0).sqrt()).abs() < 1e-15);
        assert_eq!((p.lambda1, p.lambda2), (2.0, -2.5));
        let p = partition_parameters::<f64>(HalfInt::integer(1), 8).unwrap();
        assert_eq!((p.lambda1, p.lambda2), (0.5, -1.0));
        let p = partition_parameters::<f64>(HalfInt::ZERO, 8).unwrap();
        assert_eq!((p.lambda1, p.lambda2), (0.0, 0.0));
        assert!(partition_parameters::<f64>(HalfInt::integer(5), 8).is_err());
        assert!(partition_parameters::<f64>(HalfInt::HALF, 8).is_err());
    }

    #[test]
    fn spin_zero_has_no_hyperfine() {
        let h = build_partitioned(HalfInt::ZERO, &spec(0.0)).unwrap();
        assert_eq!(h.matrix().camax(), 0.0);
    }

    #[test]
    fn pauli_expansion_reconstructs() {
        for field in [0.0, 0.3] {
            for i in 0..=4 {
                let spin = HalfInt::integer(i);
                let h = build_partitioned(spin, &spec(field)).unwrap();
                let terms = pauli_decompose_partitioned(spin, &spec(field)).unwrap();
                assert_eq!(terms.len(), 7);
                assert!(max_abs_diff(&reconstruct(&terms).unwrap(), h.matrix()) < 1e-13);
            }
        }
    }

    #[test]
    fn zero_field_drops_anion_term() {
        let terms = pauli_decompose_partitioned(HalfInt::integer(4), &spec(0.0)).unwrap();
        assert_eq!(terms[6].coefficient, 0.0);
        assert_eq!(terms[4].coefficient, terms[5].coefficient);
    }
}
