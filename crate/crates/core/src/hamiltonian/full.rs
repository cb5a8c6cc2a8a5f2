//! Brute-force Hamiltonian on the full tensor-product space of every nucleus
//! and both electrons. Exponential in the nucleus count; used as an oracle.

use super::{expand_labels, BlockHamiltonian, NuclearLabel};
use crate::error::{Error, Result};
use crate::linalg::{gather, scatter, Pauli};
use crate::scalar::{cr, lit, CMatrix, CVector, Cx, Real};
use crate::spin::{spin_addition_counts, HalfInt};
use crate::system::SpinSystemSpec;

/// Largest nucleus count the oracle accepts (a 4096-dimensional matrix).
pub const FULL_ORACLE_MAX_NUCLEI: usize = 10;

/// One-group oracle: `a I.S1 - zeta1 Z1 - zeta2 Z2` on `2^(N+2)` states.
pub fn build_full_one_group<T: Real>(spec: &SpinSystemSpec<T>) -> Result<BlockHamiltonian<T>> {
    if spec.groups.len() != 1 {
        return Err(Error::InvalidSpec("the one-group oracle needs exactly one nuclear group".into()));
    }
    build_full_product_space(spec)
}

/// Product-space Hamiltonian for one or two groups. Nuclei of the first
/// group occupy the lowest nuclear sites.
pub fn build_full_product_space<T: Real>(spec: &SpinSystemSpec<T>) -> Result<BlockHamiltonian<T>> {
    spec.validate()?;
    let nuclei = spec.total_nuclei();
    if nuclei > FULL_ORACLE_MAX_NUCLEI {
        return Err(Error::InvalidSpec(format!(
            "{nuclei} nuclei exceeds the oracle limit of {FULL_ORACLE_MAX_NUCLEI}"
        )));
    }
    let sites = nuclei + 2;
    let dim = 1usize << sites;
    let mut h = CMatrix::<T>::zeros(dim, dim);

    let mut site = 1;
    for (k, group) in spec.groups.iter().enumerate() {
        let quarter = spec.hfc_angular(k) * lit(0.25);
        for _ in 0..group.count {
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                let pp = p.matrix::<T>().kronecker(&p.matrix::<T>());
                add_embedded(&mut h, &pp, &[0, site], quarter);
            }
            site += 1;
        }
    }
    let (z1, z2) = (spec.zeeman_cation(), spec.zeeman_anion());
    for i in 0..dim {
        let s1: T = if i & 1 == 0 { T::one() } else { -T::one() };
        let s2: T = if (i >> (sites - 1)) & 1 == 0 { T::one() } else { -T::one() };
        h[(i, i)] -= cr(z1 * s1 + z2 * s2);
    }

    let nuclear: Vec<_> = (0..1usize << nuclei).map(|b| (NuclearLabel::Product(b), 1)).collect();
    BlockHamiltonian::new(h, expand_labels(&nuclear), 1 << nuclei)
}

fn add_embedded<T: Real>(out: &mut CMatrix<T>, op: &CMatrix<T>, sites: &[usize], coef: T) {
    let mask: usize = sites.iter().map(|s| 1usize << s).sum();
    let sub = 1usize << sites.len();
    for col in 0..out.ncols() {
        let sub_col = gather(col, sites);
        let rest = col & !mask;
        for sub_row in 0..sub {
            let v = op[(sub_row, sub_col)];
            if v.re != T::zero() || v.im != T::zero() {
                out[(rest | scatter(sub_row, sites), col)] += v * coef;
            }
        }
    }
}

/// A normalized `|I, m>` state of `n` spin-1/2 nuclei in the product basis
/// (bit `k` set means nucleus `k` is down).
///
/// Built by projecting a computational state with the right projection onto
/// the `I(I+1)` eigenspace of the total spin squared. Any state of a
/// degenerate multiplet gives the same electron dynamics.
pub fn total_spin_state<T: Real>(n: usize, spin: HalfInt, m: HalfInt) -> Result<CVector<T>> {
    if n == 0 || n > FULL_ORACLE_MAX_NUCLEI {
        return Err(Error::InvalidArgument(format!("{n} nuclei outside 1..={FULL_ORACLE_MAX_NUCLEI}")));
    }
    let row = spin_addition_counts(n)?;
    if !row.contains_key(&spin) || m.abs() > spin || (spin - m).twice() % 2 != 0 {
        return Err(Error::InvalidArgument(format!("|{spin},{m}> does not exist for {n} nuclei")));
    }
    let dim = 1usize << n;
    let mut s2 = CMatrix::<T>::zeros(dim, dim);
    for i in 0..dim {
        s2[(i, i)] = cr(lit(0.75 * n as f64));
    }
    for a in 0..n {
        for b in a + 1..n {
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                let pp = p.matrix::<T>().kronecker(&p.matrix::<T>());
                add_embedded(&mut s2, &pp, &[a, b], lit(0.5));
            }
        }
    }
    let casimir = |j: HalfInt| j.value() * (j.value() + 1.0);
    let down = ((n as i32) - m.twice()) / 2;
    let mut best: Option<CVector<T>> = None;
    for basis in (0..dim).filter(|b| b.count_ones() as i32 == down) {
        let mut v = CVector::<T>::zeros(dim);
        v[basis] = Cx::new(T::one(), T::zero());
        for &other in row.keys().filter(|j| **j != spin) {
            let shifted = &s2 * &v - &v * cr::<T>(lit(casimir(other)));
            v = shifted * cr::<T>(lit(1.0 / (casimir(spin) - casimir(other))));
        }
        let norm = v.norm();
        if norm > lit(0.1) {
            return Ok(v / cr(norm));
        }
        if best.as_ref().is_none_or(|b| b.norm() < norm) {
            best = Some(v);
        }
    }
    let v = best.ok_or_else(|| Error::Numerical("empty projection".into()))?;
    let norm = v.norm();
    if norm < lit(1e-6) {
        return Err(Error::Numerical(format!("could not project onto |{spin},{m}>")));
    }
    Ok(v.clone() / cr(norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{NuclearGroup, RelaxationTimes};

    fn spec(n: usize, hfc: f64, field: f64) -> SpinSystemSpec<f64> {
        SpinSystemSpec::new(vec![NuclearGroup::new(n, hfc)], 2.0028, 2.0028, field, RelaxationTimes::none()).unwrap()
    }

    #[test]
    fn one_nucleus_exchange_spectrum() {
        let s = spec(1, 2.49, 0.0);
        let a = s.hfc_angular(0);
        let h = build_full_one_group(&s).unwrap();
        let mut ev: Vec<f64> = h.matrix().clone().symmetric_eigen().eigenvalues.iter().map(|e| e / a).collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        // two copies of the anion electron double each level
        let want = [-0.75, -0.75, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25];
        for (e, w) in ev.iter().zip(want) {
            assert!((e - w).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn no_nuclei_is_diagonal() {
        let s = SpinSystemSpec::new(vec![NuclearGroup::new(1, 0.0)], 2.0, 2.0, 0.3, RelaxationTimes::none()).unwrap();
        let h = build_full_one_group(&s).unwrap();
        let off: f64 = (0..h.dim())
            .flat_map(|i| (0..h.dim()).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| h.matrix()[(i, j)].norm())
            .fold(0.0, f64::max);
        assert_eq!(off, 0.0);
    }

    #[test]
    fn rejects_two_groups_and_oversize() {
        let two = SpinSystemSpec::new(
            vec![NuclearGroup::new(1, 1.0), NuclearGroup::new(1, 1.0)],
            2.0,
            2.0,
            0.0,
            RelaxationTimes::none(),
        )
        .unwrap();
        assert!(build_full_one_group(&two).is_err());
        assert!(build_full_product_space(&two).is_ok());
        assert!(build_full_one_group(&spec(11, 1.0, 0.0)).is_err());
    }

    #[test]
    fn total_spin_states_normalized() {
        for (n, i2, m2) in [(4, 4, 2), (4, 0, 0), (3, 1, -1), (5, 3, 1)] {
            let v = total_spin_state::<f64>(n, HalfInt::from_twice(i2), HalfInt::from_twice(m2)).unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
        assert!(total_spin_state::<f64>(4, HalfInt::integer(3), HalfInt::ZERO).is_err());
    }
}
