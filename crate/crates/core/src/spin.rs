//! Exact half-integer bookkeeping, spin-addition counting and the
//! Clebsch-Gordan blocks for coupling a spin-1/2 to a spin `I`.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};
use nalgebra::DMatrix;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

/// A spin or magnetic quantum number stored as twice its value.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfInt {
    twice: i32,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt { twice }
    }

    pub const fn integer(n: i32) -> Self {
        HalfInt { twice: 2 * n }
    }

    pub const fn twice(self) -> i32 {
        self.twice
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub fn abs(self) -> Self {
        HalfInt { twice: self.twice.abs() }
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn to_real<T: Real>(self) -> T {
        lit(self.value())
    }

    /// Number of magnetic sublevels `2I + 1`.
    pub fn multiplicity(self) -> usize {
        debug_assert!(self.twice >= 0);
        (self.twice + 1) as usize
    }

    /// Projections `I, I-1, ..., -I`.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> {
        let top = self.twice;
        (0..=top).map(move |k| HalfInt { twice: top - 2 * k })
    }

    /// Parses "3", "-1", "3/2" or "-5/2".
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::InvalidArgument(format!("not a half-integer: {text:?}"));
        match text.split_once('/') {
            Some((num, "2")) => {
                let n: i32 = num.trim().parse().map_err(|_| bad())?;
                if n % 2 == 0 {
                    return Err(bad());
                }
                Ok(HalfInt::from_twice(n))
            }
            Some(_) => Err(bad()),
            None => text.parse::<i32>().map(HalfInt::integer).map_err(|_| bad()),
        }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl fmt::Debug for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt { twice: self.twice + rhs.twice }
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt { twice: self.twice - rhs.twice }
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt { twice: -self.twice }
    }
}

/// Electron spin projection. `Up` is the computational `|0>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpinHalf {
    Up,
    Down,
}

impl SpinHalf {
    pub fn bit(self) -> usize {
        match self {
            SpinHalf::Up => 0,
            SpinHalf::Down => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Self {
        if bit & 1 == 0 {
            SpinHalf::Up
        } else {
            SpinHalf::Down
        }
    }
}

/// Multiplicity of each total spin for `n` coupled spin-1/2 particles.
pub type MultiplicityRow = BTreeMap<HalfInt, u64>;

/// Rows of the spin-addition triangle, one per particle count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinMultiplicityTable {
    rows: BTreeMap<usize, MultiplicityRow>,
}

impl SpinMultiplicityTable {
    /// Rows `1..=max_n`.
    pub fn up_to(max_n: usize) -> Result<Self> {
        if max_n == 0 {
            return Err(Error::InvalidArgument("need at least one spin".into()));
        }
        if max_n > 60 {
            return Err(Error::InvalidArgument(format!("{max_n} spins overflows the counts")));
        }
        let mut rows = BTreeMap::new();
        let mut row = MultiplicityRow::from([(HalfInt::HALF, 1)]);
        rows.insert(1, row.clone());
        for n in 2..=max_n {
            row = add_spin_half(&row);
            rows.insert(n, row.clone());
        }
        Ok(SpinMultiplicityTable { rows })
    }

    pub fn row(&self, n: usize) -> Option<&MultiplicityRow> {
        self.rows.get(&n)
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &MultiplicityRow)> {
        self.rows.iter().map(|(n, r)| (*n, r))
    }
}

/// Couples one more spin-1/2 to every multiplet in `row`.
pub fn add_spin_half(row: &MultiplicityRow) -> MultiplicityRow {
    let mut next = MultiplicityRow::new();
    for (&spin, &count) in row {
        *next.entry(spin + HalfInt::HALF).or_default() += count;
        if spin.twice() > 0 {
            *next.entry(spin - HalfInt::HALF).or_default() += count;
        }
    }
    next
}

/// Multiplicities of the total spins of `n` coupled spin-1/2 particles.
pub fn spin_addition_counts(n: usize) -> Result<MultiplicityRow> {
    let table = SpinMultiplicityTable::up_to(n)?;
    Ok(table.row(n).cloned().unwrap_or_default())
}

/// `sum_I mult(I) (2I + 1)`, which must equal `2^n`.
pub fn state_count(row: &MultiplicityRow) -> u64 {
    row.iter().map(|(spin, count)| count * spin.multiplicity() as u64).sum()
}

fn check_spin(spin: HalfInt) -> Result<()> {
    if spin.twice() < 0 {
        return Err(Error::InvalidArgument(format!("negative spin {spin}")));
    }
    Ok(())
}

/// Clebsch-Gordan change of basis for `I (x) 1/2`.
///
/// Rows index the product basis `|I,m>|s>` (m descending, `s` up then down);
/// columns index the coupled basis in the order reported by
/// [`coupled_labels`]. The matrix is real, orthogonal and symmetric.
pub fn cg_block_matrix<T: Real>(spin: HalfInt) -> Result<DMatrix<T>> {
    check_spin(spin)?;
    let n = spin.multiplicity();
    let dim = 2 * n;
    let mut u = DMatrix::<T>::zeros(dim, dim);
    u[(0, 0)] = T::one();
    u[(dim - 1, dim - 1)] = T::one();
    let denom = n as f64;
    for k in 0..n - 1 {
        let x: T = lit(((k + 1) as f64 / denom).sqrt());
        let y: T = lit(((n - 1 - k) as f64 / denom).sqrt());
        let (a, b) = (2 * k + 1, 2 * k + 2);
        u[(a, a)] = x;
        u[(a, b)] = y;
        u[(b, a)] = y;
        u[(b, b)] = -x;
    }
    Ok(u)
}

/// Product-basis labels `(m, s)` matching the rows of [`cg_block_matrix`].
pub fn product_labels(spin: HalfInt) -> Vec<(HalfInt, SpinHalf)> {
    spin.projections().flat_map(|m| [(m, SpinHalf::Up), (m, SpinHalf::Down)]).collect()
}

/// Coupled labels `(j, M)` matching the columns of [`cg_block_matrix`].
pub fn coupled_labels(spin: HalfInt) -> Vec<(HalfInt, HalfInt)> {
    let n = spin.multiplicity();
    let upper = spin + HalfInt::HALF;
    let mut labels = vec![(upper, upper)];
    for k in 0..n - 1 {
        let total_m = spin - HalfInt::integer(k as i32) - HalfInt::HALF;
        labels.push((upper, total_m));
        labels.push((spin - HalfInt::HALF, total_m));
    }
    labels.push((upper, -upper));
    labels
}

/// Eigenvalues of `I.S` in the coupled order of [`coupled_labels`]:
/// `I/2` for `j = I + 1/2` and `-(I + 1)/2` for `j = I - 1/2`.
pub fn exchange_eigenvalues<T: Real>(spin: HalfInt) -> Result<Vec<T>> {
    check_spin(spin)?;
    let i = spin.value();
    Ok(coupled_labels(spin)
        .into_iter()
        .map(|(j, _)| if j > spin { lit(i / 2.0) } else { lit(-(i + 1.0) / 2.0) })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(twice: i32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    #[test]
    fn halfint_display_and_parse() {
        assert_eq!(h(3).to_string(), "3/2");
        assert_eq!(h(-4).to_string(), "-2");
        assert_eq!(HalfInt::parse("-5/2").unwrap(), h(-5));
        assert_eq!(HalfInt::parse("4").unwrap(), h(8));
        assert!(HalfInt::parse("4/2").is_err());
        assert!(HalfInt::parse("x").is_err());
    }

    #[test]
    fn projections_descend() {
        let ms: Vec<_> = h(3).projections().collect();
        assert_eq!(ms, vec![h(3), h(1), h(-1), h(-3)]);
        assert_eq!(HalfInt::ZERO.projections().count(), 1);
    }

    #[test]
    fn single_spin_row() {
        assert_eq!(spin_addition_counts(1).unwrap(), MultiplicityRow::from([(h(1), 1)]));
        assert!(spin_addition_counts(0).is_err());
    }

    #[test]
    fn octalin_rows() {
        let row8 = spin_addition_counts(8).unwrap();
        let want: MultiplicityRow =
            [(0, 14), (1, 28), (2, 20), (3, 7), (4, 1)].into_iter().map(|(i, c)| (HalfInt::integer(i), c)).collect();
        assert_eq!(row8, want);
        let row9 = spin_addition_counts(9).unwrap();
        let want9: MultiplicityRow =
            [(1, 42), (3, 48), (5, 27), (7, 8), (9, 1)].into_iter().map(|(t, c)| (h(t), c)).collect();
        assert_eq!(row9, want9);
        assert_eq!(add_spin_half(&row8), row9);
    }

    #[test]
    fn twelve_proton_row() {
        let row = spin_addition_counts(12).unwrap();
        let counts: Vec<u64> = (0..=6).map(|i| row[&HalfInt::integer(i)]).collect();
        assert_eq!(counts, vec![132, 297, 275, 154, 54, 11, 1]);
    }

    #[test]
    fn cg_spin_zero_is_identity() {
        let u = cg_block_matrix::<f64>(HalfInt::ZERO).unwrap();
        assert_eq!(u, DMatrix::identity(2, 2));
    }

    #[test]
    fn cg_spin_one_matches_printed_pattern() {
        let u = cg_block_matrix::<f64>(HalfInt::integer(1)).unwrap();
        let (a, b) = ((1.0f64 / 3.0).sqrt(), (2.0f64 / 3.0).sqrt());
        #[rustfmt::skip]
        let want = DMatrix::from_row_slice(6, 6, &[
            1.0, 0.0, 0.0, 0.0, 0.0, 0.0,
            0.0, a, b, 0.0, 0.0, 0.0,
            0.0, b, -a, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, b, a, 0.0,
            0.0, 0.0, 0.0, a, -b, 0.0,
            0.0, 0.0, 0.0, 0.0, 0.0, 1.0,
        ]);
        assert!((u - want).amax() < 1e-15);
    }

    #[test]
    fn cg_spin_half_mixes_singlet_and_triplet() {
        let u = cg_block_matrix::<f64>(HalfInt::HALF).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((u[(1, 1)] - r).abs() < 1e-15 && (u[(2, 2)] + r).abs() < 1e-15);
        assert!((u[(1, 2)] - r).abs() < 1e-15);
    }

    #[test]
    fn exchange_eigenvalues_spin_one() {
        let lam = exchange_eigenvalues::<f64>(HalfInt::integer(1)).unwrap();
        assert_eq!(lam, vec![0.5, 0.5, -1.0, 0.5, -1.0, 0.5]);
        let labels = coupled_labels(HalfInt::integer(1));
        assert_eq!(labels[2], (h(1), h(1)));
    }
}
