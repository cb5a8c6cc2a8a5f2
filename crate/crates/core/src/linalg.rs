//! Small dense complex linear algebra helpers on little-endian qubit
//! registers (site `k` is bit `k` of the basis index).

use crate::error::{Error, Result};
use crate::scalar::{cr, cx, CMatrix, CVector, Cx, Real};
use nalgebra::{ComplexField, DMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix<T: Real>(self) -> CMatrix<T> {
        let (o, l, i) = (cx::<T>(0.0, 0.0), cx::<T>(1.0, 0.0), cx::<T>(0.0, 1.0));
        let entries = match self {
            Pauli::I => [l, o, o, l],
            Pauli::X => [o, l, l, o],
            Pauli::Y => [o, -i, i, o],
            Pauli::Z => [l, o, o, -l],
        };
        CMatrix::from_row_slice(2, 2, &entries)
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Kronecker product; `b` occupies the low-order index bits.
pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a.kronecker(b)
}

pub fn to_complex<T: Real>(m: &DMatrix<T>) -> CMatrix<T> {
    m.map(cr)
}

/// Largest `|H - H^dagger|` entry.
pub fn hermitian_deviation<T: Real>(h: &CMatrix<T>) -> T {
    let mut worst = T::zero();
    for i in 0..h.nrows() {
        for j in i..h.ncols() {
            let d = (h[(i, j)] - h[(j, i)].conj()).modulus();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Largest `|U^dagger U - 1|` entry.
pub fn unitary_deviation<T: Real>(u: &CMatrix<T>) -> T {
    let prod = u.adjoint() * u;
    let n = prod.nrows();
    (prod - CMatrix::<T>::identity(n, n)).iter().fold(T::zero(), |acc, z| acc.max(z.modulus()))
}

pub fn max_abs_diff<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    a.iter().zip(b.iter()).fold(T::zero(), |acc, (x, y)| acc.max((*x - *y).modulus()))
}

/// Number of qubits spanned by a power-of-two dimension.
pub fn qubit_count(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("dimension {dim} is not a power of two")));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Operator `op` (2^k x 2^k) acting on `sites` of an `n`-site register, as a
/// dense matrix. `sites[0]` is the least significant bit of `op`'s index.
pub fn embed<T: Real>(op: &CMatrix<T>, sites: &[usize], n: usize) -> Result<CMatrix<T>> {
    check_sites(sites, n)?;
    let k = sites.len();
    if op.nrows() != 1 << k || op.ncols() != 1 << k {
        return Err(Error::DimensionMismatch { expected: 1 << k, found: op.nrows() });
    }
    let dim = 1usize << n;
    let mask: usize = sites.iter().map(|s| 1usize << s).sum();
    let mut out = CMatrix::<T>::zeros(dim, dim);
    for col in 0..dim {
        let sub_col = gather(col, sites);
        let rest = col & !mask;
        for sub_row in 0..(1 << k) {
            let v = op[(sub_row, sub_col)];
            if v != Cx::new(T::zero(), T::zero()) {
                out[(rest | scatter(sub_row, sites), col)] = v;
            }
        }
    }
    Ok(out)
}

pub(crate) fn check_sites(sites: &[usize], n: usize) -> Result<()> {
    for (i, &s) in sites.iter().enumerate() {
        if s >= n {
            return Err(Error::InvalidSite { site: s, sites: n });
        }
        if sites[..i].contains(&s) {
            return Err(Error::InvalidArgument(format!("site {s} listed twice")));
        }
    }
    Ok(())
}

/// Bits of `index` at `sites`, packed little-endian.
#[inline]
pub(crate) fn gather(index: usize, sites: &[usize]) -> usize {
    sites.iter().enumerate().fold(0, |acc, (j, &s)| acc | (((index >> s) & 1) << j))
}

/// Inverse of [`gather`]: places bit `j` of `sub` at `sites[j]`.
#[inline]
pub(crate) fn scatter(sub: usize, sites: &[usize]) -> usize {
    sites.iter().enumerate().fold(0, |acc, (j, &s)| acc | (((sub >> j) & 1) << s))
}

/// Applies `op` on `sites` to a state vector in place.
pub fn apply_to_vector<T: Real>(state: &mut CVector<T>, op: &CMatrix<T>, sites: &[usize]) {
    let k = sites.len();
    let sub = 1usize << k;
    let mask: usize = sites.iter().map(|s| 1usize << s).sum();
    let offsets: Vec<usize> = (0..sub).map(|j| scatter(j, sites)).collect();
    let mut buf = vec![Cx::new(T::zero(), T::zero()); sub];
    for base in 0..state.len() {
        if base & mask != 0 {
            continue;
        }
        for j in 0..sub {
            buf[j] = state[base | offsets[j]];
        }
        for r in 0..sub {
            let mut acc = Cx::new(T::zero(), T::zero());
            for c in 0..sub {
                acc += op[(r, c)] * buf[c];
            }
            state[base | offsets[r]] = acc;
        }
    }
}

/// `op * rho` with `op` acting on `sites` (left multiplication only).
pub fn apply_left<T: Real>(rho: &mut CMatrix<T>, op: &CMatrix<T>, sites: &[usize]) {
    let n = rho.ncols();
    for col in 0..n {
        let mut column = rho.column(col).into_owned();
        apply_to_vector(&mut column, op, sites);
        rho.set_column(col, &column);
    }
}

/// `op rho op^dagger` for an operator on `sites`.
pub fn conjugate<T: Real>(rho: &CMatrix<T>, op: &CMatrix<T>, sites: &[usize]) -> CMatrix<T> {
    let mut out = rho.clone();
    apply_left(&mut out, op, sites);
    let mut t = out.adjoint();
    apply_left(&mut t, op, sites);
    t.adjoint()
}

/// Partial trace keeping `keep` (little-endian in the order given).
pub fn partial_trace<T: Real>(rho: &CMatrix<T>, n: usize, keep: &[usize]) -> Result<CMatrix<T>> {
    check_sites(keep, n)?;
    if rho.nrows() != 1 << n {
        return Err(Error::DimensionMismatch { expected: 1 << n, found: rho.nrows() });
    }
    let traced: Vec<usize> = (0..n).filter(|s| !keep.contains(s)).collect();
    let sub = 1usize << keep.len();
    let mut out = CMatrix::<T>::zeros(sub, sub);
    let keep_offsets: Vec<usize> = (0..sub).map(|j| scatter(j, keep)).collect();
    for r in 0..(1usize << traced.len()) {
        let base = scatter(r, &traced);
        for a in 0..sub {
            let row = base | keep_offsets[a];
            for b in 0..sub {
                out[(a, b)] += rho[(row, base | keep_offsets[b])];
            }
        }
    }
    Ok(out)
}

pub fn trace<T: Real>(m: &CMatrix<T>) -> Cx<T> {
    m.diagonal().iter().fold(Cx::new(T::zero(), T::zero()), |acc, z| acc + *z)
}

/// Multiplies `u` by the phase that makes its largest-magnitude entry match
/// the corresponding entry of `target` in argument, then returns the max
/// entry deviation.
pub fn phase_aligned_deviation<T: Real>(u: &CMatrix<T>, target: &CMatrix<T>) -> T {
    let mut best = (0, T::zero());
    for (i, z) in target.iter().enumerate() {
        if z.modulus() > best.1 {
            best = (i, z.modulus());
        }
    }
    let (a, b) = (target.as_slice()[best.0], u.as_slice()[best.0]);
    if b.modulus() == T::zero() {
        return max_abs_diff(u, target);
    }
    let ratio = a / b;
    let phase = ratio / Cx::new(ratio.modulus(), T::zero());
    max_abs_diff(&(u * phase), target)
}

/// True when every entry of `row` is exactly zero.
pub fn is_zero_row<T: Real>(m: &CMatrix<T>, row: usize) -> bool {
    m.row(row).iter().all(|z| z.re == T::zero() && z.im == T::zero())
}

/// `exp(-i H t)` by dense eigendecomposition. Reference path for small
/// matrices; the propagator in `dynamics` is the efficient one.
pub fn expm_hermitian<T: Real>(h: &CMatrix<T>, t: T) -> CMatrix<T> {
    let eig = h.clone().symmetric_eigen();
    let phases = CVector::<T>::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&e| crate::scalar::phase_factor(e * t)),
    );
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    scaled * v.adjoint()
}

pub fn real_part<T: Real>(z: Cx<T>) -> T {
    ComplexField::real(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embed_matches_kron() {
        let x = Pauli::X.matrix::<f64>();
        let z = Pauli::Z.matrix::<f64>();
        let id = Pauli::I.matrix::<f64>();
        // site 0 is the rightmost kron factor
        let want = kron(&z, &kron(&id, &x));
        let xz = kron(&z, &x);
        let got = embed(&xz, &[0, 2], 3).unwrap();
        assert!(max_abs_diff(&got, &want) < 1e-15);
    }

    #[test]
    fn conjugate_matches_dense() {
        let h = Pauli::Y.matrix::<f64>();
        let rho = CMatrix::<f64>::from_fn(8, 8, |i, j| cx((i * 3 + j) as f64, (i as f64) - (j as f64)));
        let full = embed(&h, &[1], 3).unwrap();
        let want = &full * &rho * full.adjoint();
        assert!(max_abs_diff(&conjugate(&rho, &h, &[1]), &want) < 1e-12);
    }

    #[test]
    fn partial_trace_of_product() {
        let a = CMatrix::<f64>::from_row_slice(2, 2, &[cx(0.7, 0.0), cx(0.1, 0.2), cx(0.1, -0.2), cx(0.3, 0.0)]);
        let b = CMatrix::<f64>::from_diagonal_element(2, 2, cx(0.5, 0.0));
        let rho = kron(&b, &a);
        assert!(max_abs_diff(&partial_trace(&rho, 2, &[0]).unwrap(), &a) < 1e-15);
        assert!(max_abs_diff(&partial_trace(&rho, 2, &[1]).unwrap(), &b) < 1e-15);
    }

    #[test]
    fn expm_of_z() {
        let z = Pauli::Z.matrix::<f64>();
        let u = expm_hermitian(&z, 0.3);
        assert!((u[(0, 0)] - Cx::new(0.3f64.cos(), -0.3f64.sin())).norm() < 1e-15);
        assert!(unitary_deviation(&u) < 1e-15);
    }

    #[test]
    fn rejects_bad_sites() {
        let x = Pauli::X.matrix::<f64>();
        assert!(embed(&x, &[3], 3).is_err());
        assert!(embed(&kron(&x, &x), &[1, 1], 3).is_err());
    }
}
