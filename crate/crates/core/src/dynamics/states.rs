use super::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::qubit_count;
use crate::scalar::{lit, CMatrix, CVector, Cx, Real};

/// `nuclear (x) |S>` on the layout `e2 * 2n + nuclear * 2 + e1`.
pub fn with_singlet<T: Real>(nuclear: &CVector<T>) -> CVector<T> {
    let n = nuclear.len();
    let r: T = lit(std::f64::consts::FRAC_1_SQRT_2);
    let mut out = CVector::<T>::zeros(4 * n);
    for (k, amp) in nuclear.iter().enumerate() {
        // |e1 up, e2 down> - |e1 down, e2 up>
        out[2 * n + 2 * k] = *amp * Cx::new(r, T::zero());
        out[2 * k + 1] = -*amp * Cx::new(r, T::zero());
    }
    out
}

fn check_register(dimension: usize) -> Result<()> {
    qubit_count(dimension).map(|_| ())
}

/// `|index> (x) |S>` as a state vector.
pub fn sector_state_vector<T: Real>(index: usize, nuclear_dim: usize) -> Result<CVector<T>> {
    check_register(nuclear_dim)?;
    if index >= nuclear_dim {
        return Err(Error::InvalidArgument(format!("index {index} outside a {nuclear_dim}-state register")));
    }
    let mut nuc = CVector::<T>::zeros(nuclear_dim);
    nuc[index] = Cx::new(T::one(), T::zero());
    Ok(with_singlet(&nuc))
}

/// `|index><index| (x) |S><S|`.
pub fn initial_sector_state<T: Real>(index: usize, nuclear_dim: usize) -> Result<DensityMatrix<T>> {
    DensityMatrix::from_pure(&sector_state_vector(index, nuclear_dim)?)
}

/// `1/n (x) |S><S|` for a nuclear register of `n` states (a power of two).
pub fn maximally_mixed_nuclear_state<T: Real>(n: usize) -> Result<DensityMatrix<T>> {
    check_register(n)?;
    let dim = 4 * n;
    let mut m = CMatrix::<T>::zeros(dim, dim);
    let w: T = lit(1.0 / n as f64);
    for k in 0..n {
        let v = sector_state_vector::<T>(k, n)?;
        let idx = [2 * n + 2 * k, 2 * k + 1];
        for &a in &idx {
            for &b in &idx {
                m[(a, b)] += v[a] * v[b].conj() * Cx::new(w, T::zero());
            }
        }
    }
    DensityMatrix::new(m)
}

/// Equal-weight ensemble of `|k> (x) |S>` over the given nuclear slots.
pub fn nuclear_basis_ensemble<T: Real>(nuclear_dim: usize, slots: &[usize]) -> Result<Vec<(T, CVector<T>)>> {
    let w: T = lit(1.0 / slots.len().max(1) as f64);
    slots.iter().map(|&k| Ok((w, sector_state_vector(k, nuclear_dim)?))).collect()
}
