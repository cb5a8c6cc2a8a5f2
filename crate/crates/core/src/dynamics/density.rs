use crate::error::{Error, Result};
use crate::linalg::{hermitian_deviation, partial_trace, qubit_count, trace};
use crate::scalar::{lit, to_f64, CMatrix, CVector, Cx, Real};
use nalgebra::ComplexField;

/// Unit-trace Hermitian matrix on a qubit register (site `k` = bit `k`).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    matrix: CMatrix<T>,
    labels: Vec<String>,
}

fn tolerance<T: Real>(base: f64) -> f64 {
    base.max(1e3 * to_f64(T::default_epsilon()))
}

impl<T: Real> DensityMatrix<T> {
    /// Checks shape, unit trace (1e-12) and Hermiticity (1e-13).
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        let rho = Self::new_unchecked(matrix)?;
        let tr = rho.trace();
        if (to_f64(tr.re) - 1.0).abs() > tolerance::<T>(1e-12) || to_f64(tr.im).abs() > tolerance::<T>(1e-12) {
            return Err(Error::InvalidArgument(format!("trace {tr} is not 1")));
        }
        let dev = to_f64(hermitian_deviation(&rho.matrix));
        if dev > tolerance::<T>(1e-13) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(rho)
    }

    /// Checks only the shape; for intermediate results of trusted maps.
    pub fn new_unchecked(matrix: CMatrix<T>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        let n = qubit_count(matrix.nrows())?;
        Ok(DensityMatrix { matrix, labels: (0..n).map(|k| format!("q{k}")).collect() })
    }

    pub fn from_pure(state: &CVector<T>) -> Result<Self> {
        Self::new(state * state.adjoint())
    }

    /// `1 / 2^n` on `n` sites.
    pub fn maximally_mixed(sites: usize) -> Self {
        let dim = 1usize << sites;
        let m = CMatrix::<T>::from_diagonal_element(dim, dim, Cx::new(lit(1.0 / dim as f64), T::zero()));
        Self::new_unchecked(m).expect("power of two")
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.site_count() {
            return Err(Error::DimensionMismatch { expected: self.site_count(), found: labels.len() });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
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

    pub fn site_count(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn trace(&self) -> Cx<T> {
        trace(&self.matrix)
    }

    pub fn purity(&self) -> T {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn min_eigenvalue(&self) -> T {
        let eig = self.matrix.clone().symmetric_eigen();
        eig.eigenvalues.iter().fold(T::max_value().unwrap_or(T::one()), |acc, &e| acc.min(e))
    }

    /// Trace one, Hermitian and eigenvalues above `-1e-10`.
    pub fn is_physical(&self) -> bool {
        let tr = self.trace();
        (to_f64(tr.re) - 1.0).abs() <= tolerance::<T>(1e-12)
            && to_f64(hermitian_deviation(&self.matrix)) <= tolerance::<T>(1e-13)
            && to_f64(self.min_eigenvalue()) >= -tolerance::<T>(1e-10)
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let m = partial_trace(&self.matrix, self.site_count(), keep)?;
        let labels = keep.iter().map(|&k| self.labels[k].clone()).collect();
        Self::new_unchecked(m)?.with_labels(labels)
    }

    /// `upper (x) self`: `self` keeps the low sites.
    pub fn kron_above(&self, upper: &DensityMatrix<T>) -> Self {
        let mut labels = self.labels.clone();
        labels.extend(upper.labels.iter().cloned());
        DensityMatrix { matrix: upper.matrix.kronecker(&self.matrix), labels }
    }

    pub fn expectation(&self, op: &CMatrix<T>) -> Result<Cx<T>> {
        if op.nrows() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: op.nrows() });
        }
        Ok(trace(&(op * &self.matrix)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BellState {
    Singlet,
    TripletZero,
    TripletPlus,
    TripletMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] =
        [BellState::Singlet, BellState::TripletZero, BellState::TripletPlus, BellState::TripletMinus];
}

/// Two-electron state on index `b * 2 + a` (first site is the low bit).
/// The singlet is `(|up,down> - |down,up>) / sqrt 2` with the first site
/// written first.
pub fn bell_vector<T: Real>(state: BellState) -> CVector<T> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let v = match state {
        BellState::Singlet => [0.0, -r, r, 0.0],
        BellState::TripletZero => [0.0, r, r, 0.0],
        BellState::TripletPlus => [1.0, 0.0, 0.0, 0.0],
        BellState::TripletMinus => [0.0, 0.0, 0.0, 1.0],
    };
    CVector::from_iterator(4, v.iter().map(|&x| Cx::new(lit(x), T::zero())))
}

/// Reduced 4x4 density of sites `(a, b)`, `a` as the low bit.
pub fn electron_pair_density<T: Real>(rho: &DensityMatrix<T>, sites: (usize, usize)) -> Result<CMatrix<T>> {
    if sites.0 == sites.1 {
        return Err(Error::InvalidArgument("electron sites must differ".into()));
    }
    partial_trace(rho.matrix(), rho.site_count(), &[sites.0, sites.1])
}

/// Reduced 4x4 density of sites `(a, b)` of a pure state vector.
pub fn pair_density_of_state<T: Real>(state: &CVector<T>, sites: (usize, usize)) -> Result<CMatrix<T>> {
    let n = crate::linalg::qubit_count(state.len())?;
    let pair = [sites.0, sites.1];
    crate::linalg::check_sites(&pair, n)?;
    let mask = (1usize << sites.0) | (1usize << sites.1);
    let offsets: Vec<usize> = (0..4).map(|j| crate::linalg::scatter(j, &pair)).collect();
    let mut out = CMatrix::<T>::zeros(4, 4);
    for base in (0..state.len()).filter(|i| i & mask == 0) {
        let v: Vec<Cx<T>> = offsets.iter().map(|&o| state[base | o]).collect();
        for r in 0..4 {
            for c in 0..4 {
                out[(r, c)] += v[r] * v[c].conj();
            }
        }
    }
    Ok(out)
}

/// `Tr(rho P_S)` with the singlet projector on `sites`.
pub fn singlet_probability<T: Real>(rho: &DensityMatrix<T>, sites: (usize, usize)) -> Result<T> {
    let pair = electron_pair_density(rho, sites)?;
    Ok(bell_population(&pair, BellState::Singlet))
}

/// Population of a Bell state in a 4x4 pair density.
pub fn bell_population<T: Real>(pair: &CMatrix<T>, state: BellState) -> T {
    let v = bell_vector::<T>(state);
    (v.adjoint() * pair * &v)[(0, 0)].real()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singlet_of_singlet_is_one() {
        let rho = DensityMatrix::from_pure(&bell_vector::<f64>(BellState::Singlet)).unwrap();
        assert!((singlet_probability(&rho, (0, 1)).unwrap() - 1.0).abs() < 1e-15);
        let t0 = DensityMatrix::from_pure(&bell_vector::<f64>(BellState::TripletZero)).unwrap();
        assert!(singlet_probability(&t0, (0, 1)).unwrap().abs() < 1e-15);
        let mixed = DensityMatrix::<f64>::maximally_mixed(2);
        assert!((singlet_probability(&mixed, (0, 1)).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(DensityMatrix::new(CMatrix::<f64>::identity(4, 4)).is_err());
        assert!(DensityMatrix::new(CMatrix::<f64>::identity(3, 3)).is_err());
        let rho = DensityMatrix::<f64>::maximally_mixed(2);
        assert!(singlet_probability(&rho, (0, 2)).is_err());
        assert!(singlet_probability(&rho, (1, 1)).is_err());
    }

    #[test]
    fn singlet_on_spread_sites() {
        let s = DensityMatrix::from_pure(&bell_vector::<f64>(BellState::Singlet)).unwrap();
        let mid = DensityMatrix::<f64>::maximally_mixed(1);
        // sites: 0 = first electron, 1 = mixed, 2 = second electron
        let m = s.matrix();
        let mut full = CMatrix::<f64>::zeros(8, 8);
        for r in 0..8usize {
            for c in 0..8usize {
                if (r >> 1) & 1 == (c >> 1) & 1 {
                    let pr = (r & 1) | ((r >> 2) << 1);
                    let pc = (c & 1) | ((c >> 2) << 1);
                    full[(r, c)] = m[(pr, pc)] * mid.matrix()[(0, 0)];
                }
            }
        }
        let rho = DensityMatrix::new(full).unwrap();
        assert!((singlet_probability(&rho, (0, 2)).unwrap() - 1.0).abs() < 1e-15);
        assert!((singlet_probability(&rho, (2, 0)).unwrap() - 1.0).abs() < 1e-15);
    }
}
