use super::DensityMatrix;
use crate::error::{Error, Result};
use crate::hamiltonian::{BlockHamiltonian, HERMITIAN_TOLERANCE};
use crate::linalg::hermitian_deviation;
use crate::scalar::{phase_factor, to_f64, CMatrix, CVector, Cx, Real};
use nalgebra::{ComplexField, SymmetricEigen};
use rayon::prelude::*;

#[derive(Clone, Debug)]
struct Block<T: Real> {
    indices: Vec<usize>,
    vectors: CMatrix<T>,
    energies: Vec<T>,
}

/// `exp(-i H t)` from a one-time eigendecomposition of every connected block
/// of `H`. Blocks are the connected components of the nonzero pattern, so
/// symmetry sectors are diagonalized separately.
#[derive(Clone, Debug)]
pub struct Propagator<T: Real> {
    dim: usize,
    blocks: Vec<Block<T>>,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

impl<T: Real> Propagator<T> {
    pub fn new(h: &CMatrix<T>) -> Result<Self> {
        let dim = h.nrows();
        if h.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: h.ncols() });
        }
        let scale = h.iter().fold(1.0f64, |acc, z| acc.max(to_f64(z.modulus())));
        let dev = to_f64(hermitian_deviation(h));
        if dev > HERMITIAN_TOLERANCE * scale {
            return Err(Error::NotHermitian(dev));
        }

        let mut parent: Vec<usize> = (0..dim).collect();
        for c in 0..dim {
            for r in 0..c {
                let z = h[(r, c)];
                if z.re != T::zero() || z.im != T::zero() {
                    let (a, b) = (find(&mut parent, r), find(&mut parent, c));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; dim];
        for i in 0..dim {
            let root = find(&mut parent, i);
            if slot[root] == usize::MAX {
                slot[root] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[root]].push(i);
        }

        let blocks = groups
            .into_par_iter()
            .map(|indices| {
                let n = indices.len();
                let sub = CMatrix::<T>::from_fn(n, n, |r, c| h[(indices[r], indices[c])]);
                // restore exact Hermiticity before the solver sees it
                let sub = (&sub + sub.adjoint()) * Cx::new(nalgebra::convert(0.5), T::zero());
                let eig = SymmetricEigen::new(sub);
                Block { indices, vectors: eig.eigenvectors, energies: eig.eigenvalues.iter().copied().collect() }
            })
            .collect();
        Ok(Propagator { dim, blocks })
    }

    pub fn from_hamiltonian(h: &BlockHamiltonian<T>) -> Result<Self> {
        Self::new(h.matrix())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn largest_block(&self) -> usize {
        self.blocks.iter().map(|b| b.indices.len()).max().unwrap_or(0)
    }

    /// All eigenvalues, ascending.
    pub fn energies(&self) -> Vec<T> {
        let mut e: Vec<T> = self.blocks.iter().flat_map(|b| b.energies.iter().copied()).collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        e
    }

    /// Dense `exp(-i H t)`.
    pub fn unitary(&self, t: T) -> CMatrix<T> {
        let mut u = CMatrix::<T>::zeros(self.dim, self.dim);
        for b in &self.blocks {
            let mut scaled = b.vectors.clone();
            for (j, mut col) in scaled.column_iter_mut().enumerate() {
                col *= phase_factor(b.energies[j] * t);
            }
            let ub = scaled * b.vectors.adjoint();
            for (r, &gr) in b.indices.iter().enumerate() {
                for (c, &gc) in b.indices.iter().enumerate() {
                    u[(gr, gc)] = ub[(r, c)];
                }
            }
        }
        u
    }

    pub fn evolve_vector(&self, state: &CVector<T>, t: T) -> Result<CVector<T>> {
        Ok(self.state_evolution(state)?.at(t))
    }

    /// Caches the eigenbasis coefficients of `state` for repeated times.
    pub fn state_evolution(&self, state: &CVector<T>) -> Result<StateEvolution<'_, T>> {
        if state.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: state.len() });
        }
        let mut parts = Vec::new();
        for (k, b) in self.blocks.iter().enumerate() {
            let local = CVector::<T>::from_iterator(b.indices.len(), b.indices.iter().map(|&i| state[i]));
            if local.iter().all(|z| z.re == T::zero() && z.im == T::zero()) {
                continue;
            }
            parts.push((k, b.vectors.adjoint() * local));
        }
        Ok(StateEvolution { propagator: self, parts })
    }
}

/// A pure state expanded in the propagator's eigenbasis.
pub struct StateEvolution<'a, T: Real> {
    propagator: &'a Propagator<T>,
    parts: Vec<(usize, CVector<T>)>,
}

impl<T: Real> StateEvolution<'_, T> {
    pub fn at(&self, t: T) -> CVector<T> {
        let mut out = CVector::<T>::zeros(self.propagator.dim);
        for (k, coeffs) in &self.parts {
            let b = &self.propagator.blocks[*k];
            let phased = CVector::<T>::from_iterator(
                coeffs.len(),
                coeffs.iter().zip(&b.energies).map(|(c, &e)| *c * phase_factor(e * t)),
            );
            let local = &b.vectors * phased;
            for (r, &g) in b.indices.iter().enumerate() {
                out[g] = local[r];
            }
        }
        out
    }
}

/// `rho(t) = U rho0 U^dagger` at every time.
pub fn evolve<T: Real>(h: &BlockHamiltonian<T>, rho0: &DensityMatrix<T>, times: &[T]) -> Result<Vec<DensityMatrix<T>>> {
    if rho0.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: rho0.dim() });
    }
    let prop = Propagator::from_hamiltonian(h)?;
    times
        .par_iter()
        .map(|&t| {
            let u = prop.unitary(t);
            let m = &u * rho0.matrix() * u.adjoint();
            DensityMatrix::new_unchecked(m)?.with_labels(rho0.labels().to_vec())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm_hermitian, max_abs_diff};
    use crate::scalar::cx;

    #[test]
    fn matches_dense_exponential() {
        let h = CMatrix::<f64>::from_fn(6, 6, |r, c| {
            if r == c {
                cx(r as f64 * 0.3, 0.0)
            } else if (r < 3) == (c < 3) {
                cx(0.1 * (r + c) as f64, 0.05 * (r as f64 - c as f64))
            } else {
                cx(0.0, 0.0)
            }
        });
        let p = Propagator::new(&h).unwrap();
        assert_eq!(p.block_count(), 2);
        let t = 2.7;
        assert!(max_abs_diff(&p.unitary(t), &expm_hermitian(&h, t)) < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut h = CMatrix::<f64>::zeros(2, 2);
        h[(0, 1)] = cx(1.0, 0.0);
        assert!(matches!(Propagator::new(&h), Err(Error::NotHermitian(_))));
    }
}
