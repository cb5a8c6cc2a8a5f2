use super::density::{bell_population, bell_vector, BellState};
use super::{Propagator, SeriesKind, TimeSeries};
use crate::error::{Error, Result};
use crate::hamiltonian::BlockHamiltonian;
use crate::scalar::{CMatrix, CVector, Cx, Real};
use rayon::prelude::*;

/// Reduced 4x4 density of the electron pair over time (cation electron as
/// the low bit). Relaxation acts only on the electrons, so this is all the
/// state a singlet measurement or an electron channel needs.
#[derive(Clone, Debug, PartialEq)]
pub struct ElectronTrace<T: Real> {
    times: Vec<T>,
    pairs: Vec<CMatrix<T>>,
}

impl<T: Real> ElectronTrace<T> {
    pub fn new(times: Vec<T>, pairs: Vec<CMatrix<T>>) -> Result<Self> {
        if times.len() != pairs.len() {
            return Err(Error::DimensionMismatch { expected: times.len(), found: pairs.len() });
        }
        if let Some(p) = pairs.iter().find(|p| p.nrows() != 4 || p.ncols() != 4) {
            return Err(Error::DimensionMismatch { expected: 4, found: p.nrows() });
        }
        Ok(ElectronTrace { times, pairs })
    }

    /// Evolves a weighted ensemble of pure states under `h` and accumulates
    /// the electron reduced density. Members run in parallel; the sum is
    /// taken in ensemble order so results are reproducible.
    pub fn compute(h: &BlockHamiltonian<T>, ensemble: &[(T, CVector<T>)], times: &[T]) -> Result<Self> {
        let prop = Propagator::from_hamiltonian(h)?;
        Self::compute_with(&prop, h.nuclear_dim(), ensemble, times)
    }

    pub fn compute_with(
        prop: &Propagator<T>,
        nuclear_dim: usize,
        ensemble: &[(T, CVector<T>)],
        times: &[T],
    ) -> Result<Self> {
        if prop.dim() != 4 * nuclear_dim {
            return Err(Error::DimensionMismatch { expected: 4 * nuclear_dim, found: prop.dim() });
        }
        let zero = Cx::new(T::zero(), T::zero());
        let members: Vec<Vec<[Cx<T>; 16]>> = ensemble
            .par_iter()
            .map(|(w, psi)| {
                let evo = prop.state_evolution(psi)?;
                Ok(times
                    .iter()
                    .map(|&t| {
                        let state = evo.at(t);
                        let mut acc = [zero; 16];
                        for nuc in 0..nuclear_dim {
                            let amps = [
                                state[2 * nuc],
                                state[2 * nuc + 1],
                                state[2 * nuclear_dim + 2 * nuc],
                                state[2 * nuclear_dim + 2 * nuc + 1],
                            ];
                            for a in 0..4 {
                                if amps[a] == zero {
                                    continue;
                                }
                                for b in 0..4 {
                                    acc[4 * a + b] += amps[a] * amps[b].conj();
                                }
                            }
                        }
                        acc.map(|z| z * Cx::new(*w, T::zero()))
                    })
                    .collect())
            })
            .collect::<Result<_>>()?;
        let pairs = (0..times.len())
            .map(|k| {
                let mut m = CMatrix::<T>::zeros(4, 4);
                for member in &members {
                    for a in 0..4 {
                        for b in 0..4 {
                            m[(a, b)] += member[k][4 * a + b];
                        }
                    }
                }
                m
            })
            .collect();
        Ok(ElectronTrace { times: times.to_vec(), pairs })
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn pairs(&self) -> &[CMatrix<T>] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn singlet(&self, label: &str) -> Result<TimeSeries<T>> {
        let values = self.pairs.iter().map(|p| bell_population(p, BellState::Singlet)).collect();
        TimeSeries::new(self.times.clone(), values, label, SeriesKind::Probability)
    }

    /// `[S, T0, T+, T-]` populations at every time.
    pub fn bell_populations(&self) -> Vec<[T; 4]> {
        self.pairs.iter().map(|p| BellState::ALL.map(|s| bell_population(p, s))).collect()
    }

    /// Applies `f(t, rho_pair)` at every time point.
    pub fn map<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(T, &CMatrix<T>) -> Result<CMatrix<T>> + Sync,
    {
        let pairs = self.times.par_iter().zip(self.pairs.par_iter()).map(|(&t, p)| f(t, p)).collect::<Result<_>>()?;
        Ok(ElectronTrace { times: self.times.clone(), pairs })
    }

    /// `sum_k w_k trace_k` on a shared grid.
    pub fn weighted_sum(parts: &[(T, &ElectronTrace<T>)]) -> Result<Self> {
        let (_, first) = parts.first().ok_or_else(|| Error::InvalidArgument("nothing to sum".into()))?;
        let mut pairs = vec![CMatrix::<T>::zeros(4, 4); first.len()];
        for (w, trace) in parts {
            if trace.times.len() != first.times.len()
                || trace.times.iter().zip(&first.times).any(|(a, b)| (*a - *b).abs() > nalgebra::convert(1e-9))
            {
                return Err(Error::GridMismatch("electron traces on different grids".into()));
            }
            for (acc, p) in pairs.iter_mut().zip(&trace.pairs) {
                *acc += p * Cx::new(*w, T::zero());
            }
        }
        Ok(ElectronTrace { times: first.times.clone(), pairs })
    }

    /// The constant singlet projector on `times`.
    pub fn constant_singlet(times: &[T]) -> Self {
        let s = bell_vector::<T>(BellState::Singlet);
        let p = &s * s.adjoint();
        ElectronTrace { times: times.to_vec(), pairs: vec![p; times.len()] }
    }
}
