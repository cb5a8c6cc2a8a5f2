use super::gate::Gate;
use super::noise::QubitNoise;
use super::program::Circuit;
use crate::dynamics::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{apply_to_vector, conjugate};
use crate::scalar::{cr, cx, CMatrix, CVector, Real};
use rayon::prelude::*;

pub const STATEVECTOR_SITE_LIMIT: usize = 12;
pub const DENSITY_SITE_LIMIT: usize = 10;
pub const DENSITY_NOISY_SITE_LIMIT: usize = 6;

fn zero_state<T: Real>(sites: usize) -> CVector<T> {
    let mut v = CVector::<T>::zeros(1 << sites);
    v[0] = cx(1.0, 0.0);
    v
}

fn check_limit(sites: usize, limit: usize) -> Result<()> {
    if sites > limit {
        return Err(Error::TooManySites { sites, limit });
    }
    Ok(())
}

fn apply_gate_vector<T: Real>(state: &mut CVector<T>, gate: &Gate<T>) {
    if !gate.kind.is_idle() {
        apply_to_vector(state, &gate.kind.matrix(), &gate.sites);
    }
}

/// Runs a circuit without probabilistic gates from `|0...0>`.
pub fn run_statevector<T: Real>(circuit: &Circuit<T>) -> Result<CVector<T>> {
    run_statevector_from(circuit, &zero_state(circuit.site_count()))
}

pub fn run_statevector_from<T: Real>(circuit: &Circuit<T>, initial: &CVector<T>) -> Result<CVector<T>> {
    check_limit(circuit.site_count(), STATEVECTOR_SITE_LIMIT)?;
    if initial.len() != 1 << circuit.site_count() {
        return Err(Error::DimensionMismatch { expected: 1 << circuit.site_count(), found: initial.len() });
    }
    if circuit.probabilistic_count() > 0 {
        return Err(Error::InvalidGate(
            "probabilistic gates need run_ensemble or the density backend".into(),
        ));
    }
    let mut state = initial.clone();
    for g in circuit.gates() {
        apply_gate_vector(&mut state, g);
    }
    Ok(state)
}

/// Every presence pattern of the probabilistic gates with its weight and
/// final state. Patterns with zero weight are skipped.
pub fn run_ensemble<T: Real>(circuit: &Circuit<T>, initial: &CVector<T>) -> Result<Vec<(T, CVector<T>)>> {
    check_limit(circuit.site_count(), STATEVECTOR_SITE_LIMIT)?;
    let k = circuit.probabilistic_count();
    if k > 16 {
        return Err(Error::InvalidArgument(format!("{k} probabilistic gates is too many to enumerate")));
    }
    let out: Vec<Option<(T, CVector<T>)>> = (0..1usize << k)
        .into_par_iter()
        .map(|pattern| {
            let mut weight = T::one();
            let mut state = initial.clone();
            let mut j = 0;
            for g in circuit.gates() {
                match g.probability {
                    Some(p) => {
                        let on = (pattern >> j) & 1 == 1;
                        j += 1;
                        weight *= if on { p } else { T::one() - p };
                        if on {
                            apply_gate_vector(&mut state, g);
                        }
                    }
                    None => apply_gate_vector(&mut state, g),
                }
            }
            (weight > T::zero()).then_some((weight, state))
        })
        .collect();
    Ok(out.into_iter().flatten().collect())
}

/// Density-matrix simulation from `|0...0>`.
pub fn run_density<T: Real>(circuit: &Circuit<T>, noise: Option<&dyn QubitNoise<T>>) -> Result<DensityMatrix<T>> {
    let initial = DensityMatrix::from_pure(&zero_state(circuit.site_count()))?;
    run_density_from(circuit, &initial, noise)
}

/// Probabilistic gates are applied as the exact mixture
/// `(1 - p) rho + p N(G rho G^dagger)`; noise channels `N` follow each
/// gate that is present, on that gate's sites.
pub fn run_density_from<T: Real>(
    circuit: &Circuit<T>,
    initial: &DensityMatrix<T>,
    noise: Option<&dyn QubitNoise<T>>,
) -> Result<DensityMatrix<T>> {
    let n = circuit.site_count();
    check_limit(n, if noise.is_some() { DENSITY_NOISY_SITE_LIMIT } else { DENSITY_SITE_LIMIT })?;
    if initial.dim() != 1 << n {
        return Err(Error::DimensionMismatch { expected: 1 << n, found: initial.dim() });
    }
    if let Some(model) = noise {
        if model.site_count() != n {
            return Err(Error::DimensionMismatch { expected: n, found: model.site_count() });
        }
    }
    let mut rho = initial.matrix().clone();
    for g in circuit.gates() {
        let mut applied = if g.kind.is_idle() { rho.clone() } else { conjugate(&rho, &g.kind.matrix(), &g.sites) };
        if let Some(model) = noise {
            for &site in &g.sites {
                for ch in model.channels_after(&g.kind, site)? {
                    applied = ch.apply_matrix(&applied)?;
                }
            }
        }
        rho = match g.probability {
            Some(p) => rho * cr(T::one() - p) + applied * cr(p),
            None => applied,
        };
    }
    DensityMatrix::new_unchecked(rho)
}

/// Unitary of a circuit without probabilistic gates, column by column.
pub fn circuit_unitary<T: Real>(circuit: &Circuit<T>) -> Result<CMatrix<T>> {
    let dim = 1usize << circuit.site_count();
    check_limit(circuit.site_count(), STATEVECTOR_SITE_LIMIT)?;
    let columns: Result<Vec<CVector<T>>> = (0..dim)
        .into_par_iter()
        .map(|j| {
            let mut e = CVector::<T>::zeros(dim);
            e[j] = cx(1.0, 0.0);
            run_statevector_from(circuit, &e)
        })
        .collect();
    Ok(CMatrix::from_columns(&columns?))
}

/// `sum w |psi><psi|` over an ensemble.
pub fn ensemble_density<T: Real>(ensemble: &[(T, CVector<T>)]) -> CMatrix<T> {
    let dim = ensemble.first().map_or(0, |(_, v)| v.len());
    let mut rho = CMatrix::<T>::zeros(dim, dim);
    for (w, v) in ensemble {
        rho += (v * v.adjoint()) * cr(*w);
    }
    rho
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;
    use crate::dynamics::{bell_vector, BellState};
    use crate::linalg::max_abs_diff;

    #[test]
    fn empty_circuit_is_identity() {
        let c = Circuit::<f64>::new(3).unwrap();
        let psi = CVector::from_fn(8, |i, _| cx((i as f64).sin(), (i as f64).cos()));
        let psi = &psi / cx(psi.norm(), 0.0);
        assert!((run_statevector_from(&c, &psi).unwrap() - &psi).norm() < 1e-15);
    }

    #[test]
    fn backends_agree_and_mixture_is_exact() {
        let mut c = Circuit::<f64>::new(3).unwrap();
        c.h(0).unwrap().cnot(0, 2).unwrap().rx(0.3, 1).unwrap();
        c.probabilistic(GateKind::X, &[1], 0.3).unwrap();
        c.crx(1.1, 1, 2).unwrap().probabilistic(GateKind::Z, &[0], 0.2).unwrap();
        c.u3(0.4, 0.5, 0.6, 2).unwrap();
        let ens = run_ensemble(&c, &zero_state(3)).unwrap();
        assert_eq!(ens.len(), 4);
        let from_ens = ensemble_density(&ens);
        let rho = run_density(&c, None).unwrap();
        assert!(max_abs_diff(rho.matrix(), &from_ens) < 1e-14);
        assert!(run_statevector(&c).is_err());
    }

    #[test]
    fn bell_preparation() {
        let mut c = Circuit::<f64>::new(2).unwrap();
        c.x(0).unwrap().x(1).unwrap().h(0).unwrap().cnot(0, 1).unwrap();
        let psi = run_statevector(&c).unwrap();
        let s = bell_vector::<f64>(BellState::Singlet);
        assert!((psi.dotc(&s).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn size_limits() {
        let c = Circuit::<f64>::new(13).unwrap();
        assert!(matches!(run_statevector(&c), Err(Error::TooManySites { .. })));
    }
}
