use super::program::Circuit;
use crate::error::{Error, Result};
use crate::hamiltonian::PauliTerm;
use crate::linalg::Pauli;
use crate::scalar::{lit, Real};

/// Appends `exp(-i coefficient dt P)` via basis change, a CNOT parity
/// ladder and one `Rz`. Identity strings only add a global phase and are
/// skipped.
pub fn pauli_exponential<T: Real>(circuit: &mut Circuit<T>, term: &PauliTerm<T>, dt: T) -> Result<()> {
    if term.string.len() != circuit.site_count() {
        return Err(Error::DimensionMismatch { expected: circuit.site_count(), found: term.string.len() });
    }
    let support = term.string.support();
    let Some(&last) = support.last() else {
        return Ok(());
    };
    let quarter_turn: T = T::frac_pi_2();
    for &s in &support {
        match term.string.on_site(s) {
            Pauli::X => {
                circuit.h(s)?;
            }
            Pauli::Y => {
                circuit.rx(quarter_turn, s)?;
            }
            _ => {}
        }
    }
    for w in support.windows(2) {
        circuit.cnot(w[0], w[1])?;
    }
    circuit.rz(term.coefficient * dt * lit(2.0), last)?;
    for w in support.windows(2).rev() {
        circuit.cnot(w[0], w[1])?;
    }
    for &s in &support {
        match term.string.on_site(s) {
            Pauli::X => {
                circuit.h(s)?;
            }
            Pauli::Y => {
                circuit.rx(-quarter_turn, s)?;
            }
            _ => {}
        }
    }
    Ok(())
}

/// First-order product formula for `exp(-i t sum_k c_k P_k)` with the
/// terms applied in the given order each step.
pub fn trotterized_pauli_evolution<T: Real>(terms: &[PauliTerm<T>], t: T, steps: usize) -> Result<Circuit<T>> {
    let first = terms.first().ok_or_else(|| Error::InvalidArgument("no Pauli terms".into()))?;
    if steps == 0 {
        return Err(Error::InvalidArgument("at least one Trotter step is needed".into()));
    }
    let mut circuit = Circuit::new(first.string.len())?;
    let dt = t / lit(steps as f64);
    for _ in 0..steps {
        for term in terms {
            pauli_exponential(&mut circuit, term, dt)?;
        }
    }
    Ok(circuit)
}
