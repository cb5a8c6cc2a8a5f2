//! A small gate-level simulator (statevector and density matrix) for the
//! circuits that realize the radical-pair dynamics and noise models, plus
//! the KAK synthesis, product formulas and measurement-statistics algebra.

mod backend;
mod builders;
mod correction;
mod gate;
mod kak;
mod noise;
mod program;
mod trotter;

pub use backend::{
    circuit_unitary, ensemble_density, run_density, run_density_from, run_ensemble, run_statevector, run_statevector_from, DENSITY_NOISY_SITE_LIMIT,
    DENSITY_SITE_LIMIT, STATEVECTOR_SITE_LIMIT,
};
pub use builders::{
    delay_count, delay_only_circuit, echo_pulse_circuit, kraus_circuit, partitioned_kak_circuit, purification_circuit,
    rz_angle, rz_encode_trace, singlet_preparation, singlet_unpreparation, state_preparation,
};
pub use correction::{damp_stats, noise_correction, noise_injection, MeasurementStats, CORRECTION_FLOOR};
pub use gate::{Gate, GateKind};
pub use kak::{kak_decompose, u3_from_unitary, KakDecomposition, U3Params};
pub use noise::{GateDurations, QubitNoise, SyntheticQubitNoise};
pub use program::Circuit;
pub use trotter::{pauli_exponential, trotterized_pauli_evolution};
