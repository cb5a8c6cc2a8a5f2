//! Circuit realizations checked against the direct matrix path.

use nalgebra::DVector;
use num_complex::Complex;
use qbeats::circuit::{
    circuit_unitary, damp_stats, delay_only_circuit, echo_pulse_circuit, kak_decompose, kraus_circuit,
    noise_correction, noise_injection, partitioned_kak_circuit, purification_circuit, run_density,
    run_density_from, run_ensemble, run_statevector, run_statevector_from, singlet_preparation,
    state_preparation, trotterized_pauli_evolution, Circuit, GateDurations, MeasurementStats,
    SyntheticQubitNoise,
};
use qbeats::dynamics::{
    bell_vector, nuclear_basis_ensemble, pair_density_of_state, sector_state_vector, BellState, DensityMatrix,
    ElectronTrace, Propagator,
};
use qbeats::hamiltonian::{
    build_partitioned, build_reduced_one_group, pauli_decompose_partitioned,
};
use qbeats::linalg::{expm_hermitian, max_abs_diff, partial_trace, phase_aligned_deviation};
use qbeats::relaxation::{infinite_temperature_thermal_channel, RelaxationParams};
use qbeats::system::{NuclearGroup, RelaxationTimes, SpinSystemSpec};
use qbeats::HalfInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type C = Complex<f64>;
type M = nalgebra::DMatrix<C>;

fn octalin(field: f64) -> SpinSystemSpec<f64> {
    SpinSystemSpec::new(vec![NuclearGroup::new(8, 2.49)], 2.0028, 2.0028, field, RelaxationTimes::none()).unwrap()
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> M {
    M::from_fn(n, n, |_, _| C::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

fn haar(rng: &mut ChaCha8Rng) -> M {
    let qr = gaussian(rng, 4).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q.clone();
    for j in 0..4 {
        let d = r[(j, j)];
        let phase = d / C::new(d.norm(), 0.0);
        let col = u.column(j) * phase;
        u.set_column(j, &col);
    }
    u
}

fn random_density(rng: &mut ChaCha8Rng, n: usize) -> M {
    let g = gaussian(rng, n);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

#[test]
fn kak_reconstructs_haar_unitaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let u = haar(&mut rng);
        let k = kak_decompose(&u).unwrap();
        worst = worst.max(max_abs_diff(&k.unitary().unwrap(), &u));
    }
    assert!(worst < 1e-9, "worst reconstruction {worst:e}");
}

#[test]
fn partitioned_block_circuit_matches_direct_evolution() {
    for field in [0.0, 0.3] {
        let spec = octalin(field);
        for i in 0..=4 {
            let spin = HalfInt::integer(i);
            let direct = expm_hermitian(build_partitioned(spin, &spec).unwrap().matrix(), 5.0);
            let circuit = partitioned_kak_circuit(spin, &spec, 5.0).unwrap();
            let dev = phase_aligned_deviation(&circuit_unitary(&circuit).unwrap(), &direct);
            assert!(dev < 1e-9, "I = {i}, B = {field}: {dev:e}");
        }
    }
}

#[test]
fn kraus_circuit_equals_channel_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cases = [(9.0, 9.0, 4.0), (5.0, 10.0, 5.0), (f64::INFINITY, 20.0, 7.0), (2000.0, 20.0, 30.0)];
    let mut worst = 0.0f64;
    for (t1, t2, t) in cases {
        let params = RelaxationParams::new(t, RelaxationTimes::from_ns(t1, t2).unwrap()).unwrap();
        let channel = infinite_temperature_thermal_channel(&params, 0).unwrap();
        let circuit = kraus_circuit(&params).unwrap();
        for _ in 0..15 {
            let rho = random_density(&mut rng, 2);
            let mut ancilla = M::zeros(2, 2);
            ancilla[(0, 0)] = C::new(1.0, 0.0);
            let joint = DensityMatrix::new(ancilla.kronecker(&rho)).unwrap();
            let out = run_density_from(&circuit, &joint, None).unwrap();
            let reduced = partial_trace(out.matrix(), 2, &[0]).unwrap();
            worst = worst.max(max_abs_diff(&reduced, &channel.apply_matrix(&rho).unwrap()));
        }
    }
    assert!(worst < 1e-12, "{worst:e}");
}

#[test]
fn trivial_kraus_circuit_is_identity() {
    let params = RelaxationParams::new(0.0, RelaxationTimes::from_ns(9.0, 9.0).unwrap()).unwrap();
    assert!(kraus_circuit(&params).unwrap().is_empty());
}

#[test]
fn probabilistic_expansion_matches_sampling() {
    let params = RelaxationParams::new(6.0, RelaxationTimes::from_ns(9.0, 9.0).unwrap()).unwrap();
    let mut c = Circuit::new(2).unwrap();
    c.h(0).unwrap();
    c.append(&kraus_circuit(&params).unwrap()).unwrap();
    c.h(0).unwrap();
    let exact = run_density(&c, None).unwrap();
    let p_exact = exact.matrix()[(0, 0)].re + exact.matrix()[(2, 2)].re;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let shots = 100_000;
    let mut hits = 0usize;
    let ensemble = run_ensemble(&c, &{
        let mut v = DVector::<C>::zeros(4);
        v[0] = C::new(1.0, 0.0);
        v
    })
    .unwrap();
    for _ in 0..shots {
        let mut u: f64 = rng.random();
        let (_, psi) = ensemble.iter().find(|(w, _)| {
            u -= w;
            u < 0.0
        }).unwrap_or(ensemble.last().unwrap());
        let p0 = psi[0].norm_sqr() + psi[2].norm_sqr();
        if rng.random::<f64>() < p0 {
            hits += 1;
        }
    }
    let estimate = hits as f64 / shots as f64;
    let sigma = (p_exact * (1.0 - p_exact) / shots as f64).sqrt();
    assert!((estimate - p_exact).abs() < 3.0 * sigma, "{estimate} vs {p_exact}");
}

#[test]
fn statevector_and_density_backends_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut c = Circuit::<f64>::new(4).unwrap();
    for k in 0..30 {
        let s = rng.random_range(0..4);
        let t = (s + 1 + rng.random_range(0..3)) % 4;
        match k % 5 {
            0 => c.u3(rng.random(), rng.random(), rng.random(), s),
            1 => c.cnot(s, t),
            2 => c.crx(rng.random(), s, t),
            3 => c.rz(rng.random(), s),
            _ => c.h(s),
        }
        .unwrap();
    }
    let psi = run_statevector(&c).unwrap();
    let rho = run_density(&c, None).unwrap();
    assert!(max_abs_diff(rho.matrix(), &(&psi * psi.adjoint())) < 1e-12);
}

fn octalin_slot_trace(h: &qbeats::BlockHamiltonianF64, slots: &[usize], times: &[f64]) -> Vec<f64> {
    let ensemble = nuclear_basis_ensemble(32, slots).unwrap();
    ElectronTrace::compute(h, &ensemble, times).unwrap().singlet("s").unwrap().values().to_vec()
}

#[test]
fn basis_state_circuit_matches_dynamics() {
    let h = build_reduced_one_group(&octalin(0.3)).unwrap();
    let prop = Propagator::from_hamiltonian(&h).unwrap();
    let times = [0.0, 3.7, 12.0, 40.0];
    for slot in [0, 9, 16, 24] {
        let expected = octalin_slot_trace(&h, &[slot], &times);
        for (k, &t) in times.iter().enumerate() {
            let mut c = state_preparation(7, slot << 1).unwrap();
            c.append_mapped(&singlet_preparation().unwrap(), &[0, 6]).unwrap();
            c.unitary(prop.unitary(t), &(0..7).collect::<Vec<_>>()).unwrap();
            let psi = run_statevector(&c).unwrap();
            let pair = pair_density_of_state(&psi, (0, 6)).unwrap();
            let s = qbeats::dynamics::bell_population(&pair, BellState::Singlet);
            assert!((s - expected[k]).abs() < 1e-10, "slot {slot}, t {t}");
        }
    }
}

#[test]
fn purified_pipeline_matches_mixed_state() {
    for n in 1..=4 {
        let rho = run_density(&purification_circuit::<f64>(n).unwrap(), None).unwrap();
        let red = partial_trace(rho.matrix(), 2 * n, &(0..n).collect::<Vec<_>>()).unwrap();
        let dev = max_abs_diff(&red, DensityMatrix::<f64>::maximally_mixed(n).matrix());
        assert!(dev < 1e-14);
    }
    let h = build_reduced_one_group(&octalin(0.0)).unwrap();
    let prop = Propagator::from_hamiltonian(&h).unwrap();
    let times = [0.0, 5.0, 17.5];
    let expected = octalin_slot_trace(&h, &(0..32).collect::<Vec<_>>(), &times);
    for (k, &t) in times.iter().enumerate() {
        let mut c = Circuit::new(12).unwrap();
        let nuclear: Vec<usize> = (1..=5).chain(7..12).collect();
        c.append_mapped(&purification_circuit(5).unwrap(), &nuclear).unwrap();
        c.append_mapped(&singlet_preparation().unwrap(), &[0, 6]).unwrap();
        c.unitary(prop.unitary(t), &(0..7).collect::<Vec<_>>()).unwrap();
        let psi = run_statevector(&c).unwrap();
        let pair = pair_density_of_state(&psi, (0, 6)).unwrap();
        let s = qbeats::dynamics::bell_population(&pair, BellState::Singlet);
        assert!((s - expected[k]).abs() < 1e-10, "t {t}: {s} vs {}", expected[k]);
    }
}

fn trotter_error(steps: usize) -> f64 {
    let spec = octalin(0.0);
    let spin = HalfInt::integer(4);
    let terms = pauli_decompose_partitioned(spin, &spec).unwrap();
    let h = build_partitioned(spin, &spec).unwrap();
    let psi0 = sector_state_vector::<f64>(0, 2).unwrap();
    let t = 10.0;
    let exact = expm_hermitian(h.matrix(), t) * &psi0;
    let c = trotterized_pauli_evolution(&terms, t, steps).unwrap();
    let approx = run_statevector_from(&c, &psi0).unwrap();
    let singlet = |v: &DVector<C>| {
        qbeats::dynamics::bell_population(&pair_density_of_state(v, (0, 2)).unwrap(), BellState::Singlet)
    };
    (singlet(&approx) - singlet(&exact)).abs()
}

#[test]
fn trotter_error_is_first_order() {
    let errors: Vec<f64> = [25, 50, 100, 200].iter().map(|&n| trotter_error(n)).collect();
    for w in errors.windows(2) {
        assert!(w[0] / w[1] >= 1.8, "{errors:?}");
    }
    // frozen from an independent run of the same construction
    assert!((errors[2] - 1.6218e-3).abs() < 1e-6, "{errors:?}");
}

#[test]
fn commuting_terms_are_exact_in_one_step() {
    let spec = octalin(0.3);
    let terms: Vec<_> = pauli_decompose_partitioned(HalfInt::integer(3), &spec)
        .unwrap()
        .into_iter()
        .filter(|t| !t.string.to_string().contains('X') && !t.string.to_string().contains('Y'))
        .collect();
    assert_eq!(terms.len(), 5);
    let exact = expm_hermitian(&qbeats::hamiltonian::reconstruct(&terms).unwrap(), 7.0);
    let c = trotterized_pauli_evolution(&terms, 7.0, 1).unwrap();
    assert!(phase_aligned_deviation(&circuit_unitary(&c).unwrap(), &exact) < 1e-12);
}

fn singlet_after_unprep(rho: &DensityMatrix<f64>) -> f64 {
    rho.matrix()[(3, 3)].re
}

#[test]
fn echo_pulses_cancel_drift() {
    let times = RelaxationTimes::from_ns(150.0, 120.0).unwrap();
    let durations = GateDurations { single: 2.0, two: 5.0, identity: 6.25 };
    let noisy = SyntheticQubitNoise::new(vec![times; 2], durations).unwrap();
    let drifting = noisy.clone().with_drift(vec![0.01, -0.004]).unwrap();
    let echo = echo_pulse_circuit(8, 6.25).unwrap();
    let with_drift = run_density(&echo, Some(&drifting)).unwrap();
    let without = run_density(&echo, Some(&noisy)).unwrap();
    assert!((singlet_after_unprep(&with_drift) - singlet_after_unprep(&without)).abs() < 1e-9);

    // Drift only, 50 ns of delay: echoes remove it, plain delays do not.
    let quiet = SyntheticQubitNoise::silent(2).with_durations(durations).with_drift(vec![0.01, 0.0]).unwrap();
    let echoed = run_density(&echo, Some(&quiet)).unwrap();
    let plain = run_density(&delay_only_circuit(8, 6.25).unwrap(), Some(&quiet)).unwrap();
    let reference = run_density(&delay_only_circuit(8, 6.25).unwrap(), None).unwrap();
    assert!((singlet_after_unprep(&echoed) - singlet_after_unprep(&reference)).abs() < 1e-9);
    assert!((singlet_after_unprep(&plain) - singlet_after_unprep(&reference)).abs() > 1e-3);
}

#[test]
fn correction_inverts_injection() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    for &(t1, t2) in &[(9.0, 9.0), (20.0, 10.0), (f64::INFINITY, 30.0), (50.0, 90.0)] {
        for &t in &[0.5, 2.0, 5.0, 10.0] {
            let times = RelaxationTimes::from_ns(t1, t2).unwrap();
            let pair = bell_vector::<f64>(BellState::Singlet);
            let pair = &pair * pair.adjoint();
            let damped = qbeats::relaxation::relax_pair(&pair, t, times, &[0, 1]).unwrap();
            let reference = MeasurementStats::from_pair_density(&damped).unwrap();
            let dens = [1.0 - 4.0 * reference.t_plus, reference.singlet.powi(2) - reference.t0.powi(2)];
            if dens.iter().any(|d| d.abs() < 1e-3) {
                continue;
            }
            for _ in 0..5 {
                let w: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>());
                let sum: f64 = w.iter().sum();
                let undamped = MeasurementStats::from_array(w.map(|x| x / sum)).unwrap();
                let measured = damp_stats(&undamped, &reference);
                assert_eq!(measured.singlet, noise_injection(&undamped, &reference));
                let back = noise_correction(&measured, &reference).unwrap();
                assert!(back.max_abs_diff(&undamped) < 1e-10);
                checked += 1;
            }
        }
    }
    assert!(checked >= 40);
}
