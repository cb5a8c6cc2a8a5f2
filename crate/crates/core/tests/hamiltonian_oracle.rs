//! Reduced, partitioned and sector Hamiltonians against brute-force
//! product-space evolution.

use qbeats::dynamics::{
    nuclear_basis_ensemble, reassemble_electron_traces, sector_state_vector, with_singlet, ElectronTrace,
    Propagator, TimeSeries,
};
use qbeats::hamiltonian::{
    build_degenerate_one_group, build_full_one_group, build_full_product_space, build_partitioned_state,
    build_reduced_one_group, build_two_group_block, total_spin_state, NuclearOrdering,
};
use qbeats::system::{NuclearGroup, RelaxationTimes, SpinSystemSpec};
use qbeats::HalfInt;

fn octalin(field: f64) -> SpinSystemSpec<f64> {
    SpinSystemSpec::new(vec![NuclearGroup::new(8, 2.49)], 2.0028, 2.0028, field, RelaxationTimes::none()).unwrap()
}

fn grid(end: f64, step: f64) -> Vec<f64> {
    (0..=((end / step).round() as usize)).map(|k| k as f64 * step).collect()
}

fn singlet_of(h: &qbeats::BlockHamiltonianF64, psi: nalgebra::DVector<num_complex::Complex<f64>>, times: &[f64]) -> TimeSeries<f64> {
    ElectronTrace::compute(h, &[(1.0, psi)], times).unwrap().singlet("s").unwrap()
}

#[test]
fn reduced_partitioned_and_full_agree_on_sample_states() {
    let times = grid(30.0, 0.5);
    for field in [0.0, 0.3] {
        let spec = octalin(field);
        let full = build_full_one_group(&spec).unwrap();
        let reduced = build_reduced_one_group(&spec).unwrap();
        let order = NuclearOrdering::reduced(8).unwrap();
        for (i, m) in [(4, 4), (3, -2), (2, 1), (1, 0), (0, 0)] {
            let (spin, proj) = (HalfInt::integer(i), HalfInt::integer(m));
            let nuc = total_spin_state::<f64>(8, spin, proj).unwrap();
            let s_full = singlet_of(&full, with_singlet(&nuc), &times);
            let idx = order.index_of(spin, proj, 0).unwrap();
            let s_red = singlet_of(&reduced, sector_state_vector(idx, 32).unwrap(), &times);
            let part = build_partitioned_state(spin, proj, &spec).unwrap();
            let s_part = singlet_of(&part, sector_state_vector(0, 2).unwrap(), &times);
            assert!(s_full.max_abs_diff(&s_red).unwrap() < 1e-9, "reduced |{i},{m}> B={field}");
            assert!(s_full.max_abs_diff(&s_part).unwrap() < 1e-9, "partitioned |{i},{m}> B={field}");
        }
    }
}

#[test]
fn degenerate_ordering_has_full_spectrum() {
    let spec = octalin(0.0);
    let a = spec.hfc_angular(0);
    let full = Propagator::from_hamiltonian(&build_full_one_group(&spec).unwrap()).unwrap().energies();
    let degen = Propagator::from_hamiltonian(&build_degenerate_one_group(&spec).unwrap()).unwrap().energies();
    assert_eq!(full.len(), degen.len());
    for (x, y) in full.iter().zip(&degen) {
        assert!((x - y).abs() / a < 1e-10);
    }
}

#[test]
fn two_group_toy_matches_product_space() {
    let spec = SpinSystemSpec::new(
        vec![NuclearGroup::new(2, 0.65), NuclearGroup::new(2, 1.66)],
        2.0028,
        2.0031,
        0.05,
        RelaxationTimes::none(),
    )
    .unwrap();
    let times = grid(60.0, 0.25);
    let full = build_full_product_space(&spec).unwrap();
    let slots: Vec<usize> = (0..16).collect();
    let oracle = ElectronTrace::compute(&full, &nuclear_basis_ensemble(16, &slots).unwrap(), &times)
        .unwrap()
        .singlet("oracle")
        .unwrap();
    let mut sectors = Vec::new();
    for i2 in [1, 0] {
        let (h, pad) = build_two_group_block(HalfInt::integer(i2), &spec).unwrap();
        let all: Vec<usize> = (0..pad.sector_dim).collect();
        let ens = nuclear_basis_ensemble(pad.sector_dim, &all).unwrap();
        sectors.push((ElectronTrace::compute(&h, &ens, &times).unwrap(), pad));
    }
    let s = reassemble_electron_traces(&sectors).unwrap().singlet("sectors").unwrap();
    assert!(s.max_abs_diff(&oracle).unwrap() < 1e-9);
}
