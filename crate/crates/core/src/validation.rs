//! Named self-check suites. Each returns individual checks with the measured
//! value and the tolerance it was held to; nothing here panics on failure.

use crate::circuit::{
    circuit_unitary, damp_stats, delay_only_circuit, echo_pulse_circuit, kak_decompose, kraus_circuit,
    noise_correction, noise_injection, partitioned_kak_circuit, purification_circuit, run_density, run_density_from,
    run_statevector, run_statevector_from, singlet_preparation, trotterized_pauli_evolution, Circuit, GateDurations,
    MeasurementStats, SyntheticQubitNoise,
};
use crate::dynamics::{
    bell_population, bell_vector, high_field_weights, nuclear_basis_ensemble, pair_density_of_state,
    reassemble_electron_traces, sector_state_vector, with_singlet, zero_field_weights, BellState, DensityMatrix,
    ElectronTrace, Propagator, TimeSeries,
};
use crate::error::{Error, Result};
use crate::hamiltonian::{
    build_full_one_group, build_full_product_space, build_partitioned, build_partitioned_state,
    build_reduced_one_group, build_two_group_block, partition_parameters, pauli_decompose_partitioned,
    total_spin_state, NuclearOrdering,
};
use crate::linalg::{expm_hermitian, max_abs_diff, partial_trace, phase_aligned_deviation};
use crate::pipeline::{
    apply_noise, channel_singlet, electron_dynamics, half_rate_equivalence_check, simulate, tr_mfe, InitialState,
    NoiseMethod, SimulationRequest,
};
use crate::postprocess::{argmax_after, boxcar_kernel, local_maxima, local_minima, observed_ratio, FluorescenceParams};
use crate::relaxation::{infinite_temperature_thermal_channel, relax_pair, RelaxationParams};
use crate::scalar::{CMatrix, Cx};
use crate::spin::{spin_addition_counts, HalfInt};
use crate::system::{NuclearGroup, RelaxationTimes, SpinSystemSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::collections::BTreeMap;
use std::time::Instant;

/// Seed for every randomized check.
pub const SEED: u64 = 20_240_611;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub note: String,
}

impl Check {
    /// Passes when `value <= tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, tolerance, passed: value <= tolerance, note: String::new() }
    }

    /// Passes when `value >= bound`.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, tolerance: bound, passed: value >= bound, note: String::new() }
    }

    pub fn exact(name: impl Into<String>, ok: bool, note: impl Into<String>) -> Self {
        Check { name: name.into(), value: if ok { 0.0 } else { 1.0 }, tolerance: 0.0, passed: ok, note: note.into() }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub const SUITES: [&str; 12] = [
    "tables",
    "oracle",
    "degeneracy",
    "asymptotes",
    "channel-circuit",
    "kak",
    "purification",
    "two-group",
    "correction",
    "postprocess",
    "half-rate",
    "trotter",
];

pub fn run_suite(name: &str) -> Result<SuiteReport> {
    let start = Instant::now();
    let checks = match name {
        "tables" => tables(),
        "oracle" => oracle(),
        "degeneracy" => degeneracy(),
        "asymptotes" => asymptotes(),
        "channel-circuit" => channel_circuit(),
        "kak" => kak(),
        "purification" => purification(),
        "two-group" => two_group(),
        "correction" => correction(),
        "postprocess" => postprocess(),
        "half-rate" => half_rate(),
        "trotter" => trotter(),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown suite {other:?}; available: {}",
                SUITES.join(", ")
            )))
        }
    }?;
    Ok(SuiteReport { suite: name.to_string(), checks, seconds: start.elapsed().as_secs_f64() })
}

pub fn octalin(field: f64, relaxation: RelaxationTimes<f64>) -> Result<SpinSystemSpec<f64>> {
    SpinSystemSpec::new(vec![NuclearGroup::from_gauss(8, 24.9)], 2.0028, 2.0028, field, relaxation)
}

pub fn dmb(field: f64, relaxation: RelaxationTimes<f64>) -> Result<SpinSystemSpec<f64>> {
    let groups = vec![NuclearGroup::from_gauss(2, 6.5), NuclearGroup::from_gauss(12, 16.6)];
    SpinSystemSpec::new(groups, 2.0028, 2.0028, field, relaxation)
}

pub fn grid(end: f64, step: f64) -> Vec<f64> {
    (0..=((end / step).round() as usize)).map(|k| k as f64 * step).collect()
}

fn times(t1: f64, t2: f64) -> Result<RelaxationTimes<f64>> {
    RelaxationTimes::from_ns(t1, t2)
}

fn row_of(counts: &[(i32, u64)]) -> BTreeMap<HalfInt, u64> {
    counts.iter().map(|&(twice, c)| (HalfInt::from_twice(twice), c)).collect()
}

fn tables() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    // (2I, count) per row of the spin-addition table
    let rows: [(usize, &[(i32, u64)]); 10] = [
        (1, &[(1, 1)]),
        (2, &[(0, 1), (2, 1)]),
        (3, &[(1, 2), (3, 1)]),
        (4, &[(0, 2), (2, 3), (4, 1)]),
        (5, &[(1, 5), (3, 4), (5, 1)]),
        (6, &[(0, 5), (2, 9), (4, 5), (6, 1)]),
        (7, &[(1, 14), (3, 14), (5, 6), (7, 1)]),
        (8, &[(0, 14), (2, 28), (4, 20), (6, 7), (8, 1)]),
        (9, &[(1, 42), (3, 48), (5, 27), (7, 8), (9, 1)]),
        (12, &[(0, 132), (2, 297), (4, 275), (6, 154), (8, 54), (10, 11), (12, 1)]),
    ];
    for (n, expected) in rows {
        let got = spin_addition_counts(n)?;
        checks.push(Check::exact(format!("spin addition row {n}"), got == row_of(expected), format!("{got:?}")));
    }
    let zero: Vec<u64> = zero_field_weights(8)?.values().copied().collect();
    let high: Vec<u64> = high_field_weights(8)?.values().copied().collect();
    checks.push(Check::exact("zero-field weights", zero == vec![14, 84, 100, 49, 9], format!("{zero:?}")));
    checks.push(Check::exact("high-field weights", high == vec![70, 112, 56, 16, 2], format!("{high:?}")));
    checks.push(Check::exact(
        "weight totals",
        zero.iter().sum::<u64>() == 256 && high.iter().sum::<u64>() == 256,
        "256 each",
    ));

    // Hyperfine spectrum of nine spins from the dense product-space matrix.
    let spec = octalin(0.0, RelaxationTimes::none())?;
    let h = build_full_one_group(&spec)?;
    let a = spec.hfc_angular(0);
    // The anion is the top bit and only doubles every level, and the
    // coupling is real in the product basis, so one real block suffices.
    let half = h.matrix().nrows() / 2;
    let block = h.matrix().view((0, 0), (half, half));
    let imaginary = block.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let eigenvalues = block.map(|z| z.re).symmetric_eigenvalues();
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    let mut off_grid = imaginary / a;
    for &e in eigenvalues.iter() {
        let scaled = e / a;
        let key = (scaled * 2.0).round() as i64;
        off_grid = off_grid.max((scaled * 2.0 - key as f64).abs());
        *counts.entry(key).or_insert(0) += 1;
    }
    let expected: BTreeMap<i64, u64> =
        [(0, 28), (-2, 56), (1, 112), (-3, 80), (2, 120), (-4, 42), (3, 56), (-5, 8), (4, 10)].into_iter().collect();
    checks.push(Check::exact("hyperfine eigenvalues and counts", counts == expected, format!("{counts:?}")));
    checks.push(Check::at_most("hyperfine eigenvalues on the half grid", off_grid, 1e-9));

    let table: [(i32, f64, f64, f64, f64); 5] = [
        (4, 1.0 / 9.0, 8.0 / 9.0, 2.0, -2.5),
        (3, 1.0 / 7.0, 6.0 / 7.0, 1.5, -2.0),
        (2, 1.0 / 5.0, 4.0 / 5.0, 1.0, -1.5),
        (1, 1.0 / 3.0, 2.0 / 3.0, 0.5, -1.0),
        (0, 1.0, 0.0, 0.0, 0.0),
    ];
    for (i, x2, y2, l1, l2) in table {
        let p = partition_parameters::<f64>(HalfInt::integer(i), 8)?;
        let dev = [(p.x * p.x - x2).abs(), (p.y * p.y - y2).abs(), (p.lambda1 - l1).abs(), (p.lambda2 - l2).abs()]
            .into_iter()
            .fold(0.0, f64::max);
        let mut c = Check::at_most(format!("partition parameters I={i}"), dev, 1e-15);
        if i == 0 {
            c = c.with_note("x, y unused for I = 0");
        }
        checks.push(c);
    }
    Ok(checks)
}

fn singlet_of(h: &crate::hamiltonian::BlockHamiltonian<f64>, psi: crate::scalar::CVector<f64>, t: &[f64]) -> Result<TimeSeries<f64>> {
    ElectronTrace::compute(h, &[(1.0, psi)], t)?.singlet("s")
}

fn oracle() -> Result<Vec<Check>> {
    let t = grid(100.0, 0.1);
    let mut checks = Vec::new();
    for field in [0.0, 0.3] {
        let spec = octalin(field, RelaxationTimes::none())?;
        let full = build_full_one_group(&spec)?;
        let full_prop = Propagator::from_hamiltonian(&full)?;
        let reduced = build_reduced_one_group(&spec)?;
        let reduced_prop = Propagator::from_hamiltonian(&reduced)?;
        let order = NuclearOrdering::reduced(8)?;
        let (mut worst_red, mut worst_part) = (0.0f64, 0.0f64);
        for &(spin, m, _) in order.entries() {
            let nuc = total_spin_state::<f64>(8, spin, m)?;
            let s_full = ElectronTrace::compute_with(&full_prop, full.nuclear_dim(), &[(1.0, with_singlet(&nuc))], &t)?
                .singlet("full")?;
            let idx = order.index_of(spin, m, 0).expect("listed state");
            let s_red = ElectronTrace::compute_with(&reduced_prop, 32, &[(1.0, sector_state_vector(idx, 32)?)], &t)?
                .singlet("reduced")?;
            let part = build_partitioned_state(spin, m, &spec)?;
            let s_part = singlet_of(&part, sector_state_vector(0, 2)?, &t)?;
            worst_red = worst_red.max(s_full.max_abs_diff(&s_red)?);
            worst_part = worst_part.max(s_full.max_abs_diff(&s_part)?);
        }
        checks.push(Check::at_most(format!("reduced vs full, B={field} T, 25 states"), worst_red, 1e-9));
        checks.push(Check::at_most(format!("partitioned vs full, B={field} T, 25 states"), worst_part, 1e-9));
    }
    Ok(checks)
}

fn degeneracy() -> Result<Vec<Check>> {
    let t = grid(100.0, 0.1);
    let mut checks = Vec::new();
    for (field, label) in [(0.0, "zero field, equal I"), (0.3, "high field, equal |m|")] {
        let spec = octalin(field, RelaxationTimes::none())?;
        let mut groups: BTreeMap<i32, Vec<TimeSeries<f64>>> = BTreeMap::new();
        for i in 0..=4 {
            let spin = HalfInt::integer(i);
            for m in spin.projections() {
                let h = build_partitioned_state(spin, m, &spec)?;
                let s = singlet_of(&h, sector_state_vector(0, 2)?, &t)?;
                let key = if field == 0.0 { i } else { m.twice().abs() / 2 };
                groups.entry(key).or_default().push(s);
            }
        }
        let mut worst = 0.0f64;
        for traces in groups.values() {
            for s in &traces[1..] {
                worst = worst.max(traces[0].max_abs_diff(s)?);
            }
        }
        let mut c = Check::at_most(format!("{label}, B={field} T"), worst, 1e-10);
        if field != 0.0 {
            c = c.with_note("equal-|m| coincidence holds only to the secular approximation at finite field");
        }
        checks.push(c);
    }
    Ok(checks)
}

fn asymptotes() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let zero = octalin(0.0, times(9.0, 9.0)?)?;
    let s = simulate(&SimulationRequest::new(zero, InitialState::Mixed, NoiseMethod::Kraus, grid(90.0, 1.0)))?.total;
    let end = *s.values().last().expect("non-empty");
    checks.push(Check::at_most("octalin zero field |S(90 ns) - 1/4|", (end - 0.25).abs(), 0.01));
    let high = dmb(0.1, times(f64::INFINITY, 20.0)?)?;
    let s = simulate(&SimulationRequest::new(high, InitialState::Mixed, NoiseMethod::Kraus, grid(200.0, 2.0)))?.total;
    let end = *s.values().last().expect("non-empty");
    checks.push(
        Check::at_most("DMB high field |S(200 ns) - 1/2|", (end - 0.5).abs(), 0.01)
            .with_note("T1 taken as infinite, t_end = 10 T2"),
    );
    Ok(checks)
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix<f64> {
    CMatrix::from_fn(n, n, |_, _| Cx::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

fn random_density(rng: &mut ChaCha8Rng, n: usize) -> CMatrix<f64> {
    let g = gaussian(rng, n);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

pub fn haar_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix<f64> {
    let qr = gaussian(rng, n).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let col = q.column(j) * (d / Cx::new(d.norm(), 0.0));
        q.set_column(j, &col);
    }
    q
}

fn channel_circuit() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let cases = [(9.0, 9.0, 4.0), (5.0, 10.0, 5.0), (f64::INFINITY, 9.0, 7.0), (2000.0, 20.0, 30.0), (20.0, 20.0, 0.0)];
    let mut worst = 0.0f64;
    let mut count = 0;
    for (t1, t2, t) in cases {
        let params = RelaxationParams::new(t, times(t1, t2)?)?;
        let channel = infinite_temperature_thermal_channel(&params, 0)?;
        let circuit = kraus_circuit(&params)?;
        let mut ancilla = CMatrix::<f64>::zeros(2, 2);
        ancilla[(0, 0)] = Cx::new(1.0, 0.0);
        for _ in 0..12 {
            let rho = random_density(&mut rng, 2);
            let joint = DensityMatrix::new(ancilla.kronecker(&rho))?;
            let out = run_density_from(&circuit, &joint, None)?;
            let reduced = partial_trace(out.matrix(), 2, &[0])?;
            worst = worst.max(max_abs_diff(&reduced, &channel.apply_matrix(&rho)?));
            count += 1;
        }
    }
    checks.push(Check::at_most(format!("ancilla circuit vs channel, {count} random states"), worst, 1e-12));

    let t = grid(100.0, 0.1);
    for (field, t1, t2) in [(0.0, 9.0, 9.0), (0.3, f64::INFINITY, 9.0)] {
        let spec = octalin(field, times(t1, t2)?)?;
        let (trace, _) = electron_dynamics(&spec, InitialState::Mixed, &t)?;
        let channel = channel_singlet(&trace, spec.relaxation)?;
        let kraus = apply_noise(&trace, NoiseMethod::Kraus, spec.relaxation, None)?;
        let per_gate = apply_noise(&trace, NoiseMethod::PerGate, spec.relaxation, None)?;
        checks.push(Check::at_most(format!("octalin B={field} T: Kraus circuit vs channel"), kraus.max_abs_diff(&channel)?, 1e-9));
        checks.push(Check::at_most(format!("octalin B={field} T: noisy identity vs channel"), per_gate.max_abs_diff(&channel)?, 1e-9));
        checks.push(Check::at_most(format!("octalin B={field} T: noisy identity vs Kraus circuit"), per_gate.max_abs_diff(&kraus)?, 1e-9));
    }
    Ok(checks)
}

fn kak() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let u = haar_unitary(&mut rng, 4);
        worst = worst.max(phase_aligned_deviation(&kak_decompose(&u)?.unitary()?, &u));
    }
    checks.push(Check::at_most("100 Haar-random unitaries", worst, 1e-9));

    let (mut worst_block, mut worst_circuit) = (0.0f64, 0.0f64);
    for field in [0.0, 0.3] {
        let spec = octalin(field, RelaxationTimes::none())?;
        for i in 0..=4 {
            let spin = HalfInt::integer(i);
            let terms = pauli_decompose_partitioned(spin, &spec)?;
            let pair: Vec<_> = terms
                .iter()
                .filter(|t| t.string.to_string() != "ZII")
                .map(|t| crate::hamiltonian::PauliTerm::new(t.coefficient, &t.string.to_string()[1..]))
                .collect::<Result<_>>()?;
            let h_pair = crate::hamiltonian::reconstruct(&pair)?;
            let h3 = build_partitioned(spin, &spec)?;
            for t in [0.5, 5.0, 20.0, 80.0] {
                let block = expm_hermitian(&h_pair, t);
                worst_block = worst_block.max(phase_aligned_deviation(&kak_decompose(&block)?.unitary()?, &block));
                let direct = expm_hermitian(h3.matrix(), t);
                let circuit = partitioned_kak_circuit(spin, &spec, t)?;
                worst_circuit = worst_circuit.max(phase_aligned_deviation(&circuit_unitary(&circuit)?, &direct));
            }
        }
    }
    checks.push(Check::at_most("partitioned two-site blocks", worst_block, 1e-9));
    checks.push(Check::at_most("three-site partition circuit vs direct evolution", worst_circuit, 1e-9));
    Ok(checks)
}

fn purification() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for n in 1..=4 {
        let rho = run_density(&purification_circuit::<f64>(n)?, None)?;
        let keep: Vec<usize> = (0..n).collect();
        let red = partial_trace(rho.matrix(), 2 * n, &keep)?;
        let dev = max_abs_diff(&red, DensityMatrix::<f64>::maximally_mixed(n).matrix());
        checks.push(Check::at_most(format!("reduced register n={n}"), dev, 1e-14));
    }
    let h = build_reduced_one_group(&octalin(0.3, RelaxationTimes::none())?)?;
    let prop = Propagator::from_hamiltonian(&h)?;
    let t = [0.0, 2.5, 9.0, 17.5, 33.0];
    let all: Vec<usize> = (0..32).collect();
    let direct = ElectronTrace::compute_with(&prop, 32, &nuclear_basis_ensemble(32, &all)?, &t)?.singlet("direct")?;
    let mut worst = 0.0f64;
    for (k, &tk) in t.iter().enumerate() {
        let mut c = Circuit::new(12)?;
        let nuclear: Vec<usize> = (1..=5).chain(7..12).collect();
        c.append_mapped(&purification_circuit(5)?, &nuclear)?;
        c.append_mapped(&singlet_preparation()?, &[0, 6])?;
        c.unitary(prop.unitary(tk), &(0..7).collect::<Vec<_>>())?;
        let psi = run_statevector(&c)?;
        let s = bell_population(&pair_density_of_state(&psi, (0, 6))?, BellState::Singlet);
        worst = worst.max((s - direct.values()[k]).abs());
    }
    checks.push(Check::at_most("purified 12-site pipeline vs mixed-state evolution", worst, 1e-10));
    Ok(checks)
}

fn two_group() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let degeneracies: Vec<u64> = (0..=6)
        .rev()
        .map(|i| build_two_group_block::<f64>(HalfInt::integer(i), &dmb(0.0, RelaxationTimes::none()).ok()?).ok())
        .map(|r| r.map_or(0, |(_, pad)| pad.degeneracy))
        .collect();
    let expected_deg = vec![1, 11, 54, 154, 275, 297, 132];
    checks.push(Check::exact("sector degeneracies", degeneracies == expected_deg, format!("{degeneracies:?}")));

    let spec = dmb(0.0, RelaxationTimes::none())?;
    let s = simulate(&SimulationRequest::new(spec, InitialState::Mixed, NoiseMethod::None, grid(70.0, 0.1)))?.total;
    checks.push(Check::at_most("|S(0) - 1|", (s.values()[0] - 1.0).abs(), 1e-10));
    let minima: Vec<f64> = local_minima(s.values()).iter().map(|&i| s.times()[i]).collect();
    let maxima: Vec<f64> = local_maxima(s.values()).iter().map(|&i| s.times()[i]).collect();
    let nearest = |list: &[f64], target: f64| list.iter().map(|m| (m - target).abs()).fold(f64::INFINITY, f64::min);
    for target in [2.0, 20.0, 40.0, 59.0] {
        checks.push(
            Check::at_most(format!("minimum near {target} ns"), nearest(&minima, target), 2.0)
                .with_note(format!("minima {minima:.1?}")),
        );
    }
    checks.push(Check::at_most("maximum near 45 ns", nearest(&maxima, 45.0), 2.0));

    let toy = SpinSystemSpec::new(
        vec![NuclearGroup::new(2, 0.65), NuclearGroup::new(2, 1.66)],
        2.0028,
        2.0031,
        0.05,
        RelaxationTimes::none(),
    )?;
    let t = grid(60.0, 0.1);
    let full = build_full_product_space(&toy)?;
    let all: Vec<usize> = (0..16).collect();
    let oracle = ElectronTrace::compute(&full, &nuclear_basis_ensemble(16, &all)?, &t)?.singlet("oracle")?;
    let mut sectors = Vec::new();
    for i2 in [1, 0] {
        let (h, pad) = build_two_group_block(HalfInt::integer(i2), &toy)?;
        let slots: Vec<usize> = (0..pad.sector_dim).collect();
        sectors.push((ElectronTrace::compute(&h, &nuclear_basis_ensemble(pad.sector_dim, &slots)?, &t)?, pad));
    }
    let rebuilt = reassemble_electron_traces(&sectors)?.singlet("sectors")?;
    checks.push(Check::at_most("(2,2) toy vs product space", rebuilt.max_abs_diff(&oracle)?, 1e-9));
    Ok(checks)
}

fn correction() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let singlet = bell_vector::<f64>(BellState::Singlet);
    let singlet = &singlet * singlet.adjoint();
    let (mut worst, mut count) = (0.0f64, 0);
    for (t1, t2) in [(9.0, 9.0), (20.0, 10.0), (f64::INFINITY, 30.0), (50.0, 90.0), (2000.0, 20.0)] {
        for t in [0.2, 1.0, 3.0, 6.0, 12.0] {
            let damped = relax_pair(&singlet, t, times(t1, t2)?, &[0, 1])?;
            let reference = MeasurementStats::from_pair_density(&damped)?;
            let dens = [
                1.0 - 4.0 * reference.t_plus,
                1.0 - 4.0 * reference.t_minus,
                reference.singlet.powi(2) - reference.t0.powi(2),
            ];
            if dens.iter().any(|d| d.abs() < 1e-3) {
                continue;
            }
            for _ in 0..4 {
                let w: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>());
                let total: f64 = w.iter().sum();
                let undamped = MeasurementStats::from_array(w.map(|x| x / total))?;
                let measured = damp_stats(&undamped, &reference);
                worst = worst.max((measured.singlet - noise_injection(&undamped, &reference)).abs());
                worst = worst.max(noise_correction(&measured, &reference)?.max_abs_diff(&undamped));
                count += 1;
            }
        }
    }
    checks.push(Check::at_most(format!("injection then correction, {count} cases"), worst, 1e-10));

    let relax = times(150.0, 120.0)?;
    let durations = GateDurations { single: 2.0, two: 5.0, identity: 6.25 };
    let noisy = SyntheticQubitNoise::new(vec![relax; 2], durations)?;
    let drifting = noisy.clone().with_drift(vec![0.01, -0.004])?;
    let mut worst_echo = 0.0f64;
    for n in [8, 16, 64] {
        let echo = echo_pulse_circuit(n, durations.identity)?;
        let a = run_density(&echo, Some(&drifting))?.matrix()[(3, 3)].re;
        let b = run_density(&echo, Some(&noisy))?.matrix()[(3, 3)].re;
        worst_echo = worst_echo.max((a - b).abs());
    }
    checks.push(Check::at_most("echo run with drift vs drift-free", worst_echo, 1e-9));
    let quiet = SyntheticQubitNoise::silent(2).with_durations(durations).with_drift(vec![0.01, 0.0])?;
    let plain = run_density(&delay_only_circuit(8, durations.identity)?, Some(&quiet))?.matrix()[(3, 3)].re;
    checks.push(Check::at_least("drift without echoes is visible", (1.0 - plain).abs(), 1e-3));
    Ok(checks)
}

fn postprocess() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let params = FluorescenceParams::new(0.35, 1.2, 1.0, 1.0)?;
    let t = grid(40.0, 0.1);
    let spec = octalin(0.0, times(9.0, 9.0)?)?;
    let s = simulate(&SimulationRequest::new(spec, InitialState::Mixed, NoiseMethod::Kraus, t.clone()))?.total;
    let r = observed_ratio(&s, &s, &params)?;
    let dev = r.ratio.values().iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    checks.push(Check::at_most("identical inputs give R = 1", dev, 1e-12));
    let mut mass = 0.0f64;
    for (w, dt) in [(1.0, 0.1), (1.0, 0.05), (1.0, 0.07), (2.5, 0.3)] {
        let k = boxcar_kernel::<f64>(w, dt)?;
        mass = mass.max((k.iter().sum::<f64>() - 1.0).abs());
    }
    checks.push(Check::at_most("detector kernel mass", mass, 2.0 * f64::EPSILON));

    let mut peaks = Vec::new();
    for step in [0.1, 0.05] {
        let t = grid(40.0, step);
        let high = SimulationRequest::new(octalin(0.3, times(f64::INFINITY, 9.0)?)?, InitialState::Mixed, NoiseMethod::Kraus, t.clone());
        let zero = SimulationRequest::new(octalin(0.0, times(9.0, 9.0)?)?, InitialState::Mixed, NoiseMethod::Kraus, t);
        let (ratio, _, _) = tr_mfe(&high, &zero, &params)?;
        let global = argmax_after(&ratio.ratio, 0.0).expect("non-empty ratio");
        let maxima = local_maxima(ratio.ratio.values());
        let pos = |i: usize| ratio.ratio.times()[i];
        checks.push(Check::exact(
            format!("global maximum is the second peak (step {step} ns)"),
            maxima.get(1) == Some(&global),
            format!("global at {:.2} ns, peaks {:?}", pos(global), maxima.iter().map(|&i| pos(i)).collect::<Vec<_>>()),
        ));
        peaks.push(pos(global));
    }
    checks.push(Check::at_most("peak position under grid refinement (ns)", (peaks[0] - peaks[1]).abs(), 0.5));
    Ok(checks)
}

fn half_rate() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let t = grid(60.0, 0.1);
    for (label, spec) in [
        ("octalin zero field", octalin(0.0, times(9.0, 9.0)?)?),
        ("octalin high field", octalin(0.3, times(f64::INFINITY, 9.0)?)?),
        ("octalin T2 < T1", octalin(0.3, times(30.0, 12.0)?)?),
    ] {
        checks.push(Check::at_most(label, half_rate_equivalence_check(&spec, &t)?, 1e-10));
    }
    Ok(checks)
}

/// Singlet error of the product formula for the `|4, 4>` partition at
/// zero field after 10 ns.
pub fn trotter_error(steps: usize) -> Result<f64> {
    let spec = octalin(0.0, RelaxationTimes::none())?;
    let spin = HalfInt::integer(4);
    let terms = pauli_decompose_partitioned(spin, &spec)?;
    let h = build_partitioned(spin, &spec)?;
    let psi0 = sector_state_vector::<f64>(0, 2)?;
    let t = 10.0;
    let exact = expm_hermitian(h.matrix(), t) * &psi0;
    let approx = run_statevector_from(&trotterized_pauli_evolution(&terms, t, steps)?, &psi0)?;
    let singlet = |v: &crate::scalar::CVector<f64>| -> Result<f64> {
        Ok(bell_population(&pair_density_of_state(v, (0, 2))?, BellState::Singlet))
    };
    Ok((singlet(&approx)? - singlet(&exact)?).abs())
}

fn trotter() -> Result<Vec<Check>> {
    let steps = [25, 50, 100, 200];
    let errors: Vec<f64> = steps.iter().map(|&n| trotter_error(n)).collect::<Result<_>>()?;
    let mut checks = Vec::new();
    for k in 1..steps.len() {
        checks.push(
            Check::at_least(format!("error ratio {} -> {} steps", steps[k - 1], steps[k]), errors[k - 1] / errors[k], 1.8)
                .with_note(format!("errors {:.3e} -> {:.3e}", errors[k - 1], errors[k])),
        );
    }
    Ok(checks)
}
