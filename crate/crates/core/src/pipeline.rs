//! End-to-end orchestration: Hamiltonian, exact evolution of the electron
//! pair, relaxation by one of the noise methods, sector reassembly and
//! post-processing.

use crate::circuit::{
    delay_count, echo_pulse_circuit, kraus_circuit, noise_injection, run_density_from, Circuit, GateDurations,
    MeasurementStats, SyntheticQubitNoise,
};
use crate::dynamics::{
    nuclear_basis_ensemble, reassemble_electron_traces, sector_state_vector, DensityMatrix, ElectronTrace,
    Propagator, SeriesKind, TimeSeries,
};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_partitioned_state, build_reduced_one_group, build_two_group_block, NuclearOrdering};
use crate::linalg::partial_trace;
use crate::postprocess::{observed_ratio, FluorescenceParams, ObservedRatio};
use crate::relaxation::{relax_pair, RelaxationParams};
use crate::scalar::{lit, CMatrix, Real};
use crate::spin::HalfInt;
use crate::system::{RelaxationTimes, SpinSystemSpec};
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialState {
    /// Maximally mixed nuclear spins with the electrons in the singlet.
    Mixed,
    /// One nuclear state `|I, m>` of a single group.
    Pure { spin: HalfInt, m: HalfInt },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseMethod {
    None,
    /// Ancilla circuit with probabilistic gates on each electron.
    Kraus,
    /// Noisy identity gates on each electron for the elapsed time.
    PerGate,
    /// Device noise of delayed echo circuits imposed on the exact
    /// statistics; see [`EchoDevice`].
    EchoSynthetic,
}

impl NoiseMethod {
    pub fn name(self) -> &'static str {
        match self {
            NoiseMethod::None => "none",
            NoiseMethod::Kraus => "kraus",
            NoiseMethod::PerGate => "per-gate",
            NoiseMethod::EchoSynthetic => "echo-synthetic",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "none" => Ok(NoiseMethod::None),
            "kraus" => Ok(NoiseMethod::Kraus),
            "per-gate" => Ok(NoiseMethod::PerGate),
            "echo-synthetic" => Ok(NoiseMethod::EchoSynthetic),
            other => Err(Error::InvalidArgument(format!(
                "unknown noise method {other:?} (none, kraus, per-gate, echo-synthetic)"
            ))),
        }
    }
}

/// Synthetic two-qubit device used by [`NoiseMethod::EchoSynthetic`].
#[derive(Clone, Debug, PartialEq)]
pub struct EchoDevice<T> {
    pub noise: SyntheticQubitNoise<T>,
}

impl<T: Real> EchoDevice<T> {
    pub fn default_device() -> Result<Self> {
        Ok(EchoDevice { noise: SyntheticQubitNoise::device_default(2)? })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationRequest<T> {
    pub spec: SpinSystemSpec<T>,
    pub initial: InitialState,
    pub noise: NoiseMethod,
    pub times: Vec<T>,
    pub device: Option<EchoDevice<T>>,
}

impl<T: Real> SimulationRequest<T> {
    pub fn new(spec: SpinSystemSpec<T>, initial: InitialState, noise: NoiseMethod, times: Vec<T>) -> Self {
        SimulationRequest { spec, initial, noise, times, device: None }
    }
}

/// Singlet probability over time plus per-sector contributions (each
/// normalized on its own) before relaxation.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationOutput<T: Real> {
    pub total: TimeSeries<T>,
    pub sectors: Vec<TimeSeries<T>>,
    pub pairs: ElectronTrace<T>,
}

/// Noiseless electron-pair trace and the per-sector singlet traces.
pub fn electron_dynamics<T: Real>(
    spec: &SpinSystemSpec<T>,
    initial: InitialState,
    times: &[T],
) -> Result<(ElectronTrace<T>, Vec<TimeSeries<T>>)> {
    spec.validate()?;
    match (spec.groups.len(), initial) {
        (1, InitialState::Pure { spin, m }) => {
            let h = build_partitioned_state(spin, m, spec)?;
            let trace = ElectronTrace::compute(&h, &[(T::one(), sector_state_vector(0, 2)?)], times)?;
            Ok((trace, Vec::new()))
        }
        (1, InitialState::Mixed) => one_group_mixed(spec, times),
        (2, InitialState::Mixed) => two_group_mixed(spec, times),
        (_, InitialState::Pure { .. }) => {
            Err(Error::InvalidArgument("pure nuclear states are defined for a single group".into()))
        }
        (n, _) => Err(Error::InvalidSpec(format!("{n} nuclear groups"))),
    }
}

/// Every `|I, m>` of the reduced basis, weighted by the multiplicity of `I`.
fn one_group_mixed<T: Real>(spec: &SpinSystemSpec<T>, times: &[T]) -> Result<(ElectronTrace<T>, Vec<TimeSeries<T>>)> {
    let nuclei = spec.groups[0].count;
    let h = build_reduced_one_group(spec)?;
    let prop = Propagator::from_hamiltonian(&h)?;
    let order = NuclearOrdering::reduced(nuclei)?;
    let nd = h.nuclear_dim();
    let total = (2.0f64).powi(nuclei as i32);
    let mut parts = Vec::new();
    let mut sectors = Vec::new();
    for (&spin, &count) in order.multiplicities().iter().rev() {
        let slots: Vec<usize> =
            spin.projections().map(|m| order.index_of(spin, m, 0).expect("state in ordering")).collect();
        let ensemble = nuclear_basis_ensemble(nd, &slots)?;
        let trace = ElectronTrace::compute_with(&prop, nd, &ensemble, times)?;
        sectors.push(trace.singlet(&format!("I={spin}"))?);
        parts.push((lit::<T>(count as f64 * slots.len() as f64 / total), trace));
    }
    let refs: Vec<(T, &ElectronTrace<T>)> = parts.iter().map(|(w, t)| (*w, t)).collect();
    Ok((ElectronTrace::weighted_sum(&refs)?, sectors))
}

fn two_group_mixed<T: Real>(spec: &SpinSystemSpec<T>, times: &[T]) -> Result<(ElectronTrace<T>, Vec<TimeSeries<T>>)> {
    let outer = HalfInt::from_twice(spec.groups[1].count as i32);
    let mut keys = Vec::new();
    let mut spin = outer;
    while spin.twice() >= 0 {
        keys.push(spin);
        spin = spin - HalfInt::from_twice(2);
    }
    let results: Vec<Result<(ElectronTrace<T>, crate::hamiltonian::SectorPadding, HalfInt)>> = keys
        .par_iter()
        .map(|&i2| {
            let (h, pad) = build_two_group_block(i2, spec)?;
            let all: Vec<usize> = (0..pad.sector_dim).collect();
            let ensemble = nuclear_basis_ensemble(pad.sector_dim, &all)?;
            Ok((ElectronTrace::compute(&h, &ensemble, times)?, pad, i2))
        })
        .collect();
    let mut sectors = Vec::new();
    let mut labelled = Vec::new();
    for r in results {
        let (trace, pad, i2) = r?;
        let shift: T = lit(pad.padded_count as f64 / pad.sector_dim as f64);
        let scale: T = lit(pad.sector_dim as f64 / (pad.sector_dim - pad.padded_count) as f64);
        let raw = trace.singlet("raw")?;
        let values = raw.values().iter().map(|&v| (v - shift) * scale).collect();
        sectors.push(TimeSeries::new(times.to_vec(), values, format!("I2={i2}"), SeriesKind::Probability)?);
        labelled.push((trace, pad));
    }
    Ok((reassemble_electron_traces(&labelled)?, sectors))
}

/// Decay time the echo device has to reproduce: mean of the finite
/// relaxation times of the pair.
pub fn pair_decay_time<T: Real>(times: &RelaxationTimes<T>) -> Result<T> {
    match (times.t1, times.t2) {
        (Some(a), Some(b)) => Ok((a + b) * lit(0.5)),
        (Some(a), None) | (None, Some(a)) => Ok(a),
        (None, None) => Err(Error::InvalidArgument("echo-synthetic noise needs a finite relaxation time".into())),
    }
}

fn kraus_pair<T: Real>(pair: &CMatrix<T>, params: &RelaxationParams<T>) -> Result<CMatrix<T>> {
    let single = kraus_circuit(params)?;
    if single.is_empty() {
        return Ok(pair.clone());
    }
    let mut c = Circuit::new(4)?;
    c.append_mapped(&single, &[0, 2])?.append_mapped(&single, &[1, 3])?;
    let mut ancillas = CMatrix::<T>::zeros(4, 4);
    ancillas[(0, 0)] = crate::scalar::cx(1.0, 0.0);
    let joint = DensityMatrix::new_unchecked(ancillas.kronecker(pair))?;
    let out = run_density_from(&c, &joint, None)?;
    partial_trace(out.matrix(), 4, &[0, 1])
}

fn per_gate_pair<T: Real>(pair: &CMatrix<T>, t: T, times: RelaxationTimes<T>) -> Result<CMatrix<T>> {
    let noise = SyntheticQubitNoise::new(vec![times; 2], GateDurations::instantaneous())?;
    let mut c = Circuit::new(2)?;
    c.delay(t, 0)?.delay(t, 1)?;
    Ok(run_density_from(&c, &DensityMatrix::new_unchecked(pair.clone())?, Some(&noise))?.into_matrix())
}

/// Bell statistics of the singlet after the device echo run for `t` ns of
/// pair time.
pub fn echo_reference<T: Real>(device: &EchoDevice<T>, t: T, pair_time: T) -> Result<MeasurementStats<T>> {
    let d = &device.noise;
    let n = delay_count(t, d.qubit_time(0)?, pair_time, d.durations.identity)?;
    let echo = echo_pulse_circuit(n, d.durations.identity)?;
    let rho = crate::circuit::run_density(&echo, Some(&device.noise))?;
    // Undo the un-preparation so the pair is read in the Bell basis.
    let mut readout = Circuit::new(2)?;
    readout.h(0)?.cnot(0, 1)?;
    let rho = run_density_from(&readout, &rho, None)?;
    MeasurementStats::from_pair_density(rho.matrix())
}

/// Applies the requested relaxation method to a noiseless pair trace.
pub fn apply_noise<T: Real>(
    trace: &ElectronTrace<T>,
    method: NoiseMethod,
    relaxation: RelaxationTimes<T>,
    device: Option<&EchoDevice<T>>,
) -> Result<TimeSeries<T>> {
    let label = format!("S(t) [{}]", method.name());
    match method {
        NoiseMethod::None => Ok(trace.singlet(&label)?),
        NoiseMethod::Kraus => trace
            .map(|t, p| kraus_pair(p, &RelaxationParams::new(t, relaxation)?))?
            .singlet(&label),
        NoiseMethod::PerGate => trace.map(|t, p| per_gate_pair(p, t, relaxation))?.singlet(&label),
        NoiseMethod::EchoSynthetic => {
            let owned;
            let device = match device {
                Some(d) => d,
                None => {
                    owned = EchoDevice::default_device()?;
                    &owned
                }
            };
            let pair_time = pair_decay_time(&relaxation)?;
            let values = trace
                .times()
                .par_iter()
                .zip(trace.pairs().par_iter())
                .map(|(&t, p)| {
                    let undamped = MeasurementStats::from_pair_density(p)?;
                    Ok(noise_injection(&undamped, &echo_reference(device, t, pair_time)?))
                })
                .collect::<Result<Vec<T>>>()?;
            TimeSeries::new(trace.times().to_vec(), values, label, SeriesKind::Probability)
        }
    }
}

pub fn simulate<T: Real>(request: &SimulationRequest<T>) -> Result<SimulationOutput<T>> {
    if request.times.is_empty() {
        return Err(Error::InvalidArgument("empty time grid".into()));
    }
    let (pairs, sectors) = electron_dynamics(&request.spec, request.initial, &request.times)?;
    let total = apply_noise(&pairs, request.noise, request.spec.relaxation, request.device.as_ref())?;
    Ok(SimulationOutput { total, sectors, pairs })
}

/// Closed-form channel on both electrons, the reference the noise methods
/// are compared against.
pub fn channel_singlet<T: Real>(trace: &ElectronTrace<T>, relaxation: RelaxationTimes<T>) -> Result<TimeSeries<T>> {
    trace.map(|t, p| relax_pair(p, t, relaxation, &[0, 1]))?.singlet("S(t) [channel]")
}

/// High/zero-field ratio from two simulations on the same grid.
pub fn tr_mfe<T: Real>(
    high: &SimulationRequest<T>,
    zero: &SimulationRequest<T>,
    params: &FluorescenceParams<T>,
) -> Result<(ObservedRatio<T>, TimeSeries<T>, TimeSeries<T>)> {
    let (h, z) = rayon::join(|| simulate(high), || simulate(zero));
    let (h, z) = (h?.total, z?.total);
    Ok((observed_ratio(&h, &z, params)?, h, z))
}

/// Largest singlet difference between relaxing both electrons at the
/// given times and only one at half of them, for the mixed initial state.
pub fn half_rate_equivalence_check<T: Real>(spec: &SpinSystemSpec<T>, times: &[T]) -> Result<T> {
    let (trace, _) = electron_dynamics(spec, InitialState::Mixed, times)?;
    crate::relaxation::half_rate_deviation(&trace, spec.relaxation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::NuclearGroup;

    fn octalin(field: f64, t1: f64, t2: f64) -> SpinSystemSpec<f64> {
        SpinSystemSpec::new(
            vec![NuclearGroup::from_gauss(8, 24.9)],
            2.0028,
            2.0028,
            field,
            RelaxationTimes::from_ns(t1, t2).unwrap(),
        )
        .unwrap()
    }

    fn grid(end: f64, step: f64) -> Vec<f64> {
        (0..=((end / step).round() as usize)).map(|k| k as f64 * step).collect()
    }

    #[test]
    fn starts_in_the_singlet() {
        let req = SimulationRequest::new(octalin(0.0, 9.0, 9.0), InitialState::Mixed, NoiseMethod::Kraus, vec![0.0]);
        let out = simulate(&req).unwrap();
        assert!((out.total.values()[0] - 1.0).abs() < 1e-12);
        assert_eq!(out.sectors.len(), 5);
    }

    #[test]
    fn noise_methods_agree_with_channel() {
        let spec = octalin(0.0, 9.0, 9.0);
        let times = grid(20.0, 0.5);
        let (trace, _) = electron_dynamics(&spec, InitialState::Mixed, &times).unwrap();
        let channel = channel_singlet(&trace, spec.relaxation).unwrap();
        for method in [NoiseMethod::Kraus, NoiseMethod::PerGate] {
            let s = apply_noise(&trace, method, spec.relaxation, None).unwrap();
            assert!(s.max_abs_diff(&channel).unwrap() < 1e-9, "{method:?}");
        }
    }

    #[test]
    fn pure_states_need_one_group() {
        let two = SpinSystemSpec::new(
            vec![NuclearGroup::new(2, 0.65), NuclearGroup::new(2, 1.66)],
            2.0,
            2.0,
            0.0,
            RelaxationTimes::none(),
        )
        .unwrap();
        let pure = InitialState::Pure { spin: HalfInt::integer(1), m: HalfInt::ZERO };
        assert!(electron_dynamics(&two, pure, &[0.0]).is_err());
    }

    #[test]
    fn noise_method_names_round_trip() {
        for m in [NoiseMethod::None, NoiseMethod::Kraus, NoiseMethod::PerGate, NoiseMethod::EchoSynthetic] {
            assert_eq!(NoiseMethod::parse(m.name()).unwrap(), m);
        }
        assert!(NoiseMethod::parse("magic").is_err());
    }
}
