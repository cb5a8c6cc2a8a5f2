use super::gate::GateKind;
use super::kak::kak_decompose;
use super::program::Circuit;
use crate::dynamics::TimeSeries;
use crate::error::{Error, Result};
use crate::hamiltonian::{pauli_decompose_partitioned, reconstruct, PauliTerm};
use crate::linalg::expm_hermitian;
use crate::relaxation::RelaxationParams;
use crate::scalar::{lit, to_f64, Real};
use crate::spin::HalfInt;
use crate::system::SpinSystemSpec;

/// `|00> -> (|01> - |10>) / sqrt 2` on two sites (the singlet).
pub fn singlet_preparation<T: Real>() -> Result<Circuit<T>> {
    let mut c = Circuit::new(2)?;
    c.x(0)?.x(1)?.h(0)?.cnot(0, 1)?;
    Ok(c)
}

/// Inverse of [`singlet_preparation`] up to the initial X gates: the
/// singlet ends in `|11>`.
pub fn singlet_unpreparation<T: Real>() -> Result<Circuit<T>> {
    let mut c = Circuit::new(2)?;
    c.cnot(0, 1)?.h(0)?;
    Ok(c)
}

/// X gates writing the basis index `index` into `site_count` sites.
pub fn state_preparation<T: Real>(site_count: usize, index: usize) -> Result<Circuit<T>> {
    if index >> site_count != 0 {
        return Err(Error::InvalidArgument(format!("index {index} needs more than {site_count} sites")));
    }
    let mut c = Circuit::new(site_count)?;
    for s in (0..site_count).filter(|s| (index >> s) & 1 == 1) {
        c.x(s)?;
    }
    Ok(c)
}

/// Ancilla realization of the thermal relaxation channel: site 0 is the
/// target, site 1 an ancilla starting in `|0>`.
pub fn kraus_circuit<T: Real>(params: &RelaxationParams<T>) -> Result<Circuit<T>> {
    let mut c = Circuit::new(2)?;
    if params.t1.is_some() && params.p_x > T::zero() {
        c.probabilistic(GateKind::X, &[1], lit(0.5))?;
        c.cnot(0, 1)?;
        c.crx(params.phi_x, 1, 0)?;
        c.cnot(0, 1)?;
    }
    if params.p_z > T::zero() {
        c.probabilistic(GateKind::Z, &[0], params.p_z)?;
    }
    Ok(c)
}

/// Sites `0..n` are the nuclear register, `n..2n` the ancillas; each
/// ancilla forms a Bell pair with its nuclear partner.
pub fn purification_circuit<T: Real>(n: usize) -> Result<Circuit<T>> {
    let mut c = Circuit::new(2 * n)?;
    for k in 0..n {
        c.h(n + k)?.cnot(n + k, k)?;
    }
    Ok(c)
}

/// Identity-gate count emulating decay at `t` ns: a qubit with coherence
/// time `qubit_time` idles for `t * qubit_time / pair_time` ns. Rounded to
/// the nearest multiple of 8 so the echo pattern divides evenly.
pub fn delay_count<T: Real>(t: T, qubit_time: T, pair_time: T, identity_duration: T) -> Result<usize> {
    if !(qubit_time > T::zero() && pair_time > T::zero() && identity_duration > T::zero() && t >= T::zero()) {
        return Err(Error::InvalidArgument("delay scaling needs positive times".into()));
    }
    let exact = to_f64(qubit_time / (pair_time * identity_duration) * t);
    Ok(((exact / 8.0).round() as usize) * 8)
}

fn delay_block<T: Real>(c: &mut Circuit<T>, count: usize, identity_duration: T) -> Result<()> {
    if count > 0 {
        let d = identity_duration * lit(count as f64);
        c.delay(d, 0)?.delay(d, 1)?;
    }
    Ok(())
}

/// Singlet preparation, `n` identity delays on both sites split by four
/// echo X pulses (`n/8, n/4, n/4, n/4, n/8`), un-preparation. A run of
/// identities is emitted as one delay of the summed duration.
pub fn echo_pulse_circuit<T: Real>(n: usize, identity_duration: T) -> Result<Circuit<T>> {
    if !n.is_multiple_of(8) {
        return Err(Error::InvalidArgument(format!("echo delay count {n} must be a multiple of 8")));
    }
    let mut c = singlet_preparation()?;
    delay_block(&mut c, n / 8, identity_duration)?;
    for k in 0..4 {
        c.x(0)?.x(1)?;
        delay_block(&mut c, if k == 3 { n / 8 } else { n / 4 }, identity_duration)?;
    }
    c.append(&singlet_unpreparation()?)?;
    c.measure(&[0, 1])?;
    Ok(c)
}

/// Same as [`echo_pulse_circuit`] without the echo pulses.
pub fn delay_only_circuit<T: Real>(n: usize, identity_duration: T) -> Result<Circuit<T>> {
    let mut c = singlet_preparation()?;
    delay_block(&mut c, n, identity_duration)?;
    c.append(&singlet_unpreparation()?)?;
    c.measure(&[0, 1])?;
    Ok(c)
}

/// `2 acos(sqrt S)`: the `Rz` angle turning a singlet into a state with
/// singlet probability `S`.
pub fn rz_angle<T: Real>(singlet: T) -> Result<T> {
    if !(singlet >= T::zero() && singlet <= T::one()) {
        return Err(Error::ProbabilityOutOfRange { value: to_f64(singlet), time: f64::NAN });
    }
    Ok(singlet.sqrt().acos() * lit(2.0))
}

/// One two-site circuit per sample: singlet preparation, `Rz` on site 1,
/// the optional two-site `noise` block, un-preparation, measurement. The
/// probability of `|11>` reproduces the sample.
pub fn rz_encode_trace<T: Real>(series: &TimeSeries<T>, noise: Option<&Circuit<T>>) -> Result<Vec<Circuit<T>>> {
    if let Some(block) = noise {
        if block.site_count() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: block.site_count() });
        }
    }
    series
        .iter()
        .map(|(t, s)| {
            let theta = rz_angle(s).map_err(|_| Error::ProbabilityOutOfRange { value: to_f64(s), time: to_f64(t) })?;
            let mut c = singlet_preparation()?;
            c.rz(theta, 1)?;
            if let Some(block) = noise {
                c.append(block)?;
            }
            c.append(&singlet_unpreparation()?)?;
            c.measure(&[0, 1])?;
            Ok(c)
        })
        .collect()
}

/// Evolution of the `|I, I>` partition for time `t` on three sites
/// (cation, nucleus, anion): a KAK-synthesized block on the first two
/// and an `Rz` for the anion Zeeman term.
pub fn partitioned_kak_circuit<T: Real>(spin: HalfInt, spec: &SpinSystemSpec<T>, t: T) -> Result<Circuit<T>> {
    let terms = pauli_decompose_partitioned(spin, spec)?;
    let mut pair_terms = Vec::new();
    let mut anion_field = T::zero();
    for term in &terms {
        let text = term.string.to_string();
        if term.string.on_site(2) == crate::linalg::Pauli::I {
            pair_terms.push(PauliTerm::new(term.coefficient, &text[1..])?);
        } else if text == "ZII" {
            anion_field += term.coefficient;
        } else {
            return Err(Error::InvalidSpec(format!("unexpected anion term {text}")));
        }
    }
    let block = expm_hermitian(&reconstruct(&pair_terms)?, t);
    let kak = kak_decompose(&block)?;
    let mut c = Circuit::new(3)?;
    kak.append_to(&mut c, 0, 1)?;
    c.rz(anion_field * t * lit(2.0), 2)?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{run_density, run_statevector};
    use crate::dynamics::{bell_vector, BellState, DensityMatrix};
    use crate::linalg::partial_trace;

    #[test]
    fn preparation_round_trip() {
        let psi = run_statevector(&singlet_preparation::<f64>().unwrap()).unwrap();
        let s = bell_vector::<f64>(BellState::Singlet);
        assert!((psi - &s).norm() < 1e-15);
        let mut c = singlet_preparation::<f64>().unwrap();
        c.append(&singlet_unpreparation().unwrap()).unwrap();
        let out = run_statevector(&c).unwrap();
        assert!((out[3].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn purification_gives_mixed_register() {
        for n in 1..=3 {
            let rho = run_density(&purification_circuit::<f64>(n).unwrap(), None).unwrap();
            let keep: Vec<usize> = (0..n).collect();
            let red = partial_trace(rho.matrix(), 2 * n, &keep).unwrap();
            let target = DensityMatrix::<f64>::maximally_mixed(n);
            assert!((red - target.matrix()).camax() < 1e-14);
        }
    }

    #[test]
    fn rz_angles() {
        use std::f64::consts::PI;
        assert_eq!(rz_angle(1.0).unwrap(), 0.0);
        assert!((rz_angle(0.0).unwrap() - PI).abs() < 1e-15);
        assert!((rz_angle(0.5).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!(rz_angle(1.5).is_err());
    }

    #[test]
    fn echo_without_noise_returns_singlet() {
        let c = echo_pulse_circuit::<f64>(8, 35.5).unwrap();
        let rho = run_density(&c, None).unwrap();
        assert!((rho.matrix()[(3, 3)].re - 1.0).abs() < 1e-14);
        assert!(echo_pulse_circuit::<f64>(12, 35.5).is_err());
    }

    #[test]
    fn delay_count_scales_linearly() {
        let n1 = delay_count(10.0, 1e5, 9.0, 35.5).unwrap();
        let n2 = delay_count(20.0, 1e5, 9.0, 35.5).unwrap();
        assert_eq!(n1 % 8, 0);
        assert!((n2 as f64 / n1 as f64 - 2.0).abs() < 8.0 / n1 as f64);
    }
}
