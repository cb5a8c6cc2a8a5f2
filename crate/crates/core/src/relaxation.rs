//! Infinite-temperature thermal relaxation (symmetrized amplitude damping
//! followed by dephasing) as single-site Kraus channels.

use crate::dynamics::{DensityMatrix, ElectronTrace};
use crate::error::{Error, Result};
use crate::linalg::{conjugate, Pauli};
use crate::scalar::{cx, lit, to_f64, CMatrix, Cx, Real};
use crate::system::RelaxationTimes;
use nalgebra::ComplexField;

/// Channel parameters after a time `t` (ns).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelaxationParams<T> {
    pub t: T,
    pub t1: Option<T>,
    pub t2: Option<T>,
    /// Amplitude damping probability `1 - exp(-t / T1)`.
    pub p_x: T,
    /// Extra phase flip probability `(1 - exp(-t (1/T2 - 1/(2 T1)))) / 2`.
    pub p_z: T,
    /// Rotation angle `2 asin(sqrt(p_x))`.
    pub phi_x: T,
}

impl<T: Real> RelaxationParams<T> {
    pub fn new(t: T, times: RelaxationTimes<T>) -> Result<Self> {
        if !(t >= T::zero()) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!("relaxation time t = {t} must be finite and >= 0")));
        }
        let inv = |x: Option<T>| x.map_or(T::zero(), |v| T::one() / v);
        let rate = inv(times.t2) - inv(times.t1) * lit(0.5);
        if to_f64(rate) < -1e-15 {
            return Err(Error::UnphysicalParameters(format!(
                "1/T2 - 1/(2 T1) = {rate} < 0 gives a negative dephasing probability"
            )));
        }
        let rate = rate.max(T::zero());
        let p_x = T::one() - (-t * inv(times.t1)).exp();
        let p_z = (T::one() - (-t * rate).exp()) * lit(0.5);
        let phi_x = p_x.sqrt().asin() * lit(2.0);
        Ok(RelaxationParams { t, t1: times.t1, t2: times.t2, p_x, p_z, phi_x })
    }

    pub fn times(&self) -> RelaxationTimes<T> {
        RelaxationTimes { t1: self.t1, t2: self.t2 }
    }
}

/// Kraus operators (2x2) acting on one register site.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel<T: Real> {
    operators: Vec<CMatrix<T>>,
    target_site: usize,
}

impl<T: Real> KrausChannel<T> {
    /// Checks shapes and completeness (`sum K^dagger K = 1` to 1e-13).
    pub fn new(operators: Vec<CMatrix<T>>, target_site: usize) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidArgument("a channel needs at least one operator".into()));
        }
        if let Some(k) = operators.iter().find(|k| k.nrows() != 2 || k.ncols() != 2) {
            return Err(Error::DimensionMismatch { expected: 2, found: k.nrows() });
        }
        let ch = KrausChannel { operators, target_site };
        let err = to_f64(ch.completeness_error());
        if err > 1e-13f64.max(1e3 * to_f64(T::default_epsilon())) {
            return Err(Error::InvalidArgument(format!("Kraus operators incomplete (deviation {err:e})")));
        }
        Ok(ch)
    }

    pub fn identity(target_site: usize) -> Self {
        KrausChannel { operators: vec![CMatrix::identity(2, 2)], target_site }
    }

    pub fn operators(&self) -> &[CMatrix<T>] {
        &self.operators
    }

    pub fn target_site(&self) -> usize {
        self.target_site
    }

    pub fn retarget(mut self, site: usize) -> Self {
        self.target_site = site;
        self
    }

    /// Largest entry of `sum K^dagger K - 1`.
    pub fn completeness_error(&self) -> T {
        let sum = self.operators.iter().fold(CMatrix::<T>::zeros(2, 2), |acc, k| acc + k.adjoint() * k);
        (sum - CMatrix::<T>::identity(2, 2)).iter().fold(T::zero(), |acc, z| acc.max(z.modulus()))
    }

    /// `sum K rho K^dagger` on a raw matrix of an `n`-site register.
    pub fn apply_matrix(&self, rho: &CMatrix<T>) -> Result<CMatrix<T>> {
        let sites = crate::linalg::qubit_count(rho.nrows())?;
        if self.target_site >= sites {
            return Err(Error::InvalidSite { site: self.target_site, sites });
        }
        let mut out = CMatrix::<T>::zeros(rho.nrows(), rho.ncols());
        for k in &self.operators {
            out += conjugate(rho, k, &[self.target_site]);
        }
        Ok(out)
    }
}

/// Symmetrized amplitude damping (decay towards either level with weight
/// one half) followed by a phase flip with probability `p_z`. The fixed
/// point is the maximally mixed state; an infinite T1 skips the damping.
pub fn infinite_temperature_thermal_channel<T: Real>(params: &RelaxationParams<T>, target_site: usize) -> Result<KrausChannel<T>> {
    let zero = cx::<T>(0.0, 0.0);
    let one = cx::<T>(1.0, 0.0);
    let mut damping: Vec<CMatrix<T>> = Vec::new();
    if params.t1.is_some() && params.p_x > T::zero() {
        let half: T = lit(std::f64::consts::FRAC_1_SQRT_2);
        let c = Cx::new((params.phi_x * lit(0.5)).cos(), T::zero());
        let s = Cx::new(T::zero(), -(params.phi_x * lit(0.5)).sin());
        let scale = |m: CMatrix<T>| m * Cx::new(half, T::zero());
        damping.push(scale(CMatrix::from_row_slice(2, 2, &[one, zero, zero, c])));
        damping.push(scale(CMatrix::from_row_slice(2, 2, &[zero, s, zero, zero])));
        damping.push(scale(CMatrix::from_row_slice(2, 2, &[c, zero, zero, one])));
        damping.push(scale(CMatrix::from_row_slice(2, 2, &[zero, zero, s, zero])));
    } else {
        damping.push(CMatrix::identity(2, 2));
    }
    let mut ops = Vec::with_capacity(2 * damping.len());
    let keep = Cx::new((T::one() - params.p_z).sqrt(), T::zero());
    let flip = Cx::new(params.p_z.sqrt(), T::zero());
    let z = Pauli::Z.matrix::<T>();
    for k in &damping {
        ops.push(k * keep);
        if params.p_z > T::zero() {
            ops.push(&z * k * flip);
        }
    }
    KrausChannel::new(ops, target_site)
}

/// `sum K rho K^dagger` with `K` embedded on the channel's site.
pub fn apply_channel<T: Real>(rho: &DensityMatrix<T>, channel: &KrausChannel<T>) -> Result<DensityMatrix<T>> {
    let out = channel.apply_matrix(rho.matrix())?;
    DensityMatrix::new_unchecked(out)?.with_labels(rho.labels().to_vec())
}

/// Relaxation of both electrons of a 4x4 pair density after time `t`.
pub fn relax_pair<T: Real>(pair: &CMatrix<T>, t: T, times: RelaxationTimes<T>, sites: &[usize]) -> Result<CMatrix<T>> {
    let params = RelaxationParams::new(t, times)?;
    let mut out = pair.clone();
    for &site in sites {
        out = infinite_temperature_thermal_channel(&params, site)?.apply_matrix(&out)?;
    }
    Ok(out)
}

/// Largest singlet deviation between relaxing both electrons at `times`
/// and relaxing only the cation electron at half the times.
pub fn half_rate_deviation<T: Real>(trace: &ElectronTrace<T>, times: RelaxationTimes<T>) -> Result<T> {
    let both = trace.map(|t, p| relax_pair(p, t, times, &[0, 1]))?.singlet("both")?;
    let half = times.scaled(lit(2.0));
    let single = trace.map(|t, p| relax_pair(p, t, half, &[0]))?.singlet("single")?;
    both.max_abs_diff(&single)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn times(t1: f64, t2: f64) -> RelaxationTimes<f64> {
        RelaxationTimes::from_ns(t1, t2).unwrap()
    }

    fn generic_state() -> CMatrix<f64> {
        CMatrix::from_row_slice(2, 2, &[cx(0.7, 0.0), cx(0.2, 0.1), cx(0.2, -0.1), cx(0.3, 0.0)])
    }

    #[test]
    fn zero_time_is_identity() {
        let p = RelaxationParams::new(0.0, times(9.0, 9.0)).unwrap();
        assert_eq!((p.p_x, p.p_z, p.phi_x), (0.0, 0.0, 0.0));
        let ch = infinite_temperature_thermal_channel(&p, 0).unwrap();
        let rho = generic_state();
        assert!((ch.apply_matrix(&rho).unwrap() - &rho).camax() < 1e-15);
    }

    #[test]
    fn pure_dephasing_closed_form() {
        let (t, t2) = (7.0, 20.0);
        let p = RelaxationParams::new(t, times(f64::INFINITY, t2)).unwrap();
        let out = infinite_temperature_thermal_channel(&p, 0).unwrap().apply_matrix(&generic_state()).unwrap();
        let decay = (-t / t2).exp();
        assert!((out[(0, 0)].re - 0.7).abs() < 1e-15);
        assert!((out[(0, 1)] - cx(0.2 * decay, 0.1 * decay)).norm() < 1e-15);
    }

    #[test]
    fn relaxes_to_mixed() {
        let p = RelaxationParams::new(400.0, times(9.0, 9.0)).unwrap();
        let out = infinite_temperature_thermal_channel(&p, 0).unwrap().apply_matrix(&generic_state()).unwrap();
        assert!((out - CMatrix::identity(2, 2) * cx(0.5, 0.0)).camax() < 1e-15);
    }

    #[test]
    fn rejects_unphysical() {
        let bad = RelaxationTimes { t1: Some(5.0), t2: Some(20.0) };
        assert!(matches!(RelaxationParams::new(1.0, bad), Err(Error::UnphysicalParameters(_))));
        assert!(RelaxationParams::new(-1.0, times(9.0, 9.0)).is_err());
    }

    #[test]
    fn channel_targets_valid_site() {
        let p = RelaxationParams::new(3.0, times(9.0, 9.0)).unwrap();
        let ch = infinite_temperature_thermal_channel(&p, 2).unwrap();
        let rho = DensityMatrix::<f64>::maximally_mixed(2);
        assert!(apply_channel(&rho, &ch).is_err());
    }
}
