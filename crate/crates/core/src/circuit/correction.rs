use crate::dynamics::{bell_population, BellState};
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, CMatrix, Real};

/// Smallest denominator magnitude accepted by [`noise_correction`].
pub const CORRECTION_FLOOR: f64 = 1e-6;

/// Bell-basis outcome probabilities on the electron pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementStats<T> {
    pub singlet: T,
    pub t0: T,
    pub t_plus: T,
    pub t_minus: T,
}

impl<T: Real> MeasurementStats<T> {
    /// Requires nonnegative entries summing to one within 1e-12.
    pub fn new(singlet: T, t0: T, t_plus: T, t_minus: T) -> Result<Self> {
        let s = MeasurementStats { singlet, t0, t_plus, t_minus };
        let tol = lit::<T>(1e-12).max(T::default_epsilon() * lit(64.0));
        let sum = singlet + t0 + t_plus + t_minus;
        if s.as_array().iter().any(|p| !(*p >= -tol)) || (sum - T::one()).abs() > tol {
            return Err(Error::InvalidArgument(format!(
                "Bell statistics {:?} must be nonnegative and sum to 1",
                s.as_array().map(to_f64)
            )));
        }
        Ok(s)
    }

    pub fn noise_free() -> Self {
        MeasurementStats { singlet: T::one(), t0: T::zero(), t_plus: T::zero(), t_minus: T::zero() }
    }

    pub fn uniform() -> Self {
        let q = lit(0.25);
        MeasurementStats { singlet: q, t0: q, t_plus: q, t_minus: q }
    }

    pub fn from_array(p: [T; 4]) -> Result<Self> {
        Self::new(p[0], p[1], p[2], p[3])
    }

    pub fn as_array(&self) -> [T; 4] {
        [self.singlet, self.t0, self.t_plus, self.t_minus]
    }

    /// Populations of a 4x4 electron-pair density in the Bell basis.
    pub fn from_pair_density(pair: &CMatrix<T>) -> Result<Self> {
        if pair.shape() != (4, 4) {
            return Err(Error::DimensionMismatch { expected: 4, found: pair.nrows() });
        }
        let p = BellState::ALL.map(|b| bell_population(pair, b));
        Self::from_array(p)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let (a, b) = (self.as_array(), other.as_array());
        (0..4).fold(T::zero(), |m, i| m.max((a[i] - b[i]).abs()))
    }
}

fn guarded<T: Real>(d: T, what: &str) -> Result<T> {
    if to_f64(d.abs()) < CORRECTION_FLOOR {
        return Err(Error::UnrecoverableNoise(format!("{what} = {:e} is too close to zero", to_f64(d))));
    }
    Ok(d)
}

/// Recovers undamped statistics from `measured` given the statistics of a
/// delay-only reference run of the same length.
pub fn noise_correction<T: Real>(measured: &MeasurementStats<T>, reference: &MeasurementStats<T>) -> Result<MeasurementStats<T>> {
    let r = reference;
    let four: T = lit(4.0);
    let dp = guarded(T::one() - four * r.t_plus, "1 - 4 T+'")?;
    let dm = guarded(T::one() - four * r.t_minus, "1 - 4 T-'")?;
    let ds = guarded(r.singlet * r.singlet - r.t0 * r.t0, "S'^2 - T0'^2")?;
    let t_plus = (measured.t_plus - r.t_plus) / dp;
    let t_minus = (measured.t_minus - r.t_minus) / dm;
    let a = measured.singlet - t_plus * r.t_plus - t_minus * r.t_minus;
    let b = measured.t0 - t_plus * r.t_plus - t_minus * r.t_minus;
    let singlet = (a * r.singlet - b * r.t0) / ds;
    let t0 = (b * r.singlet - a * r.t0) / ds;
    Ok(MeasurementStats { singlet, t0, t_plus, t_minus })
}

/// Singlet probability after imposing the channel described by `target`
/// on undamped statistics.
pub fn noise_injection<T: Real>(undamped: &MeasurementStats<T>, target: &MeasurementStats<T>) -> T {
    undamped.singlet * target.singlet
        + undamped.t0 * target.t0
        + undamped.t_plus * target.t_plus
        + undamped.t_minus * target.t_minus
}

/// Forward damping model that [`noise_correction`] inverts; its singlet
/// component equals [`noise_injection`].
pub fn damp_stats<T: Real>(undamped: &MeasurementStats<T>, reference: &MeasurementStats<T>) -> MeasurementStats<T> {
    let (u, r) = (undamped, reference);
    let four: T = lit(4.0);
    let shared = u.t_plus * r.t_plus + u.t_minus * r.t_minus;
    MeasurementStats {
        singlet: noise_injection(u, r),
        t0: u.singlet * r.t0 + u.t0 * r.singlet + shared,
        t_plus: r.t_plus + u.t_plus * (T::one() - four * r.t_plus),
        t_minus: r.t_minus + u.t_minus * (T::one() - four * r.t_minus),
    }
}
