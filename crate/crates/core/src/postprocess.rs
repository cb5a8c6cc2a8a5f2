//! Fluorescence model turning singlet traces into recombination
//! intensities and the high/zero-field ratio seen by a detector.

use crate::dynamics::{SeriesKind, TimeSeries};
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Denominator floor of the ratio relative to its maximum.
pub const RATIO_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluorescenceParams<T> {
    /// Fraction of geminate recombination that is spin selective.
    pub theta: T,
    /// Fluorescence decay time (ns).
    pub tau_f: T,
    /// Offset of the pair-survival law (ns).
    pub t0: T,
    /// Detector gate width (ns).
    pub t_g: T,
}

impl<T: Real> FluorescenceParams<T> {
    pub fn new(theta: T, tau_f: T, t0: T, t_g: T) -> Result<Self> {
        let p = FluorescenceParams { theta, tau_f, t0, t_g };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta >= T::zero() && self.theta <= T::one()) {
            return Err(Error::InvalidArgument(format!("theta = {} outside [0, 1]", self.theta)));
        }
        for (name, v) in [("tau_f", self.tau_f), ("t0", self.t0), ("t_g", self.t_g)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} = {v} must be finite and > 0")));
            }
        }
        Ok(())
    }

    /// Times before this are affected by the zero extension at `t = 0`.
    pub fn edge_time(&self) -> T {
        self.t_g + self.tau_f * lit(3.0)
    }
}

/// Pair survival `(t + t0)^(-3/2)`.
pub fn survival<T: Real>(t: T, t0: T) -> Result<T> {
    let s = t + t0;
    if !(s > T::zero()) {
        return Err(Error::InvalidArgument(format!("t + t0 = {s} must be positive")));
    }
    Ok(T::one() / (s * s.sqrt()))
}

/// `F(t) (theta S(t) + (1 - theta) / 4)`.
pub fn ideal_intensity<T: Real>(singlet: &TimeSeries<T>, params: &FluorescenceParams<T>) -> Result<TimeSeries<T>> {
    params.validate()?;
    let quarter: T = lit(0.25);
    let values = singlet
        .iter()
        .map(|(t, s)| Ok(survival(t, params.t0)? * (params.theta * s + (T::one() - params.theta) * quarter)))
        .collect::<Result<Vec<T>>>()?;
    TimeSeries::new(singlet.times().to_vec(), values, format!("ideal {}", singlet.label()), SeriesKind::Intensity)
}

/// Centered boxcar of width `width` on a grid of spacing `step`, returned
/// for offsets `-half..=half` and normalized to sum to one. Each cell gets
/// its overlap with the box.
pub fn boxcar_kernel<T: Real>(width: T, step: T) -> Result<Vec<T>> {
    if !(width > T::zero() && step > T::zero()) {
        return Err(Error::InvalidArgument("boxcar width and grid step must be positive".into()));
    }
    let (w, dt) = (to_f64(width), to_f64(step));
    let half = ((w / 2.0) / dt + 0.5).ceil() as i64;
    let raw: Vec<f64> = (-half..=half)
        .map(|j| {
            let (lo, hi) = ((j as f64 - 0.5) * dt, (j as f64 + 0.5) * dt);
            (hi.min(w / 2.0) - lo.max(-w / 2.0)).max(0.0)
        })
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|x| lit(x / total)).collect())
}

/// Causal convolution with `exp(-t / tau)` by the trapezoid rule; the
/// signal is zero before the first sample.
fn convolve_decay<T: Real>(values: &[T], step: T, tau: T) -> Vec<T> {
    let n = values.len();
    let kernel: Vec<T> = (0..n).map(|k| (-(step * lit(k as f64)) / tau).exp()).collect();
    let half: T = lit(0.5);
    (0..n)
        .map(|i| {
            let mut acc = T::zero();
            for k in 0..=i {
                let w = if k == 0 || k == i { half } else { T::one() };
                acc += w * kernel[k] * values[i - k];
            }
            if i == 0 {
                acc = T::zero();
            }
            acc * step
        })
        .collect()
}

/// Smoothing by a centered kernel; zero before the first sample and the
/// last sample repeated past the end.
fn smooth<T: Real>(values: &[T], kernel: &[T]) -> Vec<T> {
    let n = values.len() as i64;
    let half = (kernel.len() / 2) as i64;
    (0..n)
        .map(|i| {
            kernel.iter().enumerate().fold(T::zero(), |acc, (j, &g)| {
                let src = i - (j as i64 - half);
                let v = if src < 0 {
                    T::zero()
                } else {
                    values[src.min(n - 1) as usize]
                };
                acc + g * v
            })
        })
        .collect()
}

/// Detected intensity from an ideal one: decay convolution then detector
/// smoothing. No grid-resolution check.
pub(crate) fn observed_from_ideal_unchecked<T: Real>(
    ideal: &TimeSeries<T>,
    params: &FluorescenceParams<T>,
    step: T,
) -> Result<TimeSeries<T>> {
    let decayed = convolve_decay(ideal.values(), step, params.tau_f);
    let kernel = boxcar_kernel(params.t_g, step)?;
    let values = smooth(&decayed, &kernel);
    TimeSeries::new(ideal.times().to_vec(), values, format!("observed {}", ideal.label()), SeriesKind::Intensity)
}

fn checked_step<T: Real>(series: &TimeSeries<T>, params: &FluorescenceParams<T>) -> Result<T> {
    params.validate()?;
    let step = series
        .uniform_step()
        .ok_or_else(|| Error::GridMismatch("post-processing needs a uniform grid of at least two points".into()))?;
    let limit = params.tau_f.min(params.t_g) * lit(0.25);
    if step > limit * lit(1.0 + 1e-9) {
        return Err(Error::GridMismatch(format!(
            "grid step {step} ns is coarser than min(tau_f, t_g) / 4 = {limit} ns"
        )));
    }
    Ok(step)
}

pub fn observed_intensity<T: Real>(singlet: &TimeSeries<T>, params: &FluorescenceParams<T>) -> Result<TimeSeries<T>> {
    let step = checked_step(singlet, params)?;
    observed_from_ideal_unchecked(&ideal_intensity(singlet, params)?, params, step)
}

/// Ratio of detected high- and zero-field intensities with the components.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservedRatio<T> {
    pub ratio: TimeSeries<T>,
    pub high_field: TimeSeries<T>,
    pub zero_field: TimeSeries<T>,
    /// Samples before this time are within reach of the `t = 0` edge.
    pub edge_until: T,
    /// Points dropped because the zero-field intensity underflowed.
    pub dropped: usize,
}

fn ratio_of<T: Real>(high: TimeSeries<T>, zero: TimeSeries<T>, edge_until: T) -> Result<ObservedRatio<T>> {
    high.check_grid(&zero)?;
    let peak = zero.values().iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let floor = peak * lit(RATIO_FLOOR);
    let (mut times, mut values) = (Vec::new(), Vec::new());
    for ((t, h), z) in high.iter().zip(zero.values()) {
        if z.abs() > floor && peak > T::zero() {
            times.push(t);
            values.push(h / *z);
        }
    }
    if times.is_empty() {
        return Err(Error::Numerical("zero-field intensity underflows everywhere".into()));
    }
    let dropped = high.len() - times.len();
    let ratio = TimeSeries::new(times, values, "ratio", SeriesKind::Ratio)?;
    Ok(ObservedRatio { ratio, high_field: high, zero_field: zero, edge_until, dropped })
}

/// Detected high/zero-field ratio for singlet traces on a common uniform
/// grid with step at most `min(tau_f, t_g) / 4`.
pub fn observed_ratio<T: Real>(
    high_field: &TimeSeries<T>,
    zero_field: &TimeSeries<T>,
    params: &FluorescenceParams<T>,
) -> Result<ObservedRatio<T>> {
    high_field.check_grid(zero_field)?;
    let step = checked_step(high_field, params)?;
    let high = observed_from_ideal_unchecked(&ideal_intensity(high_field, params)?, params, step)?;
    let zero = observed_from_ideal_unchecked(&ideal_intensity(zero_field, params)?, params, step)?;
    ratio_of(high, zero, params.edge_time())
}

/// Indices of strict interior local maxima (plateaus count once, at their
/// first sample).
pub fn local_maxima<T: Real>(values: &[T]) -> Vec<usize> {
    extrema(values, |a, b| a > b)
}

pub fn local_minima<T: Real>(values: &[T]) -> Vec<usize> {
    extrema(values, |a, b| a < b)
}

fn extrema<T: Real>(values: &[T], better: impl Fn(T, T) -> bool) -> Vec<usize> {
    let mut out = Vec::new();
    let n = values.len();
    let mut i = 1;
    while i + 1 < n {
        if better(values[i], values[i - 1]) {
            let mut j = i;
            while j + 1 < n && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < n && better(values[i], values[j + 1]) {
                out.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Index of the largest value at or after `from` (ns).
pub fn argmax_after<T: Real>(series: &TimeSeries<T>, from: T) -> Option<usize> {
    series
        .iter()
        .enumerate()
        .filter(|(_, (t, _))| *t >= from)
        .fold(None, |best: Option<(usize, T)>, (i, (_, v))| match best {
            Some((_, b)) if b >= v => best,
            _ => Some((i, v)),
        })
        .map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(end: f64, step: f64) -> Vec<f64> {
        (0..=((end / step).round() as usize)).map(|k| k as f64 * step).collect()
    }

    fn series(times: &[f64], f: impl Fn(f64) -> f64) -> TimeSeries<f64> {
        TimeSeries::new(times.to_vec(), times.iter().map(|&t| f(t)).collect(), "s", SeriesKind::Probability).unwrap()
    }

    fn octalin_params() -> FluorescenceParams<f64> {
        FluorescenceParams::new(0.35, 1.2, 1.0, 1.0).unwrap()
    }

    #[test]
    fn ideal_intensity_limits() {
        let times = grid(10.0, 0.1);
        let s = series(&times, |t| (0.3 * t).cos().powi(2));
        let flat = ideal_intensity(&s, &FluorescenceParams::new(0.0, 1.0, 1.0, 1.0).unwrap()).unwrap();
        for (t, v) in flat.iter() {
            assert!((v - 0.25 * (t + 1.0).powf(-1.5)).abs() < 1e-15);
        }
        let one = series(&times, |_| 1.0);
        let full = ideal_intensity(&one, &FluorescenceParams::new(1.0, 1.0, 1.0, 1.0).unwrap()).unwrap();
        for (t, v) in full.iter() {
            assert!((v - (t + 1.0).powf(-1.5)).abs() < 1e-15);
        }
    }

    #[test]
    fn kernel_mass_is_one() {
        for (w, dt) in [(1.0, 0.1), (1.0, 0.07), (0.3, 0.1), (2.5, 0.25)] {
            let k = boxcar_kernel::<f64>(w, dt).unwrap();
            let total: f64 = k.iter().sum();
            assert!((total - 1.0).abs() < 1e-15, "{w} {dt}: {total}");
            let n = k.len();
            for j in 0..n {
                assert_eq!(k[j], k[n - 1 - j]);
            }
        }
    }

    #[test]
    fn identical_inputs_give_unit_ratio() {
        let times = grid(40.0, 0.1);
        let s = series(&times, |t| 0.5 + 0.4 * (0.7 * t).cos() * (-t / 30.0).exp());
        let r = observed_ratio(&s, &s, &octalin_params()).unwrap();
        assert!(r.ratio.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let times = grid(10.0, 0.5);
        let s = series(&times, |_| 1.0);
        assert!(matches!(observed_ratio(&s, &s, &octalin_params()), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn delta_kernel_limit() {
        let step = 0.1;
        let times = grid(30.0, step);
        let sb = series(&times, |t| 0.5 + 0.3 * (0.5 * t).cos());
        let s0 = series(&times, |t| 0.4 + 0.2 * (0.9 * t).sin().powi(2));
        let params = FluorescenceParams::new(0.35, 1e-4, 1.0, step).unwrap();
        let ib = ideal_intensity(&sb, &params).unwrap();
        let i0 = ideal_intensity(&s0, &params).unwrap();
        let ob = observed_from_ideal_unchecked(&ib, &params, step).unwrap();
        let o0 = observed_from_ideal_unchecked(&i0, &params, step).unwrap();
        for k in 1..times.len() {
            let got = ob.values()[k] / o0.values()[k];
            let want = ib.values()[k] / i0.values()[k];
            assert!((got - want).abs() < 1e-3, "t = {}: {got} vs {want}", times[k]);
        }
    }

    #[test]
    fn observed_intensity_is_linear_and_ratio_homogeneous() {
        let times = grid(20.0, 0.1);
        let params = octalin_params();
        let s = series(&times, |t| 0.5 + 0.4 * (0.7 * t).cos());
        let ideal = ideal_intensity(&s, &params).unwrap();
        let alpha = 2.75;
        let scaled = TimeSeries::new(
            times.clone(),
            ideal.values().iter().map(|v| alpha * v).collect(),
            "x",
            SeriesKind::Intensity,
        )
        .unwrap();
        let a = observed_from_ideal_unchecked(&ideal, &params, 0.1).unwrap();
        let b = observed_from_ideal_unchecked(&scaled, &params, 0.1).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((alpha * x - y).abs() <= 1e-12 * y.abs().max(1e-300));
        }
        let r1 = ratio_of(a.clone(), a.clone(), 0.0).unwrap();
        let r2 = ratio_of(b.clone(), b.clone(), 0.0).unwrap();
        assert_eq!(r1.ratio.values(), r2.ratio.values());
    }

    #[test]
    fn extrema_detection() {
        let v = [0.0, 1.0, 1.0, 0.5, 0.7, 0.2, 0.2, 0.3];
        assert_eq!(local_maxima(&v), vec![1, 4]);
        assert_eq!(local_minima(&v), vec![3, 5]);
    }
}
