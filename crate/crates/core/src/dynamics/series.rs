use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Allowed excursion of a probability outside `[0, 1]` before it is an error.
pub const PROBABILITY_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    Probability,
    Intensity,
    Ratio,
    Other,
}

impl SeriesKind {
    pub fn unit(self) -> &'static str {
        match self {
            SeriesKind::Probability => "probability",
            SeriesKind::Intensity => "arb. units",
            SeriesKind::Ratio => "ratio",
            SeriesKind::Other => "dimensionless",
        }
    }
}

/// Clamps round-off excursions of a probability into `[0, 1]`; anything
/// beyond [`PROBABILITY_SLACK`] is an error.
pub fn clamp_probability<T: Real>(value: T, time: T) -> Result<T> {
    let v = to_f64(value);
    if !v.is_finite() || v < -PROBABILITY_SLACK || v > 1.0 + PROBABILITY_SLACK {
        return Err(Error::ProbabilityOutOfRange { value: v, time: to_f64(time) });
    }
    if v < 0.0 {
        log::warn!("clamping probability {v:e} at t = {} ns to 0", to_f64(time));
        return Ok(T::zero());
    }
    if v > 1.0 {
        log::warn!("clamping probability {v} at t = {} ns to 1", to_f64(time));
        return Ok(T::one());
    }
    Ok(value)
}

/// Scalar trace on a strictly increasing time grid (ns).
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries<T> {
    times: Vec<T>,
    values: Vec<T>,
    label: String,
    kind: SeriesKind,
}

impl<T: Real> TimeSeries<T> {
    pub fn new(times: Vec<T>, values: Vec<T>, label: impl Into<String>, kind: SeriesKind) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: times.len(), found: values.len() });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::GridMismatch("times must be strictly increasing".into()));
        }
        let values = if kind == SeriesKind::Probability {
            values.iter().zip(&times).map(|(&v, &t)| clamp_probability(v, t)).collect::<Result<Vec<_>>>()?
        } else {
            values
        };
        Ok(TimeSeries { times, values, label: label.into(), kind })
    }

    pub fn constant(times: Vec<T>, value: T, label: impl Into<String>, kind: SeriesKind) -> Result<Self> {
        let values = vec![value; times.len()];
        Self::new(times, values, label, kind)
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn unit(&self) -> &'static str {
        self.kind.unit()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Step of a uniform grid (relative spread below 1e-9), if any.
    pub fn uniform_step(&self) -> Option<T> {
        if self.times.len() < 2 {
            return None;
        }
        let first = self.times[1] - self.times[0];
        let ok = self.times.windows(2).all(|w| {
            let d = w[1] - w[0];
            (d - first).abs() <= first * lit(1e-9) + lit(1e-12)
        });
        ok.then_some(first)
    }

    pub fn same_grid(&self, other: &TimeSeries<T>) -> bool {
        self.times.len() == other.times.len()
            && self.times.iter().zip(&other.times).all(|(a, b)| (*a - *b).abs() <= lit(1e-9))
    }

    pub fn check_grid(&self, other: &TimeSeries<T>) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{} vs {}", self.label, other.label)))
        }
    }

    pub fn max_abs_diff(&self, other: &TimeSeries<T>) -> Result<T> {
        self.check_grid(other)?;
        Ok(self.values.iter().zip(&other.values).fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).abs())))
    }

    pub fn iter(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }
}

/// `start, start + step, ..., end` in ns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid<T> {
    pub start: T,
    pub end: T,
    pub step: T,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(start: T, end: T, step: T) -> Result<Self> {
        let grid = TimeGrid { start, end, step };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > T::zero()) || !self.step.is_finite() {
            return Err(Error::InvalidArgument(format!("time step {} must be positive", self.step)));
        }
        if !(self.end >= self.start) || !self.start.is_finite() || !self.end.is_finite() {
            return Err(Error::InvalidArgument(format!("time window [{}, {}] is empty", self.start, self.end)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        let span = to_f64(self.end - self.start) / to_f64(self.step);
        (span + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.len()).map(|k| self.start + self.step * lit(k as f64)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamps_roundoff_only() {
        assert_eq!(clamp_probability(-5e-10f64, 0.0).unwrap(), 0.0);
        assert_eq!(clamp_probability(1.0 + 5e-10f64, 0.0).unwrap(), 1.0);
        assert!(clamp_probability(-2e-9f64, 0.0).is_err());
        assert!(clamp_probability(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn grid_points() {
        let g = TimeGrid::new(0.0, 100.0, 0.1).unwrap();
        assert_eq!(g.len(), 1001);
        assert!((g.points()[1000] - 100.0f64).abs() < 1e-12);
        assert_eq!(TimeGrid::new(0.0, 0.0, 0.1).unwrap().len(), 1);
        assert!(TimeGrid::new(0.0, 1.0, 0.0).is_err());
        assert!(TimeGrid::new(1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn series_validation() {
        assert!(TimeSeries::new(vec![0.0, 1.0], vec![0.5], "s", SeriesKind::Probability).is_err());
        assert!(TimeSeries::new(vec![1.0, 1.0], vec![0.5, 0.5], "s", SeriesKind::Probability).is_err());
        assert!(TimeSeries::new(vec![0.0, 1.0], vec![0.5, 1.5], "s", SeriesKind::Probability).is_err());
        assert!(TimeSeries::new(vec![0.0, 1.0], vec![0.5, 1.5], "r", SeriesKind::Ratio).is_ok());
        let s = TimeSeries::new(vec![0.0, 0.5, 1.0], vec![1.0; 3], "s", SeriesKind::Probability).unwrap();
        assert_eq!(s.uniform_step(), Some(0.5));
    }
}
