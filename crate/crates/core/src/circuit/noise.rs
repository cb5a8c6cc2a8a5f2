use super::gate::GateKind;
use crate::error::{Error, Result};
use crate::relaxation::{infinite_temperature_thermal_channel, KrausChannel, RelaxationParams};
use crate::scalar::{lit, Real};
use crate::system::RelaxationTimes;

/// Gate durations in ns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateDurations<T> {
    pub single: T,
    pub two: T,
    /// Duration of one identity gate; delays are multiples of it.
    pub identity: T,
}

impl<T: Real> Default for GateDurations<T> {
    fn default() -> Self {
        GateDurations { single: lit(35.5), two: lit(300.0), identity: lit(35.5) }
    }
}

impl<T: Real> GateDurations<T> {
    /// No time passes except in explicit delays.
    pub fn instantaneous() -> Self {
        GateDurations { single: T::zero(), two: T::zero(), identity: lit(35.5) }
    }

    pub fn of(&self, kind: &GateKind<T>) -> T {
        match kind {
            GateKind::Delay(d) => *d,
            k if k.arity() >= 2 => self.two,
            _ => self.single,
        }
    }
}

/// Something that acts on a site for a given elapsed time.
pub trait QubitNoise<T: Real>: Sync {
    fn site_count(&self) -> usize;

    /// Channels to apply on `site` after a gate of kind `kind`.
    fn channels_after(&self, kind: &GateKind<T>, site: usize) -> Result<Vec<KrausChannel<T>>>;
}

/// Synthetic device noise: per-site thermal relaxation during every gate
/// plus an optional deterministic `Rz` drift accumulated during delays.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticQubitNoise<T> {
    pub times: Vec<RelaxationTimes<T>>,
    pub durations: GateDurations<T>,
    /// rad/ns per site; a stand-in for calibration drift.
    pub drift_rate: Vec<T>,
}

impl<T: Real> SyntheticQubitNoise<T> {
    pub fn new(times: Vec<RelaxationTimes<T>>, durations: GateDurations<T>) -> Result<Self> {
        let n = times.len();
        let noise = SyntheticQubitNoise { times, durations, drift_rate: vec![T::zero(); n] };
        noise.validate()?;
        Ok(noise)
    }

    /// Every site at the same times with default durations.
    pub fn uniform(sites: usize, times: RelaxationTimes<T>) -> Result<Self> {
        Self::new(vec![times; sites], GateDurations::default())
    }

    /// T1 = T2 = 100 us on every site.
    pub fn device_default(sites: usize) -> Result<Self> {
        Self::uniform(sites, RelaxationTimes::new(Some(lit(1e5)), Some(lit(1e5)))?)
    }

    /// Noise-free, but still carrying durations and drift.
    pub fn silent(sites: usize) -> Self {
        SyntheticQubitNoise {
            times: vec![RelaxationTimes::none(); sites],
            durations: GateDurations::default(),
            drift_rate: vec![T::zero(); sites],
        }
    }

    pub fn with_drift(mut self, rates: Vec<T>) -> Result<Self> {
        if rates.len() != self.times.len() {
            return Err(Error::DimensionMismatch { expected: self.times.len(), found: rates.len() });
        }
        self.drift_rate = rates;
        self.validate()?;
        Ok(self)
    }

    pub fn with_durations(mut self, durations: GateDurations<T>) -> Self {
        self.durations = durations;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.times {
            t.validate()?;
        }
        if self.drift_rate.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidArgument("drift rate must be finite".into()));
        }
        let d = &self.durations;
        if [d.single, d.two, d.identity].iter().any(|x| !(*x >= T::zero()) || !x.is_finite()) || d.identity <= T::zero() {
            return Err(Error::InvalidArgument("gate durations must be finite, identity > 0".into()));
        }
        Ok(())
    }

    /// Coherence time of a site used to scale delays: mean of T1 and T2.
    pub fn qubit_time(&self, site: usize) -> Result<T> {
        let t = self.times.get(site).ok_or(Error::InvalidSite { site, sites: self.times.len() })?;
        match (t.t1, t.t2) {
            (Some(a), Some(b)) => Ok((a + b) * lit(0.5)),
            _ => Err(Error::InvalidArgument(format!("site {site} needs finite T1 and T2 to define a qubit time"))),
        }
    }
}

impl<T: Real> QubitNoise<T> for SyntheticQubitNoise<T> {
    fn site_count(&self) -> usize {
        self.times.len()
    }

    fn channels_after(&self, kind: &GateKind<T>, site: usize) -> Result<Vec<KrausChannel<T>>> {
        let times = *self.times.get(site).ok_or(Error::InvalidSite { site, sites: self.times.len() })?;
        let dt = self.durations.of(kind);
        let mut out = Vec::new();
        if !times.is_none() && dt > T::zero() {
            let params = RelaxationParams::new(dt, times)?;
            out.push(infinite_temperature_thermal_channel(&params, site)?);
        }
        if let GateKind::Delay(d) = kind {
            let angle = self.drift_rate[site] * *d;
            if angle != T::zero() {
                out.push(KrausChannel::new(vec![GateKind::Rz(angle).matrix()], site)?);
            }
        }
        Ok(out)
    }
}
