//! Declarative description of a radical pair and the unit conversions into
//! angular frequencies (rad/ns).

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Bohr magneton over hbar, rad s^-1 T^-1.
pub const MU_B_OVER_HBAR: f64 = 8.794e10;

/// Unit conversions from field-like quantities to rad/ns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrequencyConversion {
    pub mu_b_over_hbar: f64,
}

impl Default for FrequencyConversion {
    fn default() -> Self {
        FrequencyConversion { mu_b_over_hbar: MU_B_OVER_HBAR }
    }
}

impl FrequencyConversion {
    /// Hyperfine constant in mT to an angular frequency in rad/ns.
    pub fn hfc_rad_per_ns(&self, g: f64, hfc_mt: f64) -> f64 {
        self.mu_b_over_hbar * g * hfc_mt * 1e-3 * 1e-9
    }

    /// Coefficient of Pauli Z for an electron in a field of `field_t` tesla.
    pub fn zeeman_rad_per_ns(&self, g: f64, field_t: f64) -> f64 {
        self.mu_b_over_hbar * g * field_t / 2.0 * 1e-9
    }
}

pub fn gauss_to_mt(gauss: f64) -> f64 {
    gauss * 0.1
}

/// A set of magnetically equivalent spin-1/2 nuclei sharing one coupling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NuclearGroup<T> {
    pub count: usize,
    pub hfc_mt: T,
}

impl<T: Real> NuclearGroup<T> {
    pub fn new(count: usize, hfc_mt: T) -> Self {
        NuclearGroup { count, hfc_mt }
    }

    pub fn from_gauss(count: usize, hfc_gauss: T) -> Self {
        NuclearGroup { count, hfc_mt: hfc_gauss * lit(0.1) }
    }
}

/// Relaxation times in ns; `None` means infinite.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct RelaxationTimes<T> {
    pub t1: Option<T>,
    pub t2: Option<T>,
}

impl<T: Real> RelaxationTimes<T> {
    pub fn new(t1: Option<T>, t2: Option<T>) -> Result<Self> {
        let times = RelaxationTimes { t1, t2 };
        times.validate()?;
        Ok(times)
    }

    /// Builds from plain numbers, mapping non-finite values to infinity.
    pub fn from_ns(t1: f64, t2: f64) -> Result<Self> {
        let wrap = |t: f64| if t.is_finite() { Some(lit(t)) } else { None };
        Self::new(wrap(t1), wrap(t2))
    }

    pub fn none() -> Self {
        RelaxationTimes { t1: None, t2: None }
    }

    pub fn is_none(&self) -> bool {
        self.t1.is_none() && self.t2.is_none()
    }

    /// Both times divided by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        RelaxationTimes { t1: self.t1.map(|t| t / factor), t2: self.t2.map(|t| t / factor) }
    }

    pub fn validate(&self) -> Result<()> {
        for t in [self.t1, self.t2].into_iter().flatten() {
            if !(t > T::zero()) || !t.is_finite() {
                return Err(Error::InvalidSpec(format!("relaxation time {t} must be positive")));
            }
        }
        match (self.t1, self.t2) {
            (Some(t1), Some(t2)) if t2 > t1 * lit(2.0) => {
                Err(Error::InvalidSpec(format!("T2 = {t2} ns exceeds 2 T1 = {} ns", t1 * lit(2.0))))
            }
            (Some(_), None) => Err(Error::InvalidSpec("finite T1 needs a finite T2 <= 2 T1".into())),
            _ => Ok(()),
        }
    }
}

/// Radical pair: nuclear groups on the cation, both g-factors, field and
/// relaxation times.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinSystemSpec<T> {
    pub groups: Vec<NuclearGroup<T>>,
    pub g1: T,
    pub g2: T,
    pub field_t: T,
    pub relaxation: RelaxationTimes<T>,
    pub units: FrequencyConversion,
}

impl<T: Real> SpinSystemSpec<T> {
    pub fn new(groups: Vec<NuclearGroup<T>>, g1: T, g2: T, field_t: T, relaxation: RelaxationTimes<T>) -> Result<Self> {
        let spec = SpinSystemSpec { groups, g1, g2, field_t, relaxation, units: FrequencyConversion::default() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.groups.is_empty() || self.groups.len() > 2 {
            return Err(Error::InvalidSpec(format!("{} nuclear groups; one or two supported", self.groups.len())));
        }
        for g in &self.groups {
            if g.count == 0 {
                return Err(Error::InvalidSpec("nuclear group with no nuclei".into()));
            }
            if !g.hfc_mt.is_finite() {
                return Err(Error::InvalidSpec("hyperfine constant must be finite".into()));
            }
        }
        for (name, v) in [("g1", self.g1), ("g2", self.g2), ("field", self.field_t)] {
            if !v.is_finite() {
                return Err(Error::InvalidSpec(format!("{name} must be finite")));
            }
        }
        self.relaxation.validate()
    }

    pub fn with_field(&self, field_t: T) -> Self {
        SpinSystemSpec { field_t, ..self.clone() }
    }

    pub fn with_relaxation(&self, relaxation: RelaxationTimes<T>) -> Self {
        SpinSystemSpec { relaxation, ..self.clone() }
    }

    pub fn total_nuclei(&self) -> usize {
        self.groups.iter().map(|g| g.count).sum()
    }

    /// Hyperfine angular frequency of group `k` in rad/ns.
    pub fn hfc_angular(&self, k: usize) -> T {
        let g = crate::scalar::to_f64(self.g1);
        lit(self.units.hfc_rad_per_ns(g, crate::scalar::to_f64(self.groups[k].hfc_mt)))
    }

    /// Zeeman coefficient of Z on the cation electron, rad/ns.
    pub fn zeeman_cation(&self) -> T {
        lit(self.units.zeeman_rad_per_ns(crate::scalar::to_f64(self.g1), crate::scalar::to_f64(self.field_t)))
    }

    /// Zeeman coefficient of Z on the anion electron, rad/ns.
    pub fn zeeman_anion(&self) -> T {
        lit(self.units.zeeman_rad_per_ns(crate::scalar::to_f64(self.g2), crate::scalar::to_f64(self.field_t)))
    }
}
