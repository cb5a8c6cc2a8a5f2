//! Experiment configuration: a TOML document mapped onto the core types.
//! Every semantic error carries the line of the offending key.

use qbeats::circuit::{GateDurations, SyntheticQubitNoise};
use qbeats::dynamics::TimeGrid;
use qbeats::pipeline::{EchoDevice, InitialState, NoiseMethod, SimulationRequest};
use qbeats::postprocess::FluorescenceParams;
use qbeats::system::{NuclearGroup, RelaxationTimes, SpinSystemSpec};
use qbeats::HalfInt;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use toml::Spanned;

pub const PRESETS: [(&str, &str); 2] =
    [("octalin", include_str!("../presets/octalin.toml")), ("dmb", include_str!("../presets/dmb.toml"))];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub origin: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}:{line}: {}", self.origin, self.message),
            None => write!(f, "{}: {}", self.origin, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub system: Spanned<SystemSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relaxation: Option<RelaxationSection>,
    pub run: RunSection,
    pub time: TimeSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fluorescence: Option<Spanned<FluorescenceSection>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub device: Option<Spanned<DeviceSection>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub g_cation: f64,
    pub g_anion: f64,
    /// Field used for the high-field regime, tesla.
    pub high_field_t: Spanned<f64>,
    pub groups: Vec<Spanned<GroupSection>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSection {
    pub count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hfc_gauss: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hfc_mt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelaxationSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero: Option<Spanned<TimesSection>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub high: Option<Spanned<TimesSection>>,
}

/// Missing entries mean an infinite time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimesSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1_ns: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2_ns: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub field: Spanned<String>,
    pub initial: Spanned<String>,
    pub noise: Spanned<String>,
    #[serde(default)]
    pub sectors: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    #[serde(default)]
    pub start_ns: f64,
    pub end_ns: Spanned<f64>,
    pub step_ns: Spanned<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluorescenceSection {
    pub theta: f64,
    pub tau_f_ns: f64,
    pub t0_ns: f64,
    pub gate_ns: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceSection {
    #[serde(default = "device_time")]
    pub t1_ns: f64,
    #[serde(default = "device_time")]
    pub t2_ns: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub single_ns: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_ns: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity_ns: Option<f64>,
}

fn device_time() -> f64 {
    1e5
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Zero,
    High,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Zero => "zero",
            Regime::High => "high",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "zero" => Some(Regime::Zero),
            "high" => Some(Regime::High),
            _ => None,
        }
    }
}

/// A validated configuration ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub name: String,
    pub regime: Regime,
    pub zero: SimulationRequest<f64>,
    pub high: SimulationRequest<f64>,
    pub sectors: bool,
    pub fluorescence: Option<FluorescenceParams<f64>>,
}

impl Experiment {
    pub fn selected(&self) -> &SimulationRequest<f64> {
        match self.regime {
            Regime::Zero => &self.zero,
            Regime::High => &self.high,
        }
    }
}

/// Parsed document plus the text it came from, for line lookups.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub origin: String,
    source: String,
}

impl LoadedConfig {
    pub fn parse(source: &str, origin: &str) -> Result<Self, ConfigError> {
        let config = toml::from_str::<ExperimentConfig>(source).map_err(|e| ConfigError {
            origin: origin.to_string(),
            line: e.span().map(|s| line_of(source, s.start)),
            message: e.message().to_string(),
        })?;
        Ok(LoadedConfig { config, origin: origin.to_string(), source: source.to_string() })
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let origin = path.display().to_string();
        let source = std::fs::read_to_string(path)
            .map_err(|e| ConfigError { origin: origin.clone(), line: None, message: e.to_string() })?;
        Self::parse(&source, &origin)
    }

    pub fn preset(name: &str) -> Result<Self, ConfigError> {
        match PRESETS.iter().find(|(n, _)| *n == name) {
            Some((n, text)) => Self::parse(text, &format!("preset {n}")),
            None => Err(ConfigError {
                origin: "--preset".into(),
                line: None,
                message: format!(
                    "unknown preset {name:?}; available: {}",
                    PRESETS.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
                ),
            }),
        }
    }

    /// Canonical text of the document; parsing it gives back an equal config.
    pub fn to_toml(&self) -> String {
        toml::to_string(&self.config).expect("config is always representable")
    }

    fn error<T>(&self, span: Option<std::ops::Range<usize>>, message: impl Into<String>) -> Result<T, ConfigError> {
        Err(ConfigError {
            origin: self.origin.clone(),
            line: span.map(|s| line_of(&self.source, s.start)),
            message: message.into(),
        })
    }

    pub fn experiment(&self) -> Result<Experiment, ConfigError> {
        let c = &self.config;
        let sys = c.system.get_ref();
        let mut groups = Vec::new();
        for g in &sys.groups {
            let group = match (g.get_ref().hfc_gauss, g.get_ref().hfc_mt) {
                (Some(gauss), None) => NuclearGroup::from_gauss(g.get_ref().count, gauss),
                (None, Some(mt)) => NuclearGroup::new(g.get_ref().count, mt),
                _ => return self.error(Some(g.span()), "give exactly one of hfc_gauss or hfc_mt"),
            };
            groups.push(group);
        }

        let times_for = |section: Option<&Spanned<TimesSection>>| -> Result<RelaxationTimes<f64>, ConfigError> {
            let Some(s) = section else { return Ok(RelaxationTimes::none()) };
            let t = s.get_ref();
            RelaxationTimes::from_ns(t.t1_ns.unwrap_or(f64::INFINITY), t.t2_ns.unwrap_or(f64::INFINITY))
                .or_else(|e| self.error(Some(s.span()), e.to_string()))
        };
        let relaxation = c.relaxation.as_ref();
        let zero_times = times_for(relaxation.and_then(|r| r.zero.as_ref()))?;
        let high_times = times_for(relaxation.and_then(|r| r.high.as_ref()))?;

        let field = *sys.high_field_t.get_ref();
        if !(field > 0.0) {
            return self.error(Some(sys.high_field_t.span()), format!("high_field_t = {field} must be positive"));
        }
        let spec = |b: f64, times| {
            SpinSystemSpec::new(groups.clone(), sys.g_cation, sys.g_anion, b, times)
                .or_else(|e| self.error(Some(c.system.span()), e.to_string()))
        };
        let zero_spec = spec(0.0, zero_times)?;
        let high_spec = spec(field, high_times)?;

        let run = &c.run;
        let Some(regime) = Regime::parse(run.field.get_ref()) else {
            return self.error(Some(run.field.span()), format!("field {:?} is not zero or high", run.field.get_ref()));
        };
        let initial = parse_initial(run.initial.get_ref()).or_else(|m| self.error(Some(run.initial.span()), m))?;
        let noise = NoiseMethod::parse(run.noise.get_ref()).or_else(|e| self.error(Some(run.noise.span()), e.to_string()))?;

        let t = &c.time;
        if !(*t.step_ns.get_ref() > 0.0) {
            return self.error(Some(t.step_ns.span()), "step_ns must be positive");
        }
        if !(*t.end_ns.get_ref() >= t.start_ns) || t.start_ns < 0.0 {
            return self.error(Some(t.end_ns.span()), "need 0 <= start_ns <= end_ns");
        }
        let grid = TimeGrid::new(t.start_ns, *t.end_ns.get_ref(), *t.step_ns.get_ref())
            .or_else(|e| self.error(Some(t.end_ns.span()), e.to_string()))?;

        let fluorescence = match &c.fluorescence {
            None => None,
            Some(f) => {
                let v = f.get_ref();
                Some(
                    FluorescenceParams::new(v.theta, v.tau_f_ns, v.t0_ns, v.gate_ns)
                        .or_else(|e| self.error(Some(f.span()), e.to_string()))?,
                )
            }
        };

        let device = match &c.device {
            None => None,
            Some(d) => {
                let v = d.get_ref();
                let defaults = GateDurations::default();
                let durations = GateDurations {
                    single: v.single_ns.unwrap_or(defaults.single),
                    two: v.two_ns.unwrap_or(defaults.two),
                    identity: v.identity_ns.unwrap_or(defaults.identity),
                };
                let built = RelaxationTimes::from_ns(v.t1_ns, v.t2_ns)
                    .and_then(|times| SyntheticQubitNoise::new(vec![times; 2], durations))
                    .or_else(|e| self.error(Some(d.span()), e.to_string()))?;
                Some(EchoDevice { noise: built })
            }
        };

        let request = |spec: SpinSystemSpec<f64>| SimulationRequest {
            spec,
            initial,
            noise,
            times: grid.points(),
            device: device.clone(),
        };
        Ok(Experiment {
            name: c.name.clone().unwrap_or_else(|| self.origin.clone()),
            regime,
            zero: request(zero_spec),
            high: request(high_spec),
            sectors: run.sectors,
            fluorescence,
        })
    }
}

fn line_of(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

/// `mixed` or `I=<spin>,m=<projection>`, half-integers as `3/2`.
pub fn parse_initial(text: &str) -> Result<InitialState, String> {
    let text = text.trim();
    if text == "mixed" {
        return Ok(InitialState::Mixed);
    }
    let bad = || format!("initial state {text:?} is neither \"mixed\" nor \"I=<spin>,m=<projection>\"");
    let (spin, m) = text.split_once(',').ok_or_else(bad)?;
    let spin = spin.trim().strip_prefix("I=").ok_or_else(bad)?;
    let m = m.trim().strip_prefix("m=").ok_or_else(bad)?;
    let spin = HalfInt::parse(spin).map_err(|e| e.to_string())?;
    let m = HalfInt::parse(m).map_err(|e| e.to_string())?;
    if m.abs() > spin || (spin.twice() - m.twice()) % 2 != 0 {
        return Err(format!("m = {m} is not a projection of I = {spin}"));
    }
    Ok(InitialState::Pure { spin, m })
}
