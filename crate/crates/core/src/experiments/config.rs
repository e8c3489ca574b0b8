use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::model::{ModeProfile, PhotonStatistics};
use crate::propagator::Termination;

use super::ExperimentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentId {
    Fig1,
    Fig2,
    Fig3a,
    Fig3b,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Custom,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 10] = [
        Self::Fig1,
        Self::Fig2,
        Self::Fig3a,
        Self::Fig3b,
        Self::Fig4,
        Self::Fig5,
        Self::Fig6,
        Self::Fig7,
        Self::Fig8,
        Self::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Fig1 => "fig1",
            Self::Fig2 => "fig2",
            Self::Fig3a => "fig3a",
            Self::Fig3b => "fig3b",
            Self::Fig4 => "fig4",
            Self::Fig5 => "fig5",
            Self::Fig6 => "fig6",
            Self::Fig7 => "fig7",
            Self::Fig8 => "fig8",
            Self::Custom => "custom",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Self::Fig1 => "meza: P_trans and S vs k0 with momentum spread 0, 0.02 k0, 0.1 k0",
            Self::Fig2 => "meza: P_trans and S vs L with momentum spread 0, 0.5 k0",
            Self::Fig3a => "meza: P_trans vs L for coherent fields n0 = 0, 0.2, 1",
            Self::Fig3b => "meza: P_trans vs L for thermal fields n0 = 0, 0.2, 1",
            Self::Fig4 => "sech: P_trans and S vs k0 with momentum spread 0, 0.02 k0, 0.1 k0",
            Self::Fig5 => "sech: P_trans and S vs L with momentum spread 0, 0.5 k0",
            Self::Fig6 => "Gaussian wave packet: P_trans and S vs L for detunings 0, 0.02, 0.1",
            Self::Fig7 => "Gaussian wave packet: density snapshots on and off resonance",
            Self::Fig8 => "Gaussian wave packet: inversion and entropy vs time (collapse-revival)",
            Self::Custom => "user-defined analytic or propagator sweep",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| ExperimentError::Config(format!("unknown experiment '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Propagator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Meza,
    Sech,
    Gaussian,
}

impl ProfileKind {
    pub fn build(self, lambda0: f64, length: f64) -> Result<ModeProfile, crate::error::ModelError> {
        match self {
            Self::Meza => ModeProfile::meza(lambda0, length),
            Self::Sech => ModeProfile::sech(lambda0, length),
            Self::Gaussian => ModeProfile::gaussian(lambda0, length),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    K0,
    Length,
}

/// Uniform sweep; with `open_start` the first point is one step above
/// `start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub open_start: bool,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        if n == 0 {
            return Vec::new();
        }
        if self.open_start {
            let h = (self.stop - self.start) / n as f64;
            (1..=n).map(|i| self.start + h * i as f64).collect()
        } else if n == 1 {
            vec![self.start]
        } else {
            let h = (self.stop - self.start) / (n - 1) as f64;
            (0..n).map(|i| self.start + h * i as f64).collect()
        }
    }

    pub fn step(&self) -> f64 {
        let intervals = if self.open_start { self.points } else { self.points.saturating_sub(1) };
        (self.stop - self.start) / intervals.max(1) as f64
    }
}

/// Grid and time controls for propagator runs; unset entries are derived
/// from the resolution rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationControls {
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub z0: Option<f64>,
    pub z_min: Option<f64>,
    pub z_max: Option<f64>,
    pub points: Option<usize>,
    pub launch_widths: f64,
    pub reach_sigmas: f64,
    pub sample_interval: f64,
    pub termination: Option<Termination>,
}

impl Default for PropagationControls {
    fn default() -> Self {
        Self {
            t_max: None,
            dt: None,
            z0: None,
            z_min: None,
            z_max: None,
            points: None,
            launch_widths: 6.0,
            reach_sigmas: 5.0,
            sample_interval: 1.0,
            termination: Some(Termination::default()),
        }
    }
}

/// Fully resolved parameters of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub id: ExperimentId,
    pub method: Method,
    pub profile: ProfileKind,
    pub lambda0: f64,
    /// Mode length when not swept.
    pub length: f64,
    /// Incident momentum when not swept.
    pub k0: f64,
    pub sweep: Sweep,
    /// Momentum spreads as fractions of `k0` (analytic curves).
    pub dk_fractions: Vec<f64>,
    /// Initial field states (analytic curves).
    pub fields: Vec<PhotonStatistics>,
    /// Detunings (propagator curves).
    pub detunings: Vec<f64>,
    /// Position width of the launched packet.
    pub packet_width: f64,
    pub quadrature_tol: f64,
    pub photon_truncation: f64,
    pub propagation: PropagationControls,
    /// Mode lengths of the snapshot experiment.
    pub lengths: Vec<f64>,
    /// Snapshot times of the snapshot experiment.
    pub snapshot_times: Vec<f64>,
}

impl ExperimentConfig {
    /// Defaults reproducing the published parameter sets.
    pub fn defaults(id: ExperimentId) -> Self {
        let k_sweep = Sweep {
            variable: SweepVariable::K0,
            start: 0.02,
            stop: 3.0,
            points: 150,
            open_start: true,
        };
        let l_sweep = Sweep {
            variable: SweepVariable::Length,
            start: 0.2,
            stop: 20.0,
            points: 200,
            open_start: true,
        };
        let base = Self {
            id,
            method: Method::Analytic,
            profile: ProfileKind::Meza,
            lambda0: 1.0,
            length: 50.0,
            k0: 0.1,
            sweep: k_sweep,
            dk_fractions: vec![0.0, 0.02, 0.1],
            fields: vec![PhotonStatistics::Vacuum],
            detunings: vec![0.0],
            packet_width: 15.0,
            quadrature_tol: 1e-8,
            photon_truncation: 1e-10,
            propagation: PropagationControls::default(),
            lengths: Vec::new(),
            snapshot_times: Vec::new(),
        };
        let relaxed = Termination {
            region_rel: 1e-6,
            region_tol: 2e-3,
            stationarity_tol: 1e-5,
            check_interval: 50.0,
            min_time: 0.0,
        };
        match id {
            ExperimentId::Fig1 => base,
            ExperimentId::Fig2 => Self {
                sweep: l_sweep,
                dk_fractions: vec![0.0, 0.5],
                ..base
            },
            ExperimentId::Fig3a | ExperimentId::Fig3b => {
                let make = if id == ExperimentId::Fig3a {
                    PhotonStatistics::Coherent
                } else {
                    PhotonStatistics::Thermal
                };
                Self {
                    sweep: l_sweep,
                    dk_fractions: vec![0.0],
                    fields: vec![make(0.0), make(0.2), make(1.0)],
                    ..base
                }
            }
            ExperimentId::Fig4 => Self {
                profile: ProfileKind::Sech,
                length: 5.0,
                ..base
            },
            ExperimentId::Fig5 => Self {
                profile: ProfileKind::Sech,
                sweep: l_sweep,
                dk_fractions: vec![0.0, 0.5],
                ..base
            },
            ExperimentId::Fig6 => Self {
                method: Method::Propagator,
                profile: ProfileKind::Gaussian,
                sweep: Sweep {
                    variable: SweepVariable::Length,
                    start: 0.5,
                    stop: 6.0,
                    points: 40,
                    open_start: false,
                },
                dk_fractions: Vec::new(),
                detunings: vec![0.0, 0.02, 0.1],
                propagation: PropagationControls {
                    t_max: Some(6000.0),
                    sample_interval: 10.0,
                    termination: Some(relaxed),
                    ..PropagationControls::default()
                },
                ..base
            },
            ExperimentId::Fig7 => Self {
                method: Method::Propagator,
                profile: ProfileKind::Gaussian,
                sweep: Sweep {
                    variable: SweepVariable::Length,
                    start: 2.1245,
                    stop: 2.1245,
                    points: 0,
                    open_start: false,
                },
                dk_fractions: Vec::new(),
                lengths: vec![2.1245, 1.8108],
                snapshot_times: (1..=6).map(|i| 500.0 * i as f64).collect(),
                propagation: PropagationControls {
                    termination: None,
                    ..PropagationControls::default()
                },
                ..base
            },
            ExperimentId::Fig8 => Self {
                method: Method::Propagator,
                profile: ProfileKind::Gaussian,
                length: 10.0,
                k0: 6.0,
                packet_width: 10.0,
                sweep: Sweep {
                    variable: SweepVariable::Length,
                    start: 10.0,
                    stop: 10.0,
                    points: 0,
                    open_start: false,
                },
                dk_fractions: Vec::new(),
                propagation: PropagationControls {
                    sample_interval: 0.01,
                    termination: None,
                    ..PropagationControls::default()
                },
                ..base
            },
            ExperimentId::Custom => Self {
                length: 5.0,
                dk_fractions: vec![0.0],
                ..base
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Defaults for `id` overlaid with a partial JSON object.
    pub fn from_overrides(id: ExperimentId, overrides: &Value) -> Result<Self, ExperimentError> {
        let mut value = serde_json::to_value(Self::defaults(id)).expect("config serializes");
        merge(&mut value, overrides);
        value["id"] = Value::String(id.name().into());
        serde_json::from_value(value)
            .map_err(|e| ExperimentError::Config(format!("{id}: {e}")))
    }

    /// Applies `key=value` pairs; dotted keys address nested fields and the
    /// value is parsed as JSON, falling back to a string.
    pub fn apply_sets(&self, sets: &[String]) -> Result<Self, ExperimentError> {
        let mut value = serde_json::to_value(self).expect("config serializes");
        for set in sets {
            let (key, raw) = set
                .split_once('=')
                .ok_or_else(|| ExperimentError::Config(format!("--set expects key=value, got '{set}'")))?;
            let parsed = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            let mut slot = &mut value;
            for part in key.split('.') {
                let obj = slot.as_object_mut().ok_or_else(|| {
                    ExperimentError::Config(format!("'{key}' does not name a config field"))
                })?;
                if !obj.contains_key(part) {
                    return Err(ExperimentError::Config(format!("unknown config field '{key}'")));
                }
                slot = obj.get_mut(part).expect("checked");
            }
            *slot = parsed;
        }
        serde_json::from_value(value).map_err(|e| ExperimentError::Config(format!("{}: {e}", self.id)))
    }
}

fn merge(base: &mut Value, patch: &Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (b, p) => *b = p.clone(),
    }
}

/// Configuration file: one object per experiment id.
pub fn load_config_file(text: &str) -> Result<Vec<ExperimentConfig>, ExperimentError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| ExperimentError::Config(format!("config is not valid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| ExperimentError::Config("config must be a JSON object keyed by experiment id".into()))?;
    obj.iter()
        .map(|(k, v)| {
            let id: ExperimentId = k.parse()?;
            if !v.is_object() {
                return Err(ExperimentError::Config(format!("{id}: expected an object")));
            }
            ExperimentConfig::from_overrides(id, v)
        })
        .collect()
}
