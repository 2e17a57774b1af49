//! Scenario configuration files.
//!
//! Configs are TOML: a `[params]` table, zero or more `[[pulse]]` tables, and
//! optional `[time]` and `[run]` tables. Any key can be overridden with a
//! dotted path (`params.J=2.0`, `pulse.0.tau_p=0.1`, `run.route="both"`).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::DimerParams;
use crate::master::{EvolveOptions, InitialState, ReducedForm, Route, MAX_HALVINGS};
use crate::pulse::{PulseTrain, TimeGrid};

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_SAMPLE_INTERVAL: f64 = 0.05;

/// Relaxation times (`1/κ`) covered by the automatic end time.
pub const AUTO_END_RELAXATIONS: f64 = 15.0;
/// Relaxation times allowed after the last pulse window.
pub const AUTO_TAIL_RELAXATIONS: f64 = 10.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RouteChoice {
    #[default]
    Full,
    Reduced,
    Both,
}

impl RouteChoice {
    pub fn routes(self) -> Vec<Route> {
        match self {
            RouteChoice::Full => vec![Route::Full],
            RouteChoice::Reduced => vec![Route::Reduced],
            RouteChoice::Both => vec![Route::Full, Route::Reduced],
        }
    }
}

impl std::str::FromStr for RouteChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(RouteChoice::Full),
            "reduced" => Ok(RouteChoice::Reduced),
            "both" => Ok(RouteChoice::Both),
            other => Err(Error::Config(format!("unknown route `{other}`"))),
        }
    }
}

/// Column groups written to the trajectory CSV.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Output {
    /// `p_ee, p_eg, p_ge, p_gg`
    #[serde(rename = "pops")]
    Pops,
    #[serde(rename = "P")]
    P,
    #[serde(rename = "eta_total")]
    EtaTotal,
    #[serde(rename = "concurrence")]
    Concurrence,
    /// `rho11..rho44` (eigenbasis populations)
    #[serde(rename = "eig_pops")]
    EigPops,
}

impl Output {
    pub const ALL: [Output; 5] = [Output::Pops, Output::P, Output::EtaTotal, Output::Concurrence, Output::EigPops];
}

fn default_outputs() -> Vec<Output> {
    Output::ALL.to_vec()
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

fn default_sample_interval() -> f64 {
    DEFAULT_SAMPLE_INTERVAL
}

fn default_halvings() -> u32 {
    MAX_HALVINGS
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSettings {
    /// Defaults to 5 widths before the earliest pulse center (0 without pulses).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    /// Defaults to `max(15/κ, last center + 5 τp + 10/κ)`, `κ = max(κ1, κ2)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<f64>,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_sample_interval")]
    pub sample_interval: f64,
}

impl Default for TimeSettings {
    fn default() -> Self {
        Self { start: None, end: None, dt: DEFAULT_DT, sample_interval: DEFAULT_SAMPLE_INTERVAL }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSettings {
    #[serde(default)]
    pub route: RouteChoice,
    #[serde(default)]
    pub reduced_form: ReducedForm,
    #[serde(default)]
    pub initial: InitialState,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<Output>,
    #[serde(default = "default_halvings")]
    pub max_halvings: u32,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            route: RouteChoice::Full,
            reduced_form: ReducedForm::default(),
            initial: InitialState::Gg,
            outputs: default_outputs(),
            max_halvings: MAX_HALVINGS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub params: DimerParams,
    #[serde(default, rename = "pulse")]
    pub train: PulseTrain,
    #[serde(default)]
    pub time: TimeSettings,
    #[serde(default)]
    pub run: RunSettings,
}

impl ScenarioConfig {
    pub fn new(params: DimerParams, train: PulseTrain) -> Self {
        Self { params, train, time: TimeSettings::default(), run: RunSettings::default() }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::from_toml_with_overrides(text, &[])
    }

    /// Parse `text`, apply `key=value` overrides, then validate.
    pub fn from_toml_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: ScenarioConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_with_overrides(&text, overrides)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |e: Error| match e {
            Error::InvalidParams(m) => Error::Config(m),
            other => other,
        };
        self.params.validate().map_err(cfg_err)?;
        self.train.validate().map_err(cfg_err)?;
        let (start, end) = self.t_span()?;
        if start >= end {
            return Err(Error::Config(format!("time.start ({start}) must be < time.end ({end})")));
        }
        if self.run.outputs.is_empty() {
            return Err(Error::Config("run.outputs must not be empty".into()));
        }
        self.grid().map(|_| ()).map_err(cfg_err)
    }

    /// Resolved `(t_start, t_end)`.
    pub fn t_span(&self) -> Result<(f64, f64)> {
        let start = self.time.start.or_else(|| self.train.natural_start()).unwrap_or(0.0);
        let end = match self.time.end {
            Some(end) => end,
            None => {
                let kappa = self.params.kappa1.max(self.params.kappa2);
                if kappa <= 0.0 {
                    return Err(Error::Config("time.end is required when both kappas are zero".into()));
                }
                let tail = self.train.last_window_end().map_or(f64::NEG_INFINITY, |t| t + AUTO_TAIL_RELAXATIONS / kappa);
                (AUTO_END_RELAXATIONS / kappa).max(tail)
            }
        };
        Ok((start, end))
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        let (start, end) = self.t_span()?;
        TimeGrid::new(start, end, self.time.dt, self.time.sample_interval)
    }

    pub fn evolve_options(&self, route: Route) -> EvolveOptions {
        EvolveOptions {
            route,
            reduced_form: self.run.reduced_form,
            initial: self.run.initial,
            max_halvings: self.run.max_halvings,
        }
    }

    /// Set a single sweepable parameter.
    ///
    /// Recognized paths: `tau_p`, `E0`, `carrier` (applied to every pulse),
    /// `J`, `omega1`, `omega2`, `kappa1`, `kappa2`, `T1`, `T2`, `kappa` and
    /// `T` (both baths), each optionally prefixed by `params.` / `pulse.`,
    /// plus `dt` / `time.dt`.
    pub fn with_axis(&self, path: &str, value: f64) -> Result<Self> {
        let mut cfg = self.clone();
        let key = path.strip_prefix("params.").or_else(|| path.strip_prefix("pulse.")).unwrap_or(path);
        let p = &mut cfg.params;
        match key {
            "tau_p" => cfg.train.segments.iter_mut().for_each(|s| s.tau_p = value),
            "E0" => cfg.train.segments.iter_mut().for_each(|s| s.area = value),
            "carrier" => cfg.train.segments.iter_mut().for_each(|s| s.carrier = value),
            "J" => p.coupling = value,
            "omega1" => p.omega1 = value,
            "omega2" => p.omega2 = value,
            "kappa1" => p.kappa1 = value,
            "kappa2" => p.kappa2 = value,
            "kappa" => {
                p.kappa1 = value;
                p.kappa2 = value;
            }
            "T1" => p.temp1 = value,
            "T2" => p.temp2 = value,
            "T" => {
                p.temp1 = value;
                p.temp2 = value;
            }
            "dt" | "time.dt" => cfg.time.dt = value,
            _ => return Err(Error::Config(format!("unknown sweep axis `{path}`"))),
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Apply `a.b.c=value` to a TOML table. Numeric path components index arrays.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    let mut root = toml::Value::Table(std::mem::take(table));
    let res = set_path(&mut root, &keys, parse_value(raw.trim()))
        .ok_or_else(|| Error::Config(format!("cannot apply override `{assignment}`")));
    if let toml::Value::Table(t) = root {
        *table = t;
    }
    res
}

fn set_path(cur: &mut toml::Value, keys: &[&str], value: toml::Value) -> Option<()> {
    let (first, rest) = keys.split_first()?;
    let slot = match cur {
        toml::Value::Table(t) => {
            if rest.is_empty() {
                t.insert(first.to_string(), value);
                return Some(());
            }
            t.entry(first.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()))
        }
        toml::Value::Array(a) => {
            let slot = a.get_mut(first.parse::<usize>().ok()?)?;
            if rest.is_empty() {
                *slot = value;
                return Some(());
            }
            slot
        }
        _ => return None,
    };
    set_path(slot, rest, value)
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}
