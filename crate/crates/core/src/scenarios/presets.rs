//! Built-in scenarios reproducing the reference figures.
//!
//! Widths are given in units of `1/J`; all presets use the reference dimer
//! (`ω1 = ω2 = 1`, `J = 1.5`, `κ = T = 0.1`) and pulse area `E0 = ω1` unless
//! a sweep varies `J`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::hamiltonian::DimerParams;
use crate::pulse::{GaussianSegment, PulseTrain};

use super::config::ScenarioConfig;
use super::run::run_to_dir;
use super::sweep::{sweep, Reduction, Spacing, SweepSpec, SweepValues};

pub const PRESET_NAMES: [&str; 11] =
    ["fig1", "fig2", "fig3", "fig4a", "fig4b", "fig5a", "fig5b", "fig6a", "fig6b", "fig7a", "fig7b"];

/// Widths (× `1/J`) of the single-pulse family.
pub const FAMILY_WIDTHS: [f64; 5] = [0.01, 0.1, 0.5, 1.0, 10.0];

/// Couplings of the width sweep.
pub const SWEEP_COUPLINGS: [f64; 3] = [1.0, 1.5, 2.0];

/// Width sweep range (× `1/J`) and point count.
pub const SWEEP_WIDTHS: (f64, f64, usize) = (0.01, 10.0, 40);

pub const TWO_PULSE_CENTERS: [f64; 2] = [0.0, 15.0];
pub const FOUR_PULSE_CENTERS: [f64; 4] = [0.0, 25.0, 35.0, 45.0];

/// One labeled run of a preset family or sweep set.
#[derive(Clone, Debug, PartialEq)]
pub struct Member<T> {
    pub label: String,
    pub item: T,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Preset {
    Scenario(ScenarioConfig),
    Family(Vec<Member<ScenarioConfig>>),
    Sweeps(Vec<Member<SweepSpec>>),
}

impl Preset {
    /// Every scenario config the preset contains (sweep bases included).
    pub fn configs(&self) -> Vec<&ScenarioConfig> {
        match self {
            Preset::Scenario(c) => vec![c],
            Preset::Family(m) => m.iter().map(|m| &m.item).collect(),
            Preset::Sweeps(m) => m.iter().map(|m| &m.item.base).collect(),
        }
    }
}

fn reference() -> DimerParams {
    DimerParams::REFERENCE
}

/// Pulses of area `ω1` and width `width/J` at `centers`.
fn train(p: &DimerParams, width: f64, centers: &[f64]) -> PulseTrain {
    let tau = width / p.coupling;
    PulseTrain::new(centers.iter().map(|&c| GaussianSegment::new(p.omega1, tau, c)).collect())
}

fn scenario(width: f64, centers: &[f64]) -> ScenarioConfig {
    let p = reference();
    ScenarioConfig::new(p, train(&p, width, centers))
}

fn single_pulse_family() -> Preset {
    Preset::Family(
        FAMILY_WIDTHS
            .iter()
            .map(|&w| Member { label: format!("tau{w}"), item: scenario(w, &[0.0]) })
            .collect(),
    )
}

fn width_sweeps() -> Preset {
    let (lo, hi, count) = SWEEP_WIDTHS;
    Preset::Sweeps(
        SWEEP_COUPLINGS
            .iter()
            .map(|&j| {
                let p = DimerParams { coupling: j, ..reference() };
                let spec = SweepSpec {
                    base: ScenarioConfig::new(p, train(&p, 1.0, &[0.0])),
                    axis: "tau_p".into(),
                    values: SweepValues::Range { min: lo / j, max: hi / j, count, spacing: Spacing::Log },
                    reduce: vec![Reduction::SaturationP, Reduction::SaturationEta],
                };
                Member { label: format!("J{j}"), item: spec }
            })
            .collect(),
    )
}

pub fn preset(name: &str) -> Result<Preset> {
    Ok(match name {
        "fig1" | "fig3" => single_pulse_family(),
        "fig2" => width_sweeps(),
        "fig4a" => Preset::Scenario(scenario(0.01, &TWO_PULSE_CENTERS)),
        "fig4b" => Preset::Scenario(scenario(0.1, &TWO_PULSE_CENTERS)),
        "fig5a" => Preset::Scenario(scenario(0.5, &TWO_PULSE_CENTERS)),
        "fig5b" => Preset::Scenario(scenario(1.0, &TWO_PULSE_CENTERS)),
        "fig6a" => Preset::Scenario(scenario(10.0, &TWO_PULSE_CENTERS)),
        "fig7a" => Preset::Scenario(scenario(0.1, &TWO_PULSE_CENTERS)),
        "fig6b" | "fig7b" => Preset::Scenario(scenario(10.0, &FOUR_PULSE_CENTERS)),
        other => return Err(Error::UnknownPreset(other.to_string())),
    })
}

/// Run preset `name` and write its outputs under `dir`, prefixed by `name`.
///
/// Every member is attempted; the first integration failure is returned
/// after all output is written.
pub fn run_preset(name: &str, dir: &Path) -> Result<()> {
    let mut first_err = None;
    match preset(name)? {
        Preset::Scenario(cfg) => {
            if let Err(e) = run_to_dir(&cfg, dir, name) {
                first_err.get_or_insert(e);
            }
        }
        Preset::Family(members) => {
            for m in members {
                if let Err(e) = run_to_dir(&m.item, dir, &format!("{name}_{}", m.label)) {
                    first_err.get_or_insert(e);
                }
            }
        }
        Preset::Sweeps(members) => {
            for m in members {
                sweep(&m.item)?.write(dir, &format!("{name}_{}", m.label))?;
            }
        }
    }
    first_err.map_or(Ok(()), Err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves() {
        for name in PRESET_NAMES {
            let p = preset(name).unwrap();
            for cfg in p.configs() {
                cfg.validate().unwrap();
            }
        }
        assert!(matches!(preset("fig8"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn family_shares_reference_params() {
        let Preset::Family(members) = preset("fig1").unwrap() else { panic!() };
        assert_eq!(members.len(), 5);
        assert!(members.iter().all(|m| m.item.params == DimerParams::REFERENCE));
    }
}
