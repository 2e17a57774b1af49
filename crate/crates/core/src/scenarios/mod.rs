//! Scenario configs, figure presets, trajectory output and parameter sweeps.

pub mod config;
pub mod presets;
pub mod run;
pub mod sweep;

pub use config::{Output, RouteChoice, RunSettings, ScenarioConfig, TimeSettings};
pub use presets::{preset, run_preset, Member, Preset, PRESET_NAMES};
pub use run::{run, run_to_dir, trajectory_csv, RouteRun, RouteSummary, RunReport, CSV_HEADER, SCHEMA_VERSION, VERSION};
pub use sweep::{sweep, sweep_serial, Reduction, Spacing, SweepPoint, SweepSpec, SweepTable, SweepValues};
