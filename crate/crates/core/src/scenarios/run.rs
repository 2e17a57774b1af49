//! Trajectory runs with CSV and JSON output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::master::{evolve_with, CptpReport, Route, Trajectory};
use crate::observables::ObservableSample;

use super::config::{Output, ScenarioConfig};

/// Version of the JSON sidecar layout.
pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: &str = "t,p_ee,p_eg,p_ge,p_gg,P,eta_total,concurrence,rho11,rho22,rho33,rho44";

/// Crate version plus `git describe` output when built from a checkout.
pub const VERSION: &str = env!("DIMER_VERSION");

/// Per-route result of [`run`].
#[derive(Debug)]
pub struct RouteRun {
    pub route: Route,
    pub trajectory: Trajectory,
    /// Set when integration stopped early; `trajectory` is then partial.
    pub failure: Option<Error>,
}

/// Evolve every requested route. Integration failures keep the partial
/// trajectory; any other error aborts.
pub fn run(cfg: &ScenarioConfig) -> Result<Vec<RouteRun>> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    cfg.run
        .route
        .routes()
        .into_iter()
        .map(|route| match evolve_with(&cfg.params, &cfg.train, &grid, &cfg.evolve_options(route)) {
            Ok(trajectory) => Ok(RouteRun { route, trajectory, failure: None }),
            Err(Error::IntegrationFailed { time, partial }) => Ok(RouteRun {
                route,
                trajectory: *partial.clone(),
                failure: Some(Error::IntegrationFailed { time, partial }),
            }),
            Err(e) => Err(e),
        })
        .collect()
}

/// Whether column `i` of [`CSV_HEADER`] is selected by `outputs`.
fn column_group(i: usize) -> Output {
    match i {
        0 => Output::P,
        1..=4 => Output::Pops,
        5 => Output::P,
        6 => Output::EtaTotal,
        7 => Output::Concurrence,
        _ => Output::EigPops,
    }
}

fn row(s: &ObservableSample) -> [f64; 12] {
    let [a, b, c, d] = s.pops;
    let [e, f, g, h] = s.eig_pops;
    [s.t, a, b, c, d, s.p, s.eta_total, s.concurrence, e, f, g, h]
}

/// CSV text with the columns selected by `outputs` (`t` is always kept).
pub fn trajectory_csv(traj: &Trajectory, outputs: &[Output]) -> String {
    let keep: Vec<usize> = (0..12).filter(|&i| i == 0 || outputs.contains(&column_group(i))).collect();
    let names: Vec<&str> = CSV_HEADER.split(',').collect();
    let mut out = String::with_capacity(16 + traj.samples.len() * keep.len() * 24);
    out.push_str(&keep.iter().map(|&i| names[i]).collect::<Vec<_>>().join(","));
    out.push('\n');
    for s in &traj.samples {
        let r = row(s);
        for (k, &i) in keep.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            write!(out, "{:.16e}", r[i]).unwrap();
        }
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RouteSummary {
    pub route: Route,
    /// `"ok"` or `"failed"`.
    pub status: &'static str,
    pub csv: String,
    pub samples: usize,
    pub saturation_p: f64,
    pub saturation_eta: f64,
    pub peak_concurrence: f64,
    pub peak_concurrence_time: f64,
    pub halvings: usize,
    pub cptp: CptpReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_at: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RouteSummary {
    pub fn new(run: &RouteRun, csv: String) -> Self {
        let t = &run.trajectory;
        let (peak, peak_t) = t.peak_concurrence();
        let failed_at = match &run.failure {
            Some(Error::IntegrationFailed { time, .. }) => Some(*time),
            _ => None,
        };
        Self {
            route: run.route,
            status: if run.failure.is_some() { "failed" } else { "ok" },
            csv,
            samples: t.samples.len(),
            saturation_p: t.saturation_p(),
            saturation_eta: t.saturation_eta(),
            peak_concurrence: peak,
            peak_concurrence_time: peak_t,
            halvings: t.halvings,
            cptp: t.cptp_report(),
            failed_at,
            error: run.failure.as_ref().map(|e| e.to_string()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub version: &'static str,
    /// Config with the time span resolved.
    pub config: ScenarioConfig,
    pub routes: Vec<RouteSummary>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// First route failure, if any.
    pub fn failed(&self) -> bool {
        self.routes.iter().any(|r| r.status != "ok")
    }
}

/// Config with `time.start` and `time.end` filled in.
pub fn resolved(cfg: &ScenarioConfig) -> Result<ScenarioConfig> {
    let (start, end) = cfg.t_span()?;
    let mut out = cfg.clone();
    out.time.start = Some(start);
    out.time.end = Some(end);
    Ok(out)
}

/// Run `cfg` and write `<stem>_<route>.csv` per route plus `<stem>.json`.
///
/// Partial output is flushed before an integration failure is returned.
pub fn run_to_dir(cfg: &ScenarioConfig, dir: &Path, stem: &str) -> Result<RunReport> {
    let runs = run(cfg)?;
    std::fs::create_dir_all(dir)?;
    let mut routes = Vec::with_capacity(runs.len());
    for r in &runs {
        let name = format!("{stem}_{}.csv", r.route.name());
        std::fs::write(dir.join(&name), trajectory_csv(&r.trajectory, &cfg.run.outputs))?;
        routes.push(RouteSummary::new(r, name));
    }
    let report = RunReport { schema_version: SCHEMA_VERSION, version: VERSION, config: resolved(cfg)?, routes };
    std::fs::write(sidecar_path(dir, stem), report.to_json())?;
    match runs.into_iter().find_map(|r| r.failure) {
        Some(e) => Err(e),
        None => Ok(report),
    }
}

pub fn sidecar_path(dir: &Path, stem: &str) -> PathBuf {
    dir.join(format!("{stem}.json"))
}
