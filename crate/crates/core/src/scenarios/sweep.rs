//! One-axis parameter sweeps reduced to scalars.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::master::{evolve_with, Route, Trajectory};

use super::config::{RouteChoice, ScenarioConfig};
use super::run::{SCHEMA_VERSION, VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SweepValues {
    List(Vec<f64>),
    Range { min: f64, max: f64, count: usize, spacing: Spacing },
}

impl SweepValues {
    pub fn resolve(&self) -> Result<Vec<f64>> {
        let values = match *self {
            SweepValues::List(ref v) => v.clone(),
            SweepValues::Range { min, max, count, spacing } => {
                if count == 0 || !(min.is_finite() && max.is_finite()) || max < min {
                    return Err(Error::Config(format!("bad sweep range {min}..{max} x {count}")));
                }
                if spacing == Spacing::Log && min <= 0.0 {
                    return Err(Error::Config("log spacing needs min > 0".into()));
                }
                let frac = |k: usize| if count == 1 { 0.0 } else { k as f64 / (count - 1) as f64 };
                (0..count)
                    .map(|k| match (k, spacing) {
                        (0, _) => min,
                        (k, _) if k + 1 == count => max,
                        (k, Spacing::Linear) => min + frac(k) * (max - min),
                        (k, Spacing::Log) => (min.ln() + frac(k) * (max.ln() - min.ln())).exp(),
                    })
                    .collect()
            }
        };
        if values.is_empty() {
            return Err(Error::Config("sweep needs at least one value".into()));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Config(format!("sweep values must be positive, got {v}")));
        }
        Ok(values)
    }
}

/// `0.1,0.2,0.5`, `lin:MIN:MAX:COUNT` or `log:MIN:MAX:COUNT`.
impl FromStr for SweepValues {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad sweep value `{x}`")));
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [kind @ ("lin" | "linear" | "log"), min, max, count] => Ok(SweepValues::Range {
                min: num(min)?,
                max: num(max)?,
                count: count.trim().parse().map_err(|_| Error::Config(format!("bad sweep count `{count}`")))?,
                spacing: if *kind == "log" { Spacing::Log } else { Spacing::Linear },
            }),
            [list] => list.split(',').filter(|x| !x.trim().is_empty()).map(num).collect::<Result<_>>().map(SweepValues::List),
            _ => Err(Error::Config(format!("cannot parse sweep values `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Reduction {
    #[serde(rename = "saturation_P")]
    SaturationP,
    #[serde(rename = "saturation_eta")]
    SaturationEta,
    #[serde(rename = "peak_C")]
    PeakC,
}

impl Reduction {
    pub fn name(self) -> &'static str {
        match self {
            Reduction::SaturationP => "saturation_P",
            Reduction::SaturationEta => "saturation_eta",
            Reduction::PeakC => "peak_C",
        }
    }

    pub fn apply(self, t: &Trajectory) -> f64 {
        match self {
            Reduction::SaturationP => t.saturation_p(),
            Reduction::SaturationEta => t.saturation_eta(),
            Reduction::PeakC => t.peak_concurrence().0,
        }
    }
}

impl FromStr for Reduction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "saturation_P" => Ok(Reduction::SaturationP),
            "saturation_eta" => Ok(Reduction::SaturationEta),
            "peak_C" => Ok(Reduction::PeakC),
            other => Err(Error::Config(format!("unknown reduction `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSpec {
    pub base: ScenarioConfig,
    pub axis: String,
    pub values: SweepValues,
    pub reduce: Vec<Reduction>,
}

impl SweepSpec {
    /// Sweeps integrate a single route: reduced if the base asks only for it,
    /// full otherwise.
    pub fn route(&self) -> Route {
        match self.base.run.route {
            RouteChoice::Reduced => Route::Reduced,
            _ => Route::Full,
        }
    }

    /// Check the spec and build every point's config.
    pub fn point_configs(&self) -> Result<Vec<(f64, ScenarioConfig)>> {
        if self.reduce.is_empty() {
            return Err(Error::Config("sweep needs at least one reduction".into()));
        }
        self.values.resolve()?.into_iter().map(|v| Ok((v, self.base.with_axis(&self.axis, v)?))).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub value: f64,
    /// One entry per reduction, `None` when integration failed.
    pub reduced: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub axis: String,
    pub route: Route,
    pub reduce: Vec<Reduction>,
    pub points: Vec<SweepPoint>,
}

impl SweepTable {
    /// Values of reduction `k`, missing points skipped.
    pub fn column(&self, k: usize) -> Vec<(f64, f64)> {
        self.points.iter().filter_map(|p| p.reduced.as_ref().map(|r| (p.value, r[k]))).collect()
    }

    /// Axis column plus one column per reduction; failed points leave the
    /// reduced cells empty.
    pub fn to_csv(&self) -> String {
        let mut out = self.axis.clone();
        for r in &self.reduce {
            out.push(',');
            out.push_str(r.name());
        }
        out.push('\n');
        for p in &self.points {
            write!(out, "{:.16e}", p.value).unwrap();
            for k in 0..self.reduce.len() {
                out.push(',');
                if let Some(r) = &p.reduced {
                    write!(out, "{:.16e}", r[k]).unwrap();
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            schema_version: u32,
            version: &'static str,
            missing: usize,
            #[serde(flatten)]
            table: &'a SweepTable,
        }
        let missing = self.points.iter().filter(|p| p.reduced.is_none()).count();
        let doc = Doc { schema_version: SCHEMA_VERSION, version: VERSION, missing, table: self };
        serde_json::to_string_pretty(&doc).expect("sweep serializes") + "\n"
    }

    /// Write `<stem>.csv` and `<stem>.json`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{stem}.csv")), self.to_csv())?;
        std::fs::write(dir.join(format!("{stem}.json")), self.to_json())?;
        Ok(())
    }
}

fn point(cfg: &ScenarioConfig, value: f64, route: Route, reduce: &[Reduction]) -> SweepPoint {
    let res = cfg.grid().and_then(|g| evolve_with(&cfg.params, &cfg.train, &g, &cfg.evolve_options(route)));
    match res {
        Ok(t) => SweepPoint { value, reduced: Some(reduce.iter().map(|r| r.apply(&t)).collect()), error: None },
        Err(e) => SweepPoint { value, reduced: None, error: Some(e.to_string()) },
    }
}

fn table(spec: &SweepSpec, points: Vec<SweepPoint>) -> SweepTable {
    SweepTable { axis: spec.axis.clone(), route: spec.route(), reduce: spec.reduce.clone(), points }
}

/// Run every point on the calling thread.
pub fn sweep_serial(spec: &SweepSpec) -> Result<SweepTable> {
    let (route, reduce) = (spec.route(), &spec.reduce);
    let points = spec.point_configs()?.iter().map(|(v, c)| point(c, *v, route, reduce)).collect();
    Ok(table(spec, points))
}

/// Run points concurrently (with the `parallel` feature) in value order.
pub fn sweep(spec: &SweepSpec) -> Result<SweepTable> {
    #[cfg(feature = "parallel")]
    {
        let (route, reduce) = (spec.route(), &spec.reduce);
        let points = spec.point_configs()?.par_iter().map(|(v, c)| point(c, *v, route, reduce)).collect();
        Ok(table(spec, points))
    }
    #[cfg(not(feature = "parallel"))]
    sweep_serial(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_range_hits_endpoints() {
        let v = "log:0.01:10:40".parse::<SweepValues>().unwrap().resolve().unwrap();
        assert_eq!(v.len(), 40);
        assert_eq!(v[0], 0.01);
        assert_eq!(v[39], 10.0);
        assert_relative_eq!(v[1] / v[0], v[39] / v[38], max_relative = 1e-12);
    }

    #[test]
    fn list_and_linear() {
        assert_eq!("0.5,1,2".parse::<SweepValues>().unwrap().resolve().unwrap(), vec![0.5, 1.0, 2.0]);
        assert_eq!("lin:1:2:3".parse::<SweepValues>().unwrap().resolve().unwrap(), vec![1.0, 1.5, 2.0]);
        assert!("0,1".parse::<SweepValues>().unwrap().resolve().is_err());
        assert!("log:0:1:3".parse::<SweepValues>().unwrap().resolve().is_err());
        assert!("x".parse::<SweepValues>().is_err());
    }

    #[test]
    fn reductions_parse() {
        for r in [Reduction::SaturationP, Reduction::SaturationEta, Reduction::PeakC] {
            assert_eq!(r.name().parse::<Reduction>().unwrap(), r);
        }
        assert!("peak".parse::<Reduction>().is_err());
    }
}
