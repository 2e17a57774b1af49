//! Gaussian pulse trains driving the donor, and the time grid shared by the
//! integrators and the pulse-energy quadrature.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-width, in units of `tau_p`, of the window around each pulse center
/// where the step size is capped.
pub const PULSE_WINDOW: f64 = 5.0;

/// Inside a pulse window the step never exceeds `tau_p / STEPS_PER_WIDTH`.
pub const STEPS_PER_WIDTH: f64 = 10.0;

/// One Gaussian segment
/// `E0 / (sqrt(2π) τp) · exp(-(t - tc)² / (2 τp²)) · exp(iΩ (t - tc))`.
///
/// `tau_p` is used exactly as it appears in the envelope (a standard
/// deviation), not converted from a FWHM.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianSegment {
    #[serde(rename = "E0")]
    pub area: f64,
    pub tau_p: f64,
    #[serde(default)]
    pub center: f64,
    #[serde(default)]
    pub carrier: f64,
}

impl GaussianSegment {
    pub fn new(area: f64, tau_p: f64, center: f64) -> Self {
        Self { area, tau_p, center, carrier: 0.0 }
    }

    pub fn with_carrier(self, carrier: f64) -> Self {
        Self { carrier, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_p > 0.0 && self.tau_p.is_finite()) {
            return Err(Error::InvalidParams(format!("tau_p must be > 0, got {}", self.tau_p)));
        }
        if !(self.area >= 0.0 && self.area.is_finite()) {
            return Err(Error::InvalidParams(format!("E0 must be >= 0, got {}", self.area)));
        }
        if !self.center.is_finite() || !self.carrier.is_finite() {
            return Err(Error::InvalidParams("pulse center and carrier must be finite".into()));
        }
        Ok(())
    }

    pub fn peak(&self) -> f64 {
        self.area / ((2.0 * PI).sqrt() * self.tau_p)
    }

    pub fn envelope(&self, t: f64) -> f64 {
        let x = (t - self.center) / self.tau_p;
        self.peak() * (-0.5 * x * x).exp()
    }

    pub fn envelope_derivative(&self, t: f64) -> f64 {
        -(t - self.center) / (self.tau_p * self.tau_p) * self.envelope(t)
    }

    pub fn amplitude(&self, t: f64) -> C64 {
        let env = self.envelope(t);
        if self.carrier == 0.0 {
            C64::new(env, 0.0)
        } else {
            C64::from_polar(env, self.carrier * (t - self.center))
        }
    }

    /// `∫ |E(t)|² dt` over the whole real line: `E0² / (2 sqrt(π) τp)`.
    pub fn analytic_energy(&self) -> f64 {
        self.area * self.area / (2.0 * PI.sqrt() * self.tau_p)
    }

    fn window(&self) -> (f64, f64) {
        let half = PULSE_WINDOW * self.tau_p;
        (self.center - half, self.center + half)
    }
}

/// Ordered set of Gaussian segments; the drive is their superposition.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PulseTrain {
    pub segments: Vec<GaussianSegment>,
}

impl PulseTrain {
    pub fn new(segments: Vec<GaussianSegment>) -> Self {
        Self { segments }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        self.segments.iter().try_for_each(GaussianSegment::validate)
    }

    /// Complex drive amplitude `E(t)`.
    pub fn amplitude(&self, t: f64) -> C64 {
        self.segments.iter().map(|s| s.amplitude(t)).sum()
    }

    /// `∫ |E|² dt` from `grid.start` to `t`, by cumulative trapezoid on the
    /// integrator's own substep grid.
    pub fn energy_integral(&self, grid: &TimeGrid, t: f64) -> f64 {
        let mut acc = 0.0;
        for (a, b) in grid.intervals() {
            if a >= t {
                break;
            }
            let (n, h) = grid.substeps(self, a, b);
            let mut prev = self.amplitude(a).norm_sqr();
            for i in 1..=n {
                let s = if i == n { b } else { a + i as f64 * h };
                if s > t {
                    let cur = self.amplitude(t).norm_sqr();
                    let lo = a + (i - 1) as f64 * h;
                    return acc + 0.5 * (t - lo) * (prev + cur);
                }
                let cur = self.amplitude(s).norm_sqr();
                acc += 0.5 * h * (prev + cur);
                prev = cur;
            }
        }
        acc
    }

    /// Start time that lets the earliest pulse rise from negligible amplitude.
    pub fn natural_start(&self) -> Option<f64> {
        self.segments.iter().map(|s| s.window().0).reduce(f64::min)
    }

    /// End of the last pulse window.
    pub fn last_window_end(&self) -> Option<f64> {
        self.segments.iter().map(|s| s.window().1).reduce(f64::max)
    }

    /// Largest admissible step on `[a, b]` given a nominal `dt`.
    pub fn step_cap(&self, a: f64, b: f64, dt: f64) -> f64 {
        self.segments
            .iter()
            .filter(|s| {
                let (lo, hi) = s.window();
                lo <= b && hi >= a
            })
            .map(|s| s.tau_p / STEPS_PER_WIDTH)
            .fold(dt, f64::min)
    }
}

/// Output samples at a fixed interval, with integration substeps between
/// consecutive samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub dt: f64,
    pub sample_interval: f64,
}

impl TimeGrid {
    pub fn new(start: f64, end: f64, dt: f64, sample_interval: f64) -> Result<Self> {
        let g = Self { start, end, dt, sample_interval };
        if !(start.is_finite() && end.is_finite()) || end < start {
            return Err(Error::InvalidParams(format!("bad time span ({start}, {end})")));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParams(format!("dt must be > 0, got {dt}")));
        }
        if !(sample_interval >= dt && sample_interval.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "sample_interval ({sample_interval}) must be >= dt ({dt})"
            )));
        }
        Ok(g)
    }

    pub fn sample_count(&self) -> usize {
        let span = self.end - self.start;
        if span <= 0.0 {
            return 1;
        }
        (span / self.sample_interval - 1e-9).ceil() as usize + 1
    }

    pub fn sample_time(&self, k: usize) -> f64 {
        let last = self.sample_count() - 1;
        if k >= last && last > 0 {
            self.end
        } else {
            self.start + k as f64 * self.sample_interval
        }
    }

    pub fn sample_times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.sample_count()).map(move |k| self.sample_time(k))
    }

    /// Consecutive `(a, b)` sample pairs.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (1..self.sample_count()).map(move |k| (self.sample_time(k - 1), self.sample_time(k)))
    }

    /// Number and size of equal substeps covering `[a, b]`.
    pub fn substeps(&self, train: &PulseTrain, a: f64, b: f64) -> (usize, f64) {
        let cap = train.step_cap(a, b, self.dt);
        let n = (((b - a) / cap) - 1e-9).ceil().max(1.0) as usize;
        (n, (b - a) / n as f64)
    }
}
