use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{eigensystem, system_hamiltonian, DimerParams, EigenFrame, Mat4, EE, EG, GE, GG};
use crate::observables::{self, ObservableSample};
use crate::pulse::{PulseTrain, TimeGrid};

use super::full::{FullPropagator, Generator, IDLE_FIELD};
use super::{min_eigenvalue, rates, step_reduced, Basis, DensityState, ReducedForm, ReducedState, Route};

/// Default cap on successive step halvings after a positivity rejection.
pub const MAX_HALVINGS: u32 = 20;

/// Fraction of the time span averaged for saturation values.
pub const SATURATION_WINDOW: f64 = 0.1;

/// Bare product state the dimer starts in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    #[default]
    Gg,
    Eg,
    Ge,
    Ee,
}

impl InitialState {
    pub fn density(self) -> Mat4 {
        let k = match self {
            InitialState::Ee => EE,
            InitialState::Eg => EG,
            InitialState::Ge => GE,
            InitialState::Gg => GG,
        };
        let mut rho = Mat4::zeros();
        rho[(k, k)] = C64::new(1.0, 0.0);
        rho
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    pub route: Route,
    pub reduced_form: ReducedForm,
    pub initial: InitialState,
    pub max_halvings: u32,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            route: Route::Full,
            reduced_form: ReducedForm::default(),
            initial: InitialState::Gg,
            max_halvings: MAX_HALVINGS,
        }
    }
}

impl From<Route> for EvolveOptions {
    fn from(route: Route) -> Self {
        Self { route, ..Self::default() }
    }
}

/// Worst-case state diagnostics over a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CptpReport {
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

/// Time series of observables and bare-basis states.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub route: Route,
    pub samples: Vec<ObservableSample>,
    /// Bare-basis density matrix at each sample.
    pub states: Vec<Mat4>,
    /// Number of positivity-triggered step halvings.
    pub halvings: usize,
}

impl Trajectory {
    fn new(route: Route, capacity: usize) -> Self {
        Self { route, samples: Vec::with_capacity(capacity), states: Vec::with_capacity(capacity), halvings: 0 }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }

    fn tail(&self) -> &[ObservableSample] {
        let (Some(first), Some(last)) = (self.samples.first(), self.samples.last()) else {
            return &[];
        };
        let cut = last.t - SATURATION_WINDOW * (last.t - first.t);
        let start = self.samples.partition_point(|s| s.t < cut);
        &self.samples[start..]
    }

    /// Mean of `f` over the final tenth of the time span.
    pub fn saturation(&self, f: impl Fn(&ObservableSample) -> f64) -> f64 {
        let tail = self.tail();
        if tail.is_empty() {
            return 0.0;
        }
        tail.iter().map(f).sum::<f64>() / tail.len() as f64
    }

    pub fn saturation_p(&self) -> f64 {
        self.saturation(|s| s.p)
    }

    pub fn saturation_eta(&self) -> f64 {
        self.saturation(|s| s.eta_total)
    }

    /// Least-squares slope of `f` over the final tenth of the span.
    pub fn final_slope(&self, f: impl Fn(&ObservableSample) -> f64) -> f64 {
        let tail = self.tail();
        if tail.len() < 2 {
            return 0.0;
        }
        let n = tail.len() as f64;
        let mt = tail.iter().map(|s| s.t).sum::<f64>() / n;
        let my = tail.iter().map(&f).sum::<f64>() / n;
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for s in tail {
            sxy += (s.t - mt) * (f(s) - my);
            sxx += (s.t - mt) * (s.t - mt);
        }
        sxy / sxx
    }

    /// `(peak concurrence, time of the peak)`.
    pub fn peak_concurrence(&self) -> (f64, f64) {
        self.samples
            .iter()
            .fold((0.0, self.samples.first().map_or(0.0, |s| s.t)), |best, s| {
                if s.concurrence > best.0 {
                    (s.concurrence, s.t)
                } else {
                    best
                }
            })
    }

    pub fn cptp_report(&self) -> CptpReport {
        let mut r = CptpReport { max_trace_error: 0.0, max_hermiticity_error: 0.0, min_eigenvalue: f64::INFINITY };
        for rho in &self.states {
            let s = DensityState::new(*rho, Basis::Bare, 0.0);
            r.max_trace_error = r.max_trace_error.max((s.trace() - 1.0).abs());
            r.max_hermiticity_error = r.max_hermiticity_error.max(s.hermiticity_error());
            r.min_eigenvalue = r.min_eigenvalue.min(min_eigenvalue(rho));
        }
        r
    }

    /// Value of `f` at the sample nearest to `t`.
    pub fn at(&self, t: f64) -> Option<&ObservableSample> {
        let i = self.samples.partition_point(|s| s.t < t);
        let cands = [i.checked_sub(1), Some(i)];
        cands
            .into_iter()
            .flatten()
            .filter_map(|k| self.samples.get(k))
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
    }
}

/// Integrate from `|gg><gg|` over `grid` along `route`.
pub fn evolve(p: &DimerParams, train: &PulseTrain, grid: &TimeGrid, route: Route) -> Result<Trajectory> {
    evolve_with(p, train, grid, &route.into())
}

pub fn evolve_with(p: &DimerParams, train: &PulseTrain, grid: &TimeGrid, opts: &EvolveOptions) -> Result<Trajectory> {
    p.validate()?;
    train.validate()?;
    match opts.route {
        Route::Full => evolve_full(p, train, grid, opts),
        Route::Reduced => evolve_reduced(p, train, grid, opts),
    }
}

fn frame_at(p: &DimerParams, train: &PulseTrain, t: f64) -> Result<EigenFrame> {
    eigensystem(&system_hamiltonian(p, train.amplitude(t), t))
}

fn record(traj: &mut Trajectory, rho: &Mat4, frame: &EigenFrame, p: &DimerParams, energy: f64, t: f64) {
    traj.samples.push(observables::sample(rho, frame, p, energy, t));
    traj.states.push(*rho);
}

/// Walk the substeps of one sample interval, calling `step(t, h)` for each and
/// accumulating `∫|E|²` by trapezoid.
fn walk_interval(
    train: &PulseTrain,
    grid: &TimeGrid,
    a: f64,
    b: f64,
    energy: &mut f64,
    mut step: impl FnMut(f64, f64) -> Result<()>,
) -> Result<()> {
    let (n, h) = grid.substeps(train, a, b);
    let mut prev = train.amplitude(a).norm_sqr();
    let mut t = a;
    for i in 1..=n {
        let s = if i == n { b } else { a + i as f64 * h };
        step(t, s - t)?;
        let cur = train.amplitude(s).norm_sqr();
        *energy += 0.5 * h * (prev + cur);
        prev = cur;
        t = s;
    }
    Ok(())
}

fn evolve_full(p: &DimerParams, train: &PulseTrain, grid: &TimeGrid, opts: &EvolveOptions) -> Result<Trajectory> {
    let prop = FullPropagator::new(p, train)?;
    let mut traj = Trajectory::new(Route::Full, grid.sample_count());
    let mut rho = opts.initial.density();
    let mut energy = 0.0;
    let mut gen: Option<Generator> = None;
    record(&mut traj, &rho, &frame_at(p, train, grid.start)?, p, energy, grid.start);

    for (a, b) in grid.intervals() {
        let mut halvings = 0usize;
        let res = walk_interval(train, grid, a, b, &mut energy, |t, h| {
            let (next, g) = advance(&prop, &rho, t, h, gen.take(), opts.max_halvings, &mut halvings)?;
            rho = next;
            gen = Some(g);
            Ok(())
        });
        traj.halvings += halvings;
        if let Err(e) = res {
            return Err(match e {
                Error::StepRejected { time, .. } => Error::IntegrationFailed { time, partial: Box::new(traj) },
                other => other,
            });
        }
        record(&mut traj, &rho, &frame_at(p, train, b)?, p, energy, b);
    }
    Ok(traj)
}

/// Step with recursive halving on positivity rejection.
fn advance(
    prop: &FullPropagator<'_>,
    rho: &Mat4,
    t: f64,
    h: f64,
    start: Option<Generator>,
    budget: u32,
    halvings: &mut usize,
) -> Result<(Mat4, Generator)> {
    match prop.step_raw(rho, t, h, start) {
        Err(Error::StepRejected { .. }) if budget > 0 => {
            *halvings += 1;
            let (mid, g) = advance(prop, rho, t, 0.5 * h, None, budget - 1, halvings)?;
            advance(prop, &mid, t + 0.5 * h, 0.5 * h, Some(g), budget - 1, halvings)
        }
        other => other,
    }
}

fn evolve_reduced(p: &DimerParams, train: &PulseTrain, grid: &TimeGrid, opts: &EvolveOptions) -> Result<Trajectory> {
    let idle = frame_at(p, &PulseTrain::empty(), grid.start)?;
    let idle_rates = rates(&idle, p);
    let frame_for_time = |t: f64, prev: &EigenFrame| -> Result<(EigenFrame, Option<super::LindbladRates>)> {
        let field = train.amplitude(t);
        let mut f = if field.norm() < IDLE_FIELD { idle.clone() } else { frame_at(p, train, t)? };
        f.align_to(prev);
        let r = if field.norm() < IDLE_FIELD { None } else { Some(rates(&f, p)) };
        Ok((f, r))
    };

    let mut traj = Trajectory::new(Route::Reduced, grid.sample_count());
    let mut frame = frame_at(p, train, grid.start)?;
    let rho0 = DensityState::new(frame.to_eigen(&opts.initial.density()), Basis::Eigen, grid.start);
    let mut state = ReducedState::from_density(&rho0, opts.reduced_form)?;
    let mut energy = 0.0;
    record(&mut traj, &frame.to_bare(&state.to_density().rho), &frame, p, energy, grid.start);

    for (a, b) in grid.intervals() {
        walk_interval(train, grid, a, b, &mut energy, |t, h| {
            let (f, r) = frame_for_time(t, &frame)?;
            state = step_reduced(&state, &f, r.as_ref().unwrap_or(&idle_rates), h);
            frame = f;
            Ok(())
        })?;
        let (f, _) = frame_for_time(b, &frame)?;
        frame = f;
        record(&mut traj, &frame.to_bare(&state.to_density().rho), &frame, p, energy, b);
    }
    Ok(traj)
}
