//! Full Lindblad route: `dρ/dt = -i[H(t), ρ] + Lρ`.
//!
//! The state is kept in the bare basis. The coherent part uses the exact
//! `H(t)`; the dissipator is rebuilt from the instantaneous eigenframe at
//! every RK4 stage and applied after rotating into that frame.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hamiltonian::{bare_hamiltonian, eigensystem, system_hamiltonian, DimerParams, EigenFrame, Mat4};
use crate::pulse::PulseTrain;

use super::dissipator::apply_bare;
use super::{is_positive_within, min_eigenvalue, rates, Basis, DensityState, LindbladRates};

/// Below this drive magnitude the undriven eigenframe is reused.
pub const IDLE_FIELD: f64 = 1e-12;

/// Steps leaving an eigenvalue below `-POSITIVITY_TOL` are rejected.
pub const POSITIVITY_TOL: f64 = 1e-6;

/// Trace drift beyond this is renormalized after each step.
pub const TRACE_DRIFT: f64 = 1e-12;

#[derive(Clone, Debug)]
pub(crate) struct Generator {
    time: f64,
    hamiltonian: Mat4,
    /// `None` when the undriven frame applies.
    frame: Option<(EigenFrame, LindbladRates)>,
}

/// Evaluates the right-hand side for one parameter set and pulse train.
#[derive(Clone, Debug)]
pub struct FullPropagator<'a> {
    params: DimerParams,
    train: &'a PulseTrain,
    dissipative: bool,
    idle: (EigenFrame, LindbladRates),
}

impl<'a> FullPropagator<'a> {
    pub fn new(params: &DimerParams, train: &'a PulseTrain) -> Result<Self> {
        let frame = eigensystem(&bare_hamiltonian(params))?;
        let idle_rates = rates(&frame, params);
        Ok(Self {
            params: *params,
            train,
            dissipative: params.kappa1 > 0.0 || params.kappa2 > 0.0,
            idle: (frame, idle_rates),
        })
    }

    pub(crate) fn generator(&self, t: f64) -> Result<Generator> {
        let field = self.train.amplitude(t);
        let h = system_hamiltonian(&self.params, field, t);
        let frame = if self.dissipative && field.norm() >= IDLE_FIELD {
            let f = eigensystem(&h)?;
            let r = rates(&f, &self.params);
            Some((f, r))
        } else {
            None
        };
        Ok(Generator { time: t, hamiltonian: h.entries, frame })
    }

    fn derivative(&self, g: &Generator, rho: &Mat4) -> Mat4 {
        let h = &g.hamiltonian;
        let mut d = (h * rho - rho * h) * C64::new(0.0, -1.0);
        if self.dissipative {
            let (frame, r) = g.frame.as_ref().unwrap_or(&self.idle);
            d += apply_bare(r, frame, rho);
        }
        d
    }

    /// One classical RK4 step. Returns the new state and the generator at
    /// `t + h`, which the caller may hand back for the next step.
    pub(crate) fn rk4(&self, rho: &Mat4, t: f64, h: f64, start: Option<Generator>) -> Result<(Mat4, Generator)> {
        let g0 = match start {
            Some(g) if g.time == t => g,
            _ => self.generator(t)?,
        };
        let gm = self.generator(t + 0.5 * h)?;
        let g1 = self.generator(t + h)?;
        let half = C64::new(0.5 * h, 0.0);
        let full = C64::new(h, 0.0);
        let k1 = self.derivative(&g0, rho);
        let k2 = self.derivative(&gm, &(rho + k1 * half));
        let k3 = self.derivative(&gm, &(rho + k2 * half));
        let k4 = self.derivative(&g1, &(rho + k3 * full));
        let next = rho + (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0);
        Ok((next, g1))
    }

    /// Advance `state` (bare basis) by `dt`, rejecting steps that break
    /// positivity beyond [`POSITIVITY_TOL`].
    pub fn step(&self, state: &DensityState, dt: f64) -> Result<DensityState> {
        state.expect_basis(Basis::Bare)?;
        let (rho, _) = self.step_raw(&state.rho, state.time, dt, None)?;
        Ok(DensityState::new(rho, Basis::Bare, state.time + dt))
    }

    pub(crate) fn step_raw(&self, rho: &Mat4, t: f64, dt: f64, start: Option<Generator>) -> Result<(Mat4, Generator)> {
        let (next, g) = self.rk4(rho, t, dt, start)?;
        let mut next = (next + next.adjoint()) * C64::new(0.5, 0.0);
        let tr = next.trace().re;
        if (tr - 1.0).abs() > TRACE_DRIFT {
            next /= C64::new(tr, 0.0);
        }
        if !is_positive_within(&next, POSITIVITY_TOL) {
            return Err(Error::StepRejected { time: t + dt, min_eigenvalue: min_eigenvalue(&next) });
        }
        Ok((next, g))
    }
}

/// One full-route RK4 step from `rho.time` to `rho.time + dt`.
pub fn step_full(rho: &DensityState, p: &DimerParams, train: &PulseTrain, dt: f64) -> Result<DensityState> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParams(format!("dt must be > 0, got {dt}")));
    }
    FullPropagator::new(p, train)?.step(rho, dt)
}
