//! Dissipative dynamics in the instantaneous eigenbasis.
//!
//! Two integration routes are provided: the full Lindblad equation on the
//! 4×4 density matrix ([`full`]) and the reduced population/coherence
//! equations ([`reduced`]). They serve as cross-checks of each other.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{max_abs_diff, Mat4};

pub mod dissipator;
pub mod evolve;
pub mod full;
pub mod rates;
pub mod reduced;

pub use dissipator::{lindblad_superoperator, JUMPS};
pub use evolve::{evolve, evolve_with, CptpReport, EvolveOptions, InitialState, Trajectory, MAX_HALVINGS};
pub use full::{step_full, FullPropagator};
pub use rates::{bose_occupation, rates, LindbladRates};
pub use reduced::{step_reduced, ReducedForm, ReducedState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Eigen,
    Bare,
}

/// Integration route.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Full,
    Reduced,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Full => "full",
            Route::Reduced => "reduced",
        }
    }
}

/// A 4×4 density matrix tagged with its basis and time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityState {
    pub rho: Mat4,
    pub basis: Basis,
    pub time: f64,
}

impl DensityState {
    pub fn new(rho: Mat4, basis: Basis, time: f64) -> Self {
        Self { rho, basis, time }
    }

    pub fn expect_basis(&self, expected: Basis) -> Result<()> {
        if self.basis == expected {
            Ok(())
        } else {
            Err(Error::BasisMismatch { expected, found: self.basis })
        }
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        max_abs_diff(&self.rho, &self.rho.adjoint())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.rho)
    }

    pub fn purity(&self) -> f64 {
        (self.rho * self.rho).trace().re
    }
}

pub(crate) fn min_eigenvalue(rho: &Mat4) -> f64 {
    let h = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// True when `rho` has no eigenvalue below `-margin`, by Cholesky of
/// `rho + margin·I` with real-pivot checks.
pub(crate) fn is_positive_within(rho: &Mat4, margin: f64) -> bool {
    let mut l = Mat4::zeros();
    for j in 0..4 {
        let d = rho[(j, j)].re + margin - (0..j).map(|k| l[(j, k)].norm_sqr()).sum::<f64>();
        if !(d > 0.0) {
            return false;
        }
        let djj = d.sqrt();
        l[(j, j)] = C64::new(djj, 0.0);
        for i in j + 1..4 {
            let s: C64 = (0..j).map(|k| l[(i, k)] * l[(j, k)].conj()).sum();
            l[(i, j)] = (rho[(i, j)] - s) / djj;
        }
    }
    true
}
