//! Acceptor excitation, total efficiency and two-pigment concurrence.

use nalgebra::SymmetricEigen;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::Result;
use crate::hamiltonian::{DimerParams, EigenFrame, Mat4, EE, GE};
use crate::master::{Basis, DensityState};

/// Pulse energies below this count as "no pulse yet" and give zero efficiency.
pub const MIN_PULSE_ENERGY: f64 = 1e-15;

/// Observables at one output time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ObservableSample {
    pub t: f64,
    /// Acceptor excited-state probability.
    #[serde(rename = "P")]
    pub p: f64,
    pub eta_total: f64,
    pub concurrence: f64,
    /// Bare populations `|ee>, |eg>, |ge>, |gg>`.
    pub pops: [f64; 4],
    /// Eigenbasis populations `ρ11..ρ44`.
    pub eig_pops: [f64; 4],
    /// `∫|E|² dt` up to `t`.
    pub pulse_energy: f64,
}

/// `σ_ij = Σ_kl u_jk u_il* ρ_lk`: rotate an eigenbasis state to the bare basis.
pub fn to_bare(rho: &DensityState, frame: &EigenFrame) -> Result<DensityState> {
    rho.expect_basis(Basis::Eigen)?;
    Ok(DensityState::new(frame.to_bare(&rho.rho), Basis::Bare, rho.time))
}

pub fn to_eigen(sigma: &DensityState, frame: &EigenFrame) -> Result<DensityState> {
    sigma.expect_basis(Basis::Bare)?;
    Ok(DensityState::new(frame.to_eigen(&sigma.rho), Basis::Eigen, sigma.time))
}

/// `P = σ(ee,ee) + σ(ge,ge)` for a bare-basis matrix.
pub fn acceptor_probability(sigma: &Mat4) -> f64 {
    sigma[(EE, EE)].re + sigma[(GE, GE)].re
}

/// `η_total = ω2 P / ∫|E|² dt`. Not clamped: values above 1 are legitimate.
pub fn total_efficiency(p: f64, params: &DimerParams, pulse_energy: f64) -> f64 {
    if pulse_energy < MIN_PULSE_ENERGY {
        0.0
    } else {
        params.omega2 * p / pulse_energy
    }
}

fn sigma_yy() -> Mat4 {
    // σy ⊗ σy is antidiagonal with entries (-1, 1, 1, -1)
    let mut m = Mat4::zeros();
    m[(0, 3)] = C64::new(-1.0, 0.0);
    m[(1, 2)] = C64::new(1.0, 0.0);
    m[(2, 1)] = C64::new(1.0, 0.0);
    m[(3, 0)] = C64::new(-1.0, 0.0);
    m
}

/// Spin-flipped state `(σy⊗σy) ρ* (σy⊗σy)`.
pub fn spin_flip(sigma: &Mat4) -> Mat4 {
    let yy = sigma_yy();
    yy * sigma.map(|z| z.conj()) * yy
}

/// Wootters concurrence `max(0, λ1 - λ2 - λ3 - λ4)`.
///
/// The `λ²` are the eigenvalues of `ρρ̃`, obtained here from the Hermitian
/// similar matrix `√ρ ρ̃ √ρ`. Negative roundoff eigenvalues are clamped to 0.
pub fn concurrence(sigma: &Mat4) -> f64 {
    let h = (sigma + sigma.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let sqrt_vals = eig.eigenvalues.map(|v| C64::new(v.max(0.0).sqrt(), 0.0));
    let root = eig.eigenvectors * Mat4::from_diagonal(&sqrt_vals) * eig.eigenvectors.adjoint();
    let r = root * spin_flip(&h) * root;
    let r = (r + r.adjoint()) * C64::new(0.5, 0.0);
    let mut lambda: Vec<f64> = r.symmetric_eigenvalues().iter().map(|v| v.max(0.0).sqrt()).collect();
    lambda.sort_by(|a, b| b.total_cmp(a));
    (lambda[0] - lambda[1] - lambda[2] - lambda[3]).max(0.0)
}

/// Observables for a bare-basis state.
pub fn sample(
    sigma: &Mat4,
    frame: &EigenFrame,
    params: &DimerParams,
    pulse_energy: f64,
    t: f64,
) -> ObservableSample {
    let p = acceptor_probability(sigma);
    let eig = frame.to_eigen(sigma);
    ObservableSample {
        t,
        p,
        eta_total: total_efficiency(p, params, pulse_energy),
        concurrence: concurrence(sigma),
        pops: [0, 1, 2, 3].map(|k| sigma[(k, k)].re),
        eig_pops: [0, 1, 2, 3].map(|k| eig[(k, k)].re),
        pulse_energy,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{frame_for, EG, GG};
    use approx::assert_abs_diff_eq;

    fn projector(v: [C64; 4]) -> Mat4 {
        let v = nalgebra::Vector4::from(v);
        v * v.adjoint()
    }

    fn basis(k: usize) -> Mat4 {
        let mut m = Mat4::zeros();
        m[(k, k)] = C64::new(1.0, 0.0);
        m
    }

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn acceptor_probability_cases() {
        assert_eq!(acceptor_probability(&basis(GG)), 0.0);
        assert_eq!(acceptor_probability(&basis(GE)), 1.0);
        let mix = (basis(EG) + basis(GE)) * c(0.5);
        assert_eq!(acceptor_probability(&mix), 0.5);
    }

    #[test]
    fn efficiency_cases() {
        let p = DimerParams::REFERENCE;
        assert_eq!(total_efficiency(0.0, &p, 0.3), 0.0);
        assert_abs_diff_eq!(total_efficiency(0.3, &p, 0.282_095), 1.0635, epsilon = 1e-4);
        assert_eq!(total_efficiency(0.3, &p, 1e-16), 0.0);
    }

    #[test]
    fn concurrence_reference_states() {
        assert_eq!(concurrence(&basis(GG)), 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = projector([c(0.0), c(s), c(s), c(0.0)]);
        assert_abs_diff_eq!(concurrence(&bell), 1.0, epsilon = 1e-10);
        let phi = projector([c(s), c(0.0), c(0.0), c(s)]);
        let werner = phi * c(0.5) + Mat4::identity() * c(0.125);
        assert_abs_diff_eq!(concurrence(&werner), 0.25, epsilon = 1e-10);
    }

    #[test]
    fn to_bare_identity_frame_and_mixed_state() {
        let p = DimerParams { coupling: 0.0, omega2: 1.3, ..DimerParams::REFERENCE };
        let f = frame_for(&p, c(0.0)).unwrap();
        let mixed = DensityState::new(Mat4::identity() * c(0.25), Basis::Eigen, 0.0);
        let f2 = frame_for(&DimerParams::REFERENCE, C64::new(0.3, 0.4)).unwrap();
        let back = to_bare(&mixed, &f2).unwrap();
        assert!(crate::hamiltonian::max_abs_diff(&back.rho, &mixed.rho) < 1e-15);
        // uncoupled, non-degenerate: the frame is a permutation
        let mut rho = Mat4::zeros();
        rho[(0, 0)] = c(1.0);
        let bare = to_bare(&DensityState::new(rho, Basis::Eigen, 0.0), &f).unwrap();
        assert_eq!(bare.rho[(GG, GG)], c(1.0));
        assert!(to_bare(&bare, &f).is_err());
    }
}
