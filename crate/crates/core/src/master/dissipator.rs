use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::hamiltonian::{EigenFrame, Mat4};

use super::{Basis, DensityState, LindbladRates};

/// Downward jumps `π1..π6` as `(source, target)` level slots:
/// `π1 = |ε3><ε2|, π2 = |ε4><ε2|, π3 = |ε1><ε2|, π4 = |ε4><ε3|,
/// π5 = |ε1><ε3|, π6 = |ε1><ε4|`. The upward jumps are `π(m+6) = π(m)^dagger`.
pub const JUMPS: [(usize, usize); 6] = [(1, 2), (1, 3), (1, 0), (2, 3), (2, 0), (3, 0)];

/// `(source, target)` slots of jump `mu` (zero-based, `0..12`).
pub fn jump(mu: usize) -> (usize, usize) {
    let (upper, lower) = JUMPS[mu % 6];
    if mu < 6 {
        (upper, lower)
    } else {
        (lower, upper)
    }
}

/// `Lρ = -Σ ξ_μ ({π_μ^† π_μ, ρ} - 2 π_μ ρ π_μ^†)` for `ρ` in the eigenbasis.
///
/// Every jump is a single matrix unit, so `π^†π` is a projector and `πρπ^†`
/// only moves a population; the sum collapses to per-level outflow rates.
pub fn lindblad_superoperator(rates: &LindbladRates, rho: &DensityState) -> Result<Mat4> {
    rho.expect_basis(Basis::Eigen)?;
    Ok(apply_eigen(rates, &rho.rho))
}

pub(crate) fn apply_eigen(rates: &LindbladRates, rho: &Mat4) -> Mat4 {
    let out = rates.outflow();
    let mut l = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            l[(i, j)] = rho[(i, j)] * -(out[i] + out[j]);
        }
    }
    for (mu, &xi) in rates.xi.iter().enumerate() {
        if xi != 0.0 {
            let (src, dst) = jump(mu);
            l[(dst, dst)] += C64::new(2.0 * xi * rho[(src, src)].re, 0.0);
        }
    }
    l
}

/// Dissipator acting on a bare-basis matrix, via the frame's eigenbasis.
pub(crate) fn apply_bare(rates: &LindbladRates, frame: &EigenFrame, rho: &Mat4) -> Mat4 {
    frame.to_bare(&apply_eigen(rates, &frame.to_eigen(rho)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{frame_for, DimerParams};
    use crate::master::rates;
    use approx::assert_abs_diff_eq;

    /// Explicit operator form, built from matrix units.
    fn explicit(r: &LindbladRates, rho: &Mat4) -> Mat4 {
        let mut l = Mat4::zeros();
        for (mu, &xi) in r.xi.iter().enumerate() {
            let (src, dst) = jump(mu);
            let mut pi = Mat4::zeros();
            pi[(dst, src)] = C64::new(1.0, 0.0);
            let pdp = pi.adjoint() * pi;
            l -= (pdp * rho + rho * pdp - pi * rho * pi.adjoint() * C64::new(2.0, 0.0)) * C64::new(xi, 0.0);
        }
        l
    }

    fn sample_state() -> Mat4 {
        let mut a = Mat4::from_fn(|i, j| C64::new((i + 2 * j) as f64 * 0.1, (i as f64 - j as f64) * 0.07));
        a = a * a.adjoint();
        a / a.trace()
    }

    #[test]
    fn matches_explicit_operator_form() {
        let p = DimerParams { temp1: 0.7, temp2: 0.3, ..DimerParams::REFERENCE };
        let r = rates(&frame_for(&p, C64::new(0.9, -0.3)).unwrap(), &p);
        let rho = sample_state();
        let fast = apply_eigen(&r, &rho);
        let slow = explicit(&r, &rho);
        assert!(crate::hamiltonian::max_abs_diff(&fast, &slow) < 1e-14);
        assert_abs_diff_eq!(fast.trace().norm(), 0.0, epsilon = 1e-14);
        assert!(crate::hamiltonian::max_abs_diff(&fast, &fast.adjoint()) < 1e-14);
    }

    #[test]
    fn maximally_mixed_is_trace_free() {
        let p = DimerParams::REFERENCE;
        let r = rates(&frame_for(&p, C64::new(2.0, 0.0)).unwrap(), &p);
        let rho = DensityState::new(Mat4::identity() * C64::new(0.25, 0.0), Basis::Eigen, 0.0);
        let l = lindblad_superoperator(&r, &rho).unwrap();
        assert_abs_diff_eq!(l.trace().norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_rates_vanish() {
        let rho = DensityState::new(sample_state(), Basis::Eigen, 0.0);
        assert_eq!(lindblad_superoperator(&LindbladRates::zero(), &rho).unwrap(), Mat4::zeros());
    }

    #[test]
    fn single_decay_channel() {
        let mut r = LindbladRates::zero();
        r.xi[2] = 0.3; // ξ3: ε2 -> ε1
        let mut rho = Mat4::zeros();
        rho[(1, 1)] = C64::new(1.0, 0.0);
        let l = lindblad_superoperator(&r, &DensityState::new(rho, Basis::Eigen, 0.0)).unwrap();
        assert_abs_diff_eq!(l[(1, 1)].re, -0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(l[(0, 0)].re, 0.6, epsilon = 1e-15);
    }

    #[test]
    fn bare_state_rejected() {
        let rho = DensityState::new(sample_state(), Basis::Bare, 0.0);
        assert!(lindblad_superoperator(&LindbladRates::zero(), &rho).is_err());
    }
}
