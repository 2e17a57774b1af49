//! Reduced route: three eigenbasis populations obey `dX/dt = -M X + R` and
//! each coherence decays as `dρ_kl/dt = -(η_k + η_l - i ε_lk) ρ_kl`.
//!
//! `X = [ρ22, ρ33, ρ44]`, the levels whose outflow rates `η2, η3, η4` sit on
//! the diagonal of `M`; `ρ11` closes the trace. [`ReducedForm::Printed`]
//! keeps `M` and `R` as published, where two entries differ from the
//! population block of the full Lindblad equation (`M33` carries `η3` instead
//! of `η4`, `R3` carries `-ξ12` instead of `+ξ12`). [`ReducedForm::Consistent`]
//! is the corrected system. Both forms coincide when `ξ12`, `η3` and `η4`
//! vanish, as in the undriven dimer.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hamiltonian::{EigenFrame, Mat4};

use super::{Basis, DensityState, LindbladRates};

/// Independent coherences `ρ_kl`, `k < l`, as level slots.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReducedForm {
    #[default]
    Printed,
    Consistent,
}

impl ReducedForm {
    /// Level slots held in `X` (`ρ22, ρ33, ρ44`, the rows `M` acts on); `ρ11`
    /// closes the trace.
    pub fn tracked(self) -> [usize; 3] {
        [1, 2, 3]
    }

    fn closing(self) -> usize {
        0
    }

    /// `(M, R)` for the given rates.
    pub fn system(self, r: &LindbladRates) -> ([[f64; 3]; 3], [f64; 3]) {
        let x = |m: usize| r.get(m);
        let eta2 = x(1) + x(2) + x(3);
        let eta3 = x(4) + x(5) + x(7);
        let eta4 = x(6) + x(8) + x(10);
        let (m33, r3) = match self {
            ReducedForm::Printed => (x(12) + eta3, -x(12)),
            ReducedForm::Consistent => (x(12) + eta4, x(12)),
        };
        let m = [
            [x(9) + eta2, x(9) - x(7), x(9) - x(8)],
            [x(11) - x(1), x(11) + eta3, x(11) - x(10)],
            [x(12) - x(2), x(12) - x(4), m33],
        ];
        let m = m.map(|row| row.map(|v| 2.0 * v));
        (m, [2.0 * x(9), 2.0 * x(11), 2.0 * r3])
    }
}

/// Eigenbasis populations and coherences carried by the reduced route.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedState {
    /// `X`, ordered per [`ReducedForm::tracked`].
    pub populations: [f64; 3],
    /// `ρ_kl` for the pairs in [`PAIRS`].
    pub coherences: [C64; 6],
    pub time: f64,
    pub form: ReducedForm,
}

impl ReducedState {
    pub fn from_density(rho: &DensityState, form: ReducedForm) -> Result<Self> {
        rho.expect_basis(Basis::Eigen)?;
        let populations = form.tracked().map(|k| rho.rho[(k, k)].re);
        let coherences = PAIRS.map(|(k, l)| rho.rho[(k, l)]);
        Ok(Self { populations, coherences, time: rho.time, form })
    }

    /// All four eigenbasis populations `ρ11..ρ44`.
    pub fn full_populations(&self) -> [f64; 4] {
        let mut pops = [0.0; 4];
        for (x, k) in self.populations.iter().zip(self.form.tracked()) {
            pops[k] = *x;
        }
        pops[self.form.closing()] = 1.0 - self.populations.iter().sum::<f64>();
        pops
    }

    pub fn to_density(&self) -> DensityState {
        let mut rho = Mat4::zeros();
        for (k, p) in self.full_populations().into_iter().enumerate() {
            rho[(k, k)] = C64::new(p, 0.0);
        }
        for (c, (k, l)) in self.coherences.iter().zip(PAIRS) {
            rho[(k, l)] = *c;
            rho[(l, k)] = c.conj();
        }
        DensityState::new(rho, Basis::Eigen, self.time)
    }
}

#[derive(Clone, Copy)]
struct Deriv {
    pops: [f64; 3],
    coh: [C64; 6],
}

/// One RK4 step with `frame` and `rates` held fixed over the step.
pub fn step_reduced(state: &ReducedState, frame: &EigenFrame, rates: &LindbladRates, dt: f64) -> ReducedState {
    let (m, r) = state.form.system(rates);
    let eta = rates.outflow();
    let decay = PAIRS.map(|(k, l)| C64::new(-(eta[k] + eta[l]), frame.eps[l] - frame.eps[k]));

    let f = |pops: &[f64; 3], coh: &[C64; 6]| -> Deriv {
        let mut dp = [0.0; 3];
        for i in 0..3 {
            dp[i] = r[i] - (0..3).map(|j| m[i][j] * pops[j]).sum::<f64>();
        }
        let mut dc = [C64::new(0.0, 0.0); 6];
        for i in 0..6 {
            dc[i] = decay[i] * coh[i];
        }
        Deriv { pops: dp, coh: dc }
    };
    let shift = |d: &Deriv, s: f64| -> ([f64; 3], [C64; 6]) {
        let mut p = state.populations;
        let mut c = state.coherences;
        for i in 0..3 {
            p[i] += s * d.pops[i];
        }
        for i in 0..6 {
            c[i] += d.coh[i] * s;
        }
        (p, c)
    };

    let k1 = f(&state.populations, &state.coherences);
    let (p, c) = shift(&k1, 0.5 * dt);
    let k2 = f(&p, &c);
    let (p, c) = shift(&k2, 0.5 * dt);
    let k3 = f(&p, &c);
    let (p, c) = shift(&k3, dt);
    let k4 = f(&p, &c);

    let mut next = *state;
    for i in 0..3 {
        next.populations[i] += dt / 6.0 * (k1.pops[i] + 2.0 * k2.pops[i] + 2.0 * k3.pops[i] + k4.pops[i]);
    }
    for i in 0..6 {
        next.coherences[i] += (k1.coh[i] + k2.coh[i] * 2.0 + k3.coh[i] * 2.0 + k4.coh[i]) * (dt / 6.0);
    }
    next.time += dt;
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{frame_for, DimerParams};
    use crate::master::rates;
    use nalgebra::{Matrix3, Vector3};

    fn driven() -> (EigenFrame, LindbladRates) {
        let p = DimerParams { temp1: 0.5, temp2: 0.5, ..DimerParams::REFERENCE };
        let f = frame_for(&p, C64::new(0.8, 0.0)).unwrap();
        let r = rates(&f, &p);
        (f, r)
    }

    fn start(form: ReducedForm) -> ReducedState {
        let mut rho = Mat4::zeros();
        rho[(0, 0)] = C64::new(0.4, 0.0);
        rho[(1, 1)] = C64::new(0.3, 0.0);
        rho[(2, 2)] = C64::new(0.2, 0.0);
        rho[(3, 3)] = C64::new(0.1, 0.0);
        rho[(0, 2)] = C64::new(0.05, 0.02);
        rho[(2, 0)] = C64::new(0.05, -0.02);
        ReducedState::from_density(&DensityState::new(rho, Basis::Eigen, 0.0), form).unwrap()
    }

    #[test]
    fn closed_limit_keeps_populations_and_rotates_coherences() {
        let (f, _) = driven();
        let zero = LindbladRates::zero();
        let mut s = start(ReducedForm::Printed);
        let x0 = s.populations;
        let c0 = s.coherences[1];
        let dt = 1e-3;
        for _ in 0..1000 {
            s = step_reduced(&s, &f, &zero, dt);
        }
        assert_eq!(s.populations, x0);
        assert!((s.coherences[1].norm() - c0.norm()).abs() < 1e-12);
        let expected = c0 * C64::from_polar(1.0, f.eps[2] - f.eps[0]);
        assert!((s.coherences[1] - expected).norm() < 1e-10);
    }

    #[test]
    fn stationary_point_closes_trace() {
        let (_, r) = driven();
        for form in [ReducedForm::Printed, ReducedForm::Consistent] {
            let (m, rr) = form.system(&r);
            let m = Matrix3::from_fn(|i, j| m[i][j]);
            let x = m.lu().solve(&Vector3::from(rr)).expect("M invertible");
            let closing = 1.0 - x.sum();
            assert!(x.iter().chain([closing].iter()).all(|v| v.is_finite()));
            // the trace closes by construction; the consistent form also
            // keeps every population physical
            if form == ReducedForm::Consistent {
                assert!(x.iter().all(|&v| (0.0..=1.0).contains(&v)));
                assert!((0.0..=1.0).contains(&closing));
            }
        }
    }

    #[test]
    fn full_populations_sum_to_one() {
        for form in [ReducedForm::Printed, ReducedForm::Consistent] {
            let s = start(form);
            assert!((s.full_populations().iter().sum::<f64>() - 1.0).abs() < 1e-15);
            for (a, b) in s.full_populations().iter().zip([0.4, 0.3, 0.2, 0.1]) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }
}
