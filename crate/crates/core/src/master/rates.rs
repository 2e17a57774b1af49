use crate::hamiltonian::{DimerParams, EigenFrame};

use super::dissipator::JUMPS;

/// Gaps below this are treated as degenerate and carry no rate.
pub const MIN_GAP: f64 = 1e-9;

/// Bose-Einstein occupation `1 / (exp(ε/T) - 1)`.
pub fn bose_occupation(energy: f64, temperature: f64) -> f64 {
    1.0 / (energy / temperature).exp_m1()
}

/// The twelve jump rates `ξ1..ξ12`, stored zero-based.
///
/// `xi[m]` for `m < 6` is the downward (emission) rate of jump `m`, `xi[m + 6]`
/// the upward rate across the same gap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LindbladRates {
    pub xi: [f64; 12],
    /// `(upper, lower)` level slots of the gap each jump pair refers to.
    pub gap_map: [(usize, usize); 6],
}

impl LindbladRates {
    pub fn zero() -> Self {
        Self { xi: [0.0; 12], gap_map: JUMPS }
    }

    /// `ξ_m` with the one-based index used in the equations.
    pub fn get(&self, m: usize) -> f64 {
        self.xi[m - 1]
    }

    /// Total outflow rate `η_k` from each level (zero-based slots).
    pub fn outflow(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (m, &(upper, lower)) in JUMPS.iter().enumerate() {
            out[upper] += self.xi[m];
            out[lower] += self.xi[m + 6];
        }
        out
    }
}

/// Rates in the instantaneous frame:
/// `ξ = ε_ij Σ_l κ_l |s_ij(l)|² (N_l(ε_ij) + 1)` downward and the same with
/// `N_l` upward. Each jump pair uses the gap between the two levels its jump
/// operator connects.
pub fn rates(frame: &EigenFrame, p: &DimerParams) -> LindbladRates {
    let mut xi = [0.0; 12];
    for (m, &(upper, lower)) in JUMPS.iter().enumerate() {
        let gap = frame.gap(upper, lower);
        debug_assert!(gap > -1e-9, "level ordering violated: gap {gap}");
        if gap < MIN_GAP {
            continue;
        }
        let mut down = 0.0;
        let mut up = 0.0;
        for (bath, s) in [&frame.s1, &frame.s2].into_iter().enumerate() {
            let weight = p.kappa(bath) * (s[(upper, lower)] * s[(lower, upper)]).re;
            if weight == 0.0 {
                continue;
            }
            let n = bose_occupation(gap, p.temperature(bath));
            down += weight * (n + 1.0);
            up += weight * n;
        }
        xi[m] = gap * down;
        xi[m + 6] = gap * up;
    }
    LindbladRates { xi, gap_map: JUMPS }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::frame_for;
    use approx::assert_relative_eq;
    use num_complex::Complex64 as C64;

    #[test]
    fn bose_function_value() {
        // 1 / (e^10 - 1)
        assert_relative_eq!(bose_occupation(1.0, 0.1), 4.540_199_100_968_777e-5, max_relative = 1e-12);
        assert!((bose_occupation(1.0, 0.1) - 4.5400e-5).abs() < 1e-8);
    }

    #[test]
    fn cold_bath_has_no_absorption() {
        let p = DimerParams { temp1: 1e-6, temp2: 1e-6, ..DimerParams::REFERENCE };
        let r = rates(&frame_for(&p, C64::new(0.7, 0.0)).unwrap(), &p);
        assert!(r.xi[6..].iter().all(|&x| x == 0.0));
        assert!(r.xi[..6].iter().any(|&x| x > 0.0));
    }

    #[test]
    fn detailed_balance_per_gap() {
        let p = DimerParams { temp1: 0.4, temp2: 0.4, ..DimerParams::REFERENCE };
        let f = frame_for(&p, C64::new(0.6, 0.2)).unwrap();
        let r = rates(&f, &p);
        for (m, &(u, l)) in JUMPS.iter().enumerate() {
            if r.xi[m + 6] > 0.0 {
                assert_relative_eq!(r.xi[m] / r.xi[m + 6], (f.gap(u, l) / 0.4).exp(), max_relative = 1e-10);
            }
        }
        assert!(r.xi.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn undriven_dimer_only_relaxes_within_single_excitation() {
        let p = DimerParams::REFERENCE;
        let r = rates(&frame_for(&p, C64::new(0.0, 0.0)).unwrap(), &p);
        // only the ε2 <-> ε1 pair (|+> and |->) is coupled by σz
        for (m, &x) in r.xi.iter().enumerate() {
            if m % 6 == 2 {
                assert!(x > 0.0 || m == 8);
            } else {
                assert_eq!(x, 0.0, "xi{} should vanish", m + 1);
            }
        }
        assert_relative_eq!(r.get(3), 3.0 * 0.2 * (bose_occupation(3.0, 0.1) + 1.0), max_relative = 1e-12);
    }
}
