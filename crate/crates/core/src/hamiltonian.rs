//! Dimer Hamiltonian in the bare product basis and its instantaneous
//! eigensystem.
//!
//! The bare basis is ordered `|ee>, |eg>, |ge>, |gg>`, where the first label
//! is the donor (pigment 1) and the second the acceptor (pigment 2).
//!
//! Eigenlevels are labeled `ε1..ε4` with `ε2 >= ε3 >= ε4 >= ε1`. Arrays
//! indexed by level use slot `k` for `ε(k+1)`.

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mat4 = Matrix4<C64>;

pub const EE: usize = 0;
pub const EG: usize = 1;
pub const GE: usize = 2;
pub const GG: usize = 3;

/// Tolerance on `|H - H^dagger|` accepted by [`eigensystem`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Relative tolerance under which two eigenvalues count as degenerate.
const DEGENERACY_TOL: f64 = 1e-10;

/// Physical constants of the dimer and its two baths, in units of the
/// calculation frequency `ω` (with `k_B = 1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimerParams {
    pub omega1: f64,
    pub omega2: f64,
    #[serde(rename = "J")]
    pub coupling: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    #[serde(rename = "T1")]
    pub temp1: f64,
    #[serde(rename = "T2")]
    pub temp2: f64,
}

impl DimerParams {
    /// Identical pigments (`ω1 = ω2 = 1`), `J = 1.5`, `κ = 0.1`, `T = 0.1`.
    pub const REFERENCE: DimerParams = DimerParams {
        omega1: 1.0,
        omega2: 1.0,
        coupling: 1.5,
        kappa1: 0.1,
        kappa2: 0.1,
        temp1: 0.1,
        temp2: 0.1,
    };

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.omega1,
            self.omega2,
            self.coupling,
            self.kappa1,
            self.kappa2,
            self.temp1,
            self.temp2,
        ]
        .iter()
        .all(|v| v.is_finite());
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParams(what.to_string()))
            }
        };
        check(finite, "all parameters must be finite")?;
        check(self.omega1 > 0.0 && self.omega2 > 0.0, "omega1 and omega2 must be > 0")?;
        check(self.coupling >= 0.0, "J must be >= 0")?;
        check(self.kappa1 >= 0.0 && self.kappa2 >= 0.0, "kappa1 and kappa2 must be >= 0")?;
        check(self.temp1 > 0.0 && self.temp2 > 0.0, "T1 and T2 must be > 0")
    }

    pub fn kappa(&self, bath: usize) -> f64 {
        [self.kappa1, self.kappa2][bath]
    }

    pub fn temperature(&self, bath: usize) -> f64 {
        [self.temp1, self.temp2][bath]
    }
}

/// A Hamiltonian in the bare basis at a given instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianMatrix {
    pub entries: Mat4,
    pub time: f64,
}

impl HamiltonianMatrix {
    pub fn new(entries: Mat4, time: f64) -> Self {
        Self { entries, time }
    }

    /// Largest element of `|H - H^dagger|`.
    pub fn hermiticity_error(&self) -> f64 {
        max_abs_diff(&self.entries, &self.entries.adjoint())
    }
}

pub(crate) fn max_abs_diff(a: &Mat4, b: &Mat4) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Free pigments plus exchange coupling, `H1 + H2`.
pub fn bare_hamiltonian(p: &DimerParams) -> HamiltonianMatrix {
    let mut h = Mat4::zeros();
    h[(EE, EE)] = re(0.5 * (p.omega1 + p.omega2));
    h[(EG, EG)] = re(0.5 * (p.omega1 - p.omega2));
    h[(GE, GE)] = re(0.5 * (p.omega2 - p.omega1));
    h[(GG, GG)] = re(-0.5 * (p.omega1 + p.omega2));
    h[(EG, GE)] = re(p.coupling);
    h[(GE, EG)] = re(p.coupling);
    HamiltonianMatrix::new(h, 0.0)
}

/// Donor drive `E σ+(1) + E* σ-(1)`.
///
/// `σ+(1)` raises the donor, so it maps `|gg> -> |eg>` and `|ge> -> |ee>`.
pub fn drive_hamiltonian(_p: &DimerParams, field: C64) -> HamiltonianMatrix {
    let mut h = Mat4::zeros();
    h[(EG, GG)] = field;
    h[(GG, EG)] = field.conj();
    h[(EE, GE)] = field;
    h[(GE, EE)] = field.conj();
    HamiltonianMatrix::new(h, 0.0)
}

/// Full system Hamiltonian `H1 + H2 + H3` at time `t` for drive amplitude `field`.
pub fn system_hamiltonian(p: &DimerParams, field: C64, t: f64) -> HamiltonianMatrix {
    let entries = bare_hamiltonian(p).entries + drive_hamiltonian(p, field).entries;
    HamiltonianMatrix::new(entries, t)
}

/// Closed-form spectrum `(ε1, ε2, ε3, ε4)` from the secular equation.
///
/// Only used as an oracle: the production path is [`eigensystem`].
pub fn closed_form_eigenvalues(p: &DimerParams, field: C64) -> Result<[f64; 4]> {
    let e2 = field.norm_sqr();
    let j2 = p.coupling * p.coupling;
    let a0 = (4.0 * e2 * (j2 + p.omega2 * p.omega2) + (j2 - p.omega1 * p.omega2).powi(2)).sqrt();
    let a1 = 2.0 * j2 + 4.0 * e2 + p.omega1 * p.omega1 + p.omega2 * p.omega2;
    let mut inner = a1 - 2.0 * a0;
    if inner < 0.0 {
        if inner < -1e-12 {
            return Err(Error::NegativeRadicand { value: inner });
        }
        inner = 0.0;
    }
    let outer = 0.5 * (a1 + 2.0 * a0).sqrt();
    let inner = 0.5 * inner.sqrt();
    Ok([-outer, outer, inner, -inner])
}

/// Instantaneous eigensystem of the dimer Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenFrame {
    /// `ε1..ε4`.
    pub eps: [f64; 4],
    /// Column `k` is `|ε(k+1)>` expanded in the bare basis.
    pub vectors: Mat4,
    /// Transform `U` with `|η> = U|ε>`, i.e. `u_ij = <ε_j|η_i>`. This is the
    /// elementwise conjugate of `vectors`.
    pub transform: Mat4,
    /// `σz(1)` in the eigenbasis, `s1[(i, j)] = <ε_i|σz(1)|ε_j>`.
    pub s1: Mat4,
    /// `σz(2)` in the eigenbasis.
    pub s2: Mat4,
}

impl EigenFrame {
    fn from_parts(eps: [f64; 4], vectors: Mat4) -> Self {
        let transform = vectors.map(|z| z.conj());
        let (s1, s2) = s_coefficients(&transform);
        Self { eps, vectors, transform, s1, s2 }
    }

    /// `ε_i - ε_j` for zero-based level slots.
    pub fn gap(&self, i: usize, j: usize) -> f64 {
        self.eps[i] - self.eps[j]
    }

    /// The six gaps `ε21, ε23, ε24, ε31, ε34, ε41`.
    pub fn gaps(&self) -> [f64; 6] {
        [
            self.gap(1, 0),
            self.gap(1, 2),
            self.gap(1, 3),
            self.gap(2, 0),
            self.gap(2, 3),
            self.gap(3, 0),
        ]
    }

    /// `U diag(ε) U^dagger` in the bare basis (with `vectors` as `U`).
    pub fn reconstruct(&self) -> Mat4 {
        let d = Mat4::from_diagonal(&nalgebra::Vector4::from_iterator(self.eps.iter().map(|&e| re(e))));
        self.vectors * d * self.vectors.adjoint()
    }

    /// Rotate a bare-basis operator into this eigenbasis.
    pub fn to_eigen(&self, bare: &Mat4) -> Mat4 {
        self.vectors.adjoint() * bare * self.vectors
    }

    /// Rotate an eigenbasis operator back to the bare basis.
    pub fn to_bare(&self, eigen: &Mat4) -> Mat4 {
        self.vectors * eigen * self.vectors.adjoint()
    }

    /// Make this frame continuous with `prev`: degenerate label pairs are
    /// swapped when that increases the overlap with `prev`, then every
    /// eigenvector phase is rotated so `<prev_k|ε_k>` is real-positive.
    pub fn align_to(&mut self, prev: &EigenFrame) {
        let overlap = |a: usize, b: usize, v: &Mat4| -> f64 {
            prev.vectors.column(a).dotc(&v.column(b)).norm_sqr()
        };
        // adjacent labels in energy order
        for (a, b) in [(1usize, 2usize), (2, 3), (3, 0)] {
            if degenerate(self.eps[a], self.eps[b]) {
                let keep = overlap(a, a, &self.vectors) + overlap(b, b, &self.vectors);
                let swap = overlap(a, b, &self.vectors) + overlap(b, a, &self.vectors);
                if swap > keep {
                    self.vectors.swap_columns(a, b);
                    self.eps.swap(a, b);
                }
            }
        }
        for k in 0..4 {
            let ov = prev.vectors.column(k).dotc(&self.vectors.column(k));
            if ov.norm() > 1e-6 {
                let phase = ov.conj() / ov.norm();
                for i in 0..4 {
                    self.vectors[(i, k)] *= phase;
                }
            }
        }
        *self = EigenFrame::from_parts(self.eps, self.vectors);
    }
}

fn degenerate(a: f64, b: f64) -> bool {
    (a - b).abs() <= DEGENERACY_TOL * a.abs().max(b.abs()).max(1.0)
}

/// `σz(1)` and `σz(2)` in the eigenbasis, from the transform `U`:
///
/// `s1_ij = u1i u1j* + u2i u2j* - u3i u3j* - u4i u4j*`
/// `s2_ij = u1i u1j* - u2i u2j* + u3i u3j* - u4i u4j*`
pub fn s_coefficients(u: &Mat4) -> (Mat4, Mat4) {
    const Z1: [f64; 4] = [1.0, 1.0, -1.0, -1.0];
    const Z2: [f64; 4] = [1.0, -1.0, 1.0, -1.0];
    let mut s1 = Mat4::zeros();
    let mut s2 = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let mut a = C64::new(0.0, 0.0);
            let mut b = C64::new(0.0, 0.0);
            for r in 0..4 {
                let term = u[(r, i)] * u[(r, j)].conj();
                a += term * Z1[r];
                b += term * Z2[r];
            }
            s1[(i, j)] = a;
            s2[(i, j)] = b;
        }
    }
    (s1, s2)
}

/// Diagonalize `h`, label the levels `ε2 >= ε3 >= ε4 >= ε1` and fix the
/// eigenvector gauge (largest-magnitude component real-positive).
///
/// Degenerate eigenvalues are ordered by ascending index of their largest
/// bare-basis component.
pub fn eigensystem(h: &HamiltonianMatrix) -> Result<EigenFrame> {
    let deviation = h.hermiticity_error();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let m = &h.entries;
    let (values, mut vectors) = if m.iter().all(|z| z.im == 0.0) {
        let eig = SymmetricEigen::new(m.map(|z| z.re));
        (eig.eigenvalues, eig.eigenvectors.map(re))
    } else {
        // symmetrize so roundoff-level asymmetry does not leak into the solver
        let eig = SymmetricEigen::new((m + m.adjoint()) * re(0.5));
        (eig.eigenvalues, eig.eigenvectors)
    };

    let mut lead = [0usize; 4];
    for (k, slot) in lead.iter_mut().enumerate() {
        let col = vectors.column(k);
        let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let idx = col.iter().position(|z| z.norm() >= max - 1e-8).unwrap_or(0);
        let phase = col[idx] / col[idx].norm();
        *slot = idx;
        let fix = phase.conj();
        for i in 0..4 {
            vectors[(i, k)] *= fix;
        }
        vectors[(idx, k)].im = 0.0;
    }

    // descending energy, ties by ascending lead index
    let before = |a: usize, b: usize| -> bool {
        if degenerate(values[a], values[b]) {
            lead[a] < lead[b]
        } else {
            values[a] > values[b]
        }
    };
    let mut order = [0usize, 1, 2, 3];
    for _ in 0..4 {
        for i in 0..3 {
            if before(order[i + 1], order[i]) {
                order.swap(i, i + 1);
            }
        }
    }
    // energy order [top, second, third, bottom] maps to labels [ε2, ε3, ε4, ε1]
    const SLOT: [usize; 4] = [1, 2, 3, 0];
    let mut eps = [0.0; 4];
    let mut labeled = Mat4::zeros();
    for (rank, &src) in order.iter().enumerate() {
        let slot = SLOT[rank];
        eps[slot] = values[src];
        labeled.set_column(slot, &vectors.column(src));
    }
    Ok(EigenFrame::from_parts(eps, labeled))
}

/// Eigensystem of the full Hamiltonian for drive amplitude `field`.
pub fn frame_for(p: &DimerParams, field: C64) -> Result<EigenFrame> {
    eigensystem(&system_hamiltonian(p, field, 0.0))
}
