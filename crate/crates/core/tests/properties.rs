use nalgebra::{Matrix2, SymmetricEigen};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

use dimer_core::hamiltonian::{closed_form_eigenvalues, eigensystem, frame_for, system_hamiltonian, Mat4, EG, GE};
use dimer_core::master::{
    evolve_with, lindblad_superoperator, rates, step_full, Basis, DensityState, EvolveOptions, InitialState, Route,
};
use dimer_core::observables::concurrence;
use dimer_core::{DimerParams, GaussianSegment, PulseTrain, TimeGrid};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn params() -> impl Strategy<Value = DimerParams> {
    (0.2..3.0f64, 0.2..3.0f64, 0.05..3.0f64, 0.0..0.5f64, 0.0..0.5f64, 0.02..2.0f64, 0.02..2.0f64).prop_map(
        |(omega1, omega2, coupling, kappa1, kappa2, temp1, temp2)| DimerParams {
            omega1,
            omega2,
            coupling,
            kappa1,
            kappa2,
            temp1,
            temp2,
        },
    )
}

fn field() -> impl Strategy<Value = C64> {
    (0.0..3.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, phi)| C64::from_polar(r, phi))
}

fn entries(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| c(a, b)), n)
}

fn density() -> impl Strategy<Value = Mat4> {
    entries(16).prop_map(|v| {
        let g = Mat4::from_iterator(v);
        let rho = g * g.adjoint();
        rho / rho.trace()
    })
}

fn pure_state() -> impl Strategy<Value = Mat4> {
    entries(4).prop_filter_map("nonzero", |v| {
        let psi = nalgebra::Vector4::from_iterator(v);
        let n = psi.norm();
        (n > 1e-3).then(|| {
            let psi = psi / c(n, 0.0);
            psi * psi.adjoint()
        })
    })
}

fn unitary2() -> impl Strategy<Value = Matrix2<C64>> {
    entries(4).prop_map(|v| Matrix2::from_iterator(v).qr().q())
}

fn kron(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Mat4 {
    Mat4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

fn max_abs(m: &Mat4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn closed_form_matches_numeric_spectrum(p in params(), e in field()) {
        let h = system_hamiltonian(&p, e, 0.0);
        let numeric = sorted(SymmetricEigen::new(h.entries).eigenvalues.iter().copied().collect());
        let closed = sorted(closed_form_eigenvalues(&p, e).unwrap().to_vec());
        for (a, b) in numeric.iter().zip(&closed) {
            prop_assert!((a - b).abs() < 1e-9, "{numeric:?} vs {closed:?}");
        }
    }

    #[test]
    fn frame_labels_and_reconstruction(p in params(), e in field()) {
        let h = system_hamiltonian(&p, e, 0.0);
        let f = eigensystem(&h).unwrap();
        let [e1, e2, e3, e4] = f.eps;
        prop_assert!(e2 >= e3 - 1e-12 && e3 >= e4 - 1e-12 && e4 >= e1 - 1e-12);
        prop_assert!(max_abs(&(f.reconstruct() - h.entries)) < 1e-10);
        prop_assert!(max_abs(&(f.vectors.adjoint() * f.vectors - Mat4::identity())) < 1e-12);
        prop_assert_eq!(f.transform, f.vectors.map(|z| z.conj()));
    }

    #[test]
    fn s_coefficients_square_to_identity(p in params(), e in field()) {
        let f = frame_for(&p, e).unwrap();
        for s in [&f.s1, &f.s2] {
            prop_assert!(max_abs(&(s * s - Mat4::identity())) < 1e-10);
            prop_assert!(max_abs(&(s - s.adjoint())) < 1e-12);
        }
    }

    #[test]
    fn basis_change_is_unitary_similarity(p in params(), e in field(), rho in density()) {
        let f = frame_for(&p, e).unwrap();
        let eig = f.to_eigen(&rho);
        prop_assert!(max_abs(&(f.to_bare(&eig) - rho)) < 1e-12);
        prop_assert!((eig.trace() - rho.trace()).norm() < 1e-12);
        prop_assert!(((eig * eig).trace() - (rho * rho).trace()).norm() < 1e-12);
        let a = sorted(SymmetricEigen::new(rho).eigenvalues.iter().copied().collect());
        let b = sorted(SymmetricEigen::new((eig + eig.adjoint()) * c(0.5, 0.0)).eigenvalues.iter().copied().collect());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn dissipator_preserves_trace_and_hermiticity(p in params(), e in field(), rho in density()) {
        let f = frame_for(&p, e).unwrap();
        let r = rates(&f, &p);
        let l = lindblad_superoperator(&r, &DensityState::new(rho, Basis::Eigen, 0.0)).unwrap();
        prop_assert!(l.trace().norm() < 1e-12);
        prop_assert!(max_abs(&(l - l.adjoint())) < 1e-12);
        prop_assert!(r.xi.iter().all(|&x| x >= 0.0 && x.is_finite()));
    }

    #[test]
    fn detailed_balance_with_equal_baths(p in params(), e in field()) {
        let p = DimerParams { temp2: p.temp1, ..p };
        let f = frame_for(&p, e).unwrap();
        let r = rates(&f, &p);
        for (m, &(upper, lower)) in r.gap_map.iter().enumerate() {
            let gap = f.gap(upper, lower);
            if r.xi[m + 6] > 1e-300 && gap / p.temp1 < 600.0 {
                let ratio = r.xi[m] / r.xi[m + 6];
                prop_assert!((ratio / (gap / p.temp1).exp() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn concurrence_is_local_unitary_invariant(rho in density(), a in unitary2(), b in unitary2()) {
        let u = kron(&a, &b);
        let c0 = concurrence(&rho);
        prop_assert!((0.0..=1.0).contains(&c0));
        prop_assert!((c0 - concurrence(&(u * rho * u.adjoint()))).abs() < 1e-9);
    }

    #[test]
    fn pure_state_concurrence_matches_determinant_formula(rho in pure_state()) {
        // for |psi> = a|ee> + b|eg> + c|ge> + d|gg>, C = 2|ad - bc|
        let col = rho.column(0);
        let norm = col.norm();
        prop_assume!(norm > 1e-3);
        let psi = col / c(norm, 0.0);
        let expected = 2.0 * (psi[0] * psi[3] - psi[1] * psi[2]).norm();
        prop_assert!((concurrence(&rho) - expected).abs() < 1e-7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn closed_evolution_conserves_purity_and_energy(p in params(), rho in pure_state()) {
        let p = DimerParams { kappa1: 0.0, kappa2: 0.0, ..p };
        let train = PulseTrain::empty();
        let h = system_hamiltonian(&p, c(0.0, 0.0), 0.0).entries;
        let energy = |r: &Mat4| (h * r).trace().re;
        let e0 = energy(&rho);
        let mut s = DensityState::new(rho, Basis::Bare, 0.0);
        for _ in 0..500 {
            s = step_full(&s, &p, &train, 2e-3).unwrap();
        }
        prop_assert!((s.purity() - 1.0).abs() < 1e-9);
        prop_assert!((energy(&s.rho) - e0).abs() < 1e-9);
    }

    #[test]
    fn full_route_stays_physical(p in params(), area in 0.1..2.0f64, tau in 0.05..3.0f64) {
        let train = PulseTrain::new(vec![GaussianSegment::new(area, tau, 0.0)]);
        let grid = TimeGrid::new(-5.0 * tau, 5.0 * tau + 5.0, 2e-3, 0.1).unwrap();
        let t = evolve_with(&p, &train, &grid, &EvolveOptions::default()).unwrap();
        let r = t.cptp_report();
        prop_assert!(r.max_trace_error < 1e-9 && r.max_hermiticity_error < 1e-9 && r.min_eigenvalue > -1e-6);
        prop_assert!(t.samples.iter().all(|s| (0.0..=1.0 + 1e-9).contains(&s.p) && s.concurrence <= 1.0));
    }
}

/// Error of `P` at the end of a closed driven run against a fine reference.
fn closed_error(dt: f64) -> f64 {
    let p = DimerParams { kappa1: 0.0, kappa2: 0.0, ..DimerParams::REFERENCE };
    let train = PulseTrain::new(vec![GaussianSegment::new(1.0, 2.0, 0.0)]);
    let run = |dt| {
        let grid = TimeGrid::new(-4.0, 4.0, dt, 0.2).unwrap();
        let t = evolve_with(&p, &train, &grid, &EvolveOptions::default()).unwrap();
        t.samples.last().unwrap().p
    };
    (run(dt) - run(dt / 16.0)).abs()
}

#[test]
fn rk4_is_fourth_order() {
    let ratio = closed_error(0.02) / closed_error(0.01);
    assert!((12.0..20.0).contains(&ratio), "halving dt reduced the error by {ratio}");
}

#[test]
fn rabi_exchange_from_donor() {
    let p = DimerParams { kappa1: 0.0, kappa2: 0.0, ..DimerParams::REFERENCE };
    let grid = TimeGrid::new(0.0, 5.0, 1e-3, 0.05).unwrap();
    let opts = EvolveOptions { initial: InitialState::Eg, ..Default::default() };
    let t = evolve_with(&p, &PulseTrain::empty(), &grid, &opts).unwrap();
    for s in &t.samples {
        let (sn, cs) = (p.coupling * s.t).sin_cos();
        assert!((s.pops[GE] - sn * sn).abs() < 1e-9);
        assert!((s.pops[EG] - cs * cs).abs() < 1e-9);
        // (cos|eg> - i sin|ge>) has concurrence |sin 2Jt|
        assert!((s.concurrence - (2.0 * p.coupling * s.t).sin().abs()).abs() < 1e-6);
    }
}

#[test]
fn evolution_is_deterministic() {
    let train = PulseTrain::new(vec![GaussianSegment::new(1.0, 0.3, 0.0)]);
    let grid = TimeGrid::new(-1.5, 6.0, 1e-3, 0.05).unwrap();
    for route in [Route::Full, Route::Reduced] {
        let a = evolve_with(&DimerParams::REFERENCE, &train, &grid, &route.into()).unwrap();
        let b = evolve_with(&DimerParams::REFERENCE, &train, &grid, &route.into()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn routes_agree_when_undriven() {
    let grid = TimeGrid::new(0.0, 40.0, 1e-3, 0.5).unwrap();
    let opts = |route| EvolveOptions { route, initial: InitialState::Eg, ..Default::default() };
    let full = evolve_with(&DimerParams::REFERENCE, &PulseTrain::empty(), &grid, &opts(Route::Full)).unwrap();
    let reduced = evolve_with(&DimerParams::REFERENCE, &PulseTrain::empty(), &grid, &opts(Route::Reduced)).unwrap();
    for (a, b) in full.samples.iter().zip(&reduced.samples) {
        for (x, y) in a.pops.iter().zip(&b.pops) {
            assert!((x - y).abs() < 1e-9, "t = {}: {x} vs {y}", a.t);
        }
    }
}
