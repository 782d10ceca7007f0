mod common;

use std::f64::consts::PI;

use common::*;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use stark_readout::hamiltonian::*;
use stark_readout::optics::*;
use stark_readout::Error;

fn voigt() -> DriveParams {
    DriveParams { omega1p_ghz: 0.0, ..DriveParams::branching_preset() }
}

/// Deterministic product rule: Simpson in cos(theta), trapezoid in phi, polarization summed
/// over the two transverse unit vectors.
fn quadrature(u: &Vec3, v: &Vec3) -> C64 {
    let (nt, np) = (40, 32);
    let dot = |w: &Vec3, e: [f64; 3]| w[0] * e[0] + w[1] * e[1] + w[2] * e[2];
    let mut acc = c(0.0, 0.0);
    for i in 0..=nt {
        let ct = -1.0 + 2.0 * i as f64 / nt as f64;
        let wt = if i == 0 || i == nt { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        let st = (1.0 - ct * ct).max(0.0).sqrt();
        for j in 0..np {
            let phi = 2.0 * PI * j as f64 / np as f64;
            let (sp, cp) = phi.sin_cos();
            let e1 = [ct * cp, ct * sp, -st];
            let e2 = [-sp, cp, 0.0];
            let f = 0.5 * (dot(u, e1) * dot(v, e1) + dot(u, e2) * dot(v, e2));
            acc += f * wt;
        }
    }
    acc * (2.0 / nt as f64 / 3.0) * (2.0 * PI / np as f64)
}

#[test]
fn voigt_transitions_are_half_strength() {
    let es = pseudo_faraday_eigensystem(&voigt()).unwrap();
    for e in [StateLabel::ElectronZPlus, StateLabel::ElectronZMinus] {
        for t in [StateLabel::TrionZPlus, StateLabel::TrionZMinus] {
            let p = transition_dipole(&es.state(e).vector, &es.state(t).vector).unwrap();
            assert!((p.norm_sqr() - 0.5).abs() < 1e-12, "{e:?}->{t:?}: {}", p.norm_sqr());
        }
    }
    assert!((branching_ratio(&voigt()).unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn faraday_selection_rules() {
    let p = DriveParams { b_x: 0.0, omega1p_ghz: 0.0, ..DriveParams::branching_preset() };
    let es = pseudo_faraday_eigensystem(&p).unwrap();
    let s = |a, b| transition_dipole(&es.state(a).vector, &es.state(b).vector).unwrap().norm_sqr();
    assert!((s(StateLabel::ElectronZPlus, StateLabel::TrionZPlus) - 1.0).abs() < 1e-15);
    assert_eq!(s(StateLabel::ElectronZPlus, StateLabel::TrionZMinus), 0.0);
    assert_eq!(branching_ratio(&p).unwrap(), 0.0);
}

#[test]
fn zero_field_gives_zero_branching() {
    for o in [10.0, 100.0, 200.0] {
        let p = DriveParams { b_x: 0.0, omega1p_ghz: o, ..DriveParams::branching_preset() };
        assert!(branching_ratio(&p).unwrap().abs() < 1e-15);
    }
}

#[test]
fn dipole_sum_rule() {
    for p in [voigt(), DriveParams::branching_preset(), DriveParams::readout_preset()] {
        let es = pseudo_faraday_eigensystem(&p).unwrap();
        for t in &es.states {
            let total: f64 = es.states.iter().map(|j| transition_dipole(&j.vector, &t.vector).unwrap().norm_sqr()).sum();
            assert!((total - 1.0).abs() < 1e-12, "{:?}: {total}", t.label);
        }
    }
}

#[test]
fn dipole_operator_is_hermitian() {
    for comp in dipole_operator().components {
        assert_eq!(comp.hermiticity_deviation(), 0.0);
    }
}

#[test]
fn branching_ratio_falls_monotonically() {
    let mut prev = f64::INFINITY;
    for i in 0..50 {
        let o = 200.0 * i as f64 / 49.0;
        let r = branching_ratio(&DriveParams { omega1p_ghz: o, ..DriveParams::branching_preset() }).unwrap();
        assert!(r <= prev + 1e-12, "not monotone at {o}: {r} > {prev}");
        prev = r;
    }
    assert!((prev - 0.02).abs() <= 0.004, "{prev}");
    assert!((prev - 0.021_279_7).abs() < 1e-6);
}

#[test]
fn unnormalized_state_rejected() {
    let z = c(0.0, 0.0);
    let bad = [c(1.0, 0.0), c(1.0, 0.0), z, z];
    let good = [z, z, c(1.0, 0.0), z];
    assert!(matches!(transition_dipole(&bad, &good), Err(Error::NotNormalized { .. })));
}

#[test]
fn division_by_zero_reported() {
    // swap labels so that the "kept" transition is the forbidden one
    let p = DriveParams { b_x: 0.0, omega1p_ghz: 0.0, ..DriveParams::branching_preset() };
    let mut es = pseudo_faraday_eigensystem(&p).unwrap();
    for s in es.states.iter_mut() {
        s.label = match s.label {
            StateLabel::ElectronZPlus => StateLabel::ElectronZMinus,
            StateLabel::ElectronZMinus => StateLabel::ElectronZPlus,
            l => l,
        };
    }
    assert!(matches!(branching_ratio_of(&es), Err(Error::DivisionByZero)));
}

#[test]
fn cross_coupling_limits() {
    // pure Voigt and pure Faraday both cancel the cross term
    assert!(beta_coupling(&voigt()).unwrap().norm() < 1e-12);
    let faraday = DriveParams { b_x: 0.0, ..DriveParams::readout_preset() };
    assert!(beta_coupling(&faraday).unwrap().norm() < 1e-12);
    // in the dressed regime it does not vanish
    let beta = beta_coupling(&DriveParams::readout_preset()).unwrap().norm();
    assert!((beta - 0.125_776).abs() < 1e-5, "{beta}");
}

#[test]
fn angular_identity_by_quadrature() {
    let mut r = rng(11);
    for _ in 0..10 {
        let u: Vec3 = [random_c64(&mut r), random_c64(&mut r), random_c64(&mut r)];
        let v: Vec3 = [random_c64(&mut r), random_c64(&mut r), random_c64(&mut r)];
        let exact = angular_overlap_integral(&u, &v);
        let q = quadrature(&u, &v);
        assert!((exact - q).norm() < 1e-12, "{exact} vs {q}");
    }
}

#[test]
fn spontaneous_rate_scaling() {
    let base = spontaneous_rate(2.0e15, 1e-57);
    assert!(base > 0.0);
    assert!((spontaneous_rate(4.0e15, 1e-57) / base - 8.0).abs() < 1e-12);
    assert!((spontaneous_rate(2.0e15, 3e-57) / base - 3.0).abs() < 1e-12);
    // omega^3 p^2 / (3 pi eps0 hbar c^3)
    let manual = 8.0e45 * 1e-57 / (3.0 * PI * 8.8541878128e-12 * 1.054571817e-34 * 299_792_458.0f64.powi(3));
    assert!((base / manual - 1.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn branching_ratio_phase_invariant(b in 0.01..1.0f64, o in 0.0..300.0f64, phases in prop::array::uniform4(0.0..6.28f64)) {
        let p = DriveParams { b_x: b, omega1p_ghz: o, ..DriveParams::branching_preset() };
        let es = pseudo_faraday_eigensystem(&p).unwrap();
        let r0 = branching_ratio_of(&es).unwrap();
        let mut rotated = es.clone();
        for (s, ph) in rotated.states.iter_mut().zip(phases) {
            let f = C64::from_polar(1.0, ph);
            s.vector = s.vector.map(|z| z * f);
        }
        let r1 = branching_ratio_of(&rotated).unwrap();
        prop_assert!((r0 - r1).abs() <= 1e-12 * r0.max(1.0));
    }

    #[test]
    fn transition_strength_bounded(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (random_state(&mut r), random_state(&mut r));
        let p = transition_dipole(&a, &b).unwrap();
        prop_assert!(p.norm_sqr() <= 1.0 + 1e-12);
        let back = transition_dipole(&b, &a).unwrap();
        prop_assert!((p.norm_sqr() - back.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn angular_integral_bilinear(seed in any::<u64>(), s in -3.0..3.0f64) {
        let mut r = rng(seed);
        let u: Vec3 = [random_c64(&mut r), random_c64(&mut r), random_c64(&mut r)];
        let v: Vec3 = [random_c64(&mut r), random_c64(&mut r), random_c64(&mut r)];
        let w: Vec3 = [random_c64(&mut r), random_c64(&mut r), random_c64(&mut r)];
        let vw: Vec3 = [0, 1, 2].map(|k| v[k] * s + w[k]);
        let lhs = angular_overlap_integral(&u, &vw);
        let rhs = angular_overlap_integral(&u, &v) * s + angular_overlap_integral(&u, &w);
        prop_assert!((lhs - rhs).norm() < 1e-12);
        prop_assert!((angular_overlap_integral(&u, &v) - angular_overlap_integral(&v, &u)).norm() < 1e-14);
    }
}
