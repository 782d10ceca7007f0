mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use stark_readout::hamiltonian::{build_h0, build_h1, DriveParams};
use stark_readout::linalg::{eig_general, eig_hermitian, expm, CMatrix};
use stark_readout::liouville::*;

/// `d rho / dt` from the supermatrix.
fn generator(l: &CMatrix, rho: &CMatrix) -> CMatrix {
    superop_apply(l, rho).scale(c(0.0, -1.0))
}

fn trace_norm(m: &CMatrix) -> f64 {
    let h = (m + &m.adjoint()).scale_real(0.5);
    eig_hermitian(&h).unwrap().values.iter().map(|x| x.abs()).sum()
}

fn random_rates(r: &mut impl rand::Rng) -> RateMatrices {
    let mut rates = RateMatrices::zero();
    for a in 0..4 {
        for b in 0..4 {
            if a != b {
                rates.relaxation[a][b] = r.random_range(0.0..2.0);
                if a < b {
                    rates.set_dephasing(a, b, r.random_range(0.0..2.0));
                }
            }
        }
    }
    rates
}

#[test]
fn dissipator_matches_jump_operators() {
    let mut r = rng(21);
    let rates = paper_rates();
    let l0 = build_l0(&CMatrix::zeros(4, 4), &rates);
    for _ in 0..100 {
        let rho = random_density(&mut r);
        let got = generator(&l0, rho.matrix());
        let want = jump_dissipator(&rates, rho.matrix());
        assert!(got.max_abs_diff(&want) <= 1e-12);
        assert!(lindblad_apply(&rates, rho.matrix()).max_abs_diff(&want) <= 1e-12);
    }
}

#[test]
fn dissipator_matches_for_random_rates() {
    let mut r = rng(22);
    for _ in 0..20 {
        let rates = random_rates(&mut r);
        let l0 = build_l0(&CMatrix::zeros(4, 4), &rates);
        let rho = random_matrix(&mut r, 4, 4);
        assert!(generator(&l0, &rho).max_abs_diff(&jump_dissipator(&rates, &rho)) <= 1e-12);
    }
}

#[test]
fn commutator_superoperator_matches_direct() {
    let mut r = rng(23);
    for _ in 0..20 {
        let h = random_matrix(&mut r, 4, 4);
        let x = random_matrix(&mut r, 4, 4);
        let l = commutator_superoperator(&h);
        assert!(superop_apply(&l, &x).max_abs_diff(&commutator(&h, &x)) <= 1e-13);
    }
}

#[test]
fn full_generator_matches_direct_form() {
    let p = readout_drive();
    let rates = paper_rates();
    let blocks = LiouvilleBlocks::new(&p, &rates);
    let h0 = build_h0(&p);
    let h1 = build_h1(&p);
    let mut r = rng(24);
    for &t in &[0.0, 0.13, 1.7, 42.0] {
        let h = stark_readout::hamiltonian::hamiltonian_at(&h0, &h1, t);
        let rho = random_density(&mut r);
        let want = &commutator(&h, rho.matrix()).scale(c(0.0, -1.0)) + &jump_dissipator(&rates, rho.matrix());
        let got = generator(&blocks.at(t), rho.matrix());
        assert!(got.max_abs_diff(&want) <= 1e-10 * h.norm_max(), "t={t}");
    }
}

#[test]
fn harmonic_blocks_are_adjoint_partners() {
    let blocks = LiouvilleBlocks::new(&readout_drive(), &paper_rates());
    assert!(blocks.has_drive());
    let mut r = rng(25);
    for _ in 0..10 {
        let x = random_matrix(&mut r, 4, 4);
        // ([A, X])^H = -[A^H, X^H]
        let lhs = superop_apply(&blocks.lm1, &x).adjoint();
        let rhs = superop_apply(&blocks.l1, &x.adjoint()).scale_real(-1.0);
        assert!(lhs.max_abs_diff(&rhs) <= 1e-13);
    }
    let undriven = LiouvilleBlocks::new(&DriveParams::branching_preset(), &paper_rates());
    assert!(!undriven.has_drive());
}

#[test]
fn closed_system_spectrum_is_energy_differences() {
    let mut r = rng(26);
    for h in [build_h0(&DriveParams::readout_preset()), random_hermitian(&mut r, 4)] {
        let lambda = eig_hermitian(&h).unwrap().values;
        let gen = build_l0(&h, &RateMatrices::zero()).scale(c(0.0, -1.0));
        let mut got: Vec<(f64, f64)> = eig_general(&gen).unwrap().values.iter().map(|z| (z.im, z.re)).collect();
        let mut want: Vec<f64> = (0..4).flat_map(|j| (0..4).map(move |k| (j, k))).map(|(j, k)| lambda[k] - lambda[j]).collect();
        got.sort_by(|a, b| a.0.total_cmp(&b.0));
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g.0 - w).abs() <= 1e-9 * h.norm_max().max(1.0), "{g:?} vs {w}");
            assert!(g.1.abs() <= 1e-9 * h.norm_max().max(1.0));
        }
    }
}

#[test]
fn dissipative_spectrum_is_stable() {
    let gen = build_l0(&build_h0(&DriveParams::readout_preset()), &paper_rates()).scale(c(0.0, -1.0));
    let e = eig_general(&gen).unwrap();
    assert!(e.values.iter().all(|z| z.re <= 1e-9));
    // exactly one stationary mode for an ergodic rate set
    assert_eq!(e.values.iter().filter(|z| z.norm() < 1e-9).count(), 1);
}

#[test]
fn evolution_contracts_trace_distance() {
    let p = DriveParams::readout_preset();
    let l0 = build_l0(&build_h0(&p), &paper_rates());
    let mut r = rng(27);
    for &t in &[0.01, 0.5, 3.0] {
        let prop = expm(&l0.scale(c(0.0, -t))).unwrap();
        for _ in 0..5 {
            let (a, b) = (random_density(&mut r), random_density(&mut r));
            let before = trace_norm(&(a.matrix() - b.matrix()));
            let ea = superop_apply(&prop, a.matrix());
            let eb = superop_apply(&prop, b.matrix());
            assert!(trace_norm(&(&ea - &eb)) <= before + 1e-9);
            DensityMatrix::new(ea).unwrap();
        }
    }
}

#[test]
fn rates_validation() {
    paper_rates().validate().unwrap();
    let mut bad = paper_rates();
    bad.relaxation[1][1] = 1.0;
    assert!(bad.validate().is_err());
    let mut bad = paper_rates();
    bad.dephasing[0][1] = 3.0;
    assert!(bad.validate().is_err());
    let mut bad = paper_rates();
    bad.relaxation[2][0] = -1.0;
    assert!(bad.validate().is_err());
    let ang = paper_rates().to_angular();
    assert!((ang.relaxation[2][0] - 1.54 * std::f64::consts::TAU).abs() < 1e-12);
}

#[test]
fn density_matrix_checks() {
    assert!(DensityMatrix::new(CMatrix::identity(4)).is_err());
    assert!(DensityMatrix::new(CMatrix::identity(4).scale_real(0.25)).is_ok());
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = c(1.5, 0.0);
    m[(1, 1)] = c(-0.5, 0.0);
    assert!(DensityMatrix::new(m).is_err());
    let mut m = DensityMatrix::basis(0).into_matrix();
    m[(0, 1)] = c(0.1, 0.0);
    assert!(DensityMatrix::new(m).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vectorization_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rho = random_density(&mut r);
        let v = vectorize(&rho);
        prop_assert_eq!(devectorize(&v).into_matrix(), rho.matrix().clone());
        prop_assert!((v.trace() - rho.trace()).norm() < 1e-15);
        for a in 0..4 {
            for b in 0..4 {
                prop_assert_eq!(v.0[flat_index(a, b)], rho.get(a, b));
            }
        }
    }

    #[test]
    fn generator_is_traceless_and_hermiticity_preserving(seed in any::<u64>(), t in 0.0..10.0f64) {
        let mut r = rng(seed);
        let rates = random_rates(&mut r);
        let p = DriveParams { delta2_ghz: r.random_range(-5.0..5.0), ..DriveParams::readout_preset() };
        let l = LiouvilleBlocks::new(&p, &rates).at(t);
        let x = random_matrix(&mut r, 4, 4);
        let d = generator(&l, &x);
        prop_assert!(d.trace().norm() <= 1e-9 * l.norm_max());
        let rho = random_density(&mut r);
        let dr = generator(&l, rho.matrix());
        prop_assert!(dr.hermiticity_deviation() <= 1e-9 * l.norm_max());
    }
}
