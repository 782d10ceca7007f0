mod common;

use common::*;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use stark_readout::linalg::*;
use stark_readout::LinalgError;

fn brute_kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out[(i * b.rows() + k, j * b.cols() + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Taylor series of exp with Kahan-compensated accumulation.
fn taylor_expm(a: &CMatrix, terms: usize) -> CMatrix {
    let n = a.rows();
    let mut sum = CMatrix::identity(n);
    let mut comp = CMatrix::zeros(n, n);
    let mut term = CMatrix::identity(n);
    for k in 1..terms {
        term = term.matmul(a).scale_real(1.0 / k as f64);
        for idx in 0..n * n {
            let y = term.as_slice()[idx] - comp.as_slice()[idx];
            let s = sum.as_slice()[idx];
            let t = s + y;
            comp.as_mut_slice()[idx] = (t - s) - y;
            sum.as_mut_slice()[idx] = t;
        }
    }
    sum
}

#[test]
fn kron_matches_brute_force() {
    let mut r = rng(1);
    let a = random_matrix(&mut r, 3, 3);
    let b = random_matrix(&mut r, 3, 3);
    assert_eq!(kron(&a, &b), brute_kron(&a, &b));
}

#[test]
fn hermitian_textbook_cases() {
    let e = eig_hermitian(&CMatrix::from_real_rows(&[[3.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 2.0]])).unwrap();
    assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
    assert_eq!(e.vector(0)[1].norm(), 1.0);
    let e = eig_hermitian(&CMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]])).unwrap();
    assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
    let v = e.vector(0);
    assert!((v[0] + v[1]).norm() < 1e-15);
}

#[test]
fn hermitian_rejects_non_hermitian() {
    let a = CMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
    assert!(matches!(eig_hermitian(&a), Err(LinalgError::NotHermitian { .. })));
    assert!(matches!(eig_hermitian(&CMatrix::zeros(2, 3)), Err(LinalgError::NotSquare { .. })));
}

#[test]
fn hermitian_residual_and_orthonormality() {
    let mut r = rng(2);
    for n in [2, 4, 7, 16] {
        let a = random_hermitian(&mut r, n);
        let e = eig_hermitian(&a).unwrap();
        let scale = a.norm_frobenius();
        let lam = CMatrix::diag(&e.values.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
        let resid = (&a.matmul(&e.vectors) - &e.vectors.matmul(&lam)).norm_max();
        assert!(resid <= 1e-12 * scale, "n={n}: {resid}");
        let gram = e.vectors.adjoint().matmul(&e.vectors);
        assert!(gram.max_abs_diff(&CMatrix::identity(n)) < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let sum: f64 = e.values.iter().sum();
        assert!((sum - a.trace().re).abs() <= 1e-10 * scale);
    }
}

#[test]
fn general_diagonal_and_defective() {
    let e = eig_general(&CMatrix::diag(&[c(0.0, 1.0), c(0.0, -1.0)])).unwrap();
    let mut ims: Vec<f64> = e.values.iter().map(|z| z.im).collect();
    ims.sort_by(f64::total_cmp);
    assert_eq!(ims, vec![-1.0, 1.0]);
    let nil = CMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
    assert!(matches!(eig_general(&nil), Err(LinalgError::IllConditioned { .. })));
}

#[test]
fn general_reconstruction_random_16() {
    let mut r = rng(3);
    let mut a = random_matrix(&mut r, 16, 16);
    // spread the spectrum out
    for i in 0..16 {
        a[(i, i)] += c(3.0 * i as f64, 0.0);
    }
    let e = eig_general(&a).unwrap();
    assert!(e.reconstruct().max_abs_diff(&a) <= 1e-9 * a.norm_one());
    let lam = CMatrix::diag(&e.values);
    let resid = (&a.matmul(&e.vectors) - &e.vectors.matmul(&lam)).norm_max();
    assert!(resid <= 1e-9 * a.norm_one());
    // deterministic for identical input
    let again = eig_general(&a).unwrap();
    assert_eq!(again.values, e.values);
}

#[test]
fn expm_matches_taylor_oracle() {
    let mut r = rng(4);
    let a = random_matrix(&mut r, 8, 8);
    let a = a.scale_real(5.0 / a.norm_one());
    let e = expm(&a).unwrap();
    let t = taylor_expm(&a, 60);
    assert!(e.max_abs_diff(&t) <= 1e-9 * t.norm_max(), "{}", e.max_abs_diff(&t));
}

#[test]
fn solve_residual_random_16() {
    let mut r = rng(5);
    let mut a = random_matrix(&mut r, 16, 16);
    for i in 0..16 {
        a[(i, i)] += c(4.0, 0.0);
    }
    let b = random_matrix(&mut r, 16, 3);
    let x = solve(&a, &b).unwrap();
    let resid = (&a.matmul(&x) - &b).norm_max();
    assert!(resid <= 1e-10 * a.norm_one() * x.norm_max());
}

fn arb_matrix(n: usize, scale: f64) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n)
        .prop_map(move |v| CMatrix::from_vec(n, n, v.into_iter().map(|(re, im)| C64::new(re * scale, im * scale)).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kron_is_associative(a in arb_matrix(2, 1.0), b in arb_matrix(2, 1.0), c in arb_matrix(3, 1.0)) {
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert!(left.max_abs_diff(&right) <= 1e-12);
    }

    #[test]
    fn expm_inverse_pair(a in arb_matrix(5, 2.0)) {
        let prod = expm(&a).unwrap().matmul(&expm(&a.scale_real(-1.0)).unwrap());
        prop_assert!(prod.max_abs_diff(&CMatrix::identity(5)) <= 1e-8);
    }

    #[test]
    fn expm_of_anti_hermitian_is_unitary(a in arb_matrix(6, 1.5)) {
        let k = (&a - &a.adjoint()).scale_real(0.5);
        let u = expm(&k).unwrap();
        prop_assert!(u.adjoint().matmul(&u).max_abs_diff(&CMatrix::identity(6)) <= 1e-9);
    }

    #[test]
    fn hermitian_trace_and_orthonormality(a in arb_matrix(6, 3.0)) {
        let h = (&a + &a.adjoint()).scale_real(0.5);
        let e = eig_hermitian(&h).unwrap();
        let scale = h.norm_frobenius().max(1.0);
        prop_assert!((e.values.iter().sum::<f64>() - h.trace().re).abs() <= 1e-10 * scale);
        prop_assert!(e.vectors.adjoint().matmul(&e.vectors).max_abs_diff(&CMatrix::identity(6)) <= 1e-12);
    }

    #[test]
    fn general_reconstruction(a in arb_matrix(6, 1.0)) {
        match eig_general(&a) {
            Ok(e) => prop_assert!(e.reconstruct().max_abs_diff(&a) <= 1e-9 * a.norm_one().max(1.0)),
            Err(LinalgError::IllConditioned { .. }) => {}
            Err(other) => prop_assert!(false, "unexpected error {other}"),
        }
    }
}
