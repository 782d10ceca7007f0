//! Self-checks that compare the production code paths against independent reference
//! computations. Run by the command-line `validate` subcommand.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::floquet::{converge_truncation, FloquetOperator, TruncationOptions};
use crate::hamiltonian::{build_h0, pseudo_faraday_eigensystem, DriveParams, ReadoutTarget};
use crate::linalg::{eig_general, eig_hermitian, CMatrix};
use crate::liouville::{build_l0, devectorize, vectorize, vectorize_matrix, DensityMatrix, LiouvilleBlocks, RateMatrices, Supervector};
use crate::ode::{integrate_with, OdeOptions, Rhs};
use crate::optics::{angular_overlap_integral, branching_ratio, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Measured figure of merit (deviation, error, ...).
    pub value: f64,
    pub limit: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationOptions {
    pub seed: u64,
    pub mc_samples: usize,
    pub random_states: usize,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self { seed: 20_141_118, mc_samples: 1_000_000, random_states: 100 }
    }
}

fn random_c64(rng: &mut impl Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random density matrix `A A^H / tr(A A^H)`.
pub fn random_density_matrix(rng: &mut impl Rng) -> DensityMatrix {
    let a = CMatrix::from_fn(4, 4, |_, _| random_c64(rng));
    let m = a.matmul(&a.adjoint());
    let tr = m.trace().re;
    DensityMatrix::from_matrix_unchecked(m.scale_real(1.0 / tr)).expect("4x4")
}

/// Dissipator written with jump operators `|b><a|` at rate `Gamma_ab`, plus elementwise dephasing.
pub fn jump_operator_dissipator(rates: &RateMatrices, rho: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(4, 4);
    for a in 0..4 {
        for b in 0..4 {
            let g = rates.relaxation[a][b];
            if g == 0.0 {
                continue;
            }
            let mut s = CMatrix::zeros(4, 4);
            s[(b, a)] = C64::new(1.0, 0.0);
            let sd = s.adjoint();
            let sds = sd.matmul(&s);
            let jump = s.matmul(rho).matmul(&sd);
            let anti = &sds.matmul(rho) + &rho.matmul(&sds);
            out += &(&jump - &anti.scale_real(0.5)).scale_real(g);
        }
    }
    for a in 0..4 {
        for b in 0..4 {
            if a != b {
                out[(a, b)] -= rho[(a, b)] * rates.dephasing[a][b];
            }
        }
    }
    out
}

/// Monte Carlo estimate of the solid-angle integral of `(u.e)(v.e)`, averaged over the two
/// transverse polarizations `e` of each emission direction.
pub fn angular_integral_monte_carlo(u: &Vec3, v: &Vec3, samples: usize, seed: u64) -> C64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dot = |w: &Vec3, e: [f64; 3]| w[0] * e[0] + w[1] * e[1] + w[2] * e[2];
    let mut acc = C64::new(0.0, 0.0);
    for _ in 0..samples {
        let cos_t: f64 = rng.random_range(-1.0..1.0);
        let phi: f64 = rng.random_range(0.0..2.0 * PI);
        let sin_t = (1.0 - cos_t * cos_t).sqrt();
        let (sp, cp) = phi.sin_cos();
        let e1 = [cos_t * cp, cos_t * sp, -sin_t];
        let e2 = [-sp, cp, 0.0];
        acc += 0.5 * (dot(u, e1) * dot(v, e1) + dot(u, e2) * dot(v, e2));
    }
    acc * (4.0 * PI / samples as f64)
}

fn timed(name: &'static str, limit: f64, f: impl FnOnce() -> Result<f64>) -> Check {
    let start = Instant::now();
    let (value, passed) = match f() {
        Ok(v) => (v, v <= limit),
        Err(e) => {
            log::error!("{name}: {e}");
            (f64::NAN, false)
        }
    };
    Check { name, passed, value, limit, seconds: start.elapsed().as_secs_f64() }
}

pub fn lindblad_oracle(opts: &ValidationOptions) -> Check {
    timed("lindblad-vs-jump-operators", 1e-12, || {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let rates = RateMatrices::paper_sim();
        let l0 = build_l0(&CMatrix::zeros(4, 4), &rates);
        let mut worst = 0.0f64;
        for _ in 0..opts.random_states {
            let rho = random_density_matrix(&mut rng);
            let v = vectorize(&rho);
            let lv = l0.matvec(&v.0);
            let action: Vec<C64> = lv.iter().map(|z| z * C64::new(0.0, -1.0)).collect();
            let got = devectorize(&Supervector::from_slice(&action)).into_matrix();
            let expected = jump_operator_dissipator(&rates, rho.matrix());
            worst = worst.max(got.max_abs_diff(&expected));
        }
        Ok(worst)
    })
}

pub fn closed_system_spectrum() -> Check {
    timed("closed-system-spectrum", 1e-9, || {
        let p = DriveParams::readout_preset();
        let h0 = build_h0(&p);
        let lambda = eig_hermitian(&h0)?.values;
        let gen = build_l0(&h0, &RateMatrices::zero()).scale(C64::new(0.0, -1.0));
        let mut got: Vec<f64> = eig_general(&gen)?.values.iter().map(|z| z.im).collect();
        let mut expected: Vec<f64> =
            (0..4).flat_map(|j| (0..4).map(move |k| (j, k))).map(|(j, k)| -(lambda[j] - lambda[k])).collect();
        got.sort_by(f64::total_cmp);
        expected.sort_by(f64::total_cmp);
        Ok(got.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    })
}

pub fn floquet_vs_ode() -> Check {
    timed("floquet-vs-ode", 1e-4, || {
        let p = DriveParams::readout_preset().tuned_to(ReadoutTarget::ZMinus)?;
        let rates = RateMatrices::paper_sim();
        let blocks = LiouvilleBlocks::new(&p, &rates);
        let es = pseudo_faraday_eigensystem(&p)?;
        let rho0 = DensityMatrix::projector(&es.state(ReadoutTarget::ZMinus.electron()).vector);
        let op = converge_truncation(&blocks, &rho0, &TruncationOptions::default())?.operator;
        let times: Vec<f64> = (0..=20).map(|i| 0.1 * i as f64).collect();
        let opts = OdeOptions { rel_tol: 1e-9, sample_times: Some(times.clone()), ..Default::default() };
        let traj = integrate_with(&Rhs::Supermatrix(blocks), &rho0, 2.0, &opts)?;
        let floquet = op.propagate_batch_raw(&rho0, &times)?;
        Ok(floquet.iter().zip(&traj.states).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max))
    })
}

pub fn trajectory_invariants() -> Check {
    timed("readout-trajectory-invariants", 1e-8, || {
        let p = DriveParams::readout_preset().tuned_to(ReadoutTarget::ZMinus)?;
        let blocks = LiouvilleBlocks::new(&p, &RateMatrices::paper_sim());
        let es = pseudo_faraday_eigensystem(&p)?;
        let rho0 = DensityMatrix::projector(&es.state(ReadoutTarget::ZMinus.electron()).vector);
        let op: FloquetOperator = converge_truncation(&blocks, &rho0, &TruncationOptions::default())?.operator;
        let times: Vec<f64> = (0..2000).map(|i| 500.0 * i as f64 / 1999.0).collect();
        let mut worst = 0.0f64;
        for rho in op.propagate_batch_raw(&rho0, &times)? {
            worst = worst.max((rho.trace() - 1.0).norm()).max(rho.hermiticity_deviation());
            // positivity is allowed 1e-6 of slop; fold it onto the same scale
            worst = worst.max((-rho.min_eigenvalue()? - 1e-6).max(0.0));
        }
        Ok(worst)
    })
}

pub fn angular_identity(opts: &ValidationOptions) -> Check {
    timed("angular-integral-identity", 1e-2, || {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xA11);
        let mut worst = 0.0f64;
        for pair in 0..10u64 {
            let u: Vec3 = [random_c64(&mut rng), random_c64(&mut rng), random_c64(&mut rng)];
            let v: Vec3 = [random_c64(&mut rng), random_c64(&mut rng), random_c64(&mut rng)];
            let exact = angular_overlap_integral(&u, &v);
            let mc = angular_integral_monte_carlo(&u, &v, opts.mc_samples, opts.seed.wrapping_add(pair));
            // relative to the natural scale |u||v| 4pi/3 so near-cancelling pairs are not penalized
            let scale = 4.0 * PI / 3.0
                * u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
                * v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            worst = worst.max((mc - exact).norm() / scale);
        }
        Ok(worst)
    })
}

pub fn voigt_branching() -> Check {
    timed("voigt-branching-ratio", 1e-9, || {
        let p = DriveParams { omega1p_ghz: 0.0, ..DriveParams::branching_preset() };
        Ok((branching_ratio(&p)? - 1.0).abs())
    })
}

pub fn vectorization_round_trip() -> Check {
    timed("vectorization-round-trip", 0.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rho = random_density_matrix(&mut rng);
        let back = devectorize(&vectorize_matrix(rho.matrix()));
        Ok(back.max_abs_diff(&rho))
    })
}

pub fn run_all(opts: &ValidationOptions) -> Vec<Check> {
    vec![
        vectorization_round_trip(),
        lindblad_oracle(opts),
        closed_system_spectrum(),
        voigt_branching(),
        angular_identity(opts),
        floquet_vs_ode(),
        trajectory_invariants(),
    ]
}
