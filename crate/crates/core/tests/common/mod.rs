#![allow(dead_code)]

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stark_readout::linalg::CMatrix;
use stark_readout::liouville::DensityMatrix;
use stark_readout::{DriveParams, RateMatrices, ReadoutTarget};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn random_c64(rng: &mut impl Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| random_c64(rng))
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
    let a = random_matrix(rng, n, n);
    (&a + &a.adjoint()).scale_real(0.5)
}

pub fn random_density(rng: &mut impl Rng) -> DensityMatrix {
    let a = random_matrix(rng, 4, 4);
    let m = a.matmul(&a.adjoint());
    let tr = m.trace().re;
    DensityMatrix::from_matrix_unchecked(m.scale_real(1.0 / tr)).unwrap()
}

pub fn random_state(rng: &mut impl Rng) -> [C64; 4] {
    let v = [0; 4].map(|_| random_c64(rng));
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.map(|z| z / n)
}

/// Drive tuned to the z- cycling transition at the read-out preset.
pub fn readout_drive() -> DriveParams {
    DriveParams::readout_preset().tuned_to(ReadoutTarget::ZMinus).unwrap()
}

pub fn zero_drive() -> DriveParams {
    DriveParams {
        b_x: 0.0,
        omega1p_ghz: 0.0,
        delta1_ghz: 0.0,
        omega2p_ghz: c(0.0, 0.0),
        omega2m_ghz: c(0.0, 0.0),
        delta2_ghz: 0.0,
        ..DriveParams::readout_preset()
    }
}

pub fn paper_rates() -> RateMatrices {
    RateMatrices::paper_sim()
}

/// `rho -> [h, rho]` applied directly on 4x4 matrices.
pub fn commutator(h: &CMatrix, rho: &CMatrix) -> CMatrix {
    &h.matmul(rho) - &rho.matmul(h)
}

/// Dissipator built from jump operators `|b><a|` with rate `Gamma_ab`, plus elementwise pure
/// dephasing of the coherences.
pub fn jump_dissipator(rates: &RateMatrices, rho: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(4, 4);
    for a in 0..4 {
        for b in 0..4 {
            let g = rates.relaxation[a][b];
            if g == 0.0 {
                continue;
            }
            // sigma rho sigma^H - 1/2 {sigma^H sigma, rho}, sigma = |b><a|
            for i in 0..4 {
                for j in 0..4 {
                    let mut v = C64::new(0.0, 0.0);
                    if i == b && j == b {
                        v += rho[(a, a)];
                    }
                    if i == a {
                        v -= 0.5 * rho[(a, j)];
                    }
                    if j == a {
                        v -= 0.5 * rho[(i, a)];
                    }
                    out[(i, j)] += v * g;
                }
            }
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

/// Apply a 16x16 supermatrix to a 4x4 matrix (row-major unfolding).
pub fn superop_apply(l: &CMatrix, rho: &CMatrix) -> CMatrix {
    let v = l.matvec(rho.as_slice());
    CMatrix::from_vec(4, 4, v)
}
