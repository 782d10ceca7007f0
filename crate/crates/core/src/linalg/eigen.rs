use num_complex::Complex64 as C64;

use super::{CMatrix, Lu};
use crate::error::LinalgError;

/// Relative Hermiticity tolerance accepted by [`eig_hermitian`].
pub const HERMITIAN_RTOL: f64 = 1e-10;

/// Default `cond(V)` above which [`eig_general`] reports [`LinalgError::IllConditioned`].
pub const DEFAULT_CONDITION_LIMIT: f64 = 1e8;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigensystem of a Hermitian matrix: ascending real eigenvalues and orthonormal eigenvector
/// columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Eigenvalues are sorted ascending. Each eigenvector is phased so that its largest-magnitude
/// component (first one on ties) is real and positive, which makes the output deterministic.
pub fn eig_hermitian(a: &CMatrix) -> Result<HermitianEigen, LinalgError> {
    let n = a.ensure_square()?;
    let scale = a.norm_max();
    let deviation = a.hermiticity_deviation();
    if deviation > HERMITIAN_RTOL * scale {
        return Err(LinalgError::NotHermitian { deviation });
    }
    // symmetrize so the rotations see an exactly Hermitian matrix
    let mut w = CMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)].conj()));
    for i in 0..n {
        w[(i, i)] = C64::new(w[(i, i)].re, 0.0);
    }
    let mut v = CMatrix::identity(n);
    let target = f64::EPSILON * w.norm_frobenius();

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| w[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut w, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence { routine: "eig_hermitian", iterations: JACOBI_MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(i, i)].re.total_cmp(&w[(j, j)].re));
    let values: Vec<f64> = order.iter().map(|&k| w[(k, k)].re).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        fix_phase(&mut col);
        vectors.set_column(dst, &col);
    }
    if !vectors.is_finite() || values.iter().any(|x| !x.is_finite()) {
        return Err(LinalgError::NonFinite("eig_hermitian"));
    }
    Ok(HermitianEigen { values, vectors })
}

fn rotate(w: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = w[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = w[(p, p)].re;
    let aqq = w[(q, q)].re;
    // negligible against both diagonal entries: drop it
    if r <= f64::EPSILON * 1e-3 * (app.abs().min(aqq.abs())) {
        w[(p, q)] = C64::new(0.0, 0.0);
        w[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let pc = phase.conj();
    // G = [[c, s], [-s conj(e), c conj(e)]] on the (p, q) plane
    let g00 = C64::new(c, 0.0);
    let g01 = C64::new(s, 0.0);
    let g10 = -s * pc;
    let g11 = c * pc;
    let n = w.rows();
    for k in 0..n {
        let (akp, akq) = (w[(k, p)], w[(k, q)]);
        w[(k, p)] = akp * g00 + akq * g10;
        w[(k, q)] = akp * g01 + akq * g11;
    }
    for k in 0..n {
        let (apk, aqk) = (w[(p, k)], w[(q, k)]);
        w[(p, k)] = g00.conj() * apk + g10.conj() * aqk;
        w[(q, k)] = g01.conj() * apk + g11.conj() * aqk;
    }
    w[(p, q)] = C64::new(0.0, 0.0);
    w[(q, p)] = C64::new(0.0, 0.0);
    w[(p, p)] = C64::new(app - t * r, 0.0);
    w[(q, q)] = C64::new(aqq + t * r, 0.0);
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * g00 + vkq * g10;
        v[(k, q)] = vkp * g01 + vkq * g11;
    }
}

/// Normalizes to unit length and rotates the global phase so the dominant component is real
/// and positive.
pub(crate) fn fix_phase(col: &mut [C64]) {
    let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return;
    }
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in col.iter().enumerate() {
        // small slack so exact ties resolve to the lowest index
        if z.norm() > best_mag * (1.0 + 1e-12) {
            best = i;
            best_mag = z.norm();
        }
    }
    let rot = col[best].conj() / (col[best].norm() * norm);
    for z in col.iter_mut() {
        *z *= rot;
    }
}

/// Eigensystem of a general complex matrix with its factorized right-eigenvector matrix.
#[derive(Debug, Clone)]
pub struct GeneralEigen {
    pub values: Vec<C64>,
    /// Unit-norm right eigenvectors as columns.
    pub vectors: CMatrix,
    /// One-norm condition number estimate of `vectors`.
    pub condition_estimate: f64,
    /// `max |a V - V diag(values)| / |a|_1`.
    pub residual: f64,
    lu: Lu,
}

impl GeneralEigen {
    /// Coefficients `c` with `V c = x`.
    pub fn coefficients(&self, x: &[C64]) -> Vec<C64> {
        self.lu.solve_vec(x)
    }

    /// Rebuilds `V diag(values) V^{-1}`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        let vl = CMatrix::from_fn(n, n, |i, j| self.vectors[(i, j)] * self.values[j]);
        let vinv = self.lu.inverse();
        vl.matmul(&vinv)
    }
}

/// General eigendecomposition with the default conditioning limit.
pub fn eig_general(a: &CMatrix) -> Result<GeneralEigen, LinalgError> {
    eig_general_with_limit(a, DEFAULT_CONDITION_LIMIT)
}

/// General (non-Hermitian) eigendecomposition.
///
/// Fails with [`LinalgError::IllConditioned`] when the eigenvector matrix is numerically
/// singular or its condition estimate exceeds `condition_limit`, which is the caller's cue to
/// fall back to [`crate::linalg::expm`].
pub fn eig_general_with_limit(a: &CMatrix, condition_limit: f64) -> Result<GeneralEigen, LinalgError> {
    let n = a.ensure_square()?;
    if n == 0 {
        return Err(LinalgError::DimensionMismatch("eig_general: empty matrix".into()));
    }
    if !a.is_finite() {
        return Err(LinalgError::NonFinite("eig_general input"));
    }
    let m = faer::Mat::<faer::c64>::from_fn(n, n, |i, j| a[(i, j)]);
    let evd = m
        .eigen()
        .map_err(|_| LinalgError::NoConvergence { routine: "eig_general", iterations: 0 })?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let values: Vec<C64> = (0..n).map(|i| s[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut col: Vec<C64> = (0..n).map(|i| u[(i, j)]).collect();
        fix_phase(&mut col);
        vectors.set_column(j, &col);
    }
    if !vectors.is_finite() || values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(LinalgError::NonFinite("eig_general"));
    }
    let lu = match Lu::factor(&vectors) {
        Ok(lu) => lu,
        Err(LinalgError::Singular { .. }) => {
            return Err(LinalgError::IllConditioned { estimate: f64::INFINITY })
        }
        Err(e) => return Err(e),
    };
    let condition_estimate = vectors.norm_one() * lu.inverse().norm_one();
    if !(condition_estimate <= condition_limit) {
        return Err(LinalgError::IllConditioned { estimate: condition_estimate });
    }
    let av = a.matmul(&vectors);
    let mut residual = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            residual = residual.max((av[(i, j)] - vectors[(i, j)] * values[j]).norm());
        }
    }
    let anorm = a.norm_one();
    let residual = if anorm > 0.0 { residual / anorm } else { residual };
    Ok(GeneralEigen { values, vectors, condition_estimate, residual, lu })
}
