//! Truncated Floquet-Liouville propagation.
//!
//! The periodically driven generator is lifted to a time-independent block-tridiagonal matrix on
//! Fourier harmonics `m = +M .. -M` (top to bottom). The initial supervector sits in the `m = 0`
//! slot; the physical state is recovered as `sum_m e^{i m nu t} rho^(m)(t)`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, LinalgError, Result};
use crate::linalg::{eig_general_with_limit, expm, CMatrix, GeneralEigen, DEFAULT_CONDITION_LIMIT};
use crate::liouville::{devectorize, vectorize, DensityMatrix, LiouvilleBlocks, SUPER_DIM};

/// `|Tr rho - 1|` above which [`FloquetOperator::propagate`] fails instead of renormalizing.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;

/// Assembles `L_F` for truncation order `m`.
pub fn build_lf(l0: &CMatrix, l1: &CMatrix, lm1: &CMatrix, nu: f64, m: usize) -> CMatrix {
    let blocks = 2 * m + 1;
    let mut lf = CMatrix::zeros(SUPER_DIM * blocks, SUPER_DIM * blocks);
    for k in 0..blocks {
        let harmonic = m as f64 - k as f64;
        let mut diag = l0.clone();
        for i in 0..SUPER_DIM {
            diag[(i, i)] += harmonic * nu;
        }
        lf.set_block(SUPER_DIM * k, SUPER_DIM * k, &diag);
        if k + 1 < blocks {
            lf.set_block(SUPER_DIM * k, SUPER_DIM * (k + 1), l1);
            lf.set_block(SUPER_DIM * (k + 1), SUPER_DIM * k, lm1);
        }
    }
    lf
}

/// How `exp(-i L_F t)` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PropagationRoute {
    /// Eigendecomposition of `-i L_F`; carries the estimated condition number of the eigenvectors.
    Spectral { condition: f64 },
    /// Pade scaling-and-squaring at every requested time.
    Expm,
}

#[derive(Debug, Clone)]
enum Engine {
    Spectral(GeneralEigen),
    Expm(CMatrix),
}

/// Factorized Floquet-Liouville generator. Immutable once built; safe to share across threads.
#[derive(Debug, Clone)]
pub struct FloquetOperator {
    m: usize,
    nu: f64,
    lf: CMatrix,
    engine: Engine,
}

impl FloquetOperator {
    pub fn new(blocks: &LiouvilleBlocks, m: usize) -> Result<Self> {
        Self::with_condition_limit(blocks, m, DEFAULT_CONDITION_LIMIT)
    }

    /// Falls back to the matrix exponential when the eigenvector condition estimate exceeds
    /// `condition_limit` or the eigensolver fails.
    pub fn with_condition_limit(blocks: &LiouvilleBlocks, m: usize, condition_limit: f64) -> Result<Self> {
        let lf = build_lf(&blocks.l0, &blocks.l1, &blocks.lm1, blocks.nu, m);
        let generator = lf.scale(C64::new(0.0, -1.0));
        let engine = match eig_general_with_limit(&generator, condition_limit) {
            Ok(eig) => Engine::Spectral(eig),
            Err(e @ (LinalgError::IllConditioned { .. } | LinalgError::NoConvergence { .. })) => {
                log::warn!("spectral factorization of L_F rejected ({e}); using matrix exponential");
                Engine::Expm(generator)
            }
            Err(e) => return Err(e.into()),
        };
        Ok(Self { m, nu: blocks.nu, lf, engine })
    }

    /// Operator that always evaluates the propagator by matrix exponential.
    pub fn new_expm(blocks: &LiouvilleBlocks, m: usize) -> Self {
        let lf = build_lf(&blocks.l0, &blocks.l1, &blocks.lm1, blocks.nu, m);
        let generator = lf.scale(C64::new(0.0, -1.0));
        Self { m, nu: blocks.nu, lf, engine: Engine::Expm(generator) }
    }

    pub fn truncation(&self) -> usize {
        self.m
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn dim(&self) -> usize {
        self.lf.rows()
    }

    pub fn lf(&self) -> &CMatrix {
        &self.lf
    }

    pub fn route(&self) -> PropagationRoute {
        match &self.engine {
            Engine::Spectral(e) => PropagationRoute::Spectral { condition: e.condition_estimate },
            Engine::Expm(_) => PropagationRoute::Expm,
        }
    }

    fn embed(&self, rho0: &DensityMatrix) -> Vec<C64> {
        let mut x = vec![C64::new(0.0, 0.0); self.dim()];
        let start = SUPER_DIM * self.m;
        x[start..start + SUPER_DIM].copy_from_slice(&vectorize(rho0).0);
        x
    }

    fn project(&self, y: &[C64], t: f64) -> DensityMatrix {
        let mut out = [C64::new(0.0, 0.0); SUPER_DIM];
        for k in 0..(2 * self.m + 1) {
            let harmonic = self.m as f64 - k as f64;
            let phase = C64::from_polar(1.0, harmonic * self.nu * t);
            for (o, v) in out.iter_mut().zip(&y[SUPER_DIM * k..SUPER_DIM * (k + 1)]) {
                *o += phase * v;
            }
        }
        devectorize(&crate::liouville::Supervector(out))
    }

    /// Precomputes what is needed to evaluate `rho(t)` for one initial state.
    pub fn prepare(&self, rho0: &DensityMatrix) -> PreparedState<'_> {
        let x = self.embed(rho0);
        let coefficients = match &self.engine {
            Engine::Spectral(eig) => eig.coefficients(&x),
            Engine::Expm(_) => x,
        };
        PreparedState { op: self, coefficients }
    }

    /// `rho(t)` straight from the projection, without cleanup.
    pub fn propagate_raw(&self, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        self.prepare(rho0).raw(t)
    }

    /// `rho(t)` re-Hermitized and renormalized to unit trace.
    pub fn propagate(&self, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        self.prepare(rho0).clean(t)
    }

    /// Cleaned states at each of `times` (ascending, >= 0), evaluated in parallel.
    pub fn propagate_batch(&self, rho0: &DensityMatrix, times: &[f64]) -> Result<Vec<DensityMatrix>> {
        check_times(times)?;
        let prepared = self.prepare(rho0);
        times.par_iter().map(|&t| prepared.clean(t)).collect()
    }

    pub fn propagate_batch_raw(&self, rho0: &DensityMatrix, times: &[f64]) -> Result<Vec<DensityMatrix>> {
        check_times(times)?;
        let prepared = self.prepare(rho0);
        times.par_iter().map(|&t| prepared.raw(t)).collect()
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidParameter("propagation times must be sorted ascending".into()));
    }
    Ok(())
}

/// A Floquet operator bound to one initial state.
#[derive(Debug, Clone)]
pub struct PreparedState<'a> {
    op: &'a FloquetOperator,
    coefficients: Vec<C64>,
}

impl PreparedState<'_> {
    pub fn raw(&self, t: f64) -> Result<DensityMatrix> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("propagation time must be finite and >= 0 (got {t})")));
        }
        let y = match &self.op.engine {
            Engine::Spectral(eig) => {
                let scaled: Vec<C64> =
                    eig.values.iter().zip(&self.coefficients).map(|(mu, c)| (mu * t).exp() * c).collect();
                eig.vectors.matvec(&scaled)
            }
            Engine::Expm(generator) => {
                let u = expm(&generator.scale_real(t))?;
                u.matvec(&self.coefficients)
            }
        };
        Ok(self.op.project(&y, t))
    }

    pub fn clean(&self, t: f64) -> Result<DensityMatrix> {
        let rho = self.raw(t)?;
        let drift = (rho.trace() - 1.0).norm();
        if drift > TRACE_DRIFT_LIMIT || !drift.is_finite() {
            return Err(Error::TraceDrift { drift, t });
        }
        let h = rho.hermitian_part();
        let tr = h.trace().re;
        DensityMatrix::from_matrix_unchecked(h.into_matrix().scale_real(1.0 / tr))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationOptions {
    pub m_max: usize,
    pub tol: f64,
    /// Times (ns) at which successive truncation orders are compared.
    pub probe_times: Vec<f64>,
}

impl Default for TruncationOptions {
    fn default() -> Self {
        Self { m_max: 6, tol: 1e-8, probe_times: vec![1.0, 10.0, 100.0] }
    }
}

#[derive(Debug, Clone)]
pub struct TruncationReport {
    pub m: usize,
    /// `max |rho_M - rho_{M+1}|` over probes and entries, for each order tried.
    pub differences: Vec<f64>,
    /// Factorized operator at the converged order.
    pub operator: FloquetOperator,
}

/// Smallest truncation order whose states agree with the next order to within `opts.tol`.
pub fn converge_truncation(
    blocks: &LiouvilleBlocks,
    rho0: &DensityMatrix,
    opts: &TruncationOptions,
) -> Result<TruncationReport> {
    converge_truncation_multi(blocks, std::slice::from_ref(rho0), opts)
}

/// As [`converge_truncation`], requiring agreement for every initial state in `rho0s`.
pub fn converge_truncation_multi(
    blocks: &LiouvilleBlocks,
    rho0s: &[DensityMatrix],
    opts: &TruncationOptions,
) -> Result<TruncationReport> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("truncation tolerance must be > 0 (got {})", opts.tol)));
    }
    let probes = sorted(&opts.probe_times);
    let states = |op: &FloquetOperator| -> Result<Vec<DensityMatrix>> {
        let mut out = Vec::new();
        for rho0 in rho0s {
            out.extend(op.propagate_batch_raw(rho0, &probes)?);
        }
        Ok(out)
    };
    let mut current = FloquetOperator::new(blocks, 0)?;
    let mut current_states = states(&current)?;
    let mut differences = Vec::new();
    for m in 0..=opts.m_max {
        let next = FloquetOperator::new(blocks, m + 1)?;
        let next_states = states(&next)?;
        let diff = current_states
            .iter()
            .zip(&next_states)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max);
        differences.push(diff);
        log::debug!("truncation M={m}: max |rho_M - rho_M+1| = {diff:e}");
        if diff <= opts.tol {
            return Ok(TruncationReport { m, differences, operator: current });
        }
        current = next;
        current_states = next_states;
    }
    Err(Error::NoConvergence {
        what: "Floquet truncation",
        detail: format!(
            "no M <= {} met tolerance {:e}; last difference {:e}",
            opts.m_max,
            opts.tol,
            differences.last().copied().unwrap_or(f64::NAN)
        ),
    })
}

fn sorted(times: &[f64]) -> Vec<f64> {
    let mut t = times.to_vec();
    t.sort_by(f64::total_cmp);
    t
}
