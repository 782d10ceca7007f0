//! Liouville-space representation: density supervectors, the Lindblad dissipator and the
//! 16x16 supermatrix blocks of the driven master equation.
//!
//! The supervector index of `rho[a][b]` is `4a + b` (zero-based, row-major). Evolution is
//! `d rho/dt = -i L rho` with `L = L0 + L1 e^{i nu t} + Lm1 e^{-i nu t}`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hamiltonian::{build_h0, build_h1, DriveParams};
use crate::linalg::{eig_hermitian, CMatrix};

pub const DIM: usize = 4;
pub const SUPER_DIM: usize = DIM * DIM;

/// Default tolerances for [`DensityMatrix::validate`].
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-8;

#[inline]
pub fn flat_index(a: usize, b: usize) -> usize {
    DIM * a + b
}

/// 4x4 density matrix. Construction through [`DensityMatrix::new`] validates the physical
/// invariants; states produced by propagation are wrapped without checks.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(m)?;
        rho.validate(HERMITIAN_TOL, TRACE_TOL, POSITIVITY_TOL)?;
        Ok(rho)
    }

    /// Wraps a 4x4 matrix, checking only its shape.
    pub fn from_matrix_unchecked(m: CMatrix) -> Result<Self> {
        if m.rows() != DIM || m.cols() != DIM {
            return Err(Error::InvalidParameter(format!(
                "density matrix must be 4x4, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(Self(m))
    }

    /// `|k><k|` in the z basis.
    pub fn basis(k: usize) -> Self {
        let mut m = CMatrix::zeros(DIM, DIM);
        m[(k, k)] = C64::new(1.0, 0.0);
        Self(m)
    }

    /// `|psi><psi|` for a state normalized on the fly.
    pub fn projector(psi: &[C64; 4]) -> Self {
        let n = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        Self(CMatrix::from_fn(DIM, DIM, |i, j| psi[i] * psi[j].conj() / (n * n)))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn get(&self, a: usize, b: usize) -> C64 {
        self.0[(a, b)]
    }

    pub fn population(&self, k: usize) -> f64 {
        self.0[(k, k)].re
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        self.0.hermiticity_deviation()
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let h = self.hermitian_part();
        Ok(eig_hermitian(&h.0)?.values[0])
    }

    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + &self.0.adjoint()).scale_real(0.5))
    }

    pub fn validate(&self, herm_tol: f64, trace_tol: f64, pos_tol: f64) -> Result<()> {
        if !self.0.is_finite() {
            return Err(Error::InvalidParameter("density matrix has non-finite entries".into()));
        }
        let herm = self.hermiticity_deviation();
        if herm > herm_tol {
            return Err(Error::InvalidParameter(format!("density matrix not Hermitian (deviation {herm:e})")));
        }
        let tr = self.trace();
        if (tr - 1.0).norm() > trace_tol {
            return Err(Error::InvalidParameter(format!("density matrix trace {tr} differs from 1")));
        }
        let lmin = self.min_eigenvalue()?;
        if lmin < -pos_tol {
            return Err(Error::InvalidParameter(format!("density matrix not positive (eigenvalue {lmin:e})")));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.max_abs_diff(&other.0)
    }
}

/// Row-major unfolding of a 4x4 operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Supervector(pub [C64; SUPER_DIM]);

impl Supervector {
    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn from_slice(v: &[C64]) -> Self {
        let mut out = [C64::new(0.0, 0.0); SUPER_DIM];
        out.copy_from_slice(v);
        Self(out)
    }

    /// Sum of the diagonal entries of the folded matrix.
    pub fn trace(&self) -> C64 {
        (0..DIM).map(|a| self.0[flat_index(a, a)]).sum()
    }
}

pub fn vectorize(rho: &DensityMatrix) -> Supervector {
    vectorize_matrix(rho.matrix())
}

pub fn vectorize_matrix(m: &CMatrix) -> Supervector {
    assert_eq!((m.rows(), m.cols()), (DIM, DIM));
    Supervector::from_slice(m.as_slice())
}

pub fn devectorize(v: &Supervector) -> DensityMatrix {
    DensityMatrix(CMatrix::from_vec(DIM, DIM, v.0.to_vec()))
}

/// Population-relaxation rates `relaxation[a][b]` (from state a to b) and symmetric pure-dephasing
/// rates `dephasing[a][b]`, both in 1/ns, indexed in the z basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateMatrices {
    pub relaxation: [[f64; DIM]; DIM],
    pub dephasing: [[f64; DIM]; DIM],
}

impl Default for RateMatrices {
    fn default() -> Self {
        Self::paper_sim()
    }
}

impl RateMatrices {
    pub fn zero() -> Self {
        Self { relaxation: [[0.0; DIM]; DIM], dephasing: [[0.0; DIM]; DIM] }
    }

    /// Rates of the simulated read-out: trion lifetime 1/1.54 ns, weak diagonal transitions,
    /// trion and spin dephasing.
    pub fn paper_sim() -> Self {
        let mut r = Self::zero();
        r.relaxation[2][0] = 1.54;
        r.relaxation[3][1] = 1.54;
        r.relaxation[3][0] = 3.42e-3;
        r.relaxation[2][1] = 3.42e-3;
        r.relaxation[1][0] = 5.0e-8;
        r.relaxation[0][1] = 5.0e-8;
        r.set_dephasing(0, 2, 1.72);
        r.set_dephasing(1, 3, 1.72);
        r.set_dephasing(0, 1, 1.26e-2);
        r
    }

    /// Sets `dephasing[a][b]` and `dephasing[b][a]`.
    pub fn set_dephasing(&mut self, a: usize, b: usize, value: f64) {
        self.dephasing[a][b] = value;
        self.dephasing[b][a] = value;
    }

    /// All rates multiplied by `2 pi` (for rates quoted as angular frequencies).
    pub fn to_angular(&self) -> Self {
        let s = std::f64::consts::TAU;
        Self {
            relaxation: self.relaxation.map(|row| row.map(|x| x * s)),
            dephasing: self.dephasing.map(|row| row.map(|x| x * s)),
        }
    }

    /// Total outgoing rate of state `a`.
    pub fn total_decay(&self, a: usize) -> f64 {
        self.relaxation[a].iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        for a in 0..DIM {
            if self.relaxation[a][a] != 0.0 {
                return Err(Error::InvalidParameter(format!("Gamma[{a}][{a}] must be zero")));
            }
            if self.dephasing[a][a] != 0.0 {
                return Err(Error::InvalidParameter(format!("gamma[{a}][{a}] must be zero")));
            }
            for b in 0..DIM {
                for (name, x) in [("Gamma", self.relaxation[a][b]), ("gamma", self.dephasing[a][b])] {
                    if !x.is_finite() || x < 0.0 {
                        return Err(Error::InvalidParameter(format!("{name}[{a}][{b}] = {x} must be finite and >= 0")));
                    }
                }
                if self.dephasing[a][b] != self.dephasing[b][a] {
                    return Err(Error::InvalidParameter(format!("gamma must be symmetric (entry {a},{b})")));
                }
            }
        }
        Ok(())
    }
}

/// Lindblad dissipator applied to `rho`: relaxation on the diagonal, relaxation-induced decay
/// plus pure dephasing on the coherences.
pub fn lindblad_apply(rates: &RateMatrices, rho: &CMatrix) -> CMatrix {
    let g = &rates.relaxation;
    CMatrix::from_fn(DIM, DIM, |a, b| {
        if a == b {
            (0..DIM).map(|q| -g[a][q] * rho[(a, a)] + g[q][a] * rho[(q, q)]).sum()
        } else {
            let decay = 0.5 * (rates.total_decay(a) + rates.total_decay(b)) + rates.dephasing[a][b];
            -decay * rho[(a, b)]
        }
    })
}

/// Supermatrix of `rho -> [h, rho]`.
pub fn commutator_superoperator(h: &CMatrix) -> CMatrix {
    assert_eq!((h.rows(), h.cols()), (DIM, DIM));
    let mut l = CMatrix::zeros(SUPER_DIM, SUPER_DIM);
    for a in 0..DIM {
        for b in 0..DIM {
            let row = flat_index(a, b);
            for m in 0..DIM {
                // H[a,m] delta_{b n}
                l[(row, flat_index(m, b))] += h[(a, m)];
                // -H[n,b] delta_{a m}
                l[(row, flat_index(a, m))] -= h[(m, b)];
            }
        }
    }
    l
}

/// Static block: commutator with `h0` plus `i` times the dissipator.
pub fn build_l0(h0: &CMatrix, rates: &RateMatrices) -> CMatrix {
    let mut l = commutator_superoperator(h0);
    let g = &rates.relaxation;
    for a in 0..DIM {
        for b in 0..DIM {
            let row = flat_index(a, b);
            if a == b {
                for m in 0..DIM {
                    l[(row, flat_index(m, m))] += C64::new(0.0, g[m][a]);
                }
                l[(row, row)] -= C64::new(0.0, rates.total_decay(a));
            } else {
                let decay = 0.5 * (rates.total_decay(a) + rates.total_decay(b)) + rates.dephasing[a][b];
                l[(row, row)] -= C64::new(0.0, decay);
            }
        }
    }
    l
}

/// Oscillating block for one harmonic of the drive (commutator only).
pub fn build_l1(h: &CMatrix) -> CMatrix {
    commutator_superoperator(h)
}

/// The three supermatrix blocks and the drive difference frequency `nu` (rad/ns).
#[derive(Debug, Clone, PartialEq)]
pub struct LiouvilleBlocks {
    pub l0: CMatrix,
    pub l1: CMatrix,
    pub lm1: CMatrix,
    pub nu: f64,
}

impl LiouvilleBlocks {
    pub fn new(p: &DriveParams, rates: &RateMatrices) -> Self {
        let h1 = build_h1(p);
        Self { l0: build_l0(&build_h0(p), rates), l1: build_l1(&h1.plus), lm1: build_l1(&h1.minus), nu: h1.nu }
    }

    /// `L(t)` at time `t`.
    pub fn at(&self, t: f64) -> CMatrix {
        let ep = C64::from_polar(1.0, self.nu * t);
        let mut l = self.l0.clone();
        l += &self.l1.scale(ep);
        l += &self.lm1.scale(ep.conj());
        l
    }

    pub fn has_drive(&self) -> bool {
        self.l1.norm_max() > 0.0 || self.lm1.norm_max() > 0.0
    }
}
