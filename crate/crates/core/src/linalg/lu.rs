use num_complex::Complex64 as C64;

use super::CMatrix;
use crate::error::LinalgError;

/// Relative pivot threshold below which a matrix is reported singular.
pub const SINGULAR_PIVOT_RTOL: f64 = 1e-13;

/// LU factorization with partial (row) pivoting, `P a = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    // L (unit lower, implicit diagonal) and U packed together, row-major.
    lu: Vec<C64>,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &CMatrix) -> Result<Self, LinalgError> {
        let n = a.ensure_square()?;
        let scale = a.norm_one();
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmag) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pmag > SINGULAR_PIVOT_RTOL * scale) || scale == 0.0 {
                return Err(LinalgError::Singular { pivot: pmag.max(0.0), column: k });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                if f.re == 0.0 && f.im == 0.0 {
                    continue;
                }
                for j in (k + 1)..n {
                    let u = lu[k * n + j];
                    lu[i * n + j] -= f * u;
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `a x = b` for a single right-hand side.
    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    pub fn solve(&self, b: &CMatrix) -> Result<CMatrix, LinalgError> {
        if b.rows() != self.n {
            return Err(LinalgError::DimensionMismatch(format!(
                "solve: rhs has {} rows, system has {}",
                b.rows(),
                self.n
            )));
        }
        let mut x = CMatrix::zeros(self.n, b.cols());
        for j in 0..b.cols() {
            let col = self.solve_vec(&b.column(j));
            x.set_column(j, &col);
        }
        Ok(x)
    }

    pub fn inverse(&self) -> CMatrix {
        self.solve(&CMatrix::identity(self.n)).expect("square identity rhs")
    }
}

/// Solves `a x = b` by pivoted LU.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, LinalgError> {
    Lu::factor(a)?.solve(b)
}
