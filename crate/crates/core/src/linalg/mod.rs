//! Dense complex linear algebra sized for matrices of at most a few hundred rows.
//!
//! Everything here is a pure function of its inputs. The general (non-Hermitian) eigenproblem is
//! delegated to `faer`; the Hermitian solver, LU, matrix exponential and Kronecker product are
//! implemented directly.

mod eigen;
mod expm;
mod lu;
mod matrix;

pub use eigen::{
    eig_general, eig_general_with_limit, eig_hermitian, GeneralEigen, HermitianEigen,
    DEFAULT_CONDITION_LIMIT, HERMITIAN_RTOL,
};
pub use expm::{expm, expm_with_cap, DEFAULT_MAX_SQUARINGS};
pub use lu::{solve, Lu, SINGULAR_PIVOT_RTOL};
pub use matrix::{kron, CMatrix};
