//! Simulation of optical spin read-out for an electron in a charged quantum dot.
//!
//! A Voigt-geometry magnetic field mixes the electron spin states, which destroys the cycling
//! transitions needed for single-shot fluorescence read-out. A strong, far red-detuned,
//! circularly polarized laser shifts only one spin manifold through the AC Stark effect and
//! restores Faraday-like selection rules. This crate builds the four-level rotating-frame model,
//! propagates the density matrix with a truncated Floquet-Liouville supermatrix, and evaluates
//! branching ratios, photon counts and read-out fidelity.
//!
//! Conventions: frequencies at the API boundary are `f = omega / 2pi` in GHz; internally all
//! energies are angular frequencies in rad/ns with `hbar = 1`, and times are in ns.

pub mod error;
pub mod floquet;
pub mod hamiltonian;
pub mod linalg;
pub mod liouville;
pub mod ode;
pub mod optics;
pub mod readout;
pub mod units;
pub mod validation;

pub use num_complex::Complex64 as C64;

pub use error::{Error, LinalgError, Result};
pub use floquet::{FloquetOperator, PropagationRoute, TruncationOptions};
pub use hamiltonian::{DriveParams, LabeledEigensystem, ReadoutTarget, StateLabel};
pub use linalg::CMatrix;
pub use liouville::{DensityMatrix, LiouvilleBlocks, RateMatrices, Supervector};
pub use readout::{Dataset, ProbabilityModel, ReadoutConfig, ReadoutResult};
