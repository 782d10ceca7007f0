//! Dipole operator, transition dipoles between dressed states, and the branching ratio.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hamiltonian::{pseudo_faraday_eigensystem, DriveParams, LabeledEigensystem, StateLabel};
use crate::linalg::CMatrix;

/// Complex Cartesian 3-vector.
pub type Vec3 = [C64; 3];

/// Tolerance on `| |psi| - 1 |` accepted by [`transition_dipole`].
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// `q13 = (x + i y) / sqrt 2`, the sigma+ dipole of `|e,z+> <-> |t,z+>`.
pub fn q13() -> Vec3 {
    [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, FRAC_1_SQRT_2), C64::new(0.0, 0.0)]
}

/// `q24 = (x - i y) / sqrt 2`, the sigma- dipole of `|e,z-> <-> |t,z->`.
pub fn q24() -> Vec3 {
    [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, -FRAC_1_SQRT_2), C64::new(0.0, 0.0)]
}

/// Electric dipole operator in the z basis, in units of the scalar dipole moment.
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleOperator {
    /// x, y and z components.
    pub components: [CMatrix; 3],
}

pub fn dipole_operator() -> DipoleOperator {
    let (a, b) = (q13(), q24());
    let components = [0, 1, 2].map(|c| {
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 2)] = a[c];
        m[(2, 0)] = a[c].conj();
        m[(1, 3)] = b[c];
        m[(3, 1)] = b[c].conj();
        m
    });
    DipoleOperator { components }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionDipole {
    pub vector: Vec3,
}

impl TransitionDipole {
    pub fn norm_sqr(&self) -> f64 {
        self.vector.iter().map(|z| z.norm_sqr()).sum()
    }
}

fn check_normalized(psi: &[C64; 4]) -> Result<()> {
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORMALIZATION_TOL || !norm.is_finite() {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// `P_ij = <psi_i| d |psi_j>` componentwise.
pub fn transition_dipole(psi_i: &[C64; 4], psi_j: &[C64; 4]) -> Result<TransitionDipole> {
    check_normalized(psi_i)?;
    check_normalized(psi_j)?;
    let d = dipole_operator();
    let vector = [0, 1, 2].map(|c| {
        let dj = d.components[c].matvec(psi_j);
        psi_i.iter().zip(&dj).map(|(a, b)| a.conj() * b).sum()
    });
    Ok(TransitionDipole { vector })
}

/// Hermitian inner product `sum_c conj(u_c) v_c`.
pub fn dipole_overlap(u: &Vec3, v: &Vec3) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// `|P_14|^2 / |P_24|^2` with psi_1, psi_2 the electron-like z+/z- states and psi_4 the
/// trion-like z- state.
pub fn branching_ratio(p: &DriveParams) -> Result<f64> {
    branching_ratio_of(&pseudo_faraday_eigensystem(p)?)
}

pub fn branching_ratio_of(es: &LabeledEigensystem) -> Result<f64> {
    let psi1 = &es.state(StateLabel::ElectronZPlus).vector;
    let psi2 = &es.state(StateLabel::ElectronZMinus).vector;
    let psi4 = &es.state(StateLabel::TrionZMinus).vector;
    let flip = transition_dipole(psi1, psi4)?.norm_sqr();
    let keep = transition_dipole(psi2, psi4)?.norm_sqr();
    if keep == 0.0 {
        return Err(Error::DivisionByZero);
    }
    Ok(flip / keep)
}

/// `P_{e,4}^* . P_{e,3}` for the electron-like state `electron`: the cross term that would drive
/// coherence between the two trion-like states through a shared decay channel.
pub fn beta_coupling_of(es: &LabeledEigensystem, electron: StateLabel) -> Result<C64> {
    let e = &es.state(electron).vector;
    let p3 = transition_dipole(e, &es.state(StateLabel::TrionZPlus).vector)?;
    let p4 = transition_dipole(e, &es.state(StateLabel::TrionZMinus).vector)?;
    Ok(dipole_overlap(&p4.vector, &p3.vector))
}

/// Cross term for the electron-like z+ state.
pub fn beta_coupling(p: &DriveParams) -> Result<C64> {
    beta_coupling_of(&pseudo_faraday_eigensystem(p)?, StateLabel::ElectronZPlus)
}

/// Solid-angle integral of `(u . e_k)(v . e_k)` with polarization averaged over the two
/// transverse directions: `(4 pi / 3) u . v` (bilinear, no conjugation).
pub fn angular_overlap_integral(u: &Vec3, v: &Vec3) -> C64 {
    let dot: C64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    dot * (4.0 * PI / 3.0)
}

const EPSILON_0: f64 = 8.8541878128e-12;
const HBAR: f64 = 1.054571817e-34;
const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Spontaneous emission rate (1/s) of a transition at angular frequency `omega` (rad/s) with
/// squared dipole `p_sqr` (C^2 m^2).
pub fn spontaneous_rate(omega: f64, p_sqr: f64) -> f64 {
    4.0 * omega.powi(3) * p_sqr / (4.0 * PI * EPSILON_0 * 3.0 * HBAR * SPEED_OF_LIGHT.powi(3))
}
