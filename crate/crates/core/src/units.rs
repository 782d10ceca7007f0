//! Unit conventions and physical constants.
//!
//! Inputs are quoted as ordinary frequencies `f = omega / 2pi` in GHz. Internally every energy is
//! an angular frequency in rad/ns (`hbar = 1`) and every time is in ns, so `1 GHz` maps to
//! `2pi rad/ns`.

use std::f64::consts::TAU;

/// Bohr magneton, J/T (CODATA 2018).
pub const BOHR_MAGNETON_J_PER_T: f64 = 9.274_010_078_3e-24;

/// Planck constant, J s (exact in the 2019 SI).
pub const PLANCK_J_S: f64 = 6.626_070_15e-34;

/// `mu_B / h` in GHz/T, derived from the two constants above (about 13.996245).
pub const BOHR_MAGNETON_GHZ_PER_T: f64 = BOHR_MAGNETON_J_PER_T / PLANCK_J_S * 1e-9;

/// GHz (ordinary frequency) to rad/ns.
#[inline]
pub fn ghz_to_angular(f_ghz: f64) -> f64 {
    TAU * f_ghz
}

/// rad/ns to GHz (ordinary frequency).
#[inline]
pub fn angular_to_ghz(omega: f64) -> f64 {
    omega / TAU
}

/// Zeeman coupling `mu_B B g / hbar` in rad/ns.
#[inline]
pub fn zeeman_angular(b_tesla: f64, g: f64) -> f64 {
    TAU * BOHR_MAGNETON_GHZ_PER_T * b_tesla * g
}

/// Spin precession timescale `hbar / delta_e` in ns, with `delta_e = 2 mu_B g B`.
///
/// The AC Stark laser must ramp up slowly compared to this for the Voigt eigenstates to map
/// adiabatically onto the dressed eigenstates.
pub fn adiabatic_timescale_ns(b_tesla: f64, g_e: f64) -> f64 {
    1.0 / (2.0 * zeeman_angular(b_tesla, g_e))
}
