//! Rotating-frame Hamiltonian of the negatively charged dot and its eigensystems.
//!
//! Basis ordering (index 0..4): `|e,z+>`, `|e,z->`, `|t,z+>`, `|t,z->`. The far-detuned AC Stark
//! laser is sigma+ polarized (it couples only `|e,z+> <-> |t,z+>`) and its Rabi frequency is real.

use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, CMatrix};
use crate::units::{ghz_to_angular, zeeman_angular};

/// Ratio `|Omega_1+ / Delta_1|` above which the large-detuning picture is questionable.
pub const LARGE_DETUNING_WARN_RATIO: f64 = 0.2;

/// Slack on the 0.5 overlap threshold so exact Voigt-limit ties still label.
pub const LABEL_OVERLAP_SLACK: f64 = 1e-9;

/// Drive and material parameters. Frequencies are `omega / 2pi` in GHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    /// In-plane (Voigt) magnetic field, T.
    pub b_x: f64,
    pub g_ex: f64,
    pub g_hx: f64,
    /// Rabi frequency of the sigma+ AC Stark laser (real, >= 0).
    pub omega1p_ghz: f64,
    /// Detuning `omega_0 - omega_1` of the AC Stark laser.
    pub delta1_ghz: f64,
    /// Complex Rabi frequencies of the near-resonant read-out laser.
    pub omega2p_ghz: C64,
    pub omega2m_ghz: C64,
    /// Detuning `omega_0 - omega_2` of the read-out laser.
    pub delta2_ghz: f64,
}

impl Default for DriveParams {
    fn default() -> Self {
        Self::readout_preset()
    }
}

impl DriveParams {
    /// Parameters of the simulated read-out: 0.1 T, 200 GHz Rabi frequency at 2 THz detuning,
    /// 0.5 GHz read-out Rabi frequencies, `g_e = 0.24`, `g_h = 0.47`.
    ///
    /// `delta2_ghz` is zero here; use [`DriveParams::tuned_to`] to place the read-out laser on a
    /// cycling transition.
    pub fn readout_preset() -> Self {
        Self {
            b_x: 0.1,
            g_ex: 0.24,
            g_hx: 0.47,
            omega1p_ghz: 200.0,
            delta1_ghz: 2000.0,
            omega2p_ghz: C64::new(0.5, 0.0),
            omega2m_ghz: C64::new(0.5, 0.0),
            delta2_ghz: 0.0,
        }
    }

    /// Parameters of the branching-ratio study: as the read-out preset but with
    /// `g_e = 0.47`, `g_h = 0.24` and no read-out laser.
    pub fn branching_preset() -> Self {
        Self {
            g_ex: 0.47,
            g_hx: 0.24,
            omega2p_ghz: C64::new(0.0, 0.0),
            omega2m_ghz: C64::new(0.0, 0.0),
            ..Self::readout_preset()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.b_x, self.g_ex, self.g_hx, self.omega1p_ghz, self.delta1_ghz, self.delta2_ghz]
            .iter()
            .chain(&[self.omega2p_ghz.re, self.omega2p_ghz.im, self.omega2m_ghz.re, self.omega2m_ghz.im])
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("drive parameters must be finite".into()));
        }
        if self.b_x < 0.0 {
            return Err(Error::InvalidParameter(format!("B_x must be >= 0 (got {})", self.b_x)));
        }
        if self.omega1p_ghz < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Omega1p must be real and >= 0 (got {})",
                self.omega1p_ghz
            )));
        }
        Ok(())
    }

    /// Non-fatal diagnostics about the parameter regime.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.omega1p_ghz > 0.0 {
            let ratio = if self.delta1_ghz == 0.0 {
                f64::INFINITY
            } else {
                (self.omega1p_ghz / self.delta1_ghz).abs()
            };
            if ratio > LARGE_DETUNING_WARN_RATIO {
                out.push(format!(
                    "|Omega1p/Delta1| = {ratio:.3} exceeds {LARGE_DETUNING_WARN_RATIO}; AC Stark mixing is not small"
                ));
            }
        }
        out
    }

    /// Copy with `delta2_ghz` set so the read-out laser is resonant with `target`.
    pub fn tuned_to(&self, target: ReadoutTarget) -> Result<Self> {
        Ok(Self { delta2_ghz: resonant_detuning_for_readout(self, target)?, ..*self })
    }
}

/// Which cycling transition the read-out laser addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReadoutTarget {
    ZMinus,
    ZPlus,
}

impl ReadoutTarget {
    pub fn electron(self) -> StateLabel {
        match self {
            Self::ZMinus => StateLabel::ElectronZMinus,
            Self::ZPlus => StateLabel::ElectronZPlus,
        }
    }

    pub fn trion(self) -> StateLabel {
        match self {
            Self::ZMinus => StateLabel::TrionZMinus,
            Self::ZPlus => StateLabel::TrionZPlus,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Self::ZMinus => Self::ZPlus,
            Self::ZPlus => Self::ZMinus,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::ZMinus => "z-",
            Self::ZPlus => "z+",
        }
    }
}

impl fmt::Display for ReadoutTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ReadoutTarget {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "z-" | "z_minus" | "zminus" => Ok(Self::ZMinus),
            "z+" | "z_plus" | "zplus" => Ok(Self::ZPlus),
            other => Err(Error::InvalidParameter(format!("unknown read-out target '{other}' (expected z- or z+)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateLabel {
    ElectronZPlus,
    ElectronZMinus,
    TrionZPlus,
    TrionZMinus,
    ElectronXPlus,
    ElectronXMinus,
    TrionXPlus,
    TrionXMinus,
}

impl StateLabel {
    /// z-basis labels in basis-index order.
    pub const Z_BASIS: [StateLabel; 4] =
        [Self::ElectronZPlus, Self::ElectronZMinus, Self::TrionZPlus, Self::TrionZMinus];

    pub fn is_trion(self) -> bool {
        matches!(self, Self::TrionZPlus | Self::TrionZMinus | Self::TrionXPlus | Self::TrionXMinus)
    }

    pub fn is_electron(self) -> bool {
        !self.is_trion()
    }

    /// Index of the matching unperturbed basis state, for z labels.
    pub fn basis_index(self) -> Option<usize> {
        Self::Z_BASIS.iter().position(|&l| l == self)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::ElectronZPlus => "e,z+",
            Self::ElectronZMinus => "e,z-",
            Self::TrionZPlus => "t,z+",
            Self::TrionZMinus => "t,z-",
            Self::ElectronXPlus => "e,x+",
            Self::ElectronXMinus => "e,x-",
            Self::TrionXPlus => "t,x+",
            Self::TrionXMinus => "t,x-",
        }
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One eigenpair of the rotating-frame Hamiltonian; `value` in rad/ns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenState {
    pub value: f64,
    pub vector: [C64; 4],
    pub label: StateLabel,
}

impl EigenState {
    pub fn projector(&self) -> CMatrix {
        CMatrix::from_fn(4, 4, |i, j| self.vector[i] * self.vector[j].conj())
    }
}

/// Four labeled eigenstates; the labels are a permutation of one label family.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledEigensystem {
    pub states: [EigenState; 4],
}

impl LabeledEigensystem {
    pub fn get(&self, label: StateLabel) -> Option<&EigenState> {
        self.states.iter().find(|s| s.label == label)
    }

    /// *Panics* if the label is absent.
    pub fn state(&self, label: StateLabel) -> &EigenState {
        self.get(label).unwrap_or_else(|| panic!("eigensystem has no state labeled {label}"))
    }

    pub fn values(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|k| self.states[k].value)
    }
}

/// Time-independent rotating-frame Hamiltonian `H0` in rad/ns.
pub fn build_h0(p: &DriveParams) -> CMatrix {
    let d = ghz_to_angular(p.delta1_ghz);
    let ze = zeeman_angular(p.b_x, p.g_ex);
    let zh = zeeman_angular(p.b_x, p.g_hx);
    let o = ghz_to_angular(p.omega1p_ghz);
    let r = |x: f64| C64::new(x, 0.0);
    CMatrix::from_rows(&[
        [r(-d / 2.0), r(ze), r(o / 2.0), r(0.0)],
        [r(ze), r(-d / 2.0), r(0.0), r(0.0)],
        [r(o / 2.0), r(0.0), r(d / 2.0), r(-zh)],
        [r(0.0), r(0.0), r(-zh), r(d / 2.0)],
    ])
}

/// Harmonic components of the read-out laser term, `H(t) = H0 + plus e^{i nu t} + minus e^{-i nu t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatingHamiltonian {
    pub plus: CMatrix,
    pub minus: CMatrix,
    /// `2pi (Delta_2 - Delta_1)`, rad/ns.
    pub nu: f64,
}

pub fn build_h1(p: &DriveParams) -> OscillatingHamiltonian {
    let mut plus = CMatrix::zeros(4, 4);
    plus[(2, 0)] = p.omega2p_ghz.conj() * ghz_to_angular(0.5);
    plus[(3, 1)] = p.omega2m_ghz.conj() * ghz_to_angular(0.5);
    let minus = plus.adjoint();
    let nu = ghz_to_angular(p.delta2_ghz - p.delta1_ghz);
    OscillatingHamiltonian { plus, minus, nu }
}

/// Hamiltonian at time `t` (ns) in the frame rotating with the AC Stark laser.
pub fn hamiltonian_at(h0: &CMatrix, h1: &OscillatingHamiltonian, t: f64) -> CMatrix {
    let ep = C64::from_polar(1.0, h1.nu * t);
    let mut h = h0.clone();
    h += &h1.plus.scale(ep);
    h += &h1.minus.scale(ep.conj());
    h
}

/// Assigns z-basis labels by maximizing the summed squared overlap with the unperturbed basis
/// over all 24 bijections.
fn label_by_overlap(values: [f64; 4], vectors: [[C64; 4]; 4]) -> Result<LabeledEigensystem> {
    let weight = |basis: usize, k: usize| vectors[k][basis].norm_sqr();
    let mut best: Option<([usize; 4], f64)> = None;
    for perm in permutations4() {
        let total: f64 = (0..4).map(|k| weight(perm[k], k)).sum();
        // strict improvement only, so ties keep the first permutation
        if best.is_none_or(|(_, b)| total > b + 1e-14) {
            best = Some((perm, total));
        }
    }
    let (perm, _) = best.expect("24 permutations");
    let min_overlap = (0..4).map(|k| weight(perm[k], k)).fold(f64::INFINITY, f64::min);
    if min_overlap < 0.5 - LABEL_OVERLAP_SLACK {
        return Err(Error::AmbiguousLabeling { min_overlap });
    }
    let states = [0, 1, 2, 3].map(|k| EigenState {
        value: values[k],
        vector: vectors[k],
        label: StateLabel::Z_BASIS[perm[k]],
    });
    Ok(LabeledEigensystem { states })
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|i| p.contains(&i)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Analytic eigensystem of the Zeeman-only Hamiltonian (`Omega_1+ = 0`, `Delta_1 = 0`), labeled by
/// x-projection. The stored AC Stark parameters are ignored. With no Zeeman coupling at all the
/// z basis is returned.
pub fn zeeman_eigensystem(p: &DriveParams) -> LabeledEigensystem {
    let ze = zeeman_angular(p.b_x, p.g_ex);
    let zh = zeeman_angular(p.b_x, p.g_hx);
    let z = C64::new(0.0, 0.0);
    if ze == 0.0 && zh == 0.0 {
        let states = [0, 1, 2, 3].map(|k| {
            let mut v = [z; 4];
            v[k] = C64::new(1.0, 0.0);
            EigenState { value: 0.0, vector: v, label: StateLabel::Z_BASIS[k] }
        });
        return LabeledEigensystem { states };
    }
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    LabeledEigensystem {
        states: [
            EigenState { value: -ze, vector: [h, -h, z, z], label: StateLabel::ElectronXMinus },
            EigenState { value: ze, vector: [h, h, z, z], label: StateLabel::ElectronXPlus },
            EigenState { value: -zh, vector: [z, z, h, h], label: StateLabel::TrionXPlus },
            EigenState { value: zh, vector: [z, z, h, -h], label: StateLabel::TrionXMinus },
        ],
    }
}

/// Closed-form eigensystem of the AC Stark Hamiltonian with no magnetic field.
#[derive(Debug, Clone, PartialEq)]
pub struct AcStarkExact {
    /// Generalized Rabi frequency `sqrt(Delta_1^2 + Omega_1+^2)`, rad/ns.
    pub generalized_rabi: f64,
    pub eigensystem: LabeledEigensystem,
}

impl AcStarkExact {
    /// Shift of the z+ transition frequency away from `omega_0`, rad/ns.
    pub fn transition_shift(&self, delta1: f64) -> f64 {
        let e = self.eigensystem.state(StateLabel::ElectronZPlus).value;
        let t = self.eigensystem.state(StateLabel::TrionZPlus).value;
        (t - e) - delta1
    }

    /// Shift of the trion-like z+ level relative to `omega_0`, rad/ns.
    pub fn trion_shift(&self, delta1: f64) -> f64 {
        self.eigensystem.state(StateLabel::TrionZPlus).value - delta1 / 2.0
    }
}

/// First-order (in `Omega_1+ / Delta_1`) AC Stark energies and unnormalized eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct AcStarkFirstOrder {
    /// Electron z+ energy, rad/ns.
    pub e1: f64,
    pub e2: f64,
    /// Trion z+ energy minus `omega_0`, rad/ns.
    pub e3_rel: f64,
    /// Trion z- energy minus `omega_0`, rad/ns.
    pub e4_rel: f64,
    /// Rotating-frame eigenvalues to first order.
    pub lambda1: f64,
    pub lambda3: f64,
    pub v1: [f64; 4],
    pub v3: [f64; 4],
}

impl AcStarkFirstOrder {
    /// `Omega_1+^2 / 2 Delta_1`, rad/ns.
    pub fn transition_shift(&self) -> f64 {
        self.e3_rel - self.e1
    }
}

pub fn acstark_exact(p: &DriveParams) -> Result<AcStarkExact> {
    let d = ghz_to_angular(p.delta1_ghz);
    let o = ghz_to_angular(p.omega1p_ghz);
    let w = d.hypot(o);
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let unit = |k: usize| {
        let mut v = [z; 4];
        v[k] = one;
        v
    };
    let (v_low, v_high) = if o == 0.0 {
        if d >= 0.0 {
            (unit(0), unit(2))
        } else {
            (unit(2), unit(0))
        }
    } else {
        let n1 = (2.0 * (w * w - w * d)).sqrt();
        let n3 = (2.0 * (w * w + w * d)).sqrt();
        (
            [C64::new(o / n1, 0.0), z, C64::new((d - w) / n1, 0.0), z],
            [C64::new(o / n3, 0.0), z, C64::new((d + w) / n3, 0.0), z],
        )
    };
    let values = [-w / 2.0, -d / 2.0, w / 2.0, d / 2.0];
    let vectors = [v_low, unit(1), v_high, unit(3)];
    let eigensystem = label_by_overlap(values, vectors)?;
    Ok(AcStarkExact { generalized_rabi: w, eigensystem })
}

pub fn acstark_first_order(p: &DriveParams) -> Result<AcStarkFirstOrder> {
    if p.delta1_ghz == 0.0 {
        return Err(Error::DegenerateDetuning);
    }
    let d = ghz_to_angular(p.delta1_ghz);
    let o = ghz_to_angular(p.omega1p_ghz);
    let shift = o * o / (4.0 * d);
    let mix = o / (2.0 * d);
    Ok(AcStarkFirstOrder {
        e1: -shift,
        e2: 0.0,
        e3_rel: shift,
        e4_rel: 0.0,
        lambda1: -d / 2.0 - shift,
        lambda3: d / 2.0 + shift,
        v1: [1.0, 0.0, -mix, 0.0],
        v3: [mix, 0.0, 1.0, 0.0],
    })
}

/// Exact and first-order AC Stark eigensystems (magnetic field ignored).
pub fn acstark_eigensystem(p: &DriveParams) -> Result<(AcStarkExact, AcStarkFirstOrder)> {
    Ok((acstark_exact(p)?, acstark_first_order(p)?))
}

/// Numerical eigensystem of `H0` with z-basis labels.
pub fn pseudo_faraday_eigensystem(p: &DriveParams) -> Result<LabeledEigensystem> {
    let eig = eig_hermitian(&build_h0(p))?;
    let values = [0, 1, 2, 3].map(|k| eig.values[k]);
    let vectors = [0, 1, 2, 3].map(|k| {
        let col = eig.vector(k);
        [col[0], col[1], col[2], col[3]]
    });
    label_by_overlap(values, vectors)
}

/// Absolute energies (rad/ns) of labeled rotating-frame eigenstates: trion-like states gain
/// `(omega_0 + omega_1)/2`, electron-like states `(omega_0 - omega_1)/2`. Order follows
/// `eigensystem.states`.
pub fn rotating_frame_energies(eigensystem: &LabeledEigensystem, omega0: f64, omega1: f64) -> [(StateLabel, f64); 4] {
    eigensystem.states.map(|s| {
        let offset = if s.label.is_trion() { (omega0 + omega1) / 2.0 } else { (omega0 - omega1) / 2.0 };
        (s.label, s.value + offset)
    })
}

/// Energies with electron levels absolute and trion levels relative to `omega_0`, given only
/// `Delta_1` (rad/ns). This is the plotting convention of the level diagrams.
pub fn energies_relative_to_resonance(eigensystem: &LabeledEigensystem, delta1: f64) -> [(StateLabel, f64); 4] {
    // omega_0 = 0, omega_1 = -Delta_1
    rotating_frame_energies(eigensystem, 0.0, -delta1)
}

/// Read-out detuning `Delta_2` (GHz) that puts the read-out laser on resonance with the
/// electron-like to trion-like transition of `target`.
///
/// The transition frequency is `omega_1 + (lambda_t - lambda_e)`, so resonance means
/// `Delta_2 = Delta_1 - (lambda_t - lambda_e) / 2pi`.
pub fn resonant_detuning_for_readout(p: &DriveParams, target: ReadoutTarget) -> Result<f64> {
    let es = pseudo_faraday_eigensystem(p)?;
    let gap = es.state(target.trion()).value - es.state(target.electron()).value;
    Ok(p.delta1_ghz - crate::units::angular_to_ghz(gap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::BOHR_MAGNETON_GHZ_PER_T;
    use std::f64::consts::TAU;

    fn off() -> DriveParams {
        DriveParams {
            b_x: 0.0,
            omega1p_ghz: 0.0,
            delta1_ghz: 0.0,
            omega2p_ghz: C64::new(0.0, 0.0),
            omega2m_ghz: C64::new(0.0, 0.0),
            ..DriveParams::readout_preset()
        }
    }

    #[test]
    fn h0_zero_when_undriven() {
        assert_eq!(build_h0(&off()), CMatrix::zeros(4, 4));
    }

    #[test]
    fn h0_zeeman_entry() {
        let p = DriveParams { b_x: 0.1, g_ex: 0.24, ..off() };
        let h = build_h0(&p);
        let expected = TAU * BOHR_MAGNETON_GHZ_PER_T * 0.1 * 0.24;
        assert!((h[(0, 1)].re - expected).abs() < 1e-12);
        assert!((h[(0, 1)].re / TAU - 0.335_910).abs() < 1e-5);
    }

    #[test]
    fn h0_diagonal_from_detuning() {
        let p = DriveParams { delta1_ghz: 2000.0, ..off() };
        let h = build_h0(&p);
        let half = 0.5 * TAU * 2000.0;
        let diag: Vec<f64> = (0..4).map(|i| h[(i, i)].re).collect();
        assert_eq!(diag, vec![-half, -half, half, half]);
    }

    #[test]
    fn h1_entries_and_adjoint() {
        let p = DriveParams::readout_preset();
        let h1 = build_h1(&p);
        assert!((h1.plus[(2, 0)].re - std::f64::consts::PI * 0.5).abs() < 1e-14);
        assert!((h1.plus[(3, 1)].re - std::f64::consts::PI * 0.5).abs() < 1e-14);
        assert_eq!(h1.minus, h1.plus.adjoint());

        let p = DriveParams { omega2p_ghz: C64::new(0.0, 0.0), omega2m_ghz: C64::new(0.0, 0.0), ..p };
        let h1 = build_h1(&p);
        assert_eq!(h1.plus, CMatrix::zeros(4, 4));
        assert_eq!(h1.minus, CMatrix::zeros(4, 4));
        assert_eq!(hamiltonian_at(&build_h0(&p), &h1, 3.7), build_h0(&p));
    }

    #[test]
    fn zeeman_degenerate_limit_is_z_basis() {
        let es = zeeman_eigensystem(&off());
        assert_eq!(es.values(), [0.0; 4]);
        assert_eq!(es.states[0].label, StateLabel::ElectronZPlus);
        assert_eq!(es.states[0].vector[0], C64::new(1.0, 0.0));
    }

    #[test]
    fn zeeman_splitting() {
        let p = DriveParams { b_x: 0.1, g_ex: 0.24, ..off() };
        let es = zeeman_eigensystem(&p);
        let split = es.state(StateLabel::ElectronXPlus).value - es.state(StateLabel::ElectronXMinus).value;
        assert!((split / TAU - 0.671_82).abs() < 1e-5, "{}", split / TAU);
    }

    #[test]
    fn acstark_no_drive_is_unmixed() {
        let p = DriveParams { delta1_ghz: 2000.0, ..off() };
        let (exact, first) = acstark_eigensystem(&p).unwrap();
        assert!((exact.generalized_rabi - TAU * 2000.0).abs() < 1e-9);
        assert_eq!(exact.transition_shift(TAU * 2000.0), 0.0);
        assert_eq!(first.e1, 0.0);
        assert_eq!(exact.eigensystem.state(StateLabel::ElectronZPlus).vector[0], C64::new(1.0, 0.0));
    }

    #[test]
    fn acstark_first_order_needs_detuning() {
        let p = DriveParams { omega1p_ghz: 10.0, ..off() };
        assert!(matches!(acstark_first_order(&p), Err(Error::DegenerateDetuning)));
        // the exact part is still available
        assert!(acstark_exact(&p).is_ok());
    }

    #[test]
    fn labels_bijective_and_readout_detuning_zero_when_undriven() {
        let es = pseudo_faraday_eigensystem(&off()).unwrap();
        for l in StateLabel::Z_BASIS {
            assert!(es.get(l).is_some());
        }
        let d2 = resonant_detuning_for_readout(&off(), ReadoutTarget::ZMinus).unwrap();
        assert_eq!(d2, 0.0);
    }

    #[test]
    fn rotating_frame_energies_undriven() {
        let omega0 = TAU * 300_000.0;
        let es = pseudo_faraday_eigensystem(&off()).unwrap();
        for (label, e) in rotating_frame_energies(&es, omega0, omega0) {
            let expected = if label.is_trion() { omega0 } else { 0.0 };
            assert!((e - expected).abs() < 1e-6);
        }
    }

    #[test]
    fn validation_and_warnings() {
        assert!(DriveParams { b_x: -0.1, ..off() }.validate().is_err());
        assert!(DriveParams { omega1p_ghz: -1.0, ..off() }.validate().is_err());
        assert!(DriveParams { g_ex: f64::NAN, ..off() }.validate().is_err());
        assert!(DriveParams::readout_preset().validate().is_ok());
        assert!(DriveParams::readout_preset().warnings().is_empty());
        let strong = DriveParams { omega1p_ghz: 500.0, ..DriveParams::readout_preset() };
        assert_eq!(strong.warnings().len(), 1);
    }

    #[test]
    fn target_parsing() {
        assert_eq!("z-".parse::<ReadoutTarget>().unwrap(), ReadoutTarget::ZMinus);
        assert_eq!("z+".parse::<ReadoutTarget>().unwrap(), ReadoutTarget::ZPlus);
        assert!("x".parse::<ReadoutTarget>().is_err());
    }
}
