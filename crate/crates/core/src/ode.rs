//! Direct time integration of the driven master equation with an adaptive Dormand-Prince 5(4)
//! scheme. Used to cross-check the Floquet propagator on short horizons.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hamiltonian::{hamiltonian_at, OscillatingHamiltonian};
use crate::linalg::CMatrix;
use crate::liouville::{
    devectorize, lindblad_apply, vectorize, DensityMatrix, LiouvilleBlocks, RateMatrices, Supervector, SUPER_DIM,
};

/// Smallest step the controller may request before giving up (ns).
pub const MIN_STEP: f64 = 1e-9;
/// Default horizon cap (ns).
pub const DEFAULT_T_CAP: f64 = 10.0;

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense-output coefficients (Hairer's DOPRI5).
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// PI step-size control.
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

type State = [C64; SUPER_DIM];

/// Right-hand side of `d rho / dt`.
#[derive(Debug, Clone)]
pub enum Rhs {
    /// `-i L(t) rho` with the supermatrix blocks.
    Supermatrix(LiouvilleBlocks),
    /// `-i [H(t), rho] + D(rho)` evaluated on 4x4 matrices.
    DirectCommutator { h0: CMatrix, h1: OscillatingHamiltonian, rates: RateMatrices },
}

impl Rhs {
    pub fn nu(&self) -> f64 {
        match self {
            Self::Supermatrix(b) => b.nu,
            Self::DirectCommutator { h1, .. } => h1.nu,
        }
    }

    pub fn eval(&self, t: f64, y: &State, dy: &mut State) {
        match self {
            Self::Supermatrix(b) => {
                let ep = C64::from_polar(1.0, b.nu * t);
                let em = ep.conj();
                for (i, d) in dy.iter_mut().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    let (r0, r1, rm) = (b.l0.row(i), b.l1.row(i), b.lm1.row(i));
                    for j in 0..SUPER_DIM {
                        acc += (r0[j] + ep * r1[j] + em * rm[j]) * y[j];
                    }
                    *d = C64::new(acc.im, -acc.re);
                }
            }
            Self::DirectCommutator { h0, h1, rates } => {
                let h = hamiltonian_at(h0, h1, t);
                let rho = devectorize(&Supervector(*y)).into_matrix();
                let comm = h.commutator(&rho).scale(C64::new(0.0, -1.0));
                let out = &comm + &lindblad_apply(rates, &rho);
                dy.copy_from_slice(out.as_slice());
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeOptions {
    pub rel_tol: f64,
    /// Absolute tolerance; entries of a density matrix are O(1), so this defaults to `rel_tol`.
    pub abs_tol: Option<f64>,
    /// Times (ns, ascending, within `[0, t_end]`) at which to report the state. `None` reports
    /// every accepted step.
    pub sample_times: Option<Vec<f64>>,
    pub t_cap: f64,
    /// Permits `t_end > t_cap`.
    pub allow_beyond_cap: bool,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: None,
            sample_times: None,
            t_cap: DEFAULT_T_CAP,
            allow_beyond_cap: false,
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub max_step: f64,
    pub rhs_evals: usize,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub stats: OdeStats,
}

impl Trajectory {
    pub fn last(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory has at least the initial state")
    }
}

/// Integrates the supermatrix form from 0 to `t_end` with default options and the given
/// relative tolerance.
pub fn integrate(blocks: &LiouvilleBlocks, rho0: &DensityMatrix, t_end: f64, rel_tol: f64) -> Result<Trajectory> {
    integrate_with(&Rhs::Supermatrix(blocks.clone()), rho0, t_end, &OdeOptions { rel_tol, ..Default::default() })
}

pub fn integrate_with(rhs: &Rhs, rho0: &DensityMatrix, t_end: f64, opts: &OdeOptions) -> Result<Trajectory> {
    if !(1e-12..=1e-4).contains(&opts.rel_tol) {
        return Err(Error::InvalidParameter(format!("rel_tol must lie in [1e-12, 1e-4] (got {:e})", opts.rel_tol)));
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!("t_end must be finite and >= 0 (got {t_end})")));
    }
    if t_end > opts.t_cap && !opts.allow_beyond_cap {
        return Err(Error::CapExceeded { t_end, cap: opts.t_cap });
    }
    if let Some(s) = &opts.sample_times {
        if s.windows(2).any(|w| !(w[1] >= w[0])) || s.iter().any(|&t| !(0.0..=t_end).contains(&t)) {
            return Err(Error::InvalidParameter("sample times must be ascending within [0, t_end]".into()));
        }
    }
    let rtol = opts.rel_tol;
    let atol = opts.abs_tol.unwrap_or(rtol);
    let nu = rhs.nu();
    let h_max = if nu != 0.0 { (TAU / nu.abs()) / 20.0 } else { f64::INFINITY }.min(t_end.max(MIN_STEP));

    let mut stats = OdeStats::default();
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut samples = opts.sample_times.as_deref().unwrap_or(&[]).iter().copied().peekable();
    let report_steps = opts.sample_times.is_none();

    let mut t = 0.0;
    let mut y: State = vectorize(rho0).0;
    let emit = |t: f64, y: &State, times: &mut Vec<f64>, states: &mut Vec<DensityMatrix>| {
        times.push(t);
        states.push(devectorize(&Supervector(*y)));
    };
    if report_steps {
        emit(t, &y, &mut times, &mut states);
    }
    while samples.peek().is_some_and(|&s| s <= t) {
        emit(samples.next().unwrap(), &y, &mut times, &mut states);
    }
    if t_end == 0.0 {
        return Ok(Trajectory { times, states, stats });
    }

    let zero = C64::new(0.0, 0.0);
    let mut k1: State = [zero; SUPER_DIM];
    rhs.eval(t, &y, &mut k1);
    stats.rhs_evals += 1;
    let mut h = initial_step(&y, &k1, rtol, atol).min(h_max);
    let mut facold: f64 = 1e-4;
    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) = ([zero; SUPER_DIM], [zero; SUPER_DIM], [zero; SUPER_DIM], [zero; SUPER_DIM], [zero; SUPER_DIM], [zero; SUPER_DIM]);
    let mut tmp: State = [zero; SUPER_DIM];
    let mut y_new: State = [zero; SUPER_DIM];
    let mut last_rejected = false;

    while t < t_end {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::NoConvergence {
                what: "ODE integration",
                detail: format!("step budget {} exhausted at t = {t}", opts.max_steps),
            });
        }
        if h < MIN_STEP {
            return Err(Error::StepUnderflow { t, h });
        }
        let final_step = t + h >= t_end;
        let h_step = if final_step { t_end - t } else { h };

        let stage = |tmp: &mut State, coeffs: &[(f64, &State)]| {
            for i in 0..SUPER_DIM {
                let mut s = y[i];
                for (c, k) in coeffs {
                    s += k[i] * (c * h_step);
                }
                tmp[i] = s;
            }
        };
        stage(&mut tmp, &[(A21, &k1)]);
        rhs.eval(t + C2 * h_step, &tmp, &mut k2);
        stage(&mut tmp, &[(A31, &k1), (A32, &k2)]);
        rhs.eval(t + C3 * h_step, &tmp, &mut k3);
        stage(&mut tmp, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        rhs.eval(t + C4 * h_step, &tmp, &mut k4);
        stage(&mut tmp, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        rhs.eval(t + C5 * h_step, &tmp, &mut k5);
        stage(&mut tmp, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        rhs.eval(t + h_step, &tmp, &mut k6);
        stage(&mut y_new, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        rhs.eval(t + h_step, &y_new, &mut k7);
        stats.rhs_evals += 6;

        let mut err_sq = 0.0;
        for i in 0..SUPER_DIM {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h_step;
            let sc = atol + rtol * y[i].norm().max(y_new[i].norm());
            err_sq += (e.norm() / sc).powi(2);
        }
        let err = (err_sq / SUPER_DIM as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::NoConvergence { what: "ODE integration", detail: format!("non-finite error estimate at t = {t}") });
        }

        let fac11 = err.powf(EXPO1);
        if err <= 1.0 {
            let fac = (fac11 / facold.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_next = h / fac;
            if last_rejected {
                h_next = h_next.min(h);
            }
            facold = err.max(1e-4);

            // dense output for samples inside (t, t + h_step]
            let t_next = if final_step { t_end } else { t + h_step };
            while samples.peek().is_some_and(|&s| s <= t_next) {
                let s = samples.next().unwrap();
                let theta = ((s - t) / h_step).clamp(0.0, 1.0);
                let ys = dense_output(&y, &y_new, [&k1, &k3, &k4, &k5, &k6, &k7], h_step, theta);
                emit(s, &ys, &mut times, &mut states);
            }

            stats.accepted += 1;
            stats.max_step = stats.max_step.max(h_step);
            t = t_next;
            y = y_new;
            k1 = k7;
            if report_steps {
                emit(t, &y, &mut times, &mut states);
            }
            h = h_next.min(h_max);
            last_rejected = false;
        } else {
            stats.rejected += 1;
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
            last_rejected = true;
        }
    }
    Ok(Trajectory { times, states, stats })
}

fn dense_output(y: &State, y_new: &State, k: [&State; 6], h: f64, theta: f64) -> State {
    let [k1, k3, k4, k5, k6, k7] = k;
    let mut out = [C64::new(0.0, 0.0); SUPER_DIM];
    let theta1 = 1.0 - theta;
    for i in 0..SUPER_DIM {
        let ydiff = y_new[i] - y[i];
        let bspl = k1[i] * h - ydiff;
        let r4 = ydiff - k7[i] * h - bspl;
        let r5 = (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6 + k7[i] * D7) * h;
        out[i] = y[i] + (ydiff + (bspl + (r4 + r5 * theta1) * theta) * theta1) * theta;
    }
    out
}

fn initial_step(y: &State, f0: &State, rtol: f64, atol: f64) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..SUPER_DIM {
        let sc = atol + rtol * y[i].norm();
        d0 += (y[i].norm() / sc).powi(2);
        d1 += (f0[i].norm() / sc).powi(2);
    }
    let (d0, d1) = ((d0 / SUPER_DIM as f64).sqrt(), (d1 / SUPER_DIM as f64).sqrt());
    if d0 < 1e-5 || d1 < 1e-5 {
        1e-3
    } else {
        0.01 * d0 / d1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_h0, build_h1, DriveParams};

    fn idle() -> DriveParams {
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
    fn nothing_happens_without_drive_or_rates() {
        let b = LiouvilleBlocks::new(&idle(), &RateMatrices::zero());
        let rho0 = DensityMatrix::basis(2);
        let traj = integrate(&b, &rho0, 3.0, 1e-8).unwrap();
        assert_eq!(traj.last(), &rho0);
        assert_eq!(*traj.times.last().unwrap(), 3.0);
    }

    #[test]
    fn option_checks() {
        let b = LiouvilleBlocks::new(&idle(), &RateMatrices::zero());
        let rho0 = DensityMatrix::basis(0);
        assert!(matches!(integrate(&b, &rho0, 11.0, 1e-8), Err(Error::CapExceeded { .. })));
        assert!(integrate(&b, &rho0, 1.0, 1e-3).is_err());
        assert!(integrate(&b, &rho0, 1.0, 1e-13).is_err());
        let opts = OdeOptions { sample_times: Some(vec![0.5, 0.2]), ..Default::default() };
        assert!(integrate_with(&Rhs::Supermatrix(b.clone()), &rho0, 1.0, &opts).is_err());
        let opts = OdeOptions { allow_beyond_cap: true, ..Default::default() };
        assert!(integrate_with(&Rhs::Supermatrix(b), &rho0, 11.0, &opts).is_ok());
    }

    #[test]
    fn exponential_decay() {
        let mut rates = RateMatrices::zero();
        rates.relaxation[2][0] = 1.54;
        let b = LiouvilleBlocks::new(&idle(), &rates);
        let opts = OdeOptions { rel_tol: 1e-10, sample_times: Some(vec![0.0, 0.37, 1.0, 2.5]), ..Default::default() };
        let traj = integrate_with(&Rhs::Supermatrix(b), &DensityMatrix::basis(2), 2.5, &opts).unwrap();
        assert_eq!(traj.times, vec![0.0, 0.37, 1.0, 2.5]);
        for (t, rho) in traj.times.iter().zip(&traj.states) {
            assert!((rho.population(2) - (-1.54 * t).exp()).abs() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn direct_mode_matches_supermatrix() {
        let p = DriveParams { delta1_ghz: 20.0, omega1p_ghz: 3.0, delta2_ghz: 18.0, ..DriveParams::readout_preset() };
        let rates = RateMatrices::paper_sim();
        let sm = Rhs::Supermatrix(LiouvilleBlocks::new(&p, &rates));
        let direct = Rhs::DirectCommutator { h0: build_h0(&p), h1: build_h1(&p), rates };
        let y = vectorize(&DensityMatrix::projector(&[
            C64::new(0.6, 0.0),
            C64::new(0.0, 0.5),
            C64::new(0.3, -0.2),
            C64::new(0.1, 0.4),
        ]))
        .0;
        let (mut a, mut b) = ([C64::new(0.0, 0.0); 16], [C64::new(0.0, 0.0); 16]);
        sm.eval(0.123, &y, &mut a);
        direct.eval(0.123, &y, &mut b);
        let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for i in 0..16 {
            assert!((a[i] - b[i]).norm() <= 1e-12 * scale, "{i}");
        }
    }
}
