//! Dataset drivers for the level diagrams, the branching-ratio sweep and the read-out curves.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::{run_readout, Dataset, ReadoutConfig, ReadoutResult};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_h0, DriveParams, ReadoutTarget};
use crate::linalg::eig_hermitian;
use crate::optics::branching_ratio;
use crate::units::angular_to_ghz;

/// Uniform grid `start..=stop` with `points` entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl SweepSpec {
    pub fn new(start: f64, stop: f64, points: usize) -> Self {
        Self { start, stop, points }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points < 2 || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sweep needs >= 2 points and finite bounds (got {} points over [{}, {}])",
                self.points, self.start, self.stop
            )));
        }
        let n = self.points - 1;
        Ok((0..=n).map(|i| self.start + (self.stop - self.start) * i as f64 / n as f64).collect())
    }
}

/// Eigenfrequencies (GHz) of `H0` grouped by manifold and sorted within each. Electron-like
/// levels are absolute; trion-like levels are relative to the zero-field resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldEnergies {
    pub electron: [f64; 2],
    pub trion: [f64; 2],
    /// Weight on `|e,z+>` of the lower electron-like state.
    pub electron_lower_zplus: f64,
    /// Weight on `|t,z+>` of the upper trion-like state.
    pub trion_upper_zplus: f64,
}

pub fn manifold_energies(p: &DriveParams) -> Result<ManifoldEnergies> {
    let eig = eig_hermitian(&build_h0(p))?;
    let d1 = crate::units::ghz_to_angular(p.delta1_ghz);
    let mut states: Vec<(f64, Vec<C64>)> = (0..4).map(|k| (eig.values[k], eig.vector(k))).collect();
    // electron weight, largest first; stable so ties keep energy order
    states.sort_by(|a, b| {
        let wa = a.1[0].norm_sqr() + a.1[1].norm_sqr();
        let wb = b.1[0].norm_sqr() + b.1[1].norm_sqr();
        wb.total_cmp(&wa)
    });
    let (mut el, mut tr) = (states[..2].to_vec(), states[2..].to_vec());
    el.sort_by(|a, b| a.0.total_cmp(&b.0));
    tr.sort_by(|a, b| a.0.total_cmp(&b.0));
    // electron levels: lambda + Delta_1/2; trion levels relative to omega_0: lambda - Delta_1/2
    Ok(ManifoldEnergies {
        electron: [angular_to_ghz(el[0].0 + d1 / 2.0), angular_to_ghz(el[1].0 + d1 / 2.0)],
        trion: [angular_to_ghz(tr[0].0 - d1 / 2.0), angular_to_ghz(tr[1].0 - d1 / 2.0)],
        electron_lower_zplus: el[0].1[0].norm_sqr(),
        trion_upper_zplus: tr[1].1[2].norm_sqr(),
    })
}

const LEVEL_COLUMNS: [&str; 6] =
    ["e_lower_GHz", "e_upper_GHz", "t_lower_GHz", "t_upper_GHz", "e_lower_zplus_weight", "t_upper_zplus_weight"];

fn level_sweep(name: &str, axis: &str, values: &[f64], at: impl Fn(f64) -> DriveParams + Sync) -> Result<Dataset> {
    let mut columns = vec![axis];
    columns.extend(LEVEL_COLUMNS);
    let mut ds = Dataset::new(name, &columns);
    let rows: Vec<Result<Vec<f64>>> = values
        .par_iter()
        .map(|&x| {
            let e = manifold_energies(&at(x))?;
            Ok(vec![x, e.electron[0], e.electron[1], e.trion[0], e.trion[1], e.electron_lower_zplus, e.trion_upper_zplus])
        })
        .collect();
    for r in rows {
        ds.push(r?);
    }
    Ok(ds)
}

/// Level splitting by the Voigt field alone (`B_x` sweep, no AC Stark laser) and by the AC Stark
/// laser alone (`Omega_1+` sweep at zero field).
pub fn fig2(p: &DriveParams, field: SweepSpec, rabi: SweepSpec) -> Result<Vec<Dataset>> {
    let zeeman = level_sweep("fig2a", "B_T", &field.values()?, |b| DriveParams {
        b_x: b,
        omega1p_ghz: 0.0,
        delta1_ghz: 0.0,
        ..*p
    })?;
    let stark = level_sweep("fig2b", "Omega1p_GHz", &rabi.values()?, |o| DriveParams { b_x: 0.0, omega1p_ghz: o, ..*p })?;
    Ok(vec![zeeman, stark])
}

/// Levels while the field is ramped up at fixed detuning, then while the AC Stark laser is ramped
/// at the final field.
pub fn fig3(p: &DriveParams, field: SweepSpec, rabi: SweepSpec) -> Result<Vec<Dataset>> {
    let ramp = level_sweep("fig3a", "B_T", &field.values()?, |b| DriveParams { b_x: b, omega1p_ghz: 0.0, ..*p })?;
    let b_final = field.stop;
    let dress =
        level_sweep("fig3b", "Omega1p_GHz", &rabi.values()?, |o| DriveParams { b_x: b_final, omega1p_ghz: o, ..*p })?;
    Ok(vec![ramp, dress])
}

/// Branching ratio versus AC Stark Rabi frequency.
pub fn fig4(p: &DriveParams, rabi: SweepSpec) -> Result<Dataset> {
    let values = rabi.values()?;
    let rows: Vec<Result<f64>> =
        values.par_iter().map(|&o| branching_ratio(&DriveParams { omega1p_ghz: o, ..*p })).collect();
    let mut ds = Dataset::new("fig4", &["Omega1p_GHz", "r_B"]);
    for (o, r) in values.iter().zip(rows) {
        ds.push(vec![*o, r?]);
    }
    if let Some(last) = ds.rows.last() {
        ds.summary.push(("r_B_end".into(), last[1]));
    }
    Ok(ds)
}

/// Read-out curves. Columns are named by the spin of the initial state.
pub fn fig5(cfg: &ReadoutConfig) -> Result<(Dataset, ReadoutResult)> {
    let res = run_readout(cfg)?;
    let mut ds = Dataset::new("fig5", &["T_ns", "R_minus", "R_plus", "D_minus", "D_plus", "F"]);
    let (rm, rp, dm, dp) = match cfg.target {
        ReadoutTarget::ZMinus => (&res.r_addressed, &res.r_other, &res.d_addressed, &res.d_other),
        ReadoutTarget::ZPlus => (&res.r_other, &res.r_addressed, &res.d_other, &res.d_addressed),
    };
    for i in 0..res.times.len() {
        ds.push(vec![res.times[i], rm[i], rp[i], dm[i], dp[i], res.fidelity[i]]);
    }
    ds.summary = vec![
        ("T_star_ns".into(), res.t_star),
        ("F_star".into(), res.f_star),
        ("D_star".into(), res.d_star),
        ("D_other_star".into(), res.d_other_star),
        ("Delta2_GHz".into(), res.delta2_ghz),
        ("M".into(), res.truncation as f64),
    ];
    Ok((ds, res))
}
