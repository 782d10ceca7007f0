//! Fluorescence read-out: emission rates, detected photons, detection probability and fidelity.

mod figures;

pub use figures::{fig2, fig3, fig4, fig5, manifold_energies, ManifoldEnergies, SweepSpec};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::floquet::{converge_truncation_multi, FloquetOperator, PropagationRoute, TruncationOptions};
use crate::hamiltonian::{pseudo_faraday_eigensystem, DriveParams, ReadoutTarget};
use crate::liouville::{DensityMatrix, LiouvilleBlocks, RateMatrices};

/// Relative change of `D(T*)` under grid doubling accepted by [`run_readout`].
pub const GRID_CHECK_RTOL: f64 = 1e-3;
/// Width (ns) to which the optimal window is refined.
pub const WINDOW_TOL_NS: f64 = 0.1;
const MAX_GRID_DOUBLINGS: usize = 3;

/// Map from mean detected photons to the probability of at least one click.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProbabilityModel {
    /// `1 - exp(-D)`.
    #[default]
    Poisson,
    /// `min(D, 1)`.
    CappedLinear,
}

impl ProbabilityModel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Poisson => "poisson",
            Self::CappedLinear => "capped-linear",
        }
    }
}

impl fmt::Display for ProbabilityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProbabilityModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poisson" => Ok(Self::Poisson),
            "capped-linear" | "capped_linear" => Ok(Self::CappedLinear),
            other => Err(Error::InvalidParameter(format!(
                "unknown probability model '{other}' (expected poisson or capped-linear)"
            ))),
        }
    }
}

/// `Gamma_31 rho_33 + Gamma_42 rho_44` in 1/ns.
pub fn emission_rate(rho: &DensityMatrix, rates: &RateMatrices) -> f64 {
    let r = rho.get(2, 2) * rates.relaxation[2][0] + rho.get(3, 3) * rates.relaxation[3][1];
    debug_assert!(r.im.abs() <= 1e-10, "emission rate has imaginary part {}", r.im);
    r.re
}

/// `epsilon * int_0^t R` at every sample time (composite trapezoid).
pub fn cumulative_photons(times: &[f64], rate: &[f64], epsilon: f64) -> Vec<f64> {
    assert_eq!(times.len(), rate.len());
    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    for i in 0..times.len() {
        if i > 0 {
            acc += 0.5 * (rate[i] + rate[i - 1]) * (times[i] - times[i - 1]);
        }
        out.push(epsilon * acc);
    }
    out
}

/// `epsilon * int_{t_0}^T R`, trapezoid on the samples with `R` linearly interpolated at `T`.
pub fn detected_photons(times: &[f64], rate: &[f64], epsilon: f64, t: f64) -> Result<f64> {
    assert_eq!(times.len(), rate.len());
    let (Some(&first), Some(&last)) = (times.first(), times.last()) else {
        return Err(Error::InvalidParameter("empty time series".into()));
    };
    if !(t >= first && t <= last) {
        return Err(Error::OutOfRange { t, start: first, end: last });
    }
    let mut acc = 0.0;
    for i in 1..times.len() {
        let (t0, t1) = (times[i - 1], times[i]);
        if t >= t1 {
            acc += 0.5 * (rate[i] + rate[i - 1]) * (t1 - t0);
        } else {
            if t > t0 {
                let r_t = rate[i - 1] + (rate[i] - rate[i - 1]) * (t - t0) / (t1 - t0);
                acc += 0.5 * (rate[i - 1] + r_t) * (t - t0);
            }
            break;
        }
    }
    Ok(epsilon * acc)
}

pub fn detection_probability(d: f64, model: ProbabilityModel) -> f64 {
    let d = d.max(0.0);
    match model {
        ProbabilityModel::Poisson => -(-d).exp_m1(),
        ProbabilityModel::CappedLinear => d.min(1.0),
    }
}

/// `(1 - p_plus + p_minus) / 2` where `p_minus` is the click probability of the addressed state.
pub fn fidelity(p_plus: f64, p_minus: f64) -> f64 {
    (1.0 - p_plus + p_minus) / 2.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutConfig {
    pub drive: DriveParams,
    pub rates: RateMatrices,
    /// Multiply all rates by `2 pi` before use.
    pub rates_angular: bool,
    /// Overall detection efficiency in `[0, 1]`.
    pub epsilon: f64,
    pub t_max_ns: f64,
    pub grid: usize,
    pub target: ReadoutTarget,
    pub probability_model: ProbabilityModel,
    /// Fixed truncation order; `None` selects it by convergence.
    pub truncation: Option<usize>,
    pub truncation_options: TruncationOptions,
}

impl Default for ReadoutConfig {
    fn default() -> Self {
        Self {
            drive: DriveParams::readout_preset(),
            rates: RateMatrices::paper_sim(),
            rates_angular: false,
            epsilon: 0.025,
            t_max_ns: 500.0,
            grid: 2000,
            target: ReadoutTarget::ZMinus,
            probability_model: ProbabilityModel::Poisson,
            truncation: None,
            truncation_options: TruncationOptions::default(),
        }
    }
}

impl ReadoutConfig {
    pub fn validate(&self) -> Result<()> {
        self.drive.validate()?;
        self.rates.validate()?;
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in [0, 1] (got {})", self.epsilon)));
        }
        if !(self.t_max_ns > 0.0) || !self.t_max_ns.is_finite() {
            return Err(Error::InvalidParameter(format!("T_max must be > 0 (got {})", self.t_max_ns)));
        }
        if self.grid < 16 {
            return Err(Error::InvalidParameter(format!("grid must be >= 16 (got {})", self.grid)));
        }
        Ok(())
    }

    pub fn effective_rates(&self) -> RateMatrices {
        if self.rates_angular {
            self.rates.to_angular()
        } else {
            self.rates
        }
    }
}

/// Curves and optimum of a read-out simulation. "Addressed" is the initial state whose cycling
/// transition the read-out laser drives; "other" is the opposite electron-like state.
#[derive(Debug, Clone)]
pub struct ReadoutResult {
    pub target: ReadoutTarget,
    pub times: Vec<f64>,
    pub r_addressed: Vec<f64>,
    pub r_other: Vec<f64>,
    pub d_addressed: Vec<f64>,
    pub d_other: Vec<f64>,
    pub fidelity: Vec<f64>,
    pub t_star: f64,
    pub f_star: f64,
    /// `D` of the addressed state at `t_star`.
    pub d_star: f64,
    pub d_other_star: f64,
    pub delta2_ghz: f64,
    pub truncation: usize,
    pub route: PropagationRoute,
    /// Relative change of `D(T*)` in the last grid-doubling check.
    pub grid_check: f64,
    /// Largest pre-cleanup `|Tr rho - 1|` over both trajectories.
    pub max_trace_drift: f64,
}

fn linspace(t_max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
}

/// Maximizes a unimodal `f` on `[a, b]` by golden-section search down to width `tol`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

struct Curves {
    times: Vec<f64>,
    r_addressed: Vec<f64>,
    r_other: Vec<f64>,
    max_trace_drift: f64,
}

fn sample_curves(
    op: &FloquetOperator,
    rho_addressed: &DensityMatrix,
    rho_other: &DensityMatrix,
    rates: &RateMatrices,
    t_max: f64,
    grid: usize,
) -> Result<Curves> {
    let times = linspace(t_max, grid);
    let run = |rho0: &DensityMatrix| -> Result<(Vec<f64>, f64)> {
        let raw = op.propagate_batch_raw(rho0, &times)?;
        let mut drift = 0.0f64;
        let mut rate = Vec::with_capacity(raw.len());
        for (t, rho) in times.iter().zip(raw) {
            let d = (rho.trace() - 1.0).norm();
            if d > crate::floquet::TRACE_DRIFT_LIMIT || !d.is_finite() {
                return Err(Error::TraceDrift { drift: d, t: *t });
            }
            drift = drift.max(d);
            let h = rho.hermitian_part();
            let tr = h.trace().re;
            let clean = DensityMatrix::from_matrix_unchecked(h.into_matrix().scale_real(1.0 / tr))?;
            rate.push(emission_rate(&clean, rates).max(0.0));
        }
        Ok((rate, drift))
    };
    let (a, b) = rayon::join(|| run(rho_addressed), || run(rho_other));
    let ((r_addressed, da), (r_other, db)) = (a?, b?);
    Ok(Curves { times, r_addressed, r_other, max_trace_drift: da.max(db) })
}

fn optimum(c: &Curves, epsilon: f64, model: ProbabilityModel) -> Result<(f64, f64)> {
    let f_at = |t: f64| -> f64 {
        let da = detected_photons(&c.times, &c.r_addressed, epsilon, t).unwrap_or(0.0);
        let db = detected_photons(&c.times, &c.r_other, epsilon, t).unwrap_or(0.0);
        fidelity(detection_probability(db, model), detection_probability(da, model))
    };
    let d_a = cumulative_photons(&c.times, &c.r_addressed, epsilon);
    let d_b = cumulative_photons(&c.times, &c.r_other, epsilon);
    let best = (0..c.times.len())
        .map(|i| (i, fidelity(detection_probability(d_b[i], model), detection_probability(d_a[i], model))))
        .fold((0, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc })
        .0;
    let lo = c.times[best.saturating_sub(1)];
    let hi = c.times[(best + 1).min(c.times.len() - 1)];
    let t_star = golden_section_max(f_at, lo, hi, WINDOW_TOL_NS);
    Ok((t_star, f_at(t_star)))
}

/// Full read-out simulation: tunes the read-out laser to `cfg.target`, propagates both
/// electron-like initial states and locates the optimal detection window.
pub fn run_readout(cfg: &ReadoutConfig) -> Result<ReadoutResult> {
    cfg.validate()?;
    for w in cfg.drive.warnings() {
        log::warn!("{w}");
    }
    let rates = cfg.effective_rates();
    let drive = cfg.drive.tuned_to(cfg.target)?;
    let blocks = LiouvilleBlocks::new(&drive, &rates);
    let es = pseudo_faraday_eigensystem(&drive)?;
    let rho_addressed = DensityMatrix::projector(&es.state(cfg.target.electron()).vector);
    let rho_other = DensityMatrix::projector(&es.state(cfg.target.other().electron()).vector);

    let op = match cfg.truncation {
        Some(m) => FloquetOperator::new(&blocks, m)?,
        None => {
            let report = converge_truncation_multi(
                &blocks,
                &[rho_addressed.clone(), rho_other.clone()],
                &cfg.truncation_options,
            )?;
            report.operator
        }
    };
    log::info!("read-out: Delta2 = {} GHz, M = {}, route {:?}", drive.delta2_ghz, op.truncation(), op.route());

    let mut grid = cfg.grid;
    let mut curves = sample_curves(&op, &rho_addressed, &rho_other, &rates, cfg.t_max_ns, grid)?;
    let (mut t_star, mut f_star) = optimum(&curves, cfg.epsilon, cfg.probability_model)?;
    let mut grid_check = f64::NAN;
    for _ in 0..=MAX_GRID_DOUBLINGS {
        let finer_grid = 2 * grid - 1;
        let finer = sample_curves(&op, &rho_addressed, &rho_other, &rates, cfg.t_max_ns, finer_grid)?;
        let coarse_d = detected_photons(&curves.times, &curves.r_addressed, cfg.epsilon, t_star)?;
        let fine_d = detected_photons(&finer.times, &finer.r_addressed, cfg.epsilon, t_star)?;
        grid_check = if fine_d == 0.0 { (fine_d - coarse_d).abs() } else { ((fine_d - coarse_d) / fine_d).abs() };
        if grid_check <= GRID_CHECK_RTOL {
            break;
        }
        log::warn!("grid of {grid} points changes D(T*) by {grid_check:e}; doubling");
        grid = finer_grid;
        curves = finer;
        (t_star, f_star) = optimum(&curves, cfg.epsilon, cfg.probability_model)?;
    }
    if grid_check > GRID_CHECK_RTOL {
        log::warn!("D(T*) not converged under grid doubling (relative change {grid_check:e})");
    }

    let d_addressed = cumulative_photons(&curves.times, &curves.r_addressed, cfg.epsilon);
    let d_other = cumulative_photons(&curves.times, &curves.r_other, cfg.epsilon);
    let model = cfg.probability_model;
    let fidelity_curve = d_addressed
        .iter()
        .zip(&d_other)
        .map(|(&a, &b)| fidelity(detection_probability(b, model), detection_probability(a, model)))
        .collect();
    let d_star = detected_photons(&curves.times, &curves.r_addressed, cfg.epsilon, t_star)?;
    let d_other_star = detected_photons(&curves.times, &curves.r_other, cfg.epsilon, t_star)?;
    Ok(ReadoutResult {
        target: cfg.target,
        times: curves.times,
        r_addressed: curves.r_addressed,
        r_other: curves.r_other,
        d_addressed,
        d_other,
        fidelity: fidelity_curve,
        t_star,
        f_star,
        d_star,
        d_other_star,
        delta2_ghz: drive.delta2_ghz,
        truncation: op.truncation(),
        route: op.route(),
        grid_check,
        max_trace_drift: curves.max_trace_drift,
    })
}

/// Column-labeled table of `f64` values plus scalar summary entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub summary: Vec<(String, f64)>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), summary: Vec::new() }
    }

    /// *Panics* if the row length differs from the column count.
    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row length does not match columns of {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn summary_value(&self, key: &str) -> Option<f64> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}
