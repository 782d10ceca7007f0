use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use stark_readout::hamiltonian::pseudo_faraday_eigensystem;
use stark_readout::optics::{beta_coupling_of, branching_ratio_of};
use stark_readout::readout::{fig2, fig3, fig4, fig5, run_readout, SweepSpec};
use stark_readout::units::angular_to_ghz;
use stark_readout::validation::run_all;
use stark_readout::{Dataset, ReadoutTarget};

use crate::config::{apply_override, Preset, RunConfig};
use crate::csv;
use crate::error::CliError;

pub const CONFIG_BEGIN: &str = "# --- resolved configuration ---";
pub const CONFIG_END: &str = "# --- end configuration ---";

#[derive(Debug, Parser)]
#[command(name = "stark-readout", version, about = "AC-Stark-assisted spin read-out simulator")]
pub struct Cli {
    /// TOML file with [drive], [rates], [readout] and [engine] sections.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Base parameter set: paper-sim or branching (fig4 defaults to branching).
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Override one config entry, e.g. `--set drive.B_x_T=0.2`. Repeatable.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
    /// Output CSV path. Commands with several datasets append `-<name>` to the stem.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Fixed Floquet truncation order (same as `--set engine.M=N`).
    #[arg(long = "M", global = true)]
    pub m: Option<usize>,
    /// poisson or capped-linear
    #[arg(long, global = true)]
    pub prob_model: Option<String>,
    /// Worker threads for sweeps.
    #[arg(long, env = "FLOQUET_READOUT_THREADS", global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Level splitting by the field alone and by the AC Stark laser alone.
    Fig2(LevelArgs),
    /// Levels while ramping the field, then the AC Stark laser.
    Fig3(LevelArgs),
    /// Branching ratio versus AC Stark Rabi frequency.
    Fig4(Fig4Args),
    /// Read-out emission, photon counts and fidelity.
    Fig5(Fig5Args),
    /// Optimal fidelity and branching ratio over one parameter.
    Sweep(SweepArgs),
    /// Run the built-in self-checks against reference computations.
    Validate,
    /// Print the labeled dressed eigensystem and tuned read-out detunings.
    Eigensystem,
}

#[derive(Debug, Args)]
pub struct LevelArgs {
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    /// Upper end of the field sweep in tesla (defaults: 0.5 T for fig2, drive.B_x_T for fig3).
    #[arg(long)]
    pub b_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Fig4Args {
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    /// Upper end of the Rabi sweep in GHz (default drive.Omega1p_GHz).
    #[arg(long)]
    pub omega_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Fig5Args {
    /// z- or z+
    #[arg(long)]
    pub target: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Config entry to sweep, e.g. drive.Omega1p_GHz.
    #[arg(long)]
    pub param: String,
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long, default_value_t = 21)]
    pub points: usize,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::Fig2(_) => "fig2",
            Self::Fig3(_) => "fig3",
            Self::Fig4(_) => "fig4",
            Self::Fig5(_) => "fig5",
            Self::Sweep(_) => "sweep",
            Self::Validate => "validate",
            Self::Eigensystem => "eigensystem",
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let preset = match (&cli.preset, &cli.command) {
        (Some(name), _) => Preset::parse(name)?,
        (None, Command::Fig4(_)) => Preset::Branching,
        (None, _) => Preset::PaperSim,
    };
    let text = match &cli.config {
        Some(path) => Some(
            std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?,
        ),
        None => None,
    };
    let mut overrides = cli.overrides.clone();
    if let Some(m) = cli.m {
        overrides.push(format!("engine.M={m}"));
    }
    if let Some(p) = &cli.prob_model {
        overrides.push(format!("readout.prob_model=\"{p}\""));
    }
    if let Command::Fig5(a) = &cli.command {
        if let Some(t) = &a.target {
            overrides.push(format!("readout.target=\"{t}\""));
        }
    }
    RunConfig::resolve(preset, text.as_deref(), &overrides)
}

fn init_threads(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be >= 1".into()));
        }
        // a second call in the same process keeps the existing pool
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::debug!("thread pool already initialized: {e}");
        }
    }
    Ok(())
}

fn print_summary(out: &mut impl Write, ds: &Dataset) -> std::io::Result<()> {
    for (k, v) in &ds.summary {
        writeln!(out, "{}: {k} = {v:.6}", ds.name)?;
    }
    Ok(())
}

/// Runs one parsed invocation, writing the echoed configuration and results to `out`.
pub fn run(cli: &Cli, out: &mut impl Write) -> Result<(), CliError> {
    init_threads(cli.threads)?;
    let cfg = resolve_config(cli)?;
    let stdout_err = |source| CliError::Io { path: "<stdout>".into(), source };
    writeln!(out, "{CONFIG_BEGIN}\n{}{CONFIG_END}", cfg.to_toml()).map_err(stdout_err)?;

    let drive = cfg.drive();
    let sets: Vec<Dataset> = match &cli.command {
        Command::Fig2(a) => {
            let field = SweepSpec::new(0.0, a.b_max.unwrap_or(0.5), a.points);
            fig2(&drive, field, SweepSpec::new(0.0, drive.omega1p_ghz, a.points))?
        }
        Command::Fig3(a) => {
            let field = SweepSpec::new(0.0, a.b_max.unwrap_or(drive.b_x), a.points);
            fig3(&drive, field, SweepSpec::new(0.0, drive.omega1p_ghz, a.points))?
        }
        Command::Fig4(a) => vec![fig4(&drive, SweepSpec::new(0.0, a.omega_max.unwrap_or(drive.omega1p_ghz), a.points))?],
        Command::Fig5(_) => vec![fig5(&cfg.readout_config()?)?.0],
        Command::Sweep(a) => vec![sweep(&cfg, a)?],
        Command::Validate => return validate(&cfg, out),
        Command::Eigensystem => return eigensystem(&cfg, out),
    };
    let base = csv::base_path(cli.command.name(), cli.out.as_deref());
    for path in csv::write_all(&sets, &base)? {
        writeln!(out, "wrote {}", path.display()).map_err(stdout_err)?;
    }
    for ds in &sets {
        print_summary(out, ds).map_err(stdout_err)?;
    }
    Ok(())
}

fn sweep(cfg: &RunConfig, a: &SweepArgs) -> Result<Dataset, CliError> {
    let values = SweepSpec::new(a.from, a.to, a.points).values()?;
    let base = toml::Value::try_from(cfg).map_err(|e| CliError::Config(e.to_string()))?;
    let toml::Value::Table(base) = base else { unreachable!("config is a table") };
    // check the key once up front so a typo fails before any work is done
    apply_override(&mut base.clone(), &format!("{}={}", a.param, a.from))?;
    let rows: Vec<Result<Vec<f64>, CliError>> = values
        .par_iter()
        .map(|&x| {
            let mut table = base.clone();
            apply_override(&mut table, &format!("{}={x:?}", a.param))?;
            let point: RunConfig =
                toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
            point.validate()?;
            let rc = point.readout_config()?;
            let res = run_readout(&rc)?;
            let r_b = branching_ratio_of(&pseudo_faraday_eigensystem(&rc.drive)?)?;
            Ok(vec![x, r_b, res.f_star, res.t_star, res.d_star])
        })
        .collect();
    let mut ds = Dataset::new("sweep", &[a.param.as_str(), "r_B", "F_star", "T_star_ns", "D_star"]);
    for r in rows {
        ds.push(r?);
    }
    Ok(ds)
}

fn validate(cfg: &RunConfig, out: &mut impl Write) -> Result<(), CliError> {
    let checks = run_all(&cfg.validation_options());
    let io = |source| CliError::Io { path: "<stdout>".into(), source };
    for c in &checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{verdict} {:<32} value={:.3e} limit={:.1e} ({:.2}s)", c.name, c.value, c.limit, c.seconds)
            .map_err(io)?;
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    writeln!(out, "{}/{} checks passed", checks.len() - failed.len(), checks.len()).map_err(io)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(failed.join(", ")))
    }
}

fn eigensystem(cfg: &RunConfig, out: &mut impl Write) -> Result<(), CliError> {
    let io = |source| CliError::Io { path: "<stdout>".into(), source };
    let drive = cfg.drive();
    let es = pseudo_faraday_eigensystem(&drive)?;
    writeln!(out, "label      energy_GHz    |e,z+>^2  |e,z->^2  |t,z+>^2  |t,z->^2").map_err(io)?;
    for s in &es.states {
        let w: Vec<String> = s.vector.iter().map(|z| format!("{:8.6}", z.norm_sqr())).collect();
        writeln!(out, "{:<10} {:>12.6}  {}", s.label.as_str(), angular_to_ghz(s.value), w.join("  ")).map_err(io)?;
    }
    writeln!(out, "r_B = {:.6e}", branching_ratio_of(&es)?).map_err(io)?;
    for target in [ReadoutTarget::ZMinus, ReadoutTarget::ZPlus] {
        let beta = beta_coupling_of(&es, target.electron())?;
        let tuned = drive.tuned_to(target)?;
        writeln!(out, "target {target}: Delta2_GHz = {:.12}  |beta| = {:.6e}", tuned.delta2_ghz, beta.norm())
            .map_err(io)?;
    }
    Ok(())
}
