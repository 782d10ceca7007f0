//! Run configuration: TOML sections `[drive]`, `[rates]`, `[readout]`, `[engine]` on top of a named
//! preset, plus `section.key=value` overrides.

use serde::{Deserialize, Serialize};
use stark_readout::floquet::TruncationOptions;
use stark_readout::validation::ValidationOptions;
use stark_readout::{DriveParams, ProbabilityModel, RateMatrices, ReadoutConfig, ReadoutTarget, C64};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Read-out simulation parameters.
    PaperSim,
    /// Branching-ratio study (g-factors swapped, no read-out laser).
    Branching,
}

impl Preset {
    pub fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "paper-sim" => Ok(Self::PaperSim),
            "branching" => Ok(Self::Branching),
            other => Err(CliError::Config(format!("unknown preset '{other}' (expected paper-sim or branching)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    #[serde(rename = "B_x_T")]
    pub b_x_t: f64,
    pub g_ex: f64,
    pub g_hx: f64,
    #[serde(rename = "Omega1p_GHz")]
    pub omega1p_ghz: f64,
    #[serde(rename = "Delta1_GHz")]
    pub delta1_ghz: f64,
    /// `[re, im]`
    #[serde(rename = "Omega2p_GHz")]
    pub omega2p_ghz: [f64; 2],
    #[serde(rename = "Omega2m_GHz")]
    pub omega2m_ghz: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesSection {
    /// Population relaxation `Gamma[a][b]`, 1/ns, from state a to state b.
    #[serde(rename = "Gamma")]
    pub relaxation: [[f64; 4]; 4],
    /// Pure dephasing, 1/ns, symmetric.
    #[serde(rename = "gamma")]
    pub dephasing: [[f64; 4]; 4],
    /// Multiply every rate by 2pi before use.
    pub rates_angular: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutSection {
    pub epsilon: f64,
    #[serde(rename = "T_max_ns")]
    pub t_max_ns: f64,
    pub grid: usize,
    /// `z-` or `z+`
    pub target: String,
    pub prob_model: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineSection {
    /// Fixed Floquet truncation order; automatic when absent.
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub m_max: usize,
    pub truncation_tol: f64,
    pub probe_times_ns: Vec<f64>,
    pub seed: u64,
    pub mc_samples: usize,
    pub random_states: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub drive: DriveSection,
    pub rates: RatesSection,
    pub readout: ReadoutSection,
    pub engine: EngineSection,
}

impl RunConfig {
    pub fn preset(preset: Preset) -> Self {
        let d = match preset {
            Preset::PaperSim => DriveParams::readout_preset(),
            Preset::Branching => DriveParams::branching_preset(),
        };
        let r = RateMatrices::paper_sim();
        let ro = ReadoutConfig::default();
        let t = TruncationOptions::default();
        let v = ValidationOptions::default();
        Self {
            drive: DriveSection {
                b_x_t: d.b_x,
                g_ex: d.g_ex,
                g_hx: d.g_hx,
                omega1p_ghz: d.omega1p_ghz,
                delta1_ghz: d.delta1_ghz,
                omega2p_ghz: [d.omega2p_ghz.re, d.omega2p_ghz.im],
                omega2m_ghz: [d.omega2m_ghz.re, d.omega2m_ghz.im],
            },
            rates: RatesSection { relaxation: r.relaxation, dephasing: r.dephasing, rates_angular: ro.rates_angular },
            readout: ReadoutSection {
                epsilon: ro.epsilon,
                t_max_ns: ro.t_max_ns,
                grid: ro.grid,
                target: ro.target.as_str().into(),
                prob_model: ro.probability_model.as_str().into(),
            },
            engine: EngineSection {
                m: None,
                m_max: t.m_max,
                truncation_tol: t.tol,
                probe_times_ns: t.probe_times,
                seed: v.seed,
                mc_samples: v.mc_samples,
                random_states: v.random_states,
            },
        }
    }

    /// Preset, then the file's sections, then `key=value` overrides in order.
    pub fn resolve(preset: Preset, file_text: Option<&str>, overrides: &[String]) -> Result<Self, CliError> {
        let mut table = to_table(&Self::preset(preset))?;
        if let Some(text) = file_text {
            let file: toml::Table = text.parse().map_err(|e| CliError::Config(format!("config file: {e}")))?;
            for (section, value) in file {
                let Some(toml::Value::Table(dst)) = table.get_mut(&section) else {
                    return Err(CliError::Config(format!("unknown config section [{section}]")));
                };
                let toml::Value::Table(src) = value else {
                    return Err(CliError::Config(format!("'{section}' must be a section")));
                };
                for (key, v) in src {
                    if !dst.contains_key(&key) && !(section == "engine" && key == "M") {
                        return Err(CliError::Config(format!("unknown key '{section}.{key}'")));
                    }
                    dst.insert(key, v);
                }
            }
            Self::from_table(table.clone()).map_err(|e| CliError::Config(format!("config file: {e}")))?;
        }
        for item in overrides {
            apply_override(&mut table, item)?;
        }
        let cfg = Self::from_table(table)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn from_table(table: toml::Table) -> Result<Self, CliError> {
        toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn target(&self) -> Result<ReadoutTarget, CliError> {
        self.readout.target.parse().map_err(|e| CliError::Config(format!("readout.target: {e}")))
    }

    pub fn probability_model(&self) -> Result<ProbabilityModel, CliError> {
        self.readout.prob_model.parse().map_err(|e| CliError::Config(format!("readout.prob_model: {e}")))
    }

    pub fn drive(&self) -> DriveParams {
        let d = &self.drive;
        DriveParams {
            b_x: d.b_x_t,
            g_ex: d.g_ex,
            g_hx: d.g_hx,
            omega1p_ghz: d.omega1p_ghz,
            delta1_ghz: d.delta1_ghz,
            omega2p_ghz: C64::new(d.omega2p_ghz[0], d.omega2p_ghz[1]),
            omega2m_ghz: C64::new(d.omega2m_ghz[0], d.omega2m_ghz[1]),
            delta2_ghz: 0.0,
        }
    }

    pub fn rates(&self) -> RateMatrices {
        RateMatrices { relaxation: self.rates.relaxation, dephasing: self.rates.dephasing }
    }

    pub fn truncation_options(&self) -> TruncationOptions {
        TruncationOptions {
            m_max: self.engine.m_max,
            tol: self.engine.truncation_tol,
            probe_times: self.engine.probe_times_ns.clone(),
        }
    }

    pub fn readout_config(&self) -> Result<ReadoutConfig, CliError> {
        Ok(ReadoutConfig {
            drive: self.drive(),
            rates: self.rates(),
            rates_angular: self.rates.rates_angular,
            epsilon: self.readout.epsilon,
            t_max_ns: self.readout.t_max_ns,
            grid: self.readout.grid,
            target: self.target()?,
            probability_model: self.probability_model()?,
            truncation: self.engine.m,
            truncation_options: self.truncation_options(),
        })
    }

    pub fn validation_options(&self) -> ValidationOptions {
        ValidationOptions {
            seed: self.engine.seed,
            mc_samples: self.engine.mc_samples,
            random_states: self.engine.random_states,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let invalid = |e: stark_readout::Error| CliError::Config(format!("invalid configuration: {e}"));
        self.readout_config()?.validate().map_err(invalid)?;
        if self.engine.probe_times_ns.is_empty() || self.engine.probe_times_ns.iter().any(|t| !(*t >= 0.0)) {
            return Err(CliError::Config("engine.probe_times_ns must be a non-empty list of times >= 0".into()));
        }
        if !(self.engine.truncation_tol > 0.0) {
            return Err(CliError::Config("engine.truncation_tol must be > 0".into()));
        }
        if self.engine.mc_samples == 0 || self.engine.random_states == 0 {
            return Err(CliError::Config("engine.mc_samples and engine.random_states must be > 0".into()));
        }
        Ok(())
    }
}

fn to_table(cfg: &RunConfig) -> Result<toml::Table, CliError> {
    match toml::Value::try_from(cfg) {
        Ok(toml::Value::Table(t)) => Ok(t),
        _ => Err(CliError::Config("config does not serialize to a table".into())),
    }
}

/// Applies `section.key=value`. The value is read as a TOML literal, falling back to a bare string.
pub fn apply_override(table: &mut toml::Table, item: &str) -> Result<(), CliError> {
    let (path, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override '{item}' is not of the form section.key=value")))?;
    let (path, raw) = (path.trim(), raw.trim());
    let (section, key) =
        path.split_once('.').ok_or_else(|| CliError::Config(format!("override key '{path}' needs a section")))?;
    let Some(toml::Value::Table(dst)) = table.get_mut(section) else {
        return Err(CliError::Config(format!("unknown config section '{section}' in '{path}'")));
    };
    if !dst.contains_key(key) && !(section == "engine" && key == "M") {
        return Err(CliError::Config(format!("unknown key '{path}'")));
    }
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    dst.insert(key.to_string(), value);
    RunConfig::from_table(table.clone()).map(|_| ()).map_err(|e| CliError::Config(format!("{path} = {raw}: {e}")))
}
