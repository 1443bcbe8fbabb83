//! Flat `key = value` run configuration.
//!
//! ```text
//! # default run
//! mass_kg = 0.001
//! omega1_rad_s = 10000
//! meter_kind = qnd_x1
//! ```
//!
//! Keys not present keep their defaults. Unknown and repeated keys are
//! errors. `#` starts a comment anywhere on a line.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::measurement::{CollapsePolicy, MeterKind, MeterSpec};
use crate::noise_budget::BudgetInputs;
use crate::observables::{BathModel, OscillatorParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mass_kg: f64,
    pub omega1_rad_s: f64,
    pub tau1_s: f64,
    #[serde(rename = "temperature_K")]
    pub temperature_k: f64,
    pub bath_model: BathModel,
    pub meter_kind: MeterKind,
    pub sigma_m_m: f64,
    pub collapse_policy: CollapsePolicy,
    pub dt_s: f64,
    pub n_meas: usize,
    pub n_traj: usize,
    pub burn_in_s: f64,
    pub seed: u64,
    /// Electrical mode, only used for the reported `eta2`.
    pub omega2_rad_s: f64,
    pub tau2_s: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mass_kg: 1e-3,
            omega1_rad_s: 1e4,
            tau1_s: 1e4,
            temperature_k: 0.05,
            bath_model: BathModel::Classical,
            meter_kind: MeterKind::QndX1,
            sigma_m_m: 1e-20,
            collapse_policy: CollapsePolicy::Orthodox,
            dt_s: 1e-2,
            n_meas: 100,
            n_traj: 10_000,
            burn_in_s: 0.0,
            seed: 1,
            omega2_rad_s: 1e8,
            tau2_s: 1.0,
        }
    }
}

pub const CONFIG_KEYS: [&str; 15] = [
    "mass_kg",
    "omega1_rad_s",
    "tau1_s",
    "temperature_K",
    "bath_model",
    "meter_kind",
    "sigma_m_m",
    "collapse_policy",
    "dt_s",
    "n_meas",
    "n_traj",
    "burn_in_s",
    "seed",
    "omega2_rad_s",
    "tau2_s",
];

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| Error::Config(format!("bad value `{value}` for `{key}`: {e}")))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        let mut seen = std::collections::HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`, got `{line}`", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
            config
                .set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Recover the config echoed inside a run summary.
    pub fn from_summary_json(text: &str) -> Result<Self> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("summary is not a run echo: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Sets one key from its text form. Does not re-validate the whole config.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "mass_kg" => self.mass_kg = parse_num(key, value)?,
            "omega1_rad_s" => self.omega1_rad_s = parse_num(key, value)?,
            "tau1_s" => self.tau1_s = parse_num(key, value)?,
            "temperature_K" => self.temperature_k = parse_num(key, value)?,
            "bath_model" => self.bath_model = value.parse()?,
            "meter_kind" => self.meter_kind = value.parse()?,
            "sigma_m_m" => self.sigma_m_m = parse_num(key, value)?,
            "collapse_policy" => self.collapse_policy = value.parse()?,
            "dt_s" => self.dt_s = parse_num(key, value)?,
            "n_meas" => self.n_meas = parse_num(key, value)?,
            "n_traj" => self.n_traj = parse_num(key, value)?,
            "burn_in_s" => self.burn_in_s = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "omega2_rad_s" => self.omega2_rad_s = parse_num(key, value)?,
            "tau2_s" => self.tau2_s = parse_num(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let wrap = |e: Error| Error::Config(e.to_string());
        self.oscillator().map_err(wrap)?;
        self.meter().map_err(wrap)?;
        require_positive("dt_s", self.dt_s).map_err(wrap)?;
        require_positive("omega2_rad_s", self.omega2_rad_s).map_err(wrap)?;
        require_positive("tau2_s", self.tau2_s).map_err(wrap)?;
        if !(self.burn_in_s.is_finite() && self.burn_in_s >= 0.0) {
            return Err(Error::Config(format!("burn_in_s must be >= 0, got {}", self.burn_in_s)));
        }
        if self.n_meas == 0 {
            return Err(Error::Config("n_meas must be >= 1".into()));
        }
        if self.n_traj == 0 || self.n_traj as u64 >= 1 << 63 {
            return Err(Error::Config(format!("n_traj must be in [1, 2^63), got {}", self.n_traj)));
        }
        Ok(())
    }

    pub fn oscillator(&self) -> Result<OscillatorParams> {
        OscillatorParams::new(
            self.mass_kg,
            self.omega1_rad_s,
            self.tau1_s,
            self.temperature_k,
            self.bath_model,
        )
    }

    pub fn meter(&self) -> Result<MeterSpec> {
        MeterSpec::new(self.meter_kind, self.sigma_m_m)
    }

    pub fn budget_inputs(&self) -> BudgetInputs {
        BudgetInputs {
            temperature: self.temperature_k,
            omega1: self.omega1_rad_s,
            tau1: self.tau1_s,
            omega2: self.omega2_rad_s,
            tau2: self.tau2_s,
            dt: self.dt_s,
            amplifier_quanta: 1.0,
            mass: self.mass_kg,
        }
    }

    /// Text form accepted by [`RunConfig::parse`]. Floats use the shortest
    /// representation that round-trips.
    pub fn to_config_text(&self) -> String {
        let mut out = String::new();
        for key in CONFIG_KEYS {
            let value = match key {
                "mass_kg" => format!("{:?}", self.mass_kg),
                "omega1_rad_s" => format!("{:?}", self.omega1_rad_s),
                "tau1_s" => format!("{:?}", self.tau1_s),
                "temperature_K" => format!("{:?}", self.temperature_k),
                "bath_model" => self.bath_model.as_str().to_string(),
                "meter_kind" => self.meter_kind.as_str().to_string(),
                "sigma_m_m" => format!("{:?}", self.sigma_m_m),
                "collapse_policy" => self.collapse_policy.as_str().to_string(),
                "dt_s" => format!("{:?}", self.dt_s),
                "n_meas" => self.n_meas.to_string(),
                "n_traj" => self.n_traj.to_string(),
                "burn_in_s" => format!("{:?}", self.burn_in_s),
                "seed" => self.seed.to_string(),
                "omega2_rad_s" => format!("{:?}", self.omega2_rad_s),
                "tau2_s" => format!("{:?}", self.tau2_s),
                _ => unreachable!(),
            };
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(&value);
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys_with_comments() {
        let text = "\
# a run
mass_kg = 2e-3
omega1_rad_s = 5e3   # slower
tau1_s = 100
temperature_K = 0.1
bath_model = quantum
meter_kind = position
sigma_m_m = 3e-19
collapse_policy = no_conditioning
dt_s = 0.5
n_meas = 7
n_traj = 11
burn_in_s = 2.5
seed = 18446744073709551615
";
        let c = RunConfig::parse(text).unwrap();
        assert_eq!(c.mass_kg, 2e-3);
        assert_eq!(c.omega1_rad_s, 5e3);
        assert_eq!(c.bath_model, BathModel::Quantum);
        assert_eq!(c.meter_kind, MeterKind::Position);
        assert_eq!(c.collapse_policy, CollapsePolicy::NoConditioning);
        assert_eq!((c.n_meas, c.n_traj), (7, 11));
        assert_eq!(c.seed, u64::MAX);
        assert_eq!(c.omega2_rad_s, 1e8);
    }

    #[test]
    fn empty_text_is_the_default() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RunConfig::parse("bogus = 1").is_err());
        assert!(RunConfig::parse("mass_kg 1").is_err());
        assert!(RunConfig::parse("mass_kg = 1\nmass_kg = 2").is_err());
        assert!(RunConfig::parse("mass_kg = -1").is_err());
        assert!(RunConfig::parse("n_traj = 0").is_err());
        assert!(RunConfig::parse("n_meas = -3").is_err());
        assert!(RunConfig::parse("dt_s = 0").is_err());
        assert!(RunConfig::parse("burn_in_s = -1").is_err());
        assert!(RunConfig::parse("meter_kind = ammeter").is_err());
        assert!(RunConfig::parse("sigma_m_m = inf").is_err());
    }

    #[test]
    fn text_echo_round_trips() {
        let c = RunConfig {
            mass_kg: 1.234_567_890_123_456_7e-3,
            sigma_m_m: 3.3e-20,
            seed: 99,
            collapse_policy: CollapsePolicy::NoConditioning,
            ..RunConfig::default()
        };
        assert_eq!(RunConfig::parse(&c.to_config_text()).unwrap(), c);
    }

    #[test]
    fn json_echo_round_trips() {
        let c = RunConfig {
            temperature_k: 0.073,
            bath_model: BathModel::Quantum,
            ..RunConfig::default()
        };
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains("\"temperature_K\":0.073"));
        assert!(json.contains("\"meter_kind\":\"qnd_x1\""));
        assert_eq!(RunConfig::from_summary_json(&json).unwrap(), c);
    }
}
