//! TOML experiment configuration.
//!
//! Every key is optional except where an experiment needs it; unknown keys are
//! rejected so that typos surface as configuration errors.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    FlatAverage,
    HoAverage,
    ZonalAverage,
    Restriction,
    Admissibility,
    SupScaling,
}

impl Experiment {
    pub fn id(self) -> &'static str {
        match self {
            Experiment::FlatAverage => "flat-average",
            Experiment::HoAverage => "ho-average",
            Experiment::ZonalAverage => "zonal-average",
            Experiment::Restriction => "restriction",
            Experiment::Admissibility => "admissibility",
            Experiment::SupScaling => "sup-scaling",
        }
    }

    /// Modes accepted by the experiment; the first is the default.
    pub fn modes(self) -> &'static [&'static str] {
        match self {
            Experiment::HoAverage => &["band", "oracle-triangle", "invariants"],
            Experiment::FlatAverage => &["identity"],
            Experiment::ZonalAverage => &["average", "consistency"],
            Experiment::Restriction => &["fubini"],
            Experiment::Admissibility => &["families"],
            Experiment::SupScaling => &["oscillator"],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Must match the subcommand when present.
    pub experiment: Option<Experiment>,
    pub mode: Option<String>,
    /// Strictly decreasing.
    #[serde(default)]
    pub hbar_list: Vec<f64>,
    /// Zonal degrees; `h = (n (n + 1))^(-1/2)`.
    #[serde(default)]
    pub degrees: Vec<usize>,
    pub t0: Option<f64>,
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub x_samples: Vec<f64>,
    /// Parameter values for the oracle comparison.
    #[serde(default)]
    pub u_values: Vec<f64>,
    pub grid_count: Option<usize>,
    pub box_half_width: Option<f64>,
    /// Gauss–Legendre nodes over `[-epsilon, epsilon]`, or per cutoff panel.
    pub u_nodes: Option<usize>,
    pub disk_radial: Option<usize>,
    pub disk_angular: Option<usize>,
    pub cutoff_inner: Option<f64>,
    pub cutoff_outer: Option<f64>,
    pub circle_nodes: Option<usize>,
    /// `Omega(h) = h^omega_exponent`.
    pub omega_exponent: Option<f64>,
    /// Local sup radius divisor.
    pub c0: Option<f64>,
    /// Admissibility threshold on the smallest singular value.
    pub threshold: Option<f64>,
    #[serde(default)]
    pub families: Vec<String>,
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    /// Checks the parts shared by every experiment and returns the mode.
    pub fn validate(&self, experiment: Experiment) -> Result<String, ConfigError> {
        if let Some(e) = self.experiment {
            if e != experiment {
                return Err(ConfigError::invalid(format!(
                    "config is for {e} but the subcommand is {experiment}"
                )));
            }
        }
        let modes = experiment.modes();
        let mode = self.mode.clone().unwrap_or_else(|| modes[0].to_string());
        if !modes.contains(&mode.as_str()) {
            return Err(ConfigError::invalid(format!(
                "unknown mode {mode:?} for {experiment}; expected one of {modes:?}"
            )));
        }
        if self.hbar_list.iter().any(|h| !(*h > 0.0)) {
            return Err(ConfigError::invalid("hbar_list entries must be positive"));
        }
        if self.hbar_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(ConfigError::invalid(
                "hbar_list must be strictly decreasing",
            ));
        }
        if self.degrees.iter().any(|&n| n == 0) || self.degrees.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::invalid(
                "degrees must be positive and strictly increasing",
            ));
        }
        if let Some(t0) = self.t0 {
            if !(t0 > 0.0) {
                return Err(ConfigError::invalid(format!(
                    "t0 must be positive, got {t0}"
                )));
            }
        }
        if let Some(eps) = self.epsilon {
            if !(eps > 0.0) {
                return Err(ConfigError::invalid("epsilon must be positive"));
            }
        }
        if let Some(w) = self.omega_exponent {
            if !(w > 0.0) {
                return Err(ConfigError::invalid("omega_exponent must be positive"));
            }
        }
        if self
            .x_samples
            .iter()
            .chain(&self.u_values)
            .any(|v| !v.is_finite())
        {
            return Err(ConfigError::invalid("samples must be finite"));
        }
        Ok(mode)
    }

    pub fn require_hbars(&self) -> Result<&[f64], ConfigError> {
        if self.hbar_list.is_empty() {
            return Err(ConfigError::invalid("hbar_list is required"));
        }
        Ok(&self.hbar_list)
    }

    pub fn require_degrees(&self) -> Result<&[usize], ConfigError> {
        if self.degrees.is_empty() {
            return Err(ConfigError::invalid("degrees is required"));
        }
        Ok(&self.degrees)
    }

    pub fn require_t0(&self) -> Result<f64, ConfigError> {
        self.t0
            .ok_or_else(|| ConfigError::invalid("t0 is required"))
    }

    pub fn require_epsilon(&self) -> Result<f64, ConfigError> {
        self.epsilon
            .ok_or_else(|| ConfigError::invalid("epsilon is required"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_config() {
        let c = ExperimentConfig::from_toml(
            r#"
            experiment = "ho-average"
            hbar_list = [0.08, 0.04]
            t0 = 0.5
            epsilon = 0.5
            x_samples = [0.0, 0.1]
            grid_count = 256
            "#,
        )
        .unwrap();
        assert_eq!(c.experiment, Some(Experiment::HoAverage));
        assert_eq!(c.validate(Experiment::HoAverage).unwrap(), "band");
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            "t0 = 0.0",
            "hbar_list = [0.01, 0.02]",
            "hbar_list = [0.02, 0.02]",
            "hbar_list = [-0.1]",
            "epsilon = -1.0",
            "mode = \"nonsense\"",
            "experiment = \"restriction\"",
            "degrees = [20, 10]",
        ];
        for text in bad {
            let c = ExperimentConfig::from_toml(text).unwrap();
            assert!(c.validate(Experiment::HoAverage).is_err(), "{text}");
        }
    }

    #[test]
    fn rejects_unknown_keys_and_syntax() {
        assert!(ExperimentConfig::from_toml("hbar = 0.1").is_err());
        assert!(ExperimentConfig::from_toml("t0 = ").is_err());
    }
}
