//! TOML configuration files and run manifests.
//!
//! A configuration file may set any flag by its long name with `-`
//! replaced by `_`. A manifest written by `simulate` or `sweep` uses the
//! same keys plus `tool_version` and `command`, so it can be passed back
//! through `--config` to replay a run.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use pcacal_core::simulation::SimulationConfig;
use pcacal_core::CalibrationOptions;
use serde::{Deserialize, Serialize};

use crate::args::{GlobalArgs, SimArgs, SweepAxis};
use crate::error::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tool_version: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub force: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clamp_gram: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub magnitude: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub positions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis_sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bias_protocol: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bias_range: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub static_noise_sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_system: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parallel: Option<bool>,
    /// Sensitivity template, one inner array per row.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<Vec<Vec<f64>>>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub vary: Option<SweepAxis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn load_optional(path: Option<&Path>) -> Result<Self, CliError> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }
}

fn model_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, CliError> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(CliError::Config("model must be a non-empty rectangular array".into()));
    }
    Ok(DMatrix::from_row_iterator(rows.len(), cols, rows.iter().flatten().copied()))
}

fn model_to_rows(model: &DMatrix<f64>) -> Vec<Vec<f64>> {
    model.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn calibration_options(global: &GlobalArgs, file: &FileConfig) -> CalibrationOptions {
    CalibrationOptions {
        force: global.force || file.force.unwrap_or(false),
        clamp_gram: global.clamp_gram.or(file.clamp_gram),
        ..CalibrationOptions::default()
    }
}

/// Defaults, overridden by the file, overridden by flags.
pub fn resolve_simulation(
    global: &GlobalArgs,
    sim: &SimArgs,
    file: &FileConfig,
) -> Result<SimulationConfig, CliError> {
    let defaults = SimulationConfig::default();
    let model = match &file.model {
        Some(rows) => model_from_rows(rows)?,
        None => defaults.model.clone(),
    };
    let noise_sigma = sim.noise_sigma.or(file.noise_sigma).unwrap_or(defaults.noise_sigma);
    let config = SimulationConfig {
        dim: file.dim.unwrap_or(model.nrows()),
        model,
        axis_sigma: sim.axis_sigma.or(file.axis_sigma).unwrap_or(defaults.axis_sigma),
        noise_sigma,
        magnitude: sim.magnitude.or(file.magnitude).unwrap_or(defaults.magnitude),
        positions: sim.positions.or(file.positions).unwrap_or(defaults.positions),
        trials: sim.trials.or(file.trials).unwrap_or(defaults.trials),
        seed: global.seed.or(file.seed).unwrap_or(defaults.seed),
        bias_protocol: sim.bias_protocol || file.bias_protocol.unwrap_or(defaults.bias_protocol),
        bias_range: sim.bias_range.or(file.bias_range).unwrap_or(defaults.bias_range),
        static_noise_sigma: sim.static_noise_sigma.or(file.static_noise_sigma),
        fixed_system: sim.fixed_system || file.fixed_system.unwrap_or(defaults.fixed_system),
        parallel: if sim.serial { false } else { file.parallel.unwrap_or(defaults.parallel) },
        calibration: calibration_options(global, file),
    };
    config.validate()?;
    Ok(config)
}

/// Manifest recording every resolved simulation setting.
pub fn simulation_manifest(command: &str, config: &SimulationConfig) -> FileConfig {
    FileConfig {
        tool_version: Some(TOOL_VERSION.to_string()),
        command: Some(command.to_string()),
        seed: Some(config.seed),
        force: Some(config.calibration.force),
        clamp_gram: config.calibration.clamp_gram,
        dim: Some(config.dim),
        magnitude: Some(config.magnitude),
        positions: Some(config.positions),
        noise_sigma: Some(config.noise_sigma),
        axis_sigma: Some(config.axis_sigma),
        trials: Some(config.trials),
        bias_protocol: Some(config.bias_protocol),
        bias_range: Some(config.bias_range),
        static_noise_sigma: Some(config.static_noise_sigma()),
        fixed_system: Some(config.fixed_system),
        parallel: Some(config.parallel),
        model: Some(model_to_rows(&config.model)),
        ..FileConfig::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_and_file_overrides_defaults() {
        let file: FileConfig = toml::from_str("trials = 7\npositions = 9\nseed = 3\n").unwrap();
        let sim = SimArgs {
            positions: Some(11),
            ..SimArgs::default()
        };
        let config = resolve_simulation(&GlobalArgs::default(), &sim, &file).unwrap();
        assert_eq!(config.trials, 7);
        assert_eq!(config.positions, 11);
        assert_eq!(config.seed, 3);
        assert_eq!(config.noise_sigma, 1e-3);
    }

    #[test]
    fn manifest_replays_to_same_config() {
        let sim = SimArgs {
            noise_sigma: Some(0.0123),
            bias_protocol: true,
            bias_range: Some(0.2),
            ..SimArgs::default()
        };
        let global = GlobalArgs {
            seed: Some(99),
            ..GlobalArgs::default()
        };
        let config = resolve_simulation(&global, &sim, &FileConfig::default()).unwrap();
        let text = simulation_manifest("simulate", &config).to_toml();
        let reloaded: FileConfig = toml::from_str(&text).unwrap();
        let replay = resolve_simulation(&GlobalArgs::default(), &SimArgs::default(), &reloaded).unwrap();
        assert_eq!(replay.model, config.model);
        assert_eq!(replay.seed, 99);
        assert_eq!(replay.noise_sigma, config.noise_sigma);
        assert_eq!(replay.static_noise_sigma(), config.static_noise_sigma());
        assert!(replay.bias_protocol);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("tirals = 3\n").is_err());
    }

    #[test]
    fn ragged_model_is_rejected() {
        let file: FileConfig = toml::from_str("model = [[1.0, 0.0], [0.0]]\n").unwrap();
        assert!(resolve_simulation(&GlobalArgs::default(), &SimArgs::default(), &file).is_err());
    }
}
