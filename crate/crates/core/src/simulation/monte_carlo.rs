use std::fmt;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::model::{
    a_model, draw_biases, perturb_axes, random_positions, simulate_bias_protocol,
    simulate_readings,
};
use crate::alignment::calibration_error;
use crate::calibrate::{calibrate, CalibrationOptions};
use crate::error::{Error, Result};
use crate::types::CalibrationProblem;

pub type TrialRng = ChaCha8Rng;

/// Stream reserved for the shared system drawn under `fixed_system`.
pub const FIXED_SYSTEM_STREAM: u64 = u64::MAX;

/// Random stream for trial `trial` of a run seeded with `seed`.
///
/// The master seed keys the generator and the trial index selects an
/// independent ChaCha stream, so a trial's draws do not depend on which
/// other trials ran or in what order.
pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub dim: usize,
    /// Sensitivity template, `dim x sensors`.
    pub model: DMatrix<f64>,
    pub axis_sigma: f64,
    pub noise_sigma: f64,
    pub magnitude: f64,
    pub positions: usize,
    pub trials: usize,
    pub seed: u64,
    pub bias_protocol: bool,
    pub bias_range: f64,
    /// Stationary-phase noise; `None` means the same as `noise_sigma`.
    pub static_noise_sigma: Option<f64>,
    /// Draw one perturbed system and reuse it in every trial.
    pub fixed_system: bool,
    pub parallel: bool,
    pub calibration: CalibrationOptions,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            dim: 3,
            model: a_model(),
            axis_sigma: 0.01,
            noise_sigma: 1e-3,
            magnitude: 1.0,
            positions: 20,
            trials: 1000,
            seed: 42,
            bias_protocol: false,
            bias_range: 0.0,
            static_noise_sigma: None,
            fixed_system: false,
            parallel: true,
            calibration: CalibrationOptions::default(),
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.dim == 0 {
            return fail("dim must be at least 1".into());
        }
        if self.model.nrows() != self.dim {
            return fail(format!(
                "model has {} rows but dim is {}",
                self.model.nrows(),
                self.dim
            ));
        }
        if self.model.ncols() == 0 || self.model.iter().any(|v| !v.is_finite()) {
            return fail("model must be non-empty and finite".into());
        }
        let non_negative = [
            ("axis_sigma", self.axis_sigma),
            ("noise_sigma", self.noise_sigma),
            ("bias_range", self.bias_range),
            ("static_noise_sigma", self.static_noise_sigma()),
        ];
        for (name, value) in non_negative {
            if !(value.is_finite() && value >= 0.0) {
                return fail(format!("{name} must be finite and non-negative, got {value}"));
            }
        }
        if !(self.magnitude.is_finite() && self.magnitude > 0.0) {
            return fail(format!("magnitude must be positive, got {}", self.magnitude));
        }
        if self.positions == 0 {
            return fail("positions must be at least 1".into());
        }
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        Ok(())
    }

    pub fn sensors(&self) -> usize {
        self.model.ncols()
    }

    pub fn static_noise_sigma(&self) -> f64 {
        self.static_noise_sigma.unwrap_or(self.noise_sigma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrialStatus {
    Success,
    Infeasible,
    DeficientPositions,
    IllConditionedGram,
    RankDeficient,
    DegenerateDraw,
    Other,
}

impl TrialStatus {
    pub fn from_error(err: &Error) -> Self {
        match err {
            Error::Infeasible(_) => Self::Infeasible,
            Error::DeficientPositions { .. } => Self::DeficientPositions,
            Error::IllConditionedGram { .. } => Self::IllConditionedGram,
            Error::RankDeficient { .. } => Self::RankDeficient,
            Error::DegenerateDraw { .. } => Self::DegenerateDraw,
            _ => Self::Other,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Success => "success",
            Self::Infeasible => "infeasible",
            Self::DeficientPositions => "deficient_positions",
            Self::IllConditionedGram => "ill_conditioned_gram",
            Self::RankDeficient => "rank_deficient",
            Self::DegenerateDraw => "degenerate_draw",
            Self::Other => "other",
        }
    }
}

impl fmt::Display for TrialStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial_index: usize,
    /// Calibration error; `None` unless the trial succeeded.
    pub epsilon: Option<f64>,
    pub fit_residual: Option<f64>,
    pub status: TrialStatus,
}

impl TrialOutcome {
    pub fn is_success(&self) -> bool {
        self.status == TrialStatus::Success
    }

    fn failed(trial_index: usize, err: &Error) -> Self {
        Self {
            trial_index,
            epsilon: None,
            fit_residual: None,
            status: TrialStatus::from_error(err),
        }
    }
}

fn run_trial(config: &SimulationConfig, fixed: Option<&DMatrix<f64>>, trial: usize) -> TrialOutcome {
    let mut rng = trial_rng(config.seed, trial as u64);
    let mut attempt = || -> Result<(f64, f64)> {
        let a_true = match fixed {
            Some(a) => a.clone(),
            None => perturb_axes(&config.model, config.axis_sigma, &mut rng),
        };
        let v = random_positions(config.positions, config.magnitude, config.dim, &mut rng)?;
        let readings = if config.bias_protocol {
            let biases = draw_biases(config.sensors(), config.bias_range, &mut rng);
            simulate_bias_protocol(
                &a_true,
                &v,
                &biases,
                config.noise_sigma,
                config.static_noise_sigma(),
                &mut rng,
            )?
        } else {
            simulate_readings(&a_true, &v, config.noise_sigma, &mut rng)?
        };
        let problem = CalibrationProblem::new(readings, config.dim, config.magnitude)?;
        let result = calibrate(&problem, &config.calibration)?;
        let epsilon = calibration_error(&a_true, &result.a_hat)?;
        Ok((epsilon, result.fit_residual))
    };
    match attempt() {
        Ok((epsilon, fit_residual)) => TrialOutcome {
            trial_index: trial,
            epsilon: Some(epsilon),
            fit_residual: Some(fit_residual),
            status: TrialStatus::Success,
        },
        Err(err) => TrialOutcome::failed(trial, &err),
    }
}

/// Runs `config.trials` independent calibration trials and returns their
/// outcomes ordered by trial index. Failed trials are kept with a
/// non-success status.
pub fn run_monte_carlo(config: &SimulationConfig) -> Result<Vec<TrialOutcome>> {
    config.validate()?;
    let fixed = config.fixed_system.then(|| {
        let mut rng = trial_rng(config.seed, FIXED_SYSTEM_STREAM);
        perturb_axes(&config.model, config.axis_sigma, &mut rng)
    });
    let fixed = fixed.as_ref();

    let outcomes = if config.parallel {
        (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(config, fixed, t))
            .collect()
    } else {
        (0..config.trials).map(|t| run_trial(config, fixed, t)).collect()
    };
    Ok(outcomes)
}
