//! Monte-Carlo study of calibration accuracy for a redundant gyroscope
//! array: model construction, synthetic readings, trial harness and error
//! statistics.

mod model;
mod monte_carlo;
mod stats;

pub use model::{
    a_model, draw_biases, perturb_axes, random_positions, simulate_bias_protocol,
    simulate_readings, MAX_REDRAWS,
};
pub use monte_carlo::{
    run_monte_carlo, trial_rng, SimulationConfig, TrialOutcome, TrialRng, TrialStatus,
    FIXED_SYSTEM_STREAM,
};
pub use stats::{fit_power_law, quantile_inclusive, summarize, ErrorStats, PowerLawFit};
