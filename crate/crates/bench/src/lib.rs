//! Fixtures shared by the benchmarks.

use pcacal_core::simulation::{a_model, perturb_axes, random_positions, simulate_readings, trial_rng};
use pcacal_core::CalibrationProblem;

/// A perturbed four-triad gyroscope array observed at `positions` random
/// unit-magnitude positions with reading noise `noise_sigma`.
pub fn gyro_problem(positions: usize, noise_sigma: f64, seed: u64) -> CalibrationProblem {
    let mut rng = trial_rng(seed, 0);
    let a = perturb_axes(&a_model(), 0.01, &mut rng);
    let v = random_positions(positions, 1.0, 3, &mut rng).expect("non-degenerate draw");
    let readings = simulate_readings(&a, &v, noise_sigma, &mut rng).expect("finite readings");
    CalibrationProblem::new(readings, 3, 1.0).expect("valid problem")
}
