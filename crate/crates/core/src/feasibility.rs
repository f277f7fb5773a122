//! Counting bounds on the number of positions and sensors.

use std::fmt;

/// Minimum number of positions for the Gram system to be determined:
/// `d(d+1)/2`.
pub fn min_positions(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibilityFailure {
    /// `m < d`.
    TooFewSensors,
    /// `n < d(d+1)/2`.
    TooFewPositions,
    /// `(n − d)(m − d + 1) < d(d−1)/2`.
    CountingBound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub positions: usize,
    pub sensors: usize,
    pub dim: usize,
    pub min_positions: usize,
    /// `(n − d)(m − d + 1)`.
    pub counting_lhs: i64,
    /// `d(d−1)/2`.
    pub counting_rhs: i64,
    pub failures: Vec<FeasibilityFailure>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_feasible() {
            return write!(
                f,
                "feasible (n={}, m={}, d={})",
                self.positions, self.sensors, self.dim
            );
        }
        let reasons: Vec<String> = self
            .failures
            .iter()
            .map(|failure| match failure {
                FeasibilityFailure::TooFewSensors => {
                    format!("sensors m={} < d={}", self.sensors, self.dim)
                }
                FeasibilityFailure::TooFewPositions => format!(
                    "positions n={} < d(d+1)/2={}",
                    self.positions, self.min_positions
                ),
                FeasibilityFailure::CountingBound => format!(
                    "(n-d)(m-d+1)={} < d(d-1)/2={}",
                    self.counting_lhs, self.counting_rhs
                ),
            })
            .collect();
        write!(f, "{}", reasons.join("; "))
    }
}

/// Evaluates whether `n` positions of `m` sensors can determine a
/// `d`-dimensional calibration.
pub fn feasibility(positions: usize, sensors: usize, dim: usize) -> FeasibilityReport {
    let (n, m, d) = (positions as i64, sensors as i64, dim as i64);
    let counting_lhs = (n - d) * (m - d + 1);
    let counting_rhs = d * (d - 1) / 2;

    let mut failures = Vec::new();
    if sensors < dim {
        failures.push(FeasibilityFailure::TooFewSensors);
    }
    if positions < min_positions(dim) {
        failures.push(FeasibilityFailure::TooFewPositions);
    }
    if counting_lhs < counting_rhs {
        failures.push(FeasibilityFailure::CountingBound);
    }

    FeasibilityReport {
        positions,
        sensors,
        dim,
        min_positions: min_positions(dim),
        counting_lhs,
        counting_rhs,
        failures,
    }
}
