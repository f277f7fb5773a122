use crate::error::{Error, Result};

use super::monte_carlo::TrialOutcome;

/// Summary of the calibration error over the successful trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorStats {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    pub mean: f64,
    pub success_count: usize,
    pub failure_count: usize,
}

/// Quantile with linear interpolation between order statistics, position
/// `p * (len - 1)` (the inclusive definition). `sorted` must be ascending
/// and non-empty.
pub fn quantile_inclusive(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

pub fn summarize(outcomes: &[TrialOutcome]) -> Result<ErrorStats> {
    let mut errors: Vec<f64> = outcomes
        .iter()
        .filter(|o| o.is_success())
        .filter_map(|o| o.epsilon)
        .collect();
    let failure_count = outcomes.len() - errors.len();
    if errors.is_empty() {
        return Err(Error::AllTrialsFailed {
            failures: failure_count,
        });
    }
    errors.sort_by(f64::total_cmp);

    let q1 = quantile_inclusive(&errors, 0.25);
    let median = quantile_inclusive(&errors, 0.5);
    let q3 = quantile_inclusive(&errors, 0.75);
    let mean = errors.iter().sum::<f64>() / errors.len() as f64;
    Ok(ErrorStats {
        median,
        q1,
        q3,
        iqr: q3 - q1,
        mean,
        success_count: errors.len(),
        failure_count,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
}

impl PowerLawFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.prefactor * x.powf(self.exponent)
    }
}

/// Fits `y = prefactor * x^exponent` by ordinary least squares on
/// `(ln x, ln y)`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<PowerLawFit> {
    if xs.len() != ys.len() {
        return Err(Error::ShapeMismatch {
            left: (xs.len(), 1),
            right: (ys.len(), 1),
        });
    }
    if xs.iter().chain(ys).any(|&v| !(v.is_finite() && v > 0.0)) {
        return Err(Error::NonPositiveInput);
    }
    if xs.len() < 2 || xs.iter().all(|&x| x == xs[0]) {
        return Err(Error::DegenerateFit);
    }

    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mean_x = lx.iter().sum::<f64>() / n;
    let mean_y = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mean_x).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let syy: f64 = ly.iter().map(|y| (y - mean_y).powi(2)).sum();

    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };

    Ok(PowerLawFit {
        exponent: slope,
        prefactor: intercept.exp(),
        r_squared,
    })
}
