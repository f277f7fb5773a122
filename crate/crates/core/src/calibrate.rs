//! End-to-end closed-form calibration.
//!
//! 1. Truncated SVD of the readings: `readings ≈ u · b`, `b = diag(s) wᵀ`.
//! 2. Least-squares Gram matrix from `c² = b_jᵀ g b_j`.
//! 3. `g = qᵀ diag(λ) q`.
//! 4. `v̂ = diag(λ)^½ q b` and `â = diag(λ)^-½ q uᵀ`.
//!
//! Noiseless rank-`d` readings are the special case in which the SVD is
//! exact; no separate code path is needed.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::feasibility::{feasibility, FeasibilityReport};
use crate::gram::{
    build_gram_system, factor_gram, solve_gram, GramPolicy, GramSolution, DEFAULT_RANK_TOL,
    DEFAULT_SPD_FLOOR,
};
use crate::svd::{truncated_svd, TruncatedFactors};
use crate::types::CalibrationProblem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationOptions {
    /// Run even when the counting bounds say the design is infeasible.
    pub force: bool,
    /// Clamp Gram eigenvalues to `floor * λ_max` instead of failing.
    pub clamp_gram: Option<f64>,
    pub rank_tol: f64,
    pub spd_floor: f64,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self {
            force: false,
            clamp_gram: None,
            rank_tol: DEFAULT_RANK_TOL,
            spd_floor: DEFAULT_SPD_FLOOR,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CalibrationResult {
    /// `d x m`; column `i` is the sensitivity vector of sensor `i`.
    pub a_hat: DMatrix<f64>,
    /// `d x n`; column `j` is the measured vector at position `j`.
    pub v_hat: DMatrix<f64>,
    pub gram: GramSolution,
    pub factors: TruncatedFactors,
    /// `‖readings − âᵀ v̂‖_F`.
    pub fit_residual: f64,
    /// Root-sum-square of the discarded singular values.
    pub discarded_energy: f64,
    pub magnitude: f64,
    /// Magnitude was not supplied, so sensor gains share one unknown factor.
    pub scale_unresolved: bool,
    pub feasibility: FeasibilityReport,
    pub warnings: Vec<String>,
}

impl CalibrationResult {
    /// `âᵀ v̂`, the rank-`d` reconstruction of the readings.
    pub fn reconstruction(&self) -> DMatrix<f64> {
        self.a_hat.transpose() * &self.v_hat
    }
}

pub fn calibrate(problem: &CalibrationProblem, options: &CalibrationOptions) -> Result<CalibrationResult> {
    let readings = problem.readings();
    let dim = problem.dim();
    let mut warnings = Vec::new();

    let report = feasibility(readings.positions(), readings.sensors(), dim);
    if !report.is_feasible() {
        if !options.force {
            return Err(Error::Infeasible(report));
        }
        warnings.push(format!("proceeding with infeasible design: {report}"));
    }

    let factors = truncated_svd(readings, dim)?;
    let (design, rhs) = build_gram_system(&factors.coords_b, problem.magnitude());
    let estimate = solve_gram(&design, &rhs, options.rank_tol)?;
    let policy = GramPolicy {
        spd_floor: options.spd_floor,
        clamp_floor: options.clamp_gram,
    };
    let gram = factor_gram(&estimate, &policy)?;
    if gram.clamped {
        warnings.push(format!(
            "Gram eigenvalues clamped at {:e} x lambda_max",
            options.clamp_gram.unwrap_or_default()
        ));
    } else if gram.near_singular {
        warnings.push("Gram matrix is nearly singular".to_string());
    }
    if problem.scale_unresolved() {
        warnings.push("magnitude unknown: gains determined up to a common factor".to_string());
    }

    let sqrt_lambda = gram.accepted_eigenvalues.map(f64::sqrt);
    let inv_sqrt_lambda = sqrt_lambda.map(|s| 1.0 / s);
    let v_hat = DMatrix::from_diagonal(&sqrt_lambda) * &gram.q * &factors.coords_b;
    let a_hat = DMatrix::from_diagonal(&inv_sqrt_lambda) * &gram.q * factors.u.transpose();

    let fit_residual = (readings.as_matrix() - a_hat.transpose() * &v_hat).norm();
    let discarded_energy = factors.discarded_energy();

    Ok(CalibrationResult {
        a_hat,
        v_hat,
        gram,
        factors,
        fit_residual,
        discarded_energy,
        magnitude: problem.magnitude(),
        scale_unresolved: problem.scale_unresolved(),
        feasibility: report,
        warnings,
    })
}
