//! Recovery of the symmetric Gram matrix `g = fᵀf` from the norm
//! constraints `c² = b_jᵀ g b_j`, and its factorization into `f`.
//!
//! `g` is parameterized by its upper triangle in row-major order
//! `(1,1), (1,2), …, (1,d), (2,2), …, (d,d)`; off-diagonal coefficients are
//! doubled in the design matrix so that the assembled `g` is symmetric by
//! construction.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{svd, symmetric_eigen};
use crate::svd::dominant_index;

/// Relative singular-value cutoff used to decide the rank of the design.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Ratio `λ_min / λ_max` below which a positive-definite Gram is flagged.
pub const DEFAULT_SPD_FLOOR: f64 = 1e-9;

/// Number of free parameters of a symmetric `d x d` matrix.
pub fn gram_param_count(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

fn dim_from_param_count(params: usize) -> Option<usize> {
    (1..=params).find(|&d| gram_param_count(d) == params)
}

/// Linear least-squares estimate of `g` before factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct GramEstimate {
    pub g: DMatrix<f64>,
    /// RMS of `rhs − design·x` over positions.
    pub residual: f64,
}

/// How to treat a Gram matrix that is not comfortably positive definite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramPolicy {
    pub spd_floor: f64,
    /// When set, eigenvalues below `floor * λ_max` are raised to it instead
    /// of failing.
    pub clamp_floor: Option<f64>,
}

impl Default for GramPolicy {
    fn default() -> Self {
        Self {
            spd_floor: DEFAULT_SPD_FLOOR,
            clamp_floor: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramSolution {
    pub g: DMatrix<f64>,
    /// Eigenvalues of `g`, descending.
    pub eigenvalues: DVector<f64>,
    /// Spectrum actually used for `factor_f`; differs from `eigenvalues`
    /// only when clamping kicked in.
    pub accepted_eigenvalues: DVector<f64>,
    /// Orthogonal, rows are eigenvectors: `g = qᵀ diag(λ) q`.
    pub q: DMatrix<f64>,
    /// `diag(λ)^½ q`.
    pub factor_f: DMatrix<f64>,
    pub residual: f64,
    /// `λ_min < spd_floor * λ_max`.
    pub near_singular: bool,
    pub clamped: bool,
}

impl GramSolution {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }
}

/// Builds the `n x d(d+1)/2` design matrix and constant right-hand side of
/// the norm equations for the coordinate columns `b_j`.
pub fn build_gram_system(coords_b: &DMatrix<f64>, magnitude: f64) -> (DMatrix<f64>, DVector<f64>) {
    let dim = coords_b.nrows();
    let n = coords_b.ncols();
    let mut design = DMatrix::zeros(n, gram_param_count(dim));
    for j in 0..n {
        let b = coords_b.column(j);
        let mut p = 0;
        for k in 0..dim {
            for l in k..dim {
                let coef = b[k] * b[l];
                design[(j, p)] = if k == l { coef } else { 2.0 * coef };
                p += 1;
            }
        }
    }
    let rhs = DVector::from_element(n, magnitude * magnitude);
    (design, rhs)
}

/// Least-squares solve of the Gram system via SVD of the design.
///
/// Fails with [`Error::DeficientPositions`] when the numerical rank (cutoff
/// `rank_tol * σ_max`) is below the number of unknowns.
pub fn solve_gram(design: &DMatrix<f64>, rhs: &DVector<f64>, rank_tol: f64) -> Result<GramEstimate> {
    let params = design.ncols();
    let dim = dim_from_param_count(params).ok_or_else(|| {
        Error::InvalidConfig(format!("{params} columns is not a triangular parameter count"))
    })?;
    if design.nrows() != rhs.len() {
        return Err(Error::ShapeMismatch {
            left: design.shape(),
            right: (rhs.len(), 1),
        });
    }
    if design.nrows() < params {
        return Err(Error::DeficientPositions {
            rank: design.nrows(),
            required: params,
        });
    }

    let dec = svd(design);
    let sigma_max = dec.singular_values[0];
    let cutoff = rank_tol * sigma_max;
    let rank = dec.singular_values.iter().filter(|&&s| s > cutoff).count();
    if rank < params || sigma_max <= 0.0 {
        return Err(Error::DeficientPositions {
            rank,
            required: params,
        });
    }

    let projected = dec.u.tr_mul(rhs);
    let scaled = DVector::from_iterator(
        params,
        projected
            .iter()
            .zip(dec.singular_values.iter())
            .map(|(p, s)| p / s),
    );
    let x = &dec.v * scaled;

    let residual_vec = rhs - design * &x;
    let residual = (residual_vec.norm_squared() / rhs.len() as f64).sqrt();

    Ok(GramEstimate {
        g: assemble_symmetric(&x, dim),
        residual,
    })
}

/// Inverse of the upper-triangle parameterization.
pub fn assemble_symmetric(params: &DVector<f64>, dim: usize) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(dim, dim);
    let mut p = 0;
    for k in 0..dim {
        for l in k..dim {
            g[(k, l)] = params[p];
            g[(l, k)] = params[p];
            p += 1;
        }
    }
    g
}

/// Eigendecomposition `g = qᵀ diag(λ) q` and the factor `f = diag(λ)^½ q`.
///
/// Eigenvalues are sorted descending and each row of `q` has its
/// largest-magnitude entry positive.
pub fn factor_gram(estimate: &GramEstimate, policy: &GramPolicy) -> Result<GramSolution> {
    let dim = estimate.g.nrows();
    let eig = symmetric_eigen(&estimate.g);
    let eigenvalues = eig.values;
    let mut q = eig.vectors.transpose();
    for row in 0..dim {
        if q[(row, dominant_index(q.row(row).transpose().as_slice()))] < 0.0 {
            q.row_mut(row).neg_mut();
        }
    }

    let lambda_max = eigenvalues[0];
    let lambda_min = eigenvalues[dim - 1];
    if !(lambda_max > 0.0) {
        return Err(Error::IllConditionedGram {
            eigenvalues: eigenvalues.iter().copied().collect(),
        });
    }
    let near_singular = lambda_min < policy.spd_floor * lambda_max;

    let mut accepted = eigenvalues.clone();
    let mut clamped = false;
    match policy.clamp_floor {
        Some(floor) => {
            let threshold = floor * lambda_max;
            for v in accepted.iter_mut() {
                if *v < threshold {
                    *v = threshold;
                    clamped = true;
                }
            }
            if !(accepted[dim - 1] > 0.0) {
                return Err(Error::IllConditionedGram {
                    eigenvalues: eigenvalues.iter().copied().collect(),
                });
            }
        }
        None if lambda_min <= 0.0 => {
            return Err(Error::IllConditionedGram {
                eigenvalues: eigenvalues.iter().copied().collect(),
            });
        }
        None => {}
    }

    let factor_f = DMatrix::from_diagonal(&accepted.map(f64::sqrt)) * &q;

    Ok(GramSolution {
        g: estimate.g.clone(),
        eigenvalues,
        accepted_eigenvalues: accepted,
        q,
        factor_f,
        residual: estimate.residual,
        near_singular,
        clamped,
    })
}
