//! Rank-`d` truncated SVD of the readings matrix.
//!
//! The readings are factored as `u * diag(s) * wᵀ` with `u` of size `m x d`
//! and `w` of size `n x d`, so that the columns of `u` span the estimated
//! sensor-space subspace and `b = diag(s) * wᵀ` holds the coordinates of
//! every position in that basis. No mean-centering is applied: the
//! measurement model has no offset and the subspace must contain the origin.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::svd;
use crate::types::ReadingsMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedFactors {
    /// `m x d`, orthonormal columns.
    pub u: DMatrix<f64>,
    /// Retained singular values, descending.
    pub singular_values: DVector<f64>,
    /// `n x d`, orthonormal columns.
    pub w: DMatrix<f64>,
    /// `d x n` coordinates `diag(s) * wᵀ`.
    pub coords_b: DMatrix<f64>,
    /// Full spectrum of the readings, descending, length `min(m, n)`.
    pub spectrum: DVector<f64>,
}

impl TruncatedFactors {
    pub fn dim(&self) -> usize {
        self.singular_values.len()
    }

    /// Diagonal `d x d` matrix of retained singular values.
    pub fn s(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.singular_values)
    }

    /// Best rank-`d` approximation `u * b` of the readings.
    pub fn approximation(&self) -> DMatrix<f64> {
        &self.u * &self.coords_b
    }

    /// Root-sum-square of the singular values beyond index `d`.
    pub fn discarded_energy(&self) -> f64 {
        self.spectrum
            .iter()
            .skip(self.dim())
            .map(|s| s * s)
            .sum::<f64>()
            .sqrt()
    }
}

/// Computes the rank-`dim` truncated SVD with a deterministic sign
/// convention: the largest-magnitude entry of every column of `u` is
/// positive (lowest row index on ties), with the matching column of `w`
/// flipped alongside.
pub fn truncated_svd(readings: &ReadingsMatrix, dim: usize) -> Result<TruncatedFactors> {
    let m = readings.as_matrix();
    let max = m.nrows().min(m.ncols());
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    if dim > max {
        return Err(Error::DimensionTooLarge { dim, max });
    }

    let full = svd(m);
    let spectrum = full.singular_values.clone();

    let mut u = full.u.columns(0, dim).clone_owned();
    let mut w = full.v.columns(0, dim).clone_owned();
    for k in 0..dim {
        if u[(dominant_index(u.column(k).as_slice()), k)] < 0.0 {
            u.column_mut(k).neg_mut();
            w.column_mut(k).neg_mut();
        }
    }

    let singular_values = spectrum.rows(0, dim).clone_owned();
    let coords_b = DMatrix::from_diagonal(&singular_values) * w.transpose();

    Ok(TruncatedFactors {
        u,
        singular_values,
        w,
        coords_b,
        spectrum,
    })
}

/// Index of the largest-magnitude entry, first one on ties.
pub(crate) fn dominant_index(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if v.abs() > values[best].abs() {
            best = i;
        }
    }
    best
}
