//! Comparison of sensitivity matrices modulo a common orthogonal
//! transformation.
//!
//! Calibration recovers `a` only up to left-multiplication by an orthogonal
//! matrix. Both matrices are therefore rotated into a canonical form whose
//! leading `d x d` block is upper-triangular with a positive diagonal, and
//! compared there with the Frobenius norm.

use nalgebra::{DMatrix, QR};

use crate::error::{Error, Result};
use crate::linalg::svd;

/// Relative tolerance, against the largest singular value, below which a
/// diagonal entry of the triangular block counts as zero.
pub const CANONICAL_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm {
    /// Orthogonal `d x d` matrix with `triangular = rotation * original`.
    pub rotation: DMatrix<f64>,
    pub triangular: DMatrix<f64>,
}

/// Rotates `a` (`d x m`) so that its leading `d x d` block becomes
/// upper-triangular with strictly positive diagonal. No column pivoting is
/// performed.
pub fn canonical_triangular(a: &DMatrix<f64>) -> Result<CanonicalForm> {
    let (dim, cols) = a.shape();
    if dim == 0 || cols < dim {
        return Err(Error::RankDeficient { dim });
    }

    let leading = a.columns(0, dim).clone_owned();
    let qr = QR::new(leading);
    let q = qr.q();
    let r = qr.r();

    let sigma_max = svd(a).singular_values[0];
    let cutoff = CANONICAL_RANK_TOL * sigma_max;
    let mut rotation = q.transpose();
    for k in 0..dim {
        let diag = r[(k, k)];
        if !(diag.abs() > cutoff) {
            return Err(Error::RankDeficient { dim });
        }
        if diag < 0.0 {
            rotation.row_mut(k).neg_mut();
        }
    }

    let mut triangular = &rotation * a;
    // Exact zeros below the diagonal of the leading block.
    for k in 0..dim {
        for row in (k + 1)..dim {
            triangular[(row, k)] = 0.0;
        }
    }

    Ok(CanonicalForm {
        rotation,
        triangular,
    })
}

/// Frobenius distance between the canonical forms of `a_true` and `a_est`.
pub fn calibration_error(a_true: &DMatrix<f64>, a_est: &DMatrix<f64>) -> Result<f64> {
    if a_true.shape() != a_est.shape() {
        return Err(Error::ShapeMismatch {
            left: a_true.shape(),
            right: a_est.shape(),
        });
    }
    let h = canonical_triangular(a_true)?;
    let k = canonical_triangular(a_est)?;
    Ok((h.triangular - k.triangular).norm())
}

/// Orthogonal matrix `r` mapping `a_true` onto the gauge of `a_est`, i.e.
/// `a_est ≈ r * a_true`, read off from the two canonical rotations.
pub fn recovered_gauge(a_true: &DMatrix<f64>, a_est: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let h = canonical_triangular(a_true)?;
    let k = canonical_triangular(a_est)?;
    Ok(k.rotation.transpose() * h.rotation)
}

/// Orthogonal Procrustes distance `min_r ‖a − r b‖_F` over all orthogonal
/// `r`. This is an auxiliary diagnostic; [`calibration_error`] is the
/// reported metric.
pub fn procrustes_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            left: a.shape(),
            right: b.shape(),
        });
    }
    let nuclear: f64 = svd(&(a * b.transpose())).singular_values.sum();
    let sq = a.norm_squared() + b.norm_squared() - 2.0 * nuclear;
    Ok(sq.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn upper() -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 5, &[
            2.0, 0.5, -1.0, 0.3, 1.0,
            0.0, 1.5, 0.2, -0.7, 0.1,
            0.0, 0.0, 0.9, 0.4, -0.2,
        ])
    }

    fn rotation_z(t: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 3, &[t.cos(), -t.sin(), 0.0, t.sin(), t.cos(), 0.0, 0.0, 0.0, 1.0])
    }

    fn rotation_x(t: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, t.cos(), -t.sin(), 0.0, t.sin(), t.cos()])
    }

    #[test]
    fn canonical_matrix_is_a_fixed_point() {
        let c = canonical_triangular(&upper()).unwrap();
        assert_relative_eq!(c.rotation, DMatrix::identity(3, 3), epsilon = 1e-14);
        assert_relative_eq!(c.triangular, upper(), epsilon = 1e-14);
    }

    #[test]
    fn rotated_input_has_same_canonical_form() {
        let r = rotation_z(0.7) * rotation_x(-1.9);
        let c = canonical_triangular(&(&r * upper())).unwrap();
        assert_relative_eq!(c.triangular, upper(), epsilon = 1e-12);
        assert_relative_eq!(c.rotation.transpose() * &c.rotation, DMatrix::identity(3, 3), epsilon = 1e-12);
    }

    #[test]
    fn swap_matrix() {
        // Hand QR: the columns are e2, e1; rotating by the swap gives I.
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let c = canonical_triangular(&a).unwrap();
        assert_relative_eq!(c.triangular, DMatrix::identity(2, 2), epsilon = 1e-15);
        assert_relative_eq!(c.rotation, a, epsilon = 1e-15);
    }

    #[test]
    fn reflection_is_absorbed() {
        let mut refl = DMatrix::identity(3, 3);
        refl[(1, 1)] = -1.0;
        let c = canonical_triangular(&(&refl * upper())).unwrap();
        assert_relative_eq!(c.triangular, upper(), epsilon = 1e-14);
    }

    #[test]
    fn singular_leading_block_is_rejected() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 0.0, 2.0, 4.0, 1.0]);
        assert!(matches!(canonical_triangular(&a), Err(Error::RankDeficient { dim: 2 })));
        assert!(matches!(
            canonical_triangular(&DMatrix::zeros(3, 2)),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn error_of_padded_identity() {
        let mut a = DMatrix::zeros(3, 12);
        for k in 0..3 {
            a[(k, k)] = 1.0;
        }
        let mut b = a.clone();
        b[(0, 2)] += 0.1;
        assert_relative_eq!(calibration_error(&a, &b).unwrap(), 0.1, epsilon = 1e-15);
        assert_relative_eq!(calibration_error(&b, &a).unwrap(), 0.1, epsilon = 1e-15);
        assert_eq!(calibration_error(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn shape_mismatch() {
        assert!(matches!(
            calibration_error(&DMatrix::identity(3, 4), &DMatrix::identity(3, 5)),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn gauge_is_recovered() {
        let r = rotation_x(0.3) * rotation_z(2.1);
        let est = &r * upper();
        let g = recovered_gauge(&upper(), &est).unwrap();
        assert_relative_eq!(g, r, epsilon = 1e-12);
    }

    #[test]
    fn procrustes_is_zero_for_rotations_and_bounded_by_metric() {
        let r = rotation_z(1.1);
        assert!(procrustes_distance(&upper(), &(&r * upper())).unwrap() < 1e-7);
        let mut other = upper();
        other[(2, 4)] += 0.05;
        let p = procrustes_distance(&upper(), &other).unwrap();
        let e = calibration_error(&upper(), &other).unwrap();
        assert!(p <= e + 1e-12);
    }
}
