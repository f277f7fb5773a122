//! Input types: the readings matrix and a calibration problem built on it.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Sensor read-outs, one row per sensor and one column per position.
///
/// Entries are finite and the matrix has at least one row and column.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadingsMatrix(DMatrix<f64>);

impl ReadingsMatrix {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::EmptyReadings {
                rows: values.nrows(),
                cols: values.ncols(),
            });
        }
        for col in 0..values.ncols() {
            for row in 0..values.nrows() {
                if !values[(row, col)].is_finite() {
                    return Err(Error::NonFiniteInput { row, col });
                }
            }
        }
        Ok(Self(values))
    }

    /// Number of sensors (rows).
    pub fn sensors(&self) -> usize {
        self.0.nrows()
    }

    /// Number of positions (columns).
    pub fn positions(&self) -> usize {
        self.0.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

impl AsRef<DMatrix<f64>> for ReadingsMatrix {
    fn as_ref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// Readings together with the ambient dimension and the magnitude of the
/// measured vector quantity.
#[derive(Debug, Clone)]
pub struct CalibrationProblem {
    readings: ReadingsMatrix,
    dim: usize,
    magnitude: f64,
    scale_unresolved: bool,
}

impl CalibrationProblem {
    /// Builds a problem with a known magnitude `c > 0`.
    pub fn new(readings: ReadingsMatrix, dim: usize, magnitude: f64) -> Result<Self> {
        if !(magnitude.is_finite() && magnitude > 0.0) {
            return Err(Error::InvalidMagnitude(magnitude));
        }
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self {
            readings,
            dim,
            magnitude,
            scale_unresolved: false,
        })
    }

    /// Builds a problem whose magnitude is not known. The magnitude is taken
    /// as 1, which fixes sensor axes but leaves one common scale factor open.
    pub fn with_unknown_magnitude(readings: ReadingsMatrix, dim: usize) -> Result<Self> {
        let mut problem = Self::new(readings, dim, 1.0)?;
        problem.scale_unresolved = true;
        Ok(problem)
    }

    pub fn readings(&self) -> &ReadingsMatrix {
        &self.readings
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn scale_unresolved(&self) -> bool {
        self.scale_unresolved
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_entries() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, f64::NAN, 0.0, 1.0]);
        assert!(matches!(
            ReadingsMatrix::new(m),
            Err(Error::NonFiniteInput { row: 0, col: 1 })
        ));
    }

    #[test]
    fn rejects_empty() {
        assert!(matches!(
            ReadingsMatrix::new(DMatrix::zeros(0, 3)),
            Err(Error::EmptyReadings { .. })
        ));
    }

    #[test]
    fn magnitude_must_be_positive() {
        let r = ReadingsMatrix::new(DMatrix::identity(3, 3)).unwrap();
        assert!(CalibrationProblem::new(r.clone(), 3, 0.0).is_err());
        assert!(CalibrationProblem::new(r.clone(), 3, -1.0).is_err());
        assert!(matches!(
            CalibrationProblem::new(r, 0, 1.0),
            Err(Error::ZeroDimension)
        ));
    }

    #[test]
    fn unknown_magnitude_defaults_to_unit() {
        let r = ReadingsMatrix::new(DMatrix::identity(3, 3)).unwrap();
        let p = CalibrationProblem::with_unknown_magnitude(r, 2).unwrap();
        assert_eq!(p.magnitude(), 1.0);
        assert!(p.scale_unresolved());
    }
}
