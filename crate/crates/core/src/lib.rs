//! Closed-form calibration of systems of single-axis sensors.
//!
//! Each sensor reads the projection of a vector quantity of known constant
//! magnitude onto its sensitivity vector. Given readings at several
//! positions, [`calibrate`] recovers every sensitivity vector (axis and
//! gain) up to one common orthogonal transformation using a truncated SVD,
//! a linear least-squares solve for a small Gram matrix and its
//! eigendecomposition. No iterative optimization is involved.
//!
//! ```
//! use nalgebra::DMatrix;
//! use pcacal_core::{calibrate, calibration_error, CalibrationOptions, CalibrationProblem, ReadingsMatrix};
//! use pcacal_core::simulation::{a_model, random_positions, trial_rng};
//!
//! let mut rng = trial_rng(7, 0);
//! let a = a_model();
//! let v = random_positions(20, 1.0, 3, &mut rng).unwrap();
//! let readings = ReadingsMatrix::new(a.transpose() * &v).unwrap();
//! let problem = CalibrationProblem::new(readings, 3, 1.0).unwrap();
//! let result = calibrate(&problem, &CalibrationOptions::default()).unwrap();
//! assert!(calibration_error(&a, &result.a_hat).unwrap() < 1e-9);
//! ```

pub mod alignment;
pub mod calibrate;
pub mod error;
pub mod feasibility;
pub mod gram;
pub mod io;
pub mod linalg;
pub mod simulation;
pub mod svd;
pub mod types;

pub use alignment::{calibration_error, canonical_triangular, procrustes_distance, CanonicalForm};
pub use calibrate::{calibrate, CalibrationOptions, CalibrationResult};
pub use error::{Error, Result};
pub use feasibility::{feasibility, min_positions, FeasibilityFailure, FeasibilityReport};
pub use gram::{build_gram_system, factor_gram, solve_gram, GramEstimate, GramPolicy, GramSolution};
pub use svd::{truncated_svd, TruncatedFactors};
pub use types::{CalibrationProblem, ReadingsMatrix};
