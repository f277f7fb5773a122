use std::fmt;

use crate::feasibility::FeasibilityReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("readings matrix is empty ({rows}x{cols})")]
    EmptyReadings { rows: usize, cols: usize },

    #[error("non-finite value at row {row}, column {col}")]
    NonFiniteInput { row: usize, col: usize },

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("dimension {dim} exceeds min(sensors, positions) = {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("magnitude must be positive and finite, got {0}")]
    InvalidMagnitude(f64),

    #[error(
        "positions cannot determine the Gram matrix: design rank {rank} < {required} unknowns"
    )]
    DeficientPositions { rank: usize, required: usize },

    #[error("Gram matrix is not positive definite, eigenvalues {}", Spectrum(.eigenvalues))]
    IllConditionedGram { eigenvalues: Vec<f64> },

    #[error("infeasible design: {0}")]
    Infeasible(FeasibilityReport),

    #[error("leading {dim}x{dim} block is rank deficient")]
    RankDeficient { dim: usize },

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("random draw collapsed to the origin after {attempts} attempts")]
    DegenerateDraw { attempts: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("all {failures} trials failed")]
    AllTrialsFailed { failures: usize },

    #[error("power-law fit requires positive inputs")]
    NonPositiveInput,

    #[error("power-law fit requires at least two distinct abscissae")]
    DegenerateFit,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

struct Spectrum<'a>(&'a [f64]);

impl fmt::Display for Spectrum<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v:.6e}")?;
        }
        write!(f, "]")
    }
}
