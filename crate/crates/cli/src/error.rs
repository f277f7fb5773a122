//! Errors surfaced by the command-line tool and their exit codes.
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | output could not be written |
//! | 2 | positions cannot determine the Gram matrix |
//! | 3 | Gram matrix not positive definite |
//! | 4 | design violates the position/sensor bounds |
//! | 5 | input file unreadable or malformed |
//! | 6 | invalid arguments or configuration |
//! | 7 | other numerical failure |

use std::path::PathBuf;

use pcacal_core::Error as CoreError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_OUTPUT: i32 = 1;
pub const EXIT_DEFICIENT_POSITIONS: i32 = 2;
pub const EXIT_ILL_CONDITIONED_GRAM: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;
pub const EXIT_PARSE: i32 = 5;
pub const EXIT_CONFIG: i32 = 6;
pub const EXIT_NUMERICAL: i32 = 7;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{}: {source}", path.display())]
    Input {
        path: PathBuf,
        #[source]
        source: CoreError,
    },

    #[error("cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Core(e) => core_exit_code(e),
            Self::Input { .. } => EXIT_PARSE,
            Self::Output { .. } => EXIT_OUTPUT,
            Self::Config(_) => EXIT_CONFIG,
        }
    }
}

pub fn core_exit_code(err: &CoreError) -> i32 {
    match err {
        CoreError::DeficientPositions { .. } => EXIT_DEFICIENT_POSITIONS,
        CoreError::IllConditionedGram { .. } => EXIT_ILL_CONDITIONED_GRAM,
        CoreError::Infeasible(_) => EXIT_INFEASIBLE,
        CoreError::Parse { .. } | CoreError::NonFiniteInput { .. } | CoreError::EmptyReadings { .. } => {
            EXIT_PARSE
        }
        CoreError::InvalidConfig(_)
        | CoreError::ZeroDimension
        | CoreError::DimensionTooLarge { .. }
        | CoreError::InvalidMagnitude(_)
        | CoreError::ShapeMismatch { .. } => EXIT_CONFIG,
        CoreError::Io(_) => EXIT_OUTPUT,
        CoreError::RankDeficient { .. }
        | CoreError::DegenerateDraw { .. }
        | CoreError::AllTrialsFailed { .. }
        | CoreError::NonPositiveInput
        | CoreError::DegenerateFit => EXIT_NUMERICAL,
    }
}
