pub mod circle;
pub mod fuzzy;
pub mod sphere;
pub mod verify;

use crate::CommandError;

/// Maps any model-layer failure into a run error (exit code 1).
pub fn run_err(e: impl std::fmt::Display) -> CommandError {
    CommandError::Run(e.to_string())
}
