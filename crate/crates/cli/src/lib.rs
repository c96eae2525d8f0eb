//! Command implementations behind the `fourbvp` binary. Each command returns
//! its report as text together with an [`ExitStatus`], so it can be driven
//! from tests without spawning a process.

// Index loops read closer to the stencil formulas.
#![allow(clippy::needless_range_loop)]

pub mod commands;
pub mod exit;
pub mod fixtures;
pub mod format;
pub mod problem;

pub use exit::{CliError, ExitStatus};
pub use problem::ProblemFile;
