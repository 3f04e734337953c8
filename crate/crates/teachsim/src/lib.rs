//! Simulator and evaluation suite for virtual teacher-learner motor-skill
//! acquisition.
//!
//! A learner and a teacher move on a continuous 2D board, optionally coupled
//! by a virtual elastic band. The learner only ever sees an obscured (noisy)
//! view of the moving target while the teacher sees the truth, which creates
//! the skill gap a teacher can close. The crate provides:
//!
//! - [`env`]: the coupled tracking environment (target generation, noise,
//!   spring forces, location updates),
//! - [`agents`]: a heuristic learner, an adaptive actor-critic learner and
//!   teacher policies (scripted baseline plus loadable snapshots),
//! - [`imitation`]: a desk-scale adversarial imitation loop that trains a
//!   teacher policy from expert trajectory recordings,
//! - [`eval`]: trajectory calibration (Procrustes) and a normalized Fréchet
//!   similarity in `[0, 1]`,
//! - [`stats`]: Welch t-tests and the four hypothesis reports over game-unit
//!   results,
//! - [`runner`]: experiment orchestration (game-unit loops, robustness
//!   sweeps, persistence).
//!
//! See the `examples/` directory for one runnable example per capability and
//! the `teachsim` binary for the command-line interface.

pub mod agents;
pub mod config;
pub mod env;
pub mod eval;
pub mod geom;
pub mod imitation;
pub mod letters;
pub mod nn;
pub mod runner;
pub mod stats;
pub mod trajectory;

use std::path::PathBuf;

pub use geom::{Board, Point2};
pub use trajectory::{Episode, Role, Task, Trajectory};

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path} at line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate trajectory: {0}")]
    Degenerate(String),
    #[error("episode exhausted at step {step} (length {length})")]
    EpisodeExhausted { step: usize, length: usize },
    #[error("policy snapshot shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite gradient at step {step}")]
    NanGradient { step: usize },
    #[error("training diverged at milestone {milestone}: {msg}")]
    Diverged { milestone: usize, msg: String },
    #[error("incomplete data: {0}")]
    IncompleteData(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
