//! Command-level error type and its mapping onto process exit codes.
//!
//! The codes are part of the tool's contract (scripts branch on them):
//!
//! | code | meaning                                                        |
//! |------|----------------------------------------------------------------|
//! | 0    | report produced without hard errors                            |
//! | 1    | other runtime failure (empty dataset, non-finite input, …)     |
//! | 2    | configuration or usage error, detected before any computation  |
//! | 3    | I/O or parse failure (file system, malformed CSV/JSON)         |
//! | 4    | rank-deficient / unidentifiable system (needs ≥ 3 distinct loads) |
//! | 5    | degenerate geometry (collapsed span, coplanar or non-ellipsoid points) |
//! | 6    | ill-conditioned calibration refused (pass `--force` to accept) |

use std::path::PathBuf;

use ftcal_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {what}", path.display())]
    Parse { path: PathBuf, line: usize, what: String },

    #[error("{}: no samples left after gravity-norm screening", path.display())]
    NoValidSamples { path: PathBuf },

    #[error(
        "calibration system is ill-conditioned (condition {condition:.3e}); \
         rerun with --force to accept the estimate anyway"
    )]
    IllConditioned { condition: f64 },

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Config(_) => 2,
            Self::Io { .. } | Self::Parse { .. } => 3,
            Self::IllConditioned { .. } => 6,
            Self::Core(core) => match core {
                CoreError::RankDeficientSystem { .. }
                | CoreError::NotIdentifiable(_)
                | CoreError::RankDeficientInertial => 4,
                CoreError::DegenerateSpan { .. }
                | CoreError::DegeneratePointSet { .. }
                | CoreError::NonEllipsoidQuadric => 5,
                _ => 1,
            },
            Self::NoValidSamples { .. } => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
