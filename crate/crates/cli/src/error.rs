use std::path::{Path, PathBuf};
use thiserror::Error;
use undither_core::diffuse::DiffuseError;
use undither_core::pipeline::PipelineError;
use undither_core::raster::PgmError;
use undither_core::stats::StatsError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Decode { path: PathBuf, source: PgmError },
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Numerical(#[from] DiffuseError),
    #[error("writing output: {0}")]
    Output(std::io::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 1 usage, 2 I/O or format, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io { .. }
            | CliError::Decode { .. }
            | CliError::Stats(_)
            | CliError::Output(_) => 2,
            CliError::Numerical(DiffuseError::InvalidParams(_)) => 1,
            CliError::Numerical(DiffuseError::NonFinite { .. }) => 3,
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Stats(s) => CliError::Stats(s),
            PipelineError::Diffusion(d) => CliError::Numerical(d),
            PipelineError::ZeroStride => CliError::Usage(e.to_string()),
        }
    }
}
