use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] fractal_diffusion::Error),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// A flag that must come from the command line or the config file.
    #[error("the following required argument was not provided: {flag}")]
    Missing { command: &'static str, flag: &'static str },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("tolerance not met: {0}")]
    Tolerance(String),
}

impl CliError {
    /// 1 for a missed tolerance, 2 for anything that stopped the run.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Tolerance(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
