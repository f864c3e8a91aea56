//! Command-line front end and experiment runners for the `aspp-core` solvers.

pub mod bench;
pub mod commands;
pub mod verify;

use std::process::ExitCode;

/// Errors that map to a specific process exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0:#}")]
    InvalidInput(anyhow::Error),
    #[error("{0}")]
    Timeout(String),
    #[error("{0}")]
    VerificationFailed(String),
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::InvalidInput(_) => 2,
            CliError::Timeout(_) => 3,
            CliError::VerificationFailed(_) => 4,
            CliError::Other(_) => 1,
        })
    }
}

/// Worker count for sweeps: `ASPP_THREADS` if set to a positive integer,
/// otherwise whatever rayon picks.
pub fn thread_cap() -> Option<usize> {
    std::env::var("ASPP_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Sizes the global rayon pool once. Later calls are no-ops.
pub fn init_thread_pool() {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let _ = builder.build_global();
}
