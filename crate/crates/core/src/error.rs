use thiserror::Error;

use crate::master::{Basis, Trajectory};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("matrix is not Hermitian (max |H - H^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("closed-form eigenvalue radicand is negative ({value:e})")]
    NegativeRadicand { value: f64 },

    #[error("density matrix is in the {found:?} basis, expected {expected:?}")]
    BasisMismatch { expected: Basis, found: Basis },

    #[error("step rejected at t = {time}: minimum eigenvalue {min_eigenvalue:e}")]
    StepRejected { time: f64, min_eigenvalue: f64 },

    /// Step halving was exhausted. `partial` holds every sample recorded
    /// before the failure.
    #[error("integration failed at t = {time}")]
    IntegrationFailed { time: f64, partial: Box<Trajectory> },

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::IntegrationFailed { .. } | Error::StepRejected { .. } => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}
