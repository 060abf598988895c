use thiserror::Error;

use crate::multilevel::LoadError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("operator is not Hermitian: max |H - H^dagger| = {deviation:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("operator is not unitary: max |U^dagger U - I| = {deviation:.3e} exceeds {tolerance:.1e}")]
    NotUnitary { deviation: f64, tolerance: f64 },

    #[error("state is not normalized: |psi|^2 = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid drive parameters: {0}")]
    InvalidParams(String),

    #[error("invalid propagation grid: {0}")]
    InvalidGrid(String),

    #[error("generator is not periodic with period {period}: deviation {deviation:.3e} at t = {time}")]
    NotPeriodic { period: f64, time: f64, deviation: f64 },

    #[error("eigendecomposition failed to converge")]
    EigenFailure,

    #[error("flip time diverges: effective gap {gap:.3e} is at a degeneracy")]
    DivergentFlipTime { gap: f64 },

    #[error("sweep has {found} points, at least {required} are required")]
    SweepTooShort { found: usize, required: usize },

    #[error("invalid sweep grid: {0}")]
    InvalidSweep(String),

    #[error("trace too short: {0}")]
    TraceTooShort(String),

    #[error("spectator levels contaminate the engineered gap: requested {requested}, measured {measured}")]
    SpectatorCollision { requested: f64, measured: f64 },

    #[error("invalid synthetic system: {0}")]
    InvalidSynthetic(String),

    #[error("invalid avoided crossing: {0}")]
    InvalidCrossing(String),

    #[error(transparent)]
    Load(#[from] LoadError),
}
