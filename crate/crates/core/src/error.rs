use thiserror::Error;

use crate::sectors::SectorLabel;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid angular momentum {0:?}: expected a non-negative integer or half-integer")]
    InvalidSpin(String),

    #[error("J = {0} is a half-integer; the Bethe reduction only covers integer J")]
    HalfIntegerSpin(String),

    #[error("sector {sector}: {reason}")]
    Eigensolver { sector: SectorLabel, reason: String },

    #[error("sector {sector}, zeta = {zeta}: {reason}")]
    InvalidZeros {
        sector: SectorLabel,
        zeta: usize,
        reason: String,
    },

    #[error(
        "sector {sector}, zeta = {zeta}: state expansion loses precision \
         (estimated relative error {estimated_error:.1e} at {bits} bits); raise the precision bits"
    )]
    PrecisionExhausted {
        sector: SectorLabel,
        zeta: usize,
        estimated_error: f64,
        bits: u32,
    },

    #[error("symmetric functions require b_0 != 0 (sector {sector}, zeta = {zeta})")]
    ZeroConstantTerm { sector: SectorLabel, zeta: usize },

    #[error("dense diagonalization failed for J = {0}")]
    Oracle(String),

    #[error("states belong to different J ({left} vs {right})")]
    SpinMismatch { left: u32, right: u32 },

    #[error("spectrum size mismatch for J = {j}: Bethe route has {bethe} levels, dense route {dense}")]
    DimensionMismatch { j: u32, bethe: usize, dense: usize },
}
