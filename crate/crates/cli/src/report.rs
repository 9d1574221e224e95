//! Serializable views of the core results.

use serde::{Deserialize, Serialize};
use tact_core::{Level, SectorLabel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorDto {
    pub k: u32,
    pub n1: u8,
    pub n2: u8,
    pub nu: u8,
}

impl From<SectorLabel> for SectorDto {
    fn from(s: SectorLabel) -> Self {
        SectorDto {
            k: s.k(),
            n1: s.n1(),
            n2: s.n2(),
            nu: s.nu(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelDto {
    pub sector: SectorDto,
    pub zeta: usize,
    pub g0: f64,
    pub energy_over_chi: f64,
    pub zeros_u: Vec<f64>,
}

impl From<&Level> for LevelDto {
    fn from(l: &Level) -> Self {
        LevelDto {
            sector: l.sector().into(),
            zeta: l.zeta(),
            g0: l.g0(),
            energy_over_chi: l.energy_over_chi(),
            zeros_u: l.zeros.as_ref().map(|z| z.zeros_u().to_vec()).unwrap_or_default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChecksDto {
    pub completeness: bool,
    pub symmetry_defect: f64,
    pub max_bethe_residual: Option<f64>,
    /// Largest deviation from the dense spectrum relative to the diameter;
    /// absent above the oracle cap.
    pub oracle_max_dev: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDto {
    #[serde(rename = "J")]
    pub j: u32,
    pub chi: f64,
    pub levels: Vec<LevelDto>,
    pub checks: ChecksDto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRowDto {
    #[serde(rename = "J")]
    pub j: u32,
    pub sector: SectorDto,
    pub zeta: usize,
    /// Monomial coefficients, ascending powers of u, leading one equal to 1.
    pub coefficients: Vec<f64>,
    pub g0: f64,
    pub energy_over_chi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeDto {
    #[serde(rename = "M")]
    pub m: i64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDto {
    pub sector: SectorDto,
    pub zeta: usize,
    pub energy_over_chi: f64,
    pub residual_norm: f64,
    pub amplitudes: Vec<AmplitudeDto>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatesDto {
    #[serde(rename = "J")]
    pub j: u32,
    pub chi: f64,
    pub states: Vec<StateDto>,
    /// Largest |<a|b>| over distinct listed states.
    pub gram_max_off_diagonal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRowDto {
    #[serde(rename = "J")]
    pub j: u32,
    pub levels: usize,
    pub complete: bool,
    pub max_bethe_residual: f64,
    pub oracle_max_dev: f64,
    pub symmetry_defect: f64,
    pub state_residual: Option<f64>,
    pub gram_deviation: Option<f64>,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyDto {
    pub tolerance: f64,
    pub passed: bool,
    pub rows: Vec<VerifyRowDto>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRowDto {
    #[serde(rename = "J")]
    pub j: u32,
    pub pair_count: usize,
    pub min_gap: f64,
    pub max_counted_gap: Option<f64>,
    pub ground_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapsDto {
    pub threshold: f64,
    pub non_decreasing: bool,
    pub rows: Vec<GapRowDto>,
}
