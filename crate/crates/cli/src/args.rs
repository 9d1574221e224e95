use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tact_core::Precision;

#[derive(Debug, Parser)]
#[command(name = "tact", version, about = "Exact spectrum of the two-axis countertwisting Hamiltonian")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// All levels of J (or of each J in a range), merged and sorted.
    Spectrum {
        #[command(flatten)]
        range: JRange,
        #[command(flatten)]
        common: Common,
        /// Also locate the zeros of every polynomial (always on for JSON).
        #[arg(long)]
        zeros: bool,
        /// Skip the dense cross-check above this J.
        #[arg(long, default_value_t = 200)]
        oracle_cap: u32,
    },
    /// Per-sector polynomials, g0 and energies in table layout.
    Table {
        #[command(flatten)]
        range: JRange,
        #[command(flatten)]
        common: Common,
    },
    /// Eigenstate amplitudes in the |J, M> basis.
    States {
        #[arg(long)]
        j: u32,
        /// Restrict to one sector, written `k,n1,n2,nu` or `n1,n2,nu`.
        #[arg(long)]
        sector: Option<String>,
        /// Restrict to one solution of the sector (1-based).
        #[arg(long, requires = "sector")]
        zeta: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Runs the consistency checks for every J in the range.
    Verify {
        #[command(flatten)]
        range: JRange,
        #[command(flatten)]
        common: Common,
        /// Highest J at which eigenstates are built and checked.
        #[arg(long, default_value_t = 20)]
        state_cap: u32,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Near-degeneracy statistics over a range of J.
    Gaps {
        #[command(flatten)]
        range: JRange,
        #[command(flatten)]
        common: Common,
        /// Step between J values in the range.
        #[arg(long, default_value_t = 1)]
        step: u32,
        /// Gap threshold in units of chi.
        #[arg(long, default_value_t = 1e-3)]
        threshold: f64,
    },
}

#[derive(Debug, Args, Clone)]
pub struct JRange {
    /// A single J.
    #[arg(long, conflicts_with_all = ["j_min", "j_max"])]
    pub j: Option<u32>,
    /// First J of an inclusive range (default 0).
    #[arg(long)]
    pub j_min: Option<u32>,
    /// Last J of an inclusive range.
    #[arg(long)]
    pub j_max: Option<u32>,
}

impl JRange {
    pub fn values(&self, step: u32) -> Result<Vec<u32>, String> {
        match (self.j, self.j_min, self.j_max) {
            (Some(j), _, _) => Ok(vec![j]),
            (None, min, Some(max)) => {
                let min = min.unwrap_or(0);
                if min > max {
                    return Err(format!("--j-min {min} exceeds --j-max {max}"));
                }
                Ok((min..=max).step_by(step.max(1) as usize).collect())
            }
            (None, Some(_), None) => Err("--j-min needs --j-max".into()),
            (None, None, None) => Err("give --j N or --j-max B".into()),
        }
    }
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Coupling strength chi.
    #[arg(long, default_value_t = 1.0)]
    pub chi: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Tolerance override (relative to the spectral diameter for verify).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Working precision: `auto` or a mantissa bit count.
    #[arg(long, default_value = "auto")]
    pub precision_bits: Precision,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}
