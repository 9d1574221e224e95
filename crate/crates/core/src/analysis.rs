//! Whole-spectrum assembly and the checks run on it.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hs_solver::{build_tridiagonal, solve_system, HsSolution};
use crate::oracle::{build_hamiltonian, dense_eigenpairs, dense_spectrum};
use crate::polynomials::{bethe_residual, find_zeros_with, symmetric_functions, ZeroSet};
use crate::precision::Precision;
use crate::sectors::{enumerate_sectors, SectorLabel};
use crate::spin::Spin;
use crate::states::{build_state_with, overlap, residual_norm_in, SpinState};

/// Relative scale below which a level counts as the zero level and two
/// levels count as numerically degenerate.
pub const DEGENERACY_SCALE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SpectrumOptions {
    /// Consecutive levels closer than this (in units of `chi`) form a gap pair.
    pub gap_threshold: f64,
    pub precision: Precision,
    /// Also locate the zeros of every polynomial.
    pub with_zeros: bool,
    #[doc(hidden)]
    pub corrupt_coupling: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            gap_threshold: 1e-3,
            precision: Precision::Auto,
            with_zeros: false,
            corrupt_coupling: false,
        }
    }
}

/// One eigenvalue with its labels.
#[derive(Debug, Clone)]
pub struct Level {
    pub solution: HsSolution,
    pub zeros: Option<ZeroSet>,
}

impl Level {
    pub fn sector(&self) -> SectorLabel {
        self.solution.sector()
    }

    pub fn zeta(&self) -> usize {
        self.solution.zeta()
    }

    pub fn g0(&self) -> f64 {
        self.solution.g0()
    }

    pub fn energy_over_chi(&self) -> f64 {
        self.solution.energy_over_chi()
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub j: u32,
    pub chi: f64,
    /// All `2J + 1` levels, ascending in energy.
    pub levels: Vec<Level>,
    /// Consecutive pairs closer than the gap threshold.
    pub gap_pairs: usize,
    /// Levels with `|E| <= 1e-9` times the spectral diameter.
    pub zero_levels: Vec<(SectorLabel, usize)>,
    /// `max_i |E_i + E_(n-1-i)|` in units of `chi`.
    pub symmetry_defect: f64,
    /// `E_max - E_min` in units of `chi`.
    pub diameter: f64,
    /// Largest relative Bethe residual, when zeros were requested.
    pub max_bethe_residual: Option<f64>,
}

impl SpectrumReport {
    pub fn energies_over_chi(&self) -> Vec<f64> {
        self.levels.iter().map(Level::energy_over_chi).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.solution.energy(self.chi)).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.levels.len() == 2 * self.j as usize + 1
    }

    /// Gaps between consecutive levels in units of `chi`.
    pub fn gaps(&self) -> Vec<f64> {
        self.levels
            .windows(2)
            .map(|w| w[1].energy_over_chi() - w[0].energy_over_chi())
            .collect()
    }

    /// Levels whose energy is within `1e-9` diameters of another one.
    pub fn near_degenerate_pairs(&self) -> Vec<(usize, usize)> {
        let tol = DEGENERACY_SCALE * self.diameter;
        (0..self.levels.len().saturating_sub(1))
            .filter(|&i| self.levels[i + 1].energy_over_chi() - self.levels[i].energy_over_chi() < tol)
            .map(|i| (i, i + 1))
            .collect()
    }
}

pub fn full_spectrum(j: impl Into<Spin>, chi: f64) -> Result<SpectrumReport> {
    full_spectrum_with(j, chi, &SpectrumOptions::default())
}

/// Solves every sector of `J` (in parallel) and merges the levels.
/// Ties in energy keep canonical sector order, then `zeta`.
pub fn full_spectrum_with(j: impl Into<Spin>, chi: f64, options: &SpectrumOptions) -> Result<SpectrumReport> {
    let catalog = enumerate_sectors(j)?;
    let j = catalog.j();
    let per_sector: Vec<Vec<Level>> = catalog
        .labels()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|s| -> Result<Vec<Level>> {
            let mut system = build_tridiagonal(s);
            if options.corrupt_coupling {
                system = system.with_corrupted_coupling();
            }
            solve_system(&system, options.precision)?
                .into_iter()
                .map(|solution| {
                    let zeros = if options.with_zeros {
                        Some(find_zeros_with(&solution, options.precision)?)
                    } else {
                        None
                    };
                    Ok(Level { solution, zeros })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut levels: Vec<Level> = per_sector.into_iter().flatten().collect();
    levels.sort_by(|a, b| a.energy_over_chi().total_cmp(&b.energy_over_chi()));

    let e: Vec<f64> = levels.iter().map(Level::energy_over_chi).collect();
    let n = e.len();
    let diameter = e[n - 1] - e[0];
    let zero_tol = DEGENERACY_SCALE * diameter;
    let zero_levels = levels
        .iter()
        .filter(|l| l.energy_over_chi().abs() <= zero_tol)
        .map(|l| (l.sector(), l.zeta()))
        .collect();
    let symmetry_defect = (0..n).map(|i| (e[i] + e[n - 1 - i]).abs()).fold(0.0, f64::max);
    let gap_pairs = e.windows(2).filter(|w| w[1] - w[0] < options.gap_threshold).count();
    let max_bethe_residual = options.with_zeros.then(|| {
        levels
            .iter()
            .filter_map(|l| l.zeros.as_ref())
            .map(|z| bethe_residual(z).max_relative())
            .fold(0.0, f64::max)
    });

    Ok(SpectrumReport {
        j,
        chi,
        levels,
        gap_pairs,
        zero_levels,
        symmetry_defect,
        diameter,
        max_bethe_residual,
    })
}

/// Bethe spectrum against the dense spectrum at one `J`.
#[derive(Debug, Clone)]
pub struct OracleComparison {
    pub j: u32,
    pub bethe: Vec<f64>,
    pub dense: Vec<f64>,
    /// Largest entrywise deviation of the sorted spectra, in units of `chi`.
    pub max_abs_deviation: f64,
    pub diameter: f64,
}

impl OracleComparison {
    /// Deviation in units of the spectral diameter (0 when the diameter is).
    pub fn relative_deviation(&self) -> f64 {
        if self.diameter > 0.0 {
            self.max_abs_deviation / self.diameter
        } else {
            self.max_abs_deviation
        }
    }
}

pub fn compare_to_oracle(j: impl Into<Spin>) -> Result<OracleComparison> {
    let report = full_spectrum(j, 1.0)?;
    compare_report_to_oracle(&report)
}

pub fn compare_report_to_oracle(report: &SpectrumReport) -> Result<OracleComparison> {
    let bethe = report.energies_over_chi();
    let dense = dense_spectrum(&build_hamiltonian(report.j))?;
    if bethe.len() != dense.len() {
        return Err(Error::DimensionMismatch {
            j: report.j,
            bethe: bethe.len(),
            dense: dense.len(),
        });
    }
    let max_abs_deviation = bethe.iter().zip(&dense).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(OracleComparison {
        j: report.j,
        diameter: dense[dense.len() - 1] - dense[0],
        bethe,
        dense,
        max_abs_deviation,
    })
}

impl OracleComparison {
    /// Bethe levels farther than `tol * diameter` from every dense eigenvalue.
    pub fn unmatched_levels<'a>(&self, report: &'a SpectrumReport, tol: f64) -> Vec<&'a Level> {
        let limit = tol * self.diameter.max(f64::MIN_POSITIVE);
        report
            .levels
            .iter()
            .filter(|l| {
                let e = l.energy_over_chi();
                let i = self.dense.partition_point(|&d| d < e);
                let near = [i.checked_sub(1), Some(i)]
                    .into_iter()
                    .flatten()
                    .filter_map(|i| self.dense.get(i))
                    .map(|d| (d - e).abs())
                    .fold(f64::INFINITY, f64::min);
                near > limit
            })
            .collect()
    }
}

/// One row of the degeneracy trend.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendRow {
    pub j: u32,
    /// Consecutive pairs with gap below the threshold.
    pub pair_count: usize,
    /// Smallest gap between consecutive levels.
    pub min_gap: f64,
    /// Largest gap among the counted pairs.
    pub max_counted_gap: Option<f64>,
    /// Gap between the two lowest levels.
    pub ground_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyTrend {
    pub threshold: f64,
    pub rows: Vec<TrendRow>,
}

impl DegeneracyTrend {
    /// Whether the pair count never decreases along the requested `J` values.
    pub fn non_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[0].pair_count <= w[1].pair_count)
    }
}

/// Gap statistics over several `J`; `threshold` is in units of `chi`.
pub fn degeneracy_trend(js: &[u32], threshold: f64) -> Result<DegeneracyTrend> {
    let rows = js
        .par_iter()
        .map(|&j| {
            let options = SpectrumOptions {
                gap_threshold: threshold,
                ..SpectrumOptions::default()
            };
            let report = full_spectrum_with(j, 1.0, &options)?;
            let gaps = report.gaps();
            let counted: Vec<f64> = gaps.iter().copied().filter(|&g| g < threshold).collect();
            Ok(TrendRow {
                j,
                pair_count: counted.len(),
                min_gap: gaps.iter().copied().fold(f64::INFINITY, f64::min),
                max_counted_gap: counted.iter().copied().reduce(f64::max),
                ground_gap: gaps.first().copied().unwrap_or(f64::INFINITY),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DegeneracyTrend { threshold, rows })
}

/// Eigenstate checks for all `2J + 1` states of one `J`.
#[derive(Debug, Clone)]
pub struct StateCheck {
    pub j: u32,
    pub states: Vec<(SpinState, f64)>,
    /// `max ||H psi - E psi|| / (1 + |E|)` at `chi = 1`.
    pub max_scaled_residual: f64,
    /// Max-norm deviation of the Gram matrix from the identity, with
    /// near-degenerate pairs compared inside the dense eigenspace.
    pub gram_deviation: f64,
    pub near_degenerate_pairs: usize,
}

/// Builds every state of `J`, checks the eigen-equation against the dense
/// Hamiltonian and the mutual orthogonality.
pub fn check_states(j: u32, precision: Precision) -> Result<StateCheck> {
    let report = full_spectrum_with(
        j,
        1.0,
        &SpectrumOptions {
            precision,
            ..SpectrumOptions::default()
        },
    )?;
    let states: Vec<(SpinState, f64)> = report
        .levels
        .par_iter()
        .map(|l| {
            let s = symmetric_functions(&l.solution)?;
            Ok((build_state_with(&l.solution, &s, precision)?, l.energy_over_chi()))
        })
        .collect::<Result<_>>()?;

    let h = build_hamiltonian(j);
    let max_scaled_residual = states
        .iter()
        .map(|(st, e)| residual_norm_in(&h, st, *e, 1.0) / (1.0 + e.abs()))
        .fold(0.0, f64::max);

    let near = report.near_degenerate_pairs();
    let is_near = |a: usize, b: usize| near.contains(&(a.min(b), a.max(b)));
    let n = states.len();
    let mut gram_deviation: f64 = 0.0;
    for a in 0..n {
        for b in a..n {
            if a != b && is_near(a, b) {
                continue;
            }
            let o = overlap(&states[a].0, &states[b].0)?;
            let target = if a == b { 1.0 } else { 0.0 };
            gram_deviation = gram_deviation.max((o - Complex64::new(target, 0.0)).norm());
        }
    }

    if !near.is_empty() {
        let pairs = dense_eigenpairs(&h)?;
        for &(a, b) in &near {
            let mid = 0.5 * (states[a].1 + states[b].1);
            let mut nearest: Vec<usize> = (0..pairs.len()).collect();
            nearest.sort_by(|&x, &y| (pairs[x].0 - mid).abs().total_cmp(&(pairs[y].0 - mid).abs()));
            let basis = [&pairs[nearest[0]].1, &pairs[nearest[1]].1];
            let project = |psi: &[Complex64]| -> Vec<Complex64> {
                let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
                for v in basis {
                    let c: Complex64 = v.iter().zip(psi).map(|(x, y)| x.conj() * y).sum();
                    for (o, x) in out.iter_mut().zip(v.iter()) {
                        *o += c * x;
                    }
                }
                out
            };
            let pa = project(states[a].0.amplitudes());
            let pb = project(states[b].0.amplitudes());
            let na = pa.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            let nb = pb.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            let cross: Complex64 = pa.iter().zip(&pb).map(|(x, y)| x.conj() * y).sum();
            gram_deviation = gram_deviation
                .max(1.0 - na)
                .max(1.0 - nb)
                .max(cross.norm() / (na * nb));
        }
    }

    Ok(StateCheck {
        j,
        states,
        max_scaled_residual,
        gram_deviation,
        near_degenerate_pairs: near.len(),
    })
}
