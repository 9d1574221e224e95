//! Exact spectrum of the two-axis countertwisting Hamiltonian
//! `H = (chi / 2i) (J+^2 - J-^2)` through Heine-Stieltjes polynomials.
//!
//! For integer `J` the problem splits into sectors `{k; n1, n2, nu}`. Each
//! sector reduces to a small tridiagonal eigenproblem whose eigenvectors are
//! the monomial coefficients of a polynomial with `k` real zeros in `(-1, 1)`.
//! The energies, the Bethe roots and the eigenstates in the `|J, M>` basis all
//! follow from those polynomials. A dense diagonalization of `H` is included
//! as an independent check.

mod error;
mod extended;
mod precision;
mod spin;

pub mod analysis;
pub mod hs_solver;
pub mod oracle;
pub mod polynomials;
pub mod sectors;
pub mod states;
pub mod tridiag;

pub use analysis::{
    check_states, compare_report_to_oracle, compare_to_oracle, degeneracy_trend, full_spectrum,
    full_spectrum_with, DegeneracyTrend, Level, OracleComparison, SpectrumOptions, SpectrumReport,
    StateCheck, TrendRow,
};
pub use error::{Error, Result};
pub use hs_solver::{build_tridiagonal, solve_sector, solve_sector_with, HsSolution, TridiagonalSystem};
pub use oracle::{build_hamiltonian, dense_eigenpairs, dense_spectrum, DenseHamiltonian};
pub use polynomials::{
    bethe_residual, energy_from_zeros, find_zeros, find_zeros_with, symmetric_functions, BetheResidual,
    SymmetricFunctions, ZeroSet,
};
pub use precision::{Precision, DOUBLE_BITS};
pub use sectors::{enumerate_sectors, solution_count_total, SectorCatalog, SectorLabel};
pub use spin::Spin;
pub use states::{build_state, build_state_with, overlap, residual_norm, residual_norm_in, SpinState};
