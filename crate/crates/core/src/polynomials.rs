//! Zeros of the Heine-Stieltjes polynomials and quantities derived from them.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::extended;
use crate::hs_solver::HsSolution;
use crate::precision::{Precision, DOUBLE_BITS};
use crate::sectors::SectorLabel;

/// Largest imaginary part tolerated among companion-matrix eigenvalues.
const IMAG_TOLERANCE: f64 = 1e-8;
/// Relative Bethe residual required to accept a double-precision root set.
const DOUBLE_ACCEPT: f64 = 1e-10;
/// Relative Bethe residual every returned root set satisfies.
pub const BETHE_TOLERANCE: f64 = 1e-8;

/// The `k` zeros of one solution, ascending in `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    sector: SectorLabel,
    zeta: usize,
    zeros_u: Vec<f64>,
    working_bits: u32,
}

impl ZeroSet {
    pub fn sector(&self) -> SectorLabel {
        self.sector
    }

    pub fn zeta(&self) -> usize {
        self.zeta
    }

    pub fn zeros_u(&self) -> &[f64] {
        &self.zeros_u
    }

    /// Reciprocals `w = 1/u`.
    pub fn zeros_w(&self) -> Vec<f64> {
        self.zeros_u.iter().map(|u| 1.0 / u).collect()
    }

    /// Mantissa bits used to locate the zeros.
    pub fn working_bits(&self) -> u32 {
        self.working_bits
    }

    pub fn len(&self) -> usize {
        self.zeros_u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros_u.is_empty()
    }
}

/// Zeros of `y(u)` with automatic precision.
pub fn find_zeros(solution: &HsSolution) -> Result<ZeroSet> {
    find_zeros_with(solution, Precision::Auto)
}

/// Zeros of `y(u)`. `Bits(p)` with `p <= 53` restricts the search to double
/// precision, larger `p` fixes the extended working precision.
pub fn find_zeros_with(solution: &HsSolution, precision: Precision) -> Result<ZeroSet> {
    let sector = solution.sector();
    let zeta = solution.zeta();
    let k = solution.degree();
    let invalid = |reason: String| Error::InvalidZeros { sector, zeta, reason };
    let make = |zeros_u: Vec<f64>, working_bits: u32| ZeroSet {
        sector,
        zeta,
        zeros_u,
        working_bits,
    };
    if k == 0 {
        return Ok(make(vec![], DOUBLE_BITS));
    }

    let mut attempts: Vec<usize> = Vec::new();
    match precision {
        Precision::Bits(b) if b <= DOUBLE_BITS => {
            let zeros = double_zeros(solution.coefficients()).map_err(invalid)?;
            let zs = make(zeros, DOUBLE_BITS);
            accept(&zs, BETHE_TOLERANCE).map_err(invalid)?;
            return Ok(zs);
        }
        Precision::Bits(b) => attempts.push(b as usize),
        Precision::Auto => {
            if let Ok(zeros) = double_zeros(solution.coefficients()) {
                let zs = make(zeros, DOUBLE_BITS);
                if accept(&zs, DOUBLE_ACCEPT).is_ok() {
                    return Ok(zs);
                }
            }
            let first = precision.default_bits(k as u32);
            attempts.extend([first, 2 * first]);
        }
    }

    let mut last = String::new();
    for bits in attempts {
        let ext = solution.extended(bits)?;
        match extended::real_roots(&ext.b, bits) {
            Some(roots) => {
                let zs = make(roots.iter().map(extended::to_f64).collect(), bits as u32);
                match accept(&zs, BETHE_TOLERANCE) {
                    Ok(()) => return Ok(zs),
                    Err(e) => last = format!("{e} at {bits} bits"),
                }
            }
            None => last = format!("root iteration did not converge at {bits} bits"),
        }
    }
    Err(invalid(last))
}

/// Companion-matrix eigenvalues polished by Newton's method.
fn double_zeros(b: &[f64]) -> std::result::Result<Vec<f64>, String> {
    let k = b.len() - 1;
    let top = b[k];
    let companion = DMatrix::from_fn(k, k, |i, j| {
        if j == k - 1 {
            -b[i] / top
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let eig = companion.complex_eigenvalues();
    let mut zeros = Vec::with_capacity(k);
    for z in eig.iter() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err("companion eigenvalue is not finite".into());
        }
        if z.im.abs() > IMAG_TOLERANCE {
            return Err(format!("imaginary part above {IMAG_TOLERANCE:e}: {:.3e}", z.im.abs()));
        }
        zeros.push(newton_polish(b, z.re));
    }
    zeros.sort_by(f64::total_cmp);
    Ok(zeros)
}

fn newton_polish(b: &[f64], mut x: f64) -> f64 {
    for _ in 0..30 {
        let (p, dp) = horner(b, x);
        if dp == 0.0 {
            break;
        }
        let step = p / dp;
        if !step.is_finite() || step.abs() > 0.1 {
            break;
        }
        x -= step;
        if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    x
}

fn horner(b: &[f64], x: f64) -> (f64, f64) {
    let mut p = b[b.len() - 1];
    let mut dp = 0.0;
    for &c in b[..b.len() - 1].iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

fn accept(zs: &ZeroSet, tolerance: f64) -> std::result::Result<(), String> {
    for &u in &zs.zeros_u {
        if !(u > -1.0 && u < 1.0 && u != 0.0) {
            return Err(format!("zero {u} outside (-1,0)U(0,1)"));
        }
    }
    if zs.zeros_u.windows(2).any(|w| w[0] >= w[1]) {
        return Err("zeros are not distinct".into());
    }
    let worst = bethe_residual(zs).max_relative();
    if !(worst <= tolerance) {
        return Err(format!("relative Bethe residual {worst:.2e} above {tolerance:e}"));
    }
    Ok(())
}

/// Bethe equations evaluated at each zero: the charges at `u = 1, -1, 0`
/// plus the pairwise `2 / (u_l - u_j)` terms.
#[derive(Debug, Clone, PartialEq)]
pub struct BetheResidual {
    /// Signed left-hand side for every zero.
    pub raw: Vec<f64>,
    /// `|raw| / max |term|` for every zero.
    pub relative: Vec<f64>,
}

impl BetheResidual {
    pub fn max_raw(&self) -> f64 {
        self.raw.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_relative(&self) -> f64 {
        self.relative.iter().fold(0.0, |m, &x| if x.is_nan() { f64::NAN } else { m.max(x) })
    }
}

pub fn bethe_residual(zeros: &ZeroSet) -> BetheResidual {
    let s = zeros.sector;
    let right = f64::from(s.n1()) + 0.5;
    let left = f64::from(s.n2()) + 0.5;
    let origin = s.origin_weight();
    let u = &zeros.zeros_u;
    let mut raw = Vec::with_capacity(u.len());
    let mut relative = Vec::with_capacity(u.len());
    for (l, &ul) in u.iter().enumerate() {
        let mut terms = vec![right / (ul - 1.0), left / (ul + 1.0), origin / ul];
        terms.extend(u.iter().enumerate().filter(|&(j, _)| j != l).map(|(_, &uj)| 2.0 / (ul - uj)));
        let sum: f64 = terms.iter().sum();
        let scale = terms.iter().fold(0.0, |m: f64, t| m.max(t.abs()));
        raw.push(sum);
        relative.push(sum.abs() / scale);
    }
    BetheResidual { raw, relative }
}

/// `E` from the zeros: `2 chi (1 + 2 delta(nu,1)) (sum 1/u + (n1 - n2)/2)`.
pub fn energy_from_zeros(zeros: &ZeroSet, chi: f64) -> f64 {
    let s = zeros.sector;
    let w: f64 = zeros.zeros_u.iter().map(|u| 1.0 / u).sum();
    2.0 * chi * s.seniority_factor() * (w + s.pair_imbalance() / 2.0)
}

/// Elementary symmetric functions `S_0 = 1, S_1, ..., S_k` of the `w = 1/u`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricFunctions {
    sector: SectorLabel,
    zeta: usize,
    values: Vec<f64>,
}

impl SymmetricFunctions {
    pub fn sector(&self) -> SectorLabel {
        self.sector
    }

    pub fn zeta(&self) -> usize {
        self.zeta
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, q: usize) -> f64 {
        self.values[q]
    }
}

/// `S_q = (-1)^q b_q / b_0`, read off the coefficients without root finding.
pub fn symmetric_functions(solution: &HsSolution) -> Result<SymmetricFunctions> {
    let b = solution.coefficients();
    if b[0] == 0.0 || !b[0].is_finite() {
        return Err(Error::ZeroConstantTerm {
            sector: solution.sector(),
            zeta: solution.zeta(),
        });
    }
    let values = b
        .iter()
        .enumerate()
        .map(|(q, &bq)| if q % 2 == 0 { bq / b[0] } else { -bq / b[0] })
        .collect();
    Ok(SymmetricFunctions {
        sector: solution.sector(),
        zeta: solution.zeta(),
        values,
    })
}

/// `e_0 = 1, e_1, ..., e_n` of `values`.
pub fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (i, &x) in values.iter().enumerate() {
        for q in (1..=i + 1).rev() {
            e[q] += x * e[q - 1];
        }
    }
    e
}
