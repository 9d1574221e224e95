//! Heine-Stieltjes reduction of one sector to a tridiagonal eigenproblem.
//!
//! Writing the polynomial as `y(u) = sum_j b_j u^j` turns the second-order
//! Fuchsian equation into `F b = g0 b` with `F` tridiagonal; each eigenpair
//! gives one Bethe solution and its energy follows from `b_1 / b_0`.

use crate::error::{Error, Result};
use crate::extended::{self, ExtendedSolution};
use crate::precision::Precision;
use crate::sectors::SectorLabel;
use crate::tridiag::symmetric_tridiagonal_eigen;

/// The `(k + 1) x (k + 1)` tridiagonal matrix `F` of a sector.
///
/// Row `j` reads `sub[j] b_{j-1} + diag[j] b_j + sup[j] b_{j+1}`; `sub[0]`
/// and `sup[k]` are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    sector: SectorLabel,
    diag: Vec<f64>,
    sub: Vec<f64>,
    sup: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn sector(&self) -> SectorLabel {
        self.sector
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn sub(&self) -> &[f64] {
        &self.sub
    }

    pub fn sup(&self) -> &[f64] {
        &self.sup
    }

    /// `F b`.
    pub fn apply(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        (0..n)
            .map(|j| {
                let mut acc = self.diag[j] * b[j];
                if j > 0 {
                    acc += self.sub[j] * b[j - 1];
                }
                if j + 1 < n {
                    acc += self.sup[j] * b[j + 1];
                }
                acc
            })
            .collect()
    }

    /// Row-major dense copy of `F`.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut m = vec![vec![0.0; n]; n];
        for j in 0..n {
            m[j][j] = self.diag[j];
            if j > 0 {
                m[j][j - 1] = self.sub[j];
            }
            if j + 1 < n {
                m[j][j + 1] = self.sup[j];
            }
        }
        m
    }

    /// Copy with the first off-diagonal pair negated. The eigenvalues are
    /// unchanged but the recovered coefficients, and with them the energies of
    /// unbalanced sectors, are wrong. Used to exercise the verification path.
    #[doc(hidden)]
    pub fn with_corrupted_coupling(mut self) -> Self {
        if self.dim() > 1 {
            self.sup[0] = -self.sup[0];
            self.sub[1] = -self.sub[1];
        }
        self
    }

    /// Diagonal and off-diagonal of the similar symmetric matrix
    /// `D F D^-1`. Fails if some product `sub[j+1] * sup[j]` is not positive.
    pub fn symmetrized(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let off = (0..self.dim().saturating_sub(1))
            .map(|j| {
                let prod = self.sub[j + 1] * self.sup[j];
                if prod > 0.0 && prod.is_finite() {
                    Ok(-prod.sqrt())
                } else {
                    Err(Error::Eigensolver {
                        sector: self.sector,
                        reason: format!("off-diagonal product at row {j} is {prod}, not symmetrizable"),
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((self.diag.clone(), off))
    }
}

/// Builds `F` for a sector.
pub fn build_tridiagonal(sector: SectorLabel) -> TridiagonalSystem {
    let k = sector.k() as usize;
    let c = sector.origin_weight();
    let n1 = f64::from(sector.n1());
    let n2 = f64::from(sector.n2());
    let weight = n1 + n2 + c;
    let kf = k as f64;
    let diag = (0..=k).map(|j| j as f64 * (n1 - n2)).collect();
    let sub = (0..=k)
        .map(|j| {
            if j == 0 {
                0.0
            } else {
                let j = j as f64;
                -(kf - j + 1.0) * (kf + j + weight - 1.0)
            }
        })
        .collect();
    let sup = (0..=k)
        .map(|j| {
            if j == k {
                0.0
            } else {
                let j = j as f64;
                -(j + 1.0) * (c + j)
            }
        })
        .collect();
    TridiagonalSystem {
        sector,
        diag,
        sub,
        sup,
    }
}

/// The Van Vleck polynomial `V(u) = slope * u + g0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VanVleck {
    pub slope: f64,
    pub intercept: f64,
}

impl VanVleck {
    pub fn eval(&self, u: f64) -> f64 {
        self.slope * u + self.intercept
    }
}

pub fn van_vleck(sector: SectorLabel, g0: f64) -> VanVleck {
    let k = f64::from(sector.k());
    VanVleck {
        slope: k * (sector.origin_weight() + f64::from(sector.n1() + sector.n2()) + k),
        intercept: g0,
    }
}

/// One Bethe solution of a sector.
#[derive(Debug, Clone)]
pub struct HsSolution {
    sector: SectorLabel,
    zeta: usize,
    g0: f64,
    b: Vec<f64>,
    energy_over_chi: f64,
    pub(crate) twist: usize,
    pub(crate) extended: Option<ExtendedSolution>,
}

impl HsSolution {
    pub fn sector(&self) -> SectorLabel {
        self.sector
    }

    /// 1-based index within the sector, in ascending energy.
    pub fn zeta(&self) -> usize {
        self.zeta
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }

    /// Monomial coefficients `b_0..=b_k`, normalized to `b_k = 1`.
    pub fn coefficients(&self) -> &[f64] {
        &self.b
    }

    pub fn degree(&self) -> usize {
        self.b.len() - 1
    }

    pub fn energy_over_chi(&self) -> f64 {
        self.energy_over_chi
    }

    pub fn energy(&self, chi: f64) -> f64 {
        chi * self.energy_over_chi
    }

    pub fn van_vleck(&self) -> VanVleck {
        van_vleck(self.sector, self.g0)
    }

    /// `y(u)` by Horner's rule.
    pub fn eval(&self, u: f64) -> f64 {
        self.b.iter().rev().fold(0.0, |acc, &c| acc * u + c)
    }

    pub(crate) fn system(&self) -> TridiagonalSystem {
        build_tridiagonal(self.sector)
    }

    /// Coefficients at `bits` of precision, reusing a cached refinement when
    /// it is at least that accurate.
    pub(crate) fn extended(&self, bits: usize) -> Result<ExtendedSolution> {
        if let Some(e) = &self.extended {
            if e.bits >= bits {
                return Ok(e.clone());
            }
        }
        extended::refine(&self.system(), self.g0, self.twist, bits).ok_or_else(|| Error::Eigensolver {
            sector: self.sector,
            reason: format!("extended refinement of g0 = {} did not converge at {bits} bits", self.g0),
        })
    }
}

/// Energy `E / chi` from the first two coefficients.
pub(crate) fn energy_from_coefficients(sector: SectorLabel, b: &[f64]) -> f64 {
    let quartet = if b.len() > 1 { -b[1] / b[0] } else { 0.0 };
    2.0 * sector.seniority_factor() * (quartet + sector.pair_imbalance() / 2.0)
}

/// Solves a sector with automatic precision.
pub fn solve_sector(sector: SectorLabel) -> Result<Vec<HsSolution>> {
    solve_system(&build_tridiagonal(sector), Precision::Auto)
}

pub fn solve_sector_with(sector: SectorLabel, precision: Precision) -> Result<Vec<HsSolution>> {
    solve_system(&build_tridiagonal(sector), precision)
}

/// All `k + 1` solutions of `system`, sorted by ascending energy (stable on
/// ties, so equal energies keep ascending `g0` order) and numbered from 1.
pub fn solve_system(system: &TridiagonalSystem, precision: Precision) -> Result<Vec<HsSolution>> {
    let sector = system.sector();
    let n = system.dim();
    let (diag, off) = system.symmetrized()?;
    let eig = symmetric_tridiagonal_eigen(&diag, &off).ok_or_else(|| Error::Eigensolver {
        sector,
        reason: "tridiagonal QL iteration did not converge".into(),
    })?;

    let forced_bits = precision.extended_bits(sector.k());
    let mut out = Vec::with_capacity(n);
    for (g0, v) in eig.values.iter().zip(&eig.vectors) {
        let twist = v
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);

        let mut g0 = *g0;
        let mut ext = None;
        let mut b = match forced_bits {
            None => twisted_coefficients(system, g0, twist),
            Some(_) => None,
        };
        // extended route when forced, or when the double-precision vector
        // underflows at b_0
        if b.as_ref().map_or(true, |b| !usable(b)) {
            let bits = forced_bits.unwrap_or_else(|| Precision::Auto.default_bits(sector.k()));
            let e = extended::refine(system, g0, twist, bits).ok_or_else(|| Error::Eigensolver {
                sector,
                reason: format!("extended refinement of g0 = {g0} did not converge at {bits} bits"),
            })?;
            g0 = extended::to_f64(&e.g0);
            let rounded: Vec<f64> = e.b.iter().map(extended::to_f64).collect();
            if !usable(&rounded) {
                return Err(Error::Eigensolver {
                    sector,
                    reason: format!("coefficient b_0 of g0 = {g0} is not representable in double precision"),
                });
            }
            b = Some(rounded);
            ext = Some(e);
        }
        let b = b.expect("coefficients assigned above");
        let energy_over_chi = match &ext {
            Some(e) => e.energy_over_chi(system),
            None => energy_from_coefficients(sector, &b),
        };
        out.push(HsSolution {
            sector,
            zeta: 0,
            g0,
            b,
            energy_over_chi,
            twist,
            extended: ext,
        });
    }
    out.sort_by(|a, b| a.energy_over_chi.total_cmp(&b.energy_over_chi));
    for (i, s) in out.iter_mut().enumerate() {
        s.zeta = i + 1;
    }
    Ok(out)
}

fn usable(b: &[f64]) -> bool {
    b.iter().all(|x| x.is_finite()) && b[0].abs() > 1e-290
}

/// Eigenvector of `F` for eigenvalue `g` from the forward recurrence up to
/// `twist` and the backward one down to it; normalized to `b_k = 1`.
fn twisted_coefficients(system: &TridiagonalSystem, g: f64, twist: usize) -> Option<Vec<f64>> {
    let n = system.dim();
    let k = n - 1;
    let (d, sub, sup) = (system.diag(), system.sub(), system.sup());

    let mut b = vec![0.0; n];
    b[0] = 1.0;
    for j in 0..twist {
        let mut next = (g - d[j]) * b[j];
        if j > 0 {
            next -= sub[j] * b[j - 1];
        }
        b[j + 1] = next / sup[j];
    }
    let mut back = vec![0.0; n];
    back[k] = 1.0;
    for j in (twist + 1..=k).rev() {
        let mut prev = (g - d[j]) * back[j];
        if j < k {
            prev -= sup[j] * back[j + 1];
        }
        back[j - 1] = prev / sub[j];
    }
    if back[twist] == 0.0 || b[twist] == 0.0 {
        return None;
    }
    let join = b[twist] / back[twist];
    for j in twist + 1..=k {
        b[j] = back[j] * join;
    }
    let top = b[k];
    if top == 0.0 || !top.is_finite() {
        return None;
    }
    for x in &mut b {
        *x /= top;
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sectors::enumerate_sectors;
    use approx::assert_relative_eq;

    fn sector(j: u32, n1: u8, n2: u8, nu: u8) -> SectorLabel {
        SectorLabel::new(j, n1, n2, nu).unwrap()
    }

    #[test]
    fn matrix_entries_for_k2() {
        let f = build_tridiagonal(sector(5, 0, 1, 0));
        assert_eq!(f.diag(), &[0.0, -1.0, -2.0]);
        // c = 1/2, n1 + n2 + c = 3/2
        assert_eq!(f.sub(), &[0.0, -2.0 * 3.5, -1.0 * 4.5]);
        assert_eq!(f.sup(), &[-0.5, -3.0, 0.0]);
    }

    #[test]
    fn k0_energy_is_the_pair_term() {
        let s = solve_sector(sector(2, 1, 0, 1)).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].energy_over_chi(), 3.0);
        assert_eq!(s[0].coefficients(), &[1.0]);
        let s = solve_sector(sector(2, 1, 1, 0)).unwrap();
        assert_eq!(s[0].energy_over_chi(), 0.0);
    }

    #[test]
    fn j1_sector_k0_gives_pm_2() {
        // {0;1,0,0} and {0;0,1,0} at J = 1
        assert_eq!(solve_sector(sector(1, 1, 0, 0)).unwrap()[0].energy_over_chi(), 1.0);
        assert_eq!(solve_sector(sector(1, 0, 1, 0)).unwrap()[0].energy_over_chi(), -1.0);
    }

    #[test]
    fn g0_for_j4_ground_sector() {
        let s = solve_sector(sector(4, 0, 0, 0)).unwrap();
        let mut g: Vec<f64> = s.iter().map(|x| x.g0()).collect();
        g.sort_by(f64::total_cmp);
        assert_relative_eq!(g[0], -(13f64).sqrt(), epsilon = 1e-13);
        assert!(g[1].abs() < 1e-13);
        assert_relative_eq!(g[2], (13f64).sqrt(), epsilon = 1e-13);
        // E = 4 g0 for an unpaired-free sector with n1 = n2
        for x in &s {
            assert_relative_eq!(x.energy_over_chi(), 4.0 * x.g0(), epsilon = 1e-12);
        }
    }

    #[test]
    fn g0_for_j5_odd_pair_sector() {
        let s = solve_sector(sector(5, 0, 1, 0)).unwrap();
        let mut g: Vec<f64> = s.iter().map(|x| x.g0()).collect();
        g.sort_by(f64::total_cmp);
        for (x, want) in g.iter().zip([-5.49707, -0.434392, 2.93147]) {
            assert_relative_eq!(*x, want, max_relative = 1e-5);
        }
    }

    #[test]
    fn eigenvector_equation_holds_and_zeta_is_ordered() {
        for j in [6u32, 17, 40] {
            for s in enumerate_sectors(j).unwrap().labels() {
                let f = build_tridiagonal(s);
                let sols = solve_system(&f, Precision::Auto).unwrap();
                assert_eq!(sols.len(), s.solution_count());
                for (i, sol) in sols.iter().enumerate() {
                    assert_eq!(sol.zeta(), i + 1);
                    let b = sol.coefficients();
                    assert_eq!(*b.last().unwrap(), 1.0);
                    let fb = f.apply(b);
                    let scale = b.iter().map(|x| x.abs()).fold(0.0, f64::max) * (1.0 + sol.g0().abs());
                    for (x, y) in fb.iter().zip(b) {
                        assert!((x - sol.g0() * y).abs() <= 1e-9 * scale, "J={j} {s}");
                    }
                }
                for w in sols.windows(2) {
                    assert!(w[0].energy_over_chi() <= w[1].energy_over_chi());
                }
            }
        }
    }

    #[test]
    fn forced_extended_precision_agrees_with_double() {
        let s = sector(30, 0, 0, 0);
        let a = solve_sector(s).unwrap();
        let b = solve_sector_with(s, Precision::Bits(256)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_relative_eq!(x.g0(), y.g0(), epsilon = 1e-10, max_relative = 1e-12);
            assert_relative_eq!(x.energy_over_chi(), y.energy_over_chi(), epsilon = 1e-10, max_relative = 1e-12);
        }
    }

    #[test]
    fn van_vleck_slope() {
        let s = sector(5, 0, 1, 0);
        let v = van_vleck(s, 0.25);
        assert_eq!(v.slope, 2.0 * (0.5 + 1.0 + 2.0));
        assert_eq!(v.eval(1.0), 7.25);
    }
}
