//! Eigenstates in the `|J, M>` basis assembled from the symmetric functions.
//!
//! With Schwinger bosons `a, b` and the rotated combinations `c`, `d`, each
//! solution is a polynomial in `c^2` and `d^2` times a fixed pair factor and
//! `(a^dag b^dag)^nu`. Expanding `(c^2 - d^2)^(k-q) (2i d^2)^q S_q` and mapping
//! `c^m d^n` to `|J, M = m - n>` with weight `sqrt((2m + nu)! (2n + nu)!)`
//! gives the amplitudes.

use num_complex::Complex64;
use statrs::function::factorial::ln_factorial;

use dashu_float::ops::{Abs, SquareRoot};

use crate::error::{Error, Result};
use crate::extended::{self, Big};
use crate::hs_solver::HsSolution;
use crate::oracle::{build_hamiltonian, DenseHamiltonian};
use crate::polynomials::SymmetricFunctions;
use crate::precision::{Precision, DOUBLE_BITS};
use crate::sectors::SectorLabel;

/// Largest estimated relative rounding error accepted in a state.
const STATE_ERROR_BUDGET: f64 = 1e-9;
/// Amplitudes below this fraction of the largest one do not fix the phase.
const POPULATED: f64 = 1e-10;

/// Normalized eigenstate. Index `i` of the amplitude vector is `M = -J + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinState {
    j: u32,
    sector: SectorLabel,
    zeta: usize,
    amplitudes: Vec<Complex64>,
    working_bits: u32,
}

impl SpinState {
    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn sector(&self) -> SectorLabel {
        self.sector
    }

    pub fn zeta(&self) -> usize {
        self.zeta
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `<J, M | psi>`, zero outside `-J..=J`.
    pub fn amplitude(&self, m: i64) -> Complex64 {
        let i = m + i64::from(self.j);
        if i < 0 || i as usize >= self.amplitudes.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.amplitudes[i as usize]
        }
    }

    pub fn m_values(&self) -> impl Iterator<Item = i64> {
        let j = i64::from(self.j);
        -j..=j
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Mantissa bits used in the expansion.
    pub fn working_bits(&self) -> u32 {
        self.working_bits
    }
}

/// One monomial `c^m d^n` with its phase `i^p` and sign.
#[derive(Debug, Clone, Copy)]
struct Term {
    q: usize,
    rho: usize,
    c_exp: usize,
    d_exp: usize,
    /// Power of `i` from `(2i)^q` and the pair factor, times `(-1)^rho`.
    quarter_turns: u32,
}

impl Term {
    fn na(&self, nu: usize) -> usize {
        2 * self.c_exp + nu
    }

    fn nb(&self, nu: usize) -> usize {
        2 * self.d_exp + nu
    }

    fn m(&self) -> i64 {
        self.c_exp as i64 - self.d_exp as i64
    }
}

/// Pieces `(extra c power, extra d power, quarter turns)` of the pair factor.
fn pair_factor(sector: SectorLabel) -> &'static [(usize, usize, u32)] {
    match (sector.n1(), sector.n2()) {
        (0, 0) => &[(0, 0, 0)],
        (1, 0) => &[(1, 0, 0), (0, 1, 1)],
        (0, 1) => &[(1, 0, 0), (0, 1, 3)],
        _ => &[(2, 0, 0), (0, 2, 0)],
    }
}

/// Terms in the fixed order q outer, rho inner, pair piece innermost.
fn terms(sector: SectorLabel) -> Vec<Term> {
    let k = sector.k() as usize;
    let mut out = Vec::new();
    for q in 0..=k {
        for rho in 0..=k - q {
            for &(dc, dd, turns) in pair_factor(sector) {
                out.push(Term {
                    q,
                    rho,
                    c_exp: 2 * k - q - 2 * rho + dc,
                    d_exp: q + 2 * rho + dd,
                    quarter_turns: (q as u32 + 2 * rho as u32 + turns) % 4,
                });
            }
        }
    }
    out
}

fn rotate(x: Complex64, quarter_turns: u32) -> Complex64 {
    match quarter_turns % 4 {
        0 => x,
        1 => Complex64::new(-x.im, x.re),
        2 => -x,
        _ => Complex64::new(x.im, -x.re),
    }
}

fn ln_binomial(n: usize, r: usize) -> f64 {
    ln_factorial(n as u64) - ln_factorial(r as u64) - ln_factorial((n - r) as u64)
}

/// Builds the state with automatic precision.
pub fn build_state(solution: &HsSolution, s: &SymmetricFunctions) -> Result<SpinState> {
    build_state_with(solution, s, Precision::Auto)
}

/// Builds the normalized state of `solution`.
///
/// Double precision is used unless `precision` forces more bits. If the
/// estimated rounding error after cancellation exceeds the budget,
/// `Precision::Auto` repeats the expansion at extended precision and a fixed
/// `Bits(p)` reports [`Error::PrecisionExhausted`].
pub fn build_state_with(solution: &HsSolution, s: &SymmetricFunctions, precision: Precision) -> Result<SpinState> {
    assert!(
        s.sector() == solution.sector() && s.zeta() == solution.zeta(),
        "symmetric functions belong to a different solution"
    );
    let sector = solution.sector();
    let exhausted = |estimated_error: f64, bits: u32| Error::PrecisionExhausted {
        sector,
        zeta: solution.zeta(),
        estimated_error,
        bits,
    };

    let mut bits = match precision {
        Precision::Bits(b) if b > DOUBLE_BITS => b as usize,
        _ => {
            let (amps, cancellation) = expand_double(sector, s.values());
            let err = f64::EPSILON * cancellation;
            if err <= STATE_ERROR_BUDGET {
                return Ok(finish(solution, amps, DOUBLE_BITS));
            }
            if precision.is_double_only() {
                return Err(exhausted(err, DOUBLE_BITS));
            }
            required_bits(cancellation)
        }
    };

    for attempt in 0..3 {
        let ext = solution.extended(bits)?;
        let (amps, cancellation) = expand_extended(sector, &ext.b, bits);
        let err = 2f64.powi(-(bits as i32)) * cancellation;
        if err <= STATE_ERROR_BUDGET {
            return Ok(finish(solution, amps, bits as u32));
        }
        if matches!(precision, Precision::Bits(_)) || attempt == 2 {
            return Err(exhausted(err, bits as u32));
        }
        bits = bits.max(required_bits(cancellation)) * 2;
    }
    unreachable!()
}

/// Bits needed so that `2^-bits * cancellation` stays well inside the budget.
fn required_bits(cancellation: f64) -> usize {
    let c = if cancellation.is_finite() { cancellation.max(1.0) } else { 1e300 };
    (c.log2().ceil() as usize + 64).max(96)
}

/// Unnormalized amplitudes (scaled by the largest term) and the ratio of
/// the largest per-component absolute term sum to the resulting norm.
fn expand_double(sector: SectorLabel, s: &[f64]) -> (Vec<Complex64>, f64) {
    let j = sector.j() as usize;
    let nu = sector.nu() as usize;
    let k = sector.k() as usize;
    let ts = terms(sector);
    let log_weight = |t: &Term| -> Option<f64> {
        let sq = s[t.q];
        if sq == 0.0 {
            return None;
        }
        Some(
            ln_binomial(k - t.q, t.rho)
                + t.q as f64 * std::f64::consts::LN_2
                + sq.abs().ln()
                + 0.5 * (ln_factorial(t.na(nu) as u64) + ln_factorial(t.nb(nu) as u64)),
        )
    };
    let top = ts
        .iter()
        .filter_map(log_weight)
        .fold(f64::NEG_INFINITY, f64::max);

    let mut amps = vec![Complex64::new(0.0, 0.0); 2 * j + 1];
    let mut abs_sum = vec![0.0; 2 * j + 1];
    for t in &ts {
        let Some(lw) = log_weight(t) else { continue };
        let mag = (lw - top).exp();
        let sign = if s[t.q] < 0.0 { 2 } else { 0 };
        let idx = (t.m() + j as i64) as usize;
        amps[idx] += rotate(Complex64::new(mag, 0.0), t.quarter_turns + sign);
        abs_sum[idx] += mag;
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let worst = abs_sum.iter().fold(0.0, |m: f64, &x| m.max(x));
    (amps, worst / norm)
}

/// Same expansion carried out with `bits` of precision from the extended
/// coefficients; amplitudes are rounded only after the sums are complete.
fn expand_extended(sector: SectorLabel, b: &[Big], bits: usize) -> (Vec<Complex64>, f64) {
    let j = sector.j() as usize;
    let nu = sector.nu() as usize;
    let k = sector.k() as usize;
    let zero = extended::int(0, bits);

    let mut fact = Vec::with_capacity(2 * j + 2);
    fact.push(extended::int(1, bits));
    for i in 1..=2 * j + 1 {
        let next = &fact[i - 1] * extended::int(i as u64, bits);
        fact.push(next);
    }
    // S_q = (-1)^q b_q / b_0
    let s: Vec<Big> = b
        .iter()
        .enumerate()
        .map(|(q, bq)| {
            let v = bq / &b[0];
            if q % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect();

    let n = 2 * j + 1;
    let mut re = vec![zero.clone(); n];
    let mut im = vec![zero.clone(); n];
    let mut abs_sum = vec![zero.clone(); n];
    for t in terms(sector) {
        let binom = &fact[k - t.q] / (&fact[t.rho] * &fact[k - t.q - t.rho]);
        let root = (&fact[t.na(nu)] * &fact[t.nb(nu)]).sqrt();
        let two_q = extended::int(1u64 << t.q.min(63), bits) * pow2(t.q.saturating_sub(63), bits);
        let value = binom * two_q * &s[t.q] * root;
        let idx = (t.m() + j as i64) as usize;
        abs_sum[idx] += value.clone().abs();
        match t.quarter_turns {
            0 => re[idx] += value,
            1 => im[idx] += value,
            2 => re[idx] -= value,
            _ => im[idx] -= value,
        }
    }

    let mut top = zero.clone();
    for (r, i) in re.iter().zip(&im) {
        for x in [r, i] {
            let a = x.clone().abs();
            if a > top {
                top = a;
            }
        }
    }
    let worst_sum = abs_sum.iter().fold(zero.clone(), |m, x| if *x > m { x.clone() } else { m });
    if top == zero {
        return (vec![Complex64::new(0.0, 0.0); n], f64::INFINITY);
    }
    let amps: Vec<Complex64> = re
        .iter()
        .zip(&im)
        .map(|(r, i)| Complex64::new(extended::to_f64(&(r / &top)), extended::to_f64(&(i / &top))))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let ratio = extended::to_f64(&(worst_sum / &top)) / norm;
    (amps, ratio)
}

fn pow2(e: usize, bits: usize) -> Big {
    let mut p = extended::int(1, bits);
    for _ in 0..e {
        p *= extended::int(2, bits);
    }
    p
}

/// Normalizes and fixes the global phase: the first populated amplitude in
/// the order `M = J, -J, J-1, -(J-1), ...` is made real and positive.
fn finish(solution: &HsSolution, mut amps: Vec<Complex64>, bits: u32) -> SpinState {
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    let n = amps.len();
    let largest = amps.iter().fold(0.0, |m: f64, a| m.max(a.norm()));
    let reference = (0..n)
        .flat_map(|d| [n - 1 - d, d])
        .find(|&i| amps[i].norm() > POPULATED * largest);
    if let Some(i) = reference {
        let phase = amps[i].conj() / amps[i].norm();
        for a in &mut amps {
            *a *= phase;
        }
    }
    SpinState {
        j: solution.sector().j(),
        sector: solution.sector(),
        zeta: solution.zeta(),
        amplitudes: amps,
        working_bits: bits,
    }
}

/// `|| H psi - E psi ||` with `H` the dense Hamiltonian at coupling `chi`.
pub fn residual_norm(state: &SpinState, energy: f64, chi: f64) -> f64 {
    residual_norm_in(&build_hamiltonian(state.j), state, energy, chi)
}

/// [`residual_norm`] with a prebuilt `H / chi`.
pub fn residual_norm_in(h: &DenseHamiltonian, state: &SpinState, energy: f64, chi: f64) -> f64 {
    let hpsi = h.apply(&state.amplitudes);
    hpsi.iter()
        .zip(&state.amplitudes)
        .map(|(hp, p)| (hp * chi - p * energy).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Hermitian inner product `<a|b>`.
pub fn overlap(a: &SpinState, b: &SpinState) -> Result<Complex64> {
    if a.j != b.j {
        return Err(Error::SpinMismatch { left: a.j, right: b.j });
    }
    Ok(a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| x.conj() * y).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hs_solver::solve_sector;
    use crate::polynomials::symmetric_functions;
    use crate::sectors::enumerate_sectors;
    use approx::assert_relative_eq;

    fn states_of(j: u32) -> Vec<(SpinState, f64)> {
        enumerate_sectors(j)
            .unwrap()
            .labels()
            .flat_map(|s| solve_sector(s).unwrap())
            .map(|sol| {
                let st = build_state(&sol, &symmetric_functions(&sol).unwrap()).unwrap();
                (st, sol.energy_over_chi())
            })
            .collect()
    }

    fn state(j: u32, n1: u8, n2: u8, nu: u8, zeta: usize) -> (SpinState, f64) {
        let sol = solve_sector(SectorLabel::new(j, n1, n2, nu).unwrap()).unwrap().remove(zeta - 1);
        let s = symmetric_functions(&sol).unwrap();
        (build_state(&sol, &s).unwrap(), sol.energy_over_chi())
    }

    #[test]
    fn singlet_at_j0() {
        let (st, e) = state(0, 0, 0, 0, 1);
        assert_eq!(st.amplitudes(), &[Complex64::new(1.0, 0.0)]);
        assert_eq!(residual_norm(&st, e, 1.0), 0.0);
    }

    #[test]
    fn j1_pair_states() {
        let (a, _) = state(1, 1, 0, 0, 1);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(a.amplitude(1).re, h, epsilon = 1e-15);
        assert_relative_eq!(a.amplitude(-1).im, h, epsilon = 1e-15);
        assert_eq!(a.amplitude(0), Complex64::new(0.0, 0.0));
        let (b, _) = state(1, 0, 1, 0, 1);
        assert!(overlap(&a, &b).unwrap().norm() < 1e-15);
        assert_relative_eq!(overlap(&a, &a).unwrap().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn j2_ground_state_matches_dense_vector() {
        let (st, e) = state(2, 0, 0, 0, 1);
        assert_relative_eq!(e, -2.0 * 3f64.sqrt(), epsilon = 1e-12);
        assert!(residual_norm(&st, e, 1.0) < 1e-10);
        assert_eq!(st.amplitude(1), Complex64::new(0.0, 0.0));
        assert_eq!(st.amplitude(-1), Complex64::new(0.0, 0.0));
        let pairs = crate::oracle::dense_eigenpairs(&build_hamiltonian(2)).unwrap();
        let v = &pairs[0].1;
        let o: Complex64 = v.iter().zip(st.amplitudes()).map(|(x, y)| x.conj() * y).sum();
        assert!(o.norm() >= 1.0 - 1e-9);
        // wrong energy shifts the residual by exactly chi
        assert_relative_eq!(residual_norm(&st, e + 1.0, 1.0), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn eigen_residuals_and_orthogonality_small_j() {
        for j in 2..=12u32 {
            let all = states_of(j);
            assert_eq!(all.len(), 2 * j as usize + 1);
            for (st, e) in &all {
                assert_relative_eq!(st.norm(), 1.0, epsilon = 1e-13);
                let r = residual_norm(st, *e, 1.0);
                assert!(r <= 1e-8 * (1.0 + e.abs()), "J={j} {} residual {r}", st.sector());
            }
            for (a, ea) in &all {
                for (b, eb) in &all {
                    if std::ptr::eq(a, b) || (ea - eb).abs() < 1e-9 {
                        continue;
                    }
                    assert!(overlap(a, b).unwrap().norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn m_lattice_support() {
        for (st, _) in states_of(9) {
            let parity = (st.sector().j() - u32::from(st.sector().nu())) % 2;
            for m in st.m_values() {
                if (m.rem_euclid(2) as u32) != parity {
                    assert_eq!(st.amplitude(m), Complex64::new(0.0, 0.0));
                }
            }
        }
        // n1 = n2 = nu = 0: M = 2k - 2q - 4 rho, so M is even and congruent to 2k mod 4 or
        // shifted by 2 per q
        let (st, _) = state(8, 0, 0, 0, 2);
        for m in st.m_values() {
            if m % 2 != 0 {
                assert_eq!(st.amplitude(m), Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn construction_is_deterministic_and_phase_fixed() {
        let sol = solve_sector(SectorLabel::new(10, 1, 0, 1).unwrap()).unwrap().remove(2);
        let s = symmetric_functions(&sol).unwrap();
        let a = build_state(&sol, &s).unwrap();
        let b = build_state(&sol, &s).unwrap();
        assert_eq!(a, b);
        let top = a.amplitudes().iter().fold(0.0, |m: f64, x| m.max(x.norm()));
        let n = a.amplitudes().len();
        let first = (0..n)
            .flat_map(|d| [n - 1 - d, d])
            .find(|&i| a.amplitudes()[i].norm() > 1e-10 * top)
            .unwrap();
        assert_eq!(a.amplitudes()[first].im, 0.0);
        assert!(a.amplitudes()[first].re > 0.0);
    }

    #[test]
    fn extended_expansion_agrees_with_double() {
        let sol = solve_sector(SectorLabel::new(14, 0, 1, 1).unwrap()).unwrap().remove(3);
        let s = symmetric_functions(&sol).unwrap();
        let a = build_state_with(&sol, &s, Precision::Bits(53)).unwrap();
        let b = build_state_with(&sol, &s, Precision::Bits(256)).unwrap();
        assert_eq!(b.working_bits(), 256);
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn other_binomial_readings_do_not_give_eigenstates() {
        // weight (k_s - q)! / ((k_s - q - rho)! rho!) with k_s the quartet count is the
        // consistent one; replacing k_s by k_s + 1 breaks the eigen-equation
        let sol = solve_sector(SectorLabel::new(5, 0, 1, 0).unwrap()).unwrap().remove(0);
        let s = symmetric_functions(&sol).unwrap();
        let sector = sol.sector();
        let k = sector.k() as usize;
        let mut amps = vec![Complex64::new(0.0, 0.0); 11];
        for t in terms(sector) {
            let c = ln_binomial(k + 1 - t.q, t.rho).exp() * 2f64.powi(t.q as i32) * s.get(t.q).abs();
            let c = c * (0.5 * (ln_factorial(t.na(0) as u64) + ln_factorial(t.nb(0) as u64))).exp();
            let sign = if s.get(t.q) < 0.0 { 2 } else { 0 };
            amps[(t.m() + 5) as usize] += rotate(Complex64::new(c, 0.0), t.quarter_turns + sign);
        }
        let st = finish(&sol, amps, DOUBLE_BITS);
        assert!(residual_norm(&st, sol.energy_over_chi(), 1.0) > 1e-2);
        let good = build_state(&sol, &s).unwrap();
        assert!(residual_norm(&good, sol.energy_over_chi(), 1.0) < 1e-10);
    }
}
