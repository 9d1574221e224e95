//! Extended-precision counterparts of the double-precision kernels.
//!
//! The monomial coefficients `b_j` of a Heine-Stieltjes polynomial of degree
//! `k` lose roughly one decimal digit of root accuracy per unit of `k`, so the
//! zeros (and, for very large `J`, the eigenstates) are recomputed here with a
//! few hundred bits of working precision.

use dashu_float::ops::Abs;
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

use crate::hs_solver::TridiagonalSystem;

pub(crate) type Big = FBig<HalfEven, 2>;

pub(crate) fn big(x: f64, bits: usize) -> Big {
    Big::try_from(x)
        .expect("finite value")
        .with_precision(bits)
        .value()
}

pub(crate) fn int(x: u64, bits: usize) -> Big {
    Big::from(x).with_precision(bits).value()
}

pub(crate) fn to_f64(x: &Big) -> f64 {
    x.to_f64().value()
}

fn is_zero(x: &Big) -> bool {
    x.repr().is_zero()
}

fn is_negative(x: &Big) -> bool {
    *x < Big::ZERO
}

/// Eigenpair of `F` refined to `bits` of precision.
#[derive(Debug, Clone)]
pub(crate) struct ExtendedSolution {
    pub g0: Big,
    /// Coefficients with `b_k = 1`.
    pub b: Vec<Big>,
    pub bits: usize,
}

impl ExtendedSolution {
    pub fn energy_over_chi(&self, system: &TridiagonalSystem) -> f64 {
        let s = system.sector();
        let mut e = big(s.pair_imbalance() / 2.0, self.bits);
        if self.b.len() > 1 {
            e -= &self.b[1] / &self.b[0];
        }
        to_f64(&(e * big(2.0 * s.seniority_factor(), self.bits)))
    }
}

/// Refines the eigenvalue nearest to `seed` and rebuilds its coefficient
/// vector by the twisted three-term recurrence joined at `twist`.
pub(crate) fn refine(
    system: &TridiagonalSystem,
    seed: f64,
    twist: usize,
    bits: usize,
) -> Option<ExtendedSolution> {
    let g0 = refine_eigenvalue(system, seed, bits)?;
    let b = twisted_coefficients(system, &g0, twist, bits)?;
    Some(ExtendedSolution { g0, b, bits })
}

/// Newton iteration on the continuant `det(F - g)`.
fn refine_eigenvalue(system: &TridiagonalSystem, seed: f64, bits: usize) -> Option<Big> {
    let n = system.dim();
    let diag: Vec<Big> = system.diag().iter().map(|&x| big(x, bits)).collect();
    if n == 1 {
        return Some(diag[0].clone());
    }
    let coupling: Vec<Big> = (1..n)
        .map(|j| big(system.sub()[j] * system.sup()[j - 1], bits))
        .collect();

    let scale = 1.0 + seed.abs();
    let tol = big(scale, bits) * big(2f64.powi(-(bits as i32 - 8)), bits);
    let mut g = big(seed, bits);
    for _ in 0..100 {
        let mut p_prev = int(1, bits);
        let mut dp_prev = int(0, bits);
        let mut p = &diag[0] - &g;
        let mut dp = int(0, bits) - int(1, bits);
        for j in 1..n {
            let shifted = &diag[j] - &g;
            let p_next = &shifted * &p - &coupling[j - 1] * &p_prev;
            let dp_next = &shifted * &dp - &p - &coupling[j - 1] * &dp_prev;
            p_prev = p;
            dp_prev = dp;
            p = p_next;
            dp = dp_next;
        }
        if is_zero(&dp) {
            return None;
        }
        let step = &p / &dp;
        g -= &step;
        if (to_f64(&g) - seed).abs() > 1e-6 * scale {
            return None;
        }
        if step.abs() <= tol {
            return Some(g);
        }
    }
    None
}

fn twisted_coefficients(
    system: &TridiagonalSystem,
    g: &Big,
    twist: usize,
    bits: usize,
) -> Option<Vec<Big>> {
    let n = system.dim();
    let k = n - 1;
    let diag: Vec<Big> = system.diag().iter().map(|&x| big(x, bits)).collect();
    let sub: Vec<Big> = system.sub().iter().map(|&x| big(x, bits)).collect();
    let sup: Vec<Big> = system.sup().iter().map(|&x| big(x, bits)).collect();

    let mut b = vec![int(0, bits); n];
    b[0] = int(1, bits);
    for j in 0..twist {
        let mut next = (g - &diag[j]) * &b[j];
        if j > 0 {
            next -= &sub[j] * &b[j - 1];
        }
        b[j + 1] = next / &sup[j];
    }

    let mut back = vec![int(0, bits); n];
    back[k] = int(1, bits);
    for j in (twist + 1..=k).rev() {
        let mut prev = (g - &diag[j]) * &back[j];
        if j < k {
            prev -= &sup[j] * &back[j + 1];
        }
        back[j - 1] = prev / &sub[j];
    }

    if is_zero(&back[twist]) || is_zero(&b[twist]) {
        return None;
    }
    let join = &b[twist] / &back[twist];
    for j in twist + 1..=k {
        b[j] = &back[j] * &join;
    }
    let top = b[k].clone();
    if is_zero(&top) {
        return None;
    }
    Some(b.into_iter().map(|x| x / &top).collect())
}

fn horner(b: &[Big], x: &Big, bits: usize) -> (Big, Big) {
    let mut p = b[b.len() - 1].clone();
    let mut dp = int(0, bits);
    for c in b[..b.len() - 1].iter().rev() {
        dp = dp * x + &p;
        p = p * x + c;
    }
    (p, dp)
}

/// All zeros of the real-rooted polynomial `sum b_j u^j` (`b_k = 1`, roots
/// in `(-1, 1)`), ascending. Newton iteration with Maehly's zero suppression,
/// sweeping from the right; double steps until the first sign change.
pub(crate) fn real_roots(b: &[Big], bits: usize) -> Option<Vec<Big>> {
    let k = b.len() - 1;
    let tol = big(2f64.powi(-(bits as i32 - 10)), bits);
    let floor = big(2f64.powi(-(bits as i32 / 2)), bits);
    let offset = big(2f64.powi(-20), bits);
    let two = int(2, bits);
    let mut found: Vec<Big> = Vec::with_capacity(k);

    for m in 0..k {
        let remaining = k - m;
        let mut x = match found.last() {
            None => int(1, bits),
            Some(prev) => prev + &offset,
        };

        // Deflated value p(x) / prod(x - xi) and its Newton step.
        let step_at = |x: &Big| -> Option<(Big, bool)> {
            let (p, dp) = horner(b, x, bits);
            let mut suppress = int(0, bits);
            let mut negative = is_negative(&p);
            for xi in &found {
                let d = x - xi;
                if is_zero(&d) {
                    return None;
                }
                negative ^= is_negative(&d);
                suppress += int(1, bits) / d;
            }
            let denom = dp - &p * suppress;
            if is_zero(&denom) {
                return if is_zero(&p) { Some((int(0, bits), negative)) } else { None };
            }
            Some((p / denom, negative))
        };

        let (_, start_sign) = step_at(&x)?;
        let mut doubling = remaining >= 2;
        let mut converged = false;
        let mut last_step: Option<Big> = None;
        for _ in 0..400 {
            let (step, sign) = step_at(&x)?;
            if doubling && sign != start_sign {
                doubling = false;
            }
            if doubling {
                x -= &two * &step;
                continue;
            }
            let size = step.clone().abs();
            x -= &step;
            if size <= tol {
                converged = true;
                break;
            }
            if let Some(prev) = &last_step {
                // monotone phase has stalled at the rounding floor
                if size >= *prev && size <= floor {
                    converged = true;
                    break;
                }
            }
            last_step = Some(size);
        }
        if !converged {
            return None;
        }
        found.push(x);
    }
    found.reverse();
    Some(found)
}
