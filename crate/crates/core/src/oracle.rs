//! Dense diagonalization of `H / chi = (J+^2 - J-^2) / 2i` in the `|J, M>` basis.
//!
//! Works for any integer or half-integer `J` and serves as ground truth for
//! the Bethe route.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin::Spin;

/// `H / chi` as a complex Hermitian matrix. Basis index `i` is `M = -J + i`.
#[derive(Debug, Clone)]
pub struct DenseHamiltonian {
    spin: Spin,
    matrix: DMatrix<Complex64>,
}

impl DenseHamiltonian {
    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `H psi / chi`, exploiting that only `M -> M +- 2` couplings are nonzero.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(psi.len(), n);
        (0..n)
            .map(|i| {
                let mut acc = Complex64::new(0.0, 0.0);
                if i >= 2 {
                    acc += self.matrix[(i, i - 2)] * psi[i - 2];
                }
                if i + 2 < n {
                    acc += self.matrix[(i, i + 2)] * psi[i + 2];
                }
                acc
            })
            .collect()
    }

    /// Real symmetric matrix unitarily equivalent to `H / chi`, obtained by
    /// rephasing `|M>` with powers of `i`.
    pub fn real_symmetric_form(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |r, c| {
            if r == c + 2 || c == r + 2 {
                // upper couplings are +i a, lower -i a; the rephasing maps both to -a
                -self.matrix[(r.max(c), r.min(c))].im.abs()
            } else {
                0.0
            }
        })
    }
}

/// `c+(M) = sqrt(J(J+1) - M(M+1))` with `J = tj/2`, `M = tm/2`.
fn raising(tj: i64, tm: i64) -> f64 {
    (((tj * (tj + 2) - tm * (tm + 2)) as f64) / 4.0).max(0.0).sqrt()
}

pub fn build_hamiltonian(spin: impl Into<Spin>) -> DenseHamiltonian {
    let spin = spin.into();
    let tj = i64::from(spin.twice());
    let n = spin.dim();
    let mut matrix = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for i in 0..n.saturating_sub(2) {
        let tm = -tj + 2 * i as i64;
        // <M+2| J+^2 |M> = c+(M) c+(M+1)
        let a = 0.5 * raising(tj, tm) * raising(tj, tm + 2);
        matrix[(i + 2, i)] = Complex64::new(0.0, -a);
        matrix[(i, i + 2)] = Complex64::new(0.0, a);
    }
    DenseHamiltonian { spin, matrix }
}

/// Eigenvalues of `H / chi`, ascending.
pub fn dense_spectrum(h: &DenseHamiltonian) -> Result<Vec<f64>> {
    let mut values: Vec<f64> = h.real_symmetric_form().symmetric_eigenvalues().iter().copied().collect();
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::Oracle(h.spin.to_string()));
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Eigenpairs of `H / chi` in the `|J, M>` basis, ascending in energy.
pub fn dense_eigenpairs(h: &DenseHamiltonian) -> Result<Vec<(f64, Vec<Complex64>)>> {
    let eig = h.matrix.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::Oracle(h.spin.to_string()));
    }
    let mut pairs: Vec<(f64, Vec<Complex64>)> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .map(|(&e, v)| (e, v.iter().copied().collect()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hermitian_with_imaginary_couplings() {
        let h = build_hamiltonian(3);
        let m = h.matrix();
        assert_eq!(m.clone(), m.adjoint());
        assert_eq!(m[(2, 0)], Complex64::new(0.0, -0.5 * 6f64.sqrt() * 10f64.sqrt()));
        assert!(m.iter().all(|z| z.re == 0.0));
    }

    #[test]
    fn spin_one_spectrum() {
        let s = dense_spectrum(&build_hamiltonian(1)).unwrap();
        for (x, y) in s.iter().zip([-1.0, 0.0, 1.0]) {
            assert_relative_eq!(*x, y, epsilon = 1e-14);
        }
    }

    #[test]
    fn real_form_is_unitarily_equivalent() {
        let h = build_hamiltonian(Spin::from_twice(13));
        let a = dense_spectrum(&h).unwrap();
        let b = dense_eigenpairs(&h).unwrap();
        for (x, (y, _)) in a.iter().zip(&b) {
            assert_relative_eq!(*x, *y, epsilon = 1e-12);
        }
    }

    #[test]
    fn eigenpairs_satisfy_the_eigen_equation() {
        let h = build_hamiltonian(7);
        for (e, v) in dense_eigenpairs(&h).unwrap() {
            let hv = h.apply(&v);
            let r: f64 = hv.iter().zip(&v).map(|(a, b)| (a - b * e).norm_sqr()).sum::<f64>().sqrt();
            assert!(r < 1e-12);
        }
    }

    #[test]
    fn spectrum_is_symmetric() {
        let s = dense_spectrum(&build_hamiltonian(20)).unwrap();
        let n = s.len();
        for i in 0..n {
            assert!((s[i] + s[n - 1 - i]).abs() < 1e-10);
        }
    }
}
