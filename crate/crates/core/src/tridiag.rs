//! Symmetric tridiagonal eigensolver (implicit QL with Wilkinson shifts).
//!
//! Follows the classic `tql2` procedure of Bowdler, Martin, Reinsch and
//! Wilkinson, accumulating the rotations into the eigenvector matrix.

/// Eigen-decomposition of a real symmetric tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct TridiagonalEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// `vectors[i]` is the unit eigenvector for `values[i]`.
    pub vectors: Vec<Vec<f64>>,
}

const MAX_SWEEPS: usize = 60;

/// Diagonalizes the symmetric tridiagonal matrix with main diagonal `diag`
/// and off-diagonal `off` (`off[i]` couples rows `i` and `i + 1`).
///
/// Returns `None` if some eigenvalue fails to converge or the input is not finite.
pub fn symmetric_tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Option<TridiagonalEigen> {
    let n = diag.len();
    assert_eq!(off.len(), n.saturating_sub(1), "off-diagonal length must be n - 1");
    if diag.iter().chain(off).any(|x| !x.is_finite()) {
        return None;
    }
    if n == 0 {
        return Some(TridiagonalEigen {
            values: vec![],
            vectors: vec![],
        });
    }

    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    // z[row][col], columns become eigenvectors
    let mut z = vec![vec![0.0; n]; n];
    for (i, row) in z.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    let eps = f64::EPSILON;
    let mut shift_total = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }

        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_SWEEPS {
                    return None;
                }

                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                shift_total += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    for row in z.iter_mut() {
                        let zh = row[i + 1];
                        row[i + 1] = s * row[i] + c * zh;
                        row[i] = c * row[i] - s * zh;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += shift_total;
        e[l] = 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = order
        .iter()
        .map(|&col| z.iter().map(|row| row[col]).collect())
        .collect();
    Some(TridiagonalEigen { values, vectors })
}

/// Number of eigenvalues strictly below `x` (Sturm sequence count).
pub fn count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let coupling = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { coupling / q };
        if q == 0.0 {
            q = -f64::EPSILON * (diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn dense(diag: &[f64], off: &[f64]) -> DMatrix<f64> {
        let n = diag.len();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                diag[i]
            } else if i + 1 == j {
                off[i]
            } else if j + 1 == i {
                off[j]
            } else {
                0.0
            }
        })
    }

    #[test]
    fn one_by_one() {
        let e = symmetric_tridiagonal_eigen(&[2.5], &[]).unwrap();
        assert_eq!(e.values, vec![2.5]);
        assert_eq!(e.vectors, vec![vec![1.0]]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let e = symmetric_tridiagonal_eigen(&[0.0, 0.0], &[-(0.75f64).sqrt()]).unwrap();
        assert_relative_eq!(e.values[0], -(0.75f64).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(e.values[1], (0.75f64).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn matches_dense_solver_and_sturm_counts() {
        let diag: Vec<f64> = (0..12).map(|i| (i as f64 * 0.7).sin() * 3.0).collect();
        let off: Vec<f64> = (0..11).map(|i| -1.0 - (i as f64) * 0.4).collect();
        let e = symmetric_tridiagonal_eigen(&diag, &off).unwrap();
        let a = dense(&diag, &off);
        let mut reference: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        for (x, y) in e.values.iter().zip(&reference) {
            assert_relative_eq!(x, y, epsilon = 1e-12);
        }
        for (i, lam) in e.values.iter().enumerate() {
            assert_eq!(count_below(&diag, &off, *lam - 1e-9), i);
            let v = nalgebra::DVector::from_vec(e.vectors[i].clone());
            let resid = (&a * &v - &v * *lam).norm();
            assert!(resid < 1e-12, "residual {resid}");
            assert_relative_eq!(v.norm(), 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn decoupled_blocks() {
        let e = symmetric_tridiagonal_eigen(&[1.0, 2.0, 3.0], &[0.0, 0.0]).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_non_finite_input() {
        assert!(symmetric_tridiagonal_eigen(&[f64::NAN, 1.0], &[1.0]).is_none());
    }
}
