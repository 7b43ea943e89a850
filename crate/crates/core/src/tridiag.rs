//! Symmetric tridiagonal eigensolver (implicit QL with Wilkinson shifts).
//!
//! Follows the EISPACK `tql2` procedure: each QL sweep chases a bulge from
//! the bottom of the unreduced block to its top using Givens rotations, and
//! the rotations are optionally accumulated into an eigenvector matrix.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const MAX_SWEEPS_PER_VALUE: usize = 60;

/// Eigenpairs of a symmetric tridiagonal matrix, sorted by ascending eigenvalue.
#[derive(Debug, Clone)]
pub struct TridiagonalEigen {
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`, when requested.
    pub vectors: Option<DMatrix<f64>>,
}

/// Eigenvalues (and optionally eigenvectors) of the symmetric tridiagonal
/// matrix with main diagonal `diag` and off-diagonal `off` (`off[i]` couples
/// rows `i` and `i + 1`).
pub fn symmetric_tridiagonal_eigen(
    diag: &[f64],
    off: &[f64],
    want_vectors: bool,
) -> Result<TridiagonalEigen> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    if off.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            found: off.len(),
        });
    }

    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut z = want_vectors.then(|| DMatrix::<f64>::identity(n, n));

    let mut shift_total = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;

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
                if sweeps > MAX_SWEEPS_PER_VALUE {
                    return Err(Error::NoConvergence {
                        iterations: MAX_SWEEPS_PER_VALUE,
                    });
                }

                // Wilkinson shift from the leading 2x2 block.
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
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                shift_total += h;

                // Implicit QL sweep from m back up to l.
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

                    if let Some(z) = z.as_mut() {
                        for k in 0..n {
                            let zk1 = z[(k, i + 1)];
                            let zk = z[(k, i)];
                            z[(k, i + 1)] = s * zk + c * zk1;
                            z[(k, i)] = c * zk - s * zk1;
                        }
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
    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = z.map(|z| DMatrix::from_fn(n, n, |i, k| z[(i, order[k])]));
    Ok(TridiagonalEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::symmetric_eigenvalues;

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
        let eig = symmetric_tridiagonal_eigen(&[3.5], &[], true).unwrap();
        assert_eq!(eig.values, vec![3.5]);
        assert_eq!(eig.vectors.unwrap()[(0, 0)], 1.0);
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[2, 1], [1, 2]] has eigenvalues 1 and 3.
        let eig = symmetric_tridiagonal_eigen(&[2.0, 2.0], &[1.0], false).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-15);
        assert!((eig.values[1] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn agrees_with_dense_solver_and_vectors_are_orthonormal() {
        let diag = [2.0, -1.0, 0.5, 4.0, 3.0, -2.5];
        let off = [1.0, 0.3, -2.0, 0.7, 1.5];
        let eig = symmetric_tridiagonal_eigen(&diag, &off, true).unwrap();
        let reference = symmetric_eigenvalues(&dense(&diag, &off)).unwrap();
        for (a, b) in eig.values.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
        let v = eig.vectors.unwrap();
        assert!((v.transpose() * &v - DMatrix::identity(6, 6)).amax() < 1e-13);
        let t = dense(&diag, &off);
        for k in 0..6 {
            let col = v.column(k);
            assert!((&t * col - col * eig.values[k]).amax() < 1e-12);
        }
    }

    #[test]
    fn decoupled_blocks() {
        let eig = symmetric_tridiagonal_eigen(&[1.0, 5.0, 2.0], &[0.0, 0.0], false).unwrap();
        assert_eq!(eig.values, vec![1.0, 2.0, 5.0]);
    }

    #[test]
    fn rejects_bad_lengths() {
        assert!(symmetric_tridiagonal_eigen(&[], &[], false).is_err());
        assert!(symmetric_tridiagonal_eigen(&[1.0, 2.0], &[], false).is_err());
    }
}
