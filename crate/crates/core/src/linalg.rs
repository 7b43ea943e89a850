//! Dense helpers shared by the solver modules: norms, eigenvalues, nullspaces
//! and triangular inverses.

use nalgebra::{Complex, DMatrix, Schur, SymmetricEigen, SVD};

use crate::error::{Error, Result};

const EIGEN_EPS: f64 = f64::EPSILON;
const EIGEN_MAX_ITER: usize = 10_000;

/// Induced infinity norm (largest absolute row sum).
pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Asymmetry `||m - m^T||_inf`.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    inf_norm(&(m - m.transpose()))
}

/// Number of nonzero sub- and super-diagonals.
pub fn bandwidth(m: &DMatrix<f64>) -> (usize, usize) {
    let mut lower = 0;
    let mut upper = 0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if m[(i, j)] != 0.0 {
                if i > j {
                    lower = lower.max(i - j);
                } else {
                    upper = upper.max(j - i);
                }
            }
        }
    }
    (lower, upper)
}

/// Eigenvalues of a symmetric matrix, sorted ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::try_new(m.clone(), EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(Error::NoConvergence { iterations: EIGEN_MAX_ITER })?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Eigenvalues of a general real matrix, sorted by real part then imaginary part.
pub fn general_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    let schur = Schur::try_new(balance(m), EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(Error::NoConvergence { iterations: EIGEN_MAX_ITER })?;
    let mut values: Vec<Complex<f64>> = schur.complex_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(values)
}

/// Parlett-Reinsch balancing: a diagonal similarity by powers of two that
/// equalizes row and column norms. Leaves eigenvalues unchanged (the scaling is
/// exact in binary floating point) and tames strongly non-normal input.
pub fn balance(m: &DMatrix<f64>) -> DMatrix<f64> {
    const RADIX: f64 = 2.0;
    let n = m.nrows();
    let mut a = m.clone();
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
    a
}

/// Orthonormal basis (as columns) of the nullspace of `a`, using singular values
/// below `rel_tol * sigma_max` as the cutoff.
pub fn nullspace(a: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let cols = a.ncols();
    // Thin SVD only exposes min(rows, cols) right singular vectors; pad wide
    // systems with zero rows so the full right basis is available.
    let padded;
    let a = if a.nrows() < cols {
        padded = a.clone().resize_vertically(cols, 0.0);
        &padded
    } else {
        a
    };
    let svd = SVD::new(a.clone(), false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = rel_tol * sigma_max;
    let null_rows: Vec<usize> = (0..cols)
        .filter(|&k| svd.singular_values[k] <= cutoff)
        .collect();
    DMatrix::from_fn(cols, null_rows.len(), |i, k| v_t[(null_rows[k], i)])
}

/// Inverse of an upper-triangular matrix by back-substitution.
pub fn upper_triangular_inverse(u: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = u.nrows();
    if (0..n).any(|i| u[(i, i)] == 0.0) {
        return Err(Error::SingularMap);
    }
    let mut inv = DMatrix::zeros(n, n);
    for col in 0..n {
        for i in (0..=col).rev() {
            let rhs = if i == col { 1.0 } else { 0.0 };
            let acc: f64 = (i + 1..=col).map(|k| u[(i, k)] * inv[(k, col)]).sum();
            inv[(i, col)] = (rhs - acc) / u[(i, i)];
        }
    }
    Ok(inv)
}

/// Inverse of a lower-triangular matrix by forward substitution.
pub fn lower_triangular_inverse(l: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(upper_triangular_inverse(&l.transpose())?.transpose())
}
