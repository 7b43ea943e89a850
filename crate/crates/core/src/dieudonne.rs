//! Metric candidates compatible with the raw position matrix.
//!
//! A metric `T` is compatible with `Q` when `Q^T T = T Q`. Because `Q` is
//! tridiagonal with a nonvanishing subdiagonal, entry `(i, j)` of that equation
//! can be solved for `T[i + 1][j]`, so the first row of `T` determines the whole
//! matrix. The first row therefore serves as the parameter vector; at `N = 4`
//! it is `(k, mu, p, d)`.
//!
//! Two solvers are provided: the row recurrence (fast path) and a dense
//! nullspace of the vectorized linear map `T -> Q^T T - T Q` restricted to
//! symmetric (optionally banded) matrices, used as an independent check.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hermite::{build_position_matrix, build_symmetrized_position, PositionFlavor, PositionMatrix};
use crate::linalg::{self, inf_norm};
use crate::tridiag::symmetric_tridiagonal_eigen;

/// Relative singular-value cutoff used by the nullspace solver.
pub const NULLSPACE_REL_TOL: f64 = 1e-10;

/// Largest accepted distance of a normalized recurrence basis element from the
/// numerical nullspace. The spectral gap of the vectorized map shrinks to about
/// 1e-9 of its norm at N = 32, which bounds how sharply SVD resolves the subspace.
const SPAN_DEFECT_TOL: f64 = 1e-6;

/// Symmetric metric together with the first-row parameters that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricCandidate {
    matrix: DMatrix<f64>,
    params: Vec<f64>,
    bandwidth: Option<usize>,
}

impl MetricCandidate {
    /// Wraps an exactly symmetric matrix. The parameters are its first row and
    /// the bandwidth is whatever the nonzero pattern shows.
    pub fn from_symmetric(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() == 0 {
            return Err(Error::EmptyDimension);
        }
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let asym = linalg::max_abs(&(&matrix - matrix.transpose()));
        if asym != 0.0 {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        let params = matrix.row(0).iter().copied().collect();
        let bandwidth = Some(linalg::bandwidth(&matrix).1);
        Ok(Self {
            matrix,
            params,
            bandwidth,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_symmetric(DMatrix::identity(n, n))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Declared bandwidth; `None` means full.
    pub fn bandwidth(&self) -> Option<usize> {
        self.bandwidth
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// `||Q^T T - T Q||_inf` for a dense `Q`.
pub fn dieudonne_residual(q: &DMatrix<f64>, theta: &DMatrix<f64>) -> f64 {
    inf_norm(&(q.transpose() * theta - theta * q))
}

/// Dieudonne residual divided by `||T||_inf`.
pub fn relative_dieudonne_residual(q: &DMatrix<f64>, theta: &DMatrix<f64>) -> f64 {
    let scale = inf_norm(theta);
    if scale == 0.0 {
        return dieudonne_residual(q, theta);
    }
    dieudonne_residual(q, theta) / scale
}

fn require_raw(q: &PositionMatrix) -> Result<()> {
    match q.flavor() {
        PositionFlavor::Raw => Ok(()),
        PositionFlavor::Symmetrized => Err(Error::InvalidParameter(
            "metric construction needs the raw position matrix".into(),
        )),
    }
}

/// Fills the metric from its first row using `Q^T T = T Q`.
///
/// Only the upper triangle is computed; every quantity the recurrence needs
/// for `T[i + 1][j]`, `j > i`, already lies on or above the diagonal.
pub fn metric_from_first_row(q: &PositionMatrix, first_row: &[f64]) -> Result<MetricCandidate> {
    require_raw(q)?;
    let n = q.dim();
    if first_row.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: first_row.len(),
        });
    }
    let band = q.band();
    let mut upper = DMatrix::<f64>::zeros(n, n);
    for (j, &v) in first_row.iter().enumerate() {
        upper[(0, j)] = v;
    }
    let at = |m: &DMatrix<f64>, r: usize, c: usize| if r <= c { m[(r, c)] } else { m[(c, r)] };

    for i in 0..n.saturating_sub(1) {
        let sub = band.get(i + 1, i);
        for j in (i + 1)..n {
            // (T Q)_{ij} - (Q^T T)_{ij} without the T[i+1][j] term.
            let mut acc = 0.0;
            if j >= 1 {
                acc += at(&upper, i, j - 1) * band.get(j - 1, j);
            }
            acc += at(&upper, i, j) * (band.get(j, j) - band.get(i, i));
            if j + 1 < n {
                acc += at(&upper, i, j + 1) * band.get(j + 1, j);
            }
            if i >= 1 {
                acc -= band.get(i - 1, i) * at(&upper, i - 1, j);
            }
            upper[(i + 1, j)] = acc / sub;
        }
    }

    let matrix = DMatrix::from_fn(n, n, |r, c| at(&upper, r, c));
    let bandwidth = first_row.iter().rposition(|&v| v != 0.0).or(Some(0));
    Ok(MetricCandidate {
        matrix,
        params: first_row.to_vec(),
        bandwidth,
    })
}

/// `diag(1, 1/2, 1/8, ...)`: the metric of the diagonal Dyson map with `c = 1`.
pub fn theta0(n: usize) -> Result<MetricCandidate> {
    let q = build_position_matrix(n)?;
    let mut row = vec![0.0; n];
    row[0] = 1.0;
    metric_from_first_row(&q, &row)
}

/// Full four-parameter `N = 4` metric, written out entrywise.
pub fn metric4(k: f64, mu: f64, p: f64, d: f64) -> MetricCandidate {
    #[rustfmt::skip]
    let matrix = DMatrix::from_row_slice(4, 4, &[
        k,    mu,                     p,                      d,
        mu,   k / 2.0 + 2.0 * p,      mu / 2.0 + 3.0 * d,     p / 2.0,
        p,    mu / 2.0 + 3.0 * d,     p + k / 8.0,            d / 2.0 + mu / 8.0,
        d,    p / 2.0,                d / 2.0 + mu / 8.0,     p / 12.0 + k / 48.0,
    ]);
    let params = vec![k, mu, p, d];
    let bandwidth = params.iter().rposition(|&v| v != 0.0).or(Some(0));
    MetricCandidate {
        matrix,
        params,
        bandwidth,
    }
}

/// Tridiagonal `N = 4` metric with `k = 1`, `p = d = 0`.
pub fn theta1(mu: f64) -> MetricCandidate {
    #[rustfmt::skip]
    let matrix = DMatrix::from_row_slice(4, 4, &[
        1.0,  mu,        0.0,       0.0,
        mu,   0.5,       mu / 2.0,  0.0,
        0.0,  mu / 2.0,  0.125,     mu / 8.0,
        0.0,  0.0,       mu / 8.0,  1.0 / 48.0,
    ]);
    MetricCandidate {
        matrix,
        params: vec![1.0, mu, 0.0, 0.0],
        bandwidth: Some(1),
    }
}

/// Pentadiagonal `N = 4` metric with `k = 1`, `d = 0`.
pub fn theta2(mu: f64, p: f64) -> MetricCandidate {
    #[rustfmt::skip]
    let matrix = DMatrix::from_row_slice(4, 4, &[
        1.0,  mu,              p,                    0.0,
        mu,   0.5 + 2.0 * p,   mu / 2.0,             p / 2.0,
        p,    mu / 2.0,        p + 0.125,            mu / 8.0,
        0.0,  p / 2.0,         mu / 8.0,             p / 12.0 + 1.0 / 48.0,
    ]);
    MetricCandidate {
        matrix,
        params: vec![1.0, mu, p, 0.0],
        bandwidth: Some(2),
    }
}

/// Metric `Omega0 f(q0) Omega0` where `f(q0)` has eigenvalue `weights[j]` on the
/// `j`-th eigenvector of the symmetrized position matrix and `Omega0` is the
/// diagonal Dyson map with `c = 1`. Every compatible metric has this form, and
/// it is positive definite exactly when all weights are positive.
///
/// The matrix is rebuilt from its first row by [`metric_from_first_row`].
pub fn metric_from_spectral_weights(weights: &[f64]) -> Result<MetricCandidate> {
    let n = weights.len();
    let q0 = build_symmetrized_position(n)?;
    let eig = symmetric_tridiagonal_eigen(&q0.band().diagonal(0), &q0.band().diagonal(1), true)?;
    let v = eig.vectors.expect("eigenvectors requested");
    // omega_k = 1 / sqrt(2^k k!)
    let mut omega = vec![1.0; n];
    for k in 1..n {
        omega[k] = omega[k - 1] / (2.0 * k as f64).sqrt();
    }
    let first_row: Vec<f64> = (0..n)
        .map(|j| {
            let f0j: f64 = (0..n).map(|m| v[(0, m)] * weights[m] * v[(j, m)]).sum();
            omega[0] * f0j * omega[j]
        })
        .collect();
    metric_from_first_row(&build_position_matrix(n)?, &first_row)
}

/// Basis `B_0, ..., B_{N-1}` of compatible metrics, `B_i` generated by the
/// `i`-th unit first row.
#[derive(Debug, Clone)]
pub struct MetricBasis {
    dim: usize,
    basis: Vec<MetricCandidate>,
}

impl MetricBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn elements(&self) -> &[MetricCandidate] {
        &self.basis
    }

    /// `sum params[i] * B_i`.
    pub fn combine(&self, params: &[f64]) -> Result<DMatrix<f64>> {
        if params.len() != self.basis.len() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.len(),
                found: params.len(),
            });
        }
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for (c, b) in params.iter().zip(&self.basis) {
            out += b.matrix() * *c;
        }
        Ok(out)
    }
}

/// Coordinates of the symmetric matrices with bandwidth at most `alpha`:
/// upper-triangle index pairs in row-major order.
fn band_coordinates(n: usize, alpha: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i..n).filter(move |&j| j - i <= alpha).map(move |j| (i, j)))
        .collect()
}

/// Matrix of the map `T -> Q^T T - T Q` on symmetric band-`alpha` matrices.
fn dieudonne_operator(q: &DMatrix<f64>, coords: &[(usize, usize)]) -> DMatrix<f64> {
    let n = q.nrows();
    let mut op = DMatrix::zeros(n * n, coords.len());
    for (c, &(i, j)) in coords.iter().enumerate() {
        let mut e = DMatrix::<f64>::zeros(n, n);
        e[(i, j)] = 1.0;
        e[(j, i)] = 1.0;
        let image = q.transpose() * &e - &e * q;
        for (r, v) in image.iter().enumerate() {
            op[(r, c)] = *v;
        }
    }
    op
}

/// Orthonormal nullspace basis (in upper-triangle coordinates) of the
/// Dieudonne map restricted to symmetric band-`alpha` matrices.
pub fn dieudonne_nullspace(q: &PositionMatrix, alpha: usize) -> Result<(Vec<(usize, usize)>, DMatrix<f64>)> {
    require_raw(q)?;
    let n = q.dim();
    if alpha >= n {
        return Err(Error::InvalidParameter(format!(
            "bandwidth {alpha} out of range for dimension {n}"
        )));
    }
    let coords = band_coordinates(n, alpha);
    let op = dieudonne_operator(&q.to_dense(), &coords);
    Ok((coords, linalg::nullspace(&op, NULLSPACE_REL_TOL)))
}

/// Both solvers, cross-checked: the recurrence basis must have the same size
/// as the dense nullspace and lie inside it.
pub fn metric_basis(q: &PositionMatrix) -> Result<MetricBasis> {
    require_raw(q)?;
    let n = q.dim();
    let basis = (0..n)
        .map(|i| {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            metric_from_first_row(q, &row)
        })
        .collect::<Result<Vec<_>>>()?;

    let (coords, null) = dieudonne_nullspace(q, n - 1)?;
    if null.ncols() != basis.len() {
        return Err(Error::SolverMismatch {
            recurrence: basis.len(),
            nullspace: null.ncols(),
        });
    }
    for (index, b) in basis.iter().enumerate() {
        let v = nalgebra::DVector::from_iterator(
            coords.len(),
            coords.iter().map(|&(i, j)| b.matrix()[(i, j)]),
        );
        let projected = &null * (null.transpose() * &v);
        let defect = (&v - projected).norm() / v.norm();
        if defect > SPAN_DEFECT_TOL {
            return Err(Error::SpanMismatch { index, defect });
        }
    }
    Ok(MetricBasis { dim: n, basis })
}

/// Dimension of the compatible metrics with bandwidth at most `alpha`.
pub fn band_metric_dimension(q: &PositionMatrix, alpha: usize) -> Result<usize> {
    Ok(dieudonne_nullspace(q, alpha)?.1.ncols())
}
