//! Dyson maps `Omega` with `T = Omega^T Omega` and the Hermitized position
//! operator `q = Omega Q Omega^{-1}`.
//!
//! Exact maps come from the diagonal `Omega0` or from a triangular factorization
//! of a metric; both inverses are formed by triangular substitution. The
//! perturbative `N = 4` map is a fixed closed form in `mu`.

use nalgebra::{DMatrix, DVector};

use crate::dieudonne::MetricCandidate;
use crate::error::{Error, Result};
use crate::hermite::PositionMatrix;
use crate::linalg::{asymmetry, inf_norm, lower_triangular_inverse, upper_triangular_inverse};

/// A Cholesky pivot is rejected when it drops to this fraction of the
/// corresponding diagonal entry of the metric.
pub const PIVOT_REL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DysonSource {
    DiagonalOmega0 { c: f64 },
    /// Upper-triangular factor, built from the top-left corner.
    Cholesky,
    /// Lower-triangular factor, built from the bottom-right corner.
    ReverseCholesky,
    /// Closed-form approximation; `order` is the power of `mu` of its error.
    Perturbative { order: u32, mu: f64 },
    Identity,
}

impl DysonSource {
    pub fn is_exact(&self) -> bool {
        !matches!(self, DysonSource::Perturbative { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DysonMap {
    omega: DMatrix<f64>,
    omega_inverse: DMatrix<f64>,
    source: DysonSource,
}

impl DysonMap {
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        Ok(Self {
            omega: DMatrix::identity(n, n),
            omega_inverse: DMatrix::identity(n, n),
            source: DysonSource::Identity,
        })
    }

    pub fn omega(&self) -> &DMatrix<f64> {
        &self.omega
    }

    pub fn omega_inverse(&self) -> &DMatrix<f64> {
        &self.omega_inverse
    }

    pub fn source(&self) -> DysonSource {
        self.source
    }

    pub fn dim(&self) -> usize {
        self.omega.nrows()
    }

    /// The metric `Omega^T Omega` this map factorizes.
    pub fn metric(&self) -> DMatrix<f64> {
        self.omega.transpose() * &self.omega
    }

    /// `||Omega Omega^{-1} - I||_inf`.
    pub fn inverse_defect(&self) -> f64 {
        let n = self.dim();
        inf_norm(&(&self.omega * &self.omega_inverse - DMatrix::identity(n, n)))
    }

    fn check_invertible(&self) -> Result<()> {
        let finite = self.omega.iter().chain(self.omega_inverse.iter()).all(|v| v.is_finite());
        let n = self.dim();
        let triangular = (0..n).all(|i| (i + 1..n).all(|j| self.omega[(i, j)] == 0.0))
            || (0..n).all(|i| (0..i).all(|j| self.omega[(i, j)] == 0.0));
        let singular = if triangular {
            (0..n).any(|i| self.omega[(i, i)] == 0.0)
        } else {
            !self.omega.clone().lu().is_invertible()
        };
        if !finite || singular {
            return Err(Error::SingularMap);
        }
        Ok(())
    }

    /// `Omega A Omega^{-1}`.
    pub fn conjugate(&self, a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.check_dim(a)?;
        self.check_invertible()?;
        Ok(&self.omega * a * &self.omega_inverse)
    }

    /// `Omega^{-1} A Omega`.
    pub fn pull_back(&self, a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.check_dim(a)?;
        self.check_invertible()?;
        Ok(&self.omega_inverse * a * &self.omega)
    }

    fn check_dim(&self, a: &DMatrix<f64>) -> Result<()> {
        if a.nrows() != self.dim() || a.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: a.nrows(),
            });
        }
        Ok(())
    }
}

/// Diagonal map `omega_k = c / sqrt(2^k k!)`, which turns the raw position
/// matrix into the symmetrized one.
pub fn omega0(n: usize, c: f64) -> Result<DysonMap> {
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    if c == 0.0 || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("scale c = {c} must be finite and nonzero")));
    }
    let mut w = vec![c; n];
    for k in 1..n {
        w[k] = w[k - 1] / (2.0 * k as f64).sqrt();
    }
    Ok(DysonMap {
        omega_inverse: DMatrix::from_diagonal(&DVector::from_iterator(n, w.iter().map(|v| 1.0 / v))),
        omega: DMatrix::from_diagonal(&DVector::from_vec(w)),
        source: DysonSource::DiagonalOmega0 { c },
    })
}

/// Upper-triangular `R` with `R^T R = m`, restricted to the band of `m`.
fn banded_cholesky(m: &DMatrix<f64>, band: usize) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    let mut r = DMatrix::zeros(n, n);
    for i in 0..n {
        let k0 = i.saturating_sub(band);
        let pivot = m[(i, i)] - (k0..i).map(|k| r[(k, i)] * r[(k, i)]).sum::<f64>();
        if !(pivot > PIVOT_REL_TOL * m[(i, i)].abs()) || !pivot.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: i, value: pivot });
        }
        let d = pivot.sqrt();
        r[(i, i)] = d;
        for j in i + 1..(i + band + 1).min(n) {
            let k0 = j.saturating_sub(band);
            let s: f64 = (k0..i).map(|k| r[(k, i)] * r[(k, j)]).sum();
            r[(i, j)] = (m[(i, j)] - s) / d;
        }
    }
    Ok(r)
}

fn metric_band(theta: &MetricCandidate) -> usize {
    let n = theta.dim();
    theta.bandwidth().unwrap_or(n - 1).min(n - 1)
}

/// Factorizes `T = Omega^T Omega` with `Omega` upper triangular. A metric of
/// bandwidth `a` yields `Omega` with `a` nonzero superdiagonals.
pub fn cholesky_factor(theta: &MetricCandidate) -> Result<DysonMap> {
    let omega = banded_cholesky(theta.matrix(), metric_band(theta))?;
    let omega_inverse = upper_triangular_inverse(&omega)?;
    Ok(DysonMap {
        omega,
        omega_inverse,
        source: DysonSource::Cholesky,
    })
}

/// Factorizes `T = Omega^T Omega` with `Omega` lower triangular, eliminating
/// from the bottom-right corner upwards.
pub fn reverse_cholesky_factor(theta: &MetricCandidate) -> Result<DysonMap> {
    let n = theta.dim();
    let flip = |m: &DMatrix<f64>| DMatrix::from_fn(n, n, |i, j| m[(n - 1 - i, n - 1 - j)]);
    let r = banded_cholesky(&flip(theta.matrix()), metric_band(theta)).map_err(|e| match e {
        Error::NotPositiveDefinite { pivot, value } => Error::NotPositiveDefinite {
            pivot: n - 1 - pivot,
            value,
        },
        other => other,
    })?;
    let omega = flip(&r);
    let omega_inverse = lower_triangular_inverse(&omega)?;
    Ok(DysonMap {
        omega,
        omega_inverse,
        source: DysonSource::ReverseCholesky,
    })
}

/// Closed-form lower-bidiagonal `N = 4` map approximately factorizing the
/// tridiagonal metric `theta1(mu)`. Entries carry relative errors of order
/// `mu^4`; the inverse is accurate to relative order `mu^2`.
pub fn perturbative_omega(mu: f64) -> DysonMap {
    let m2 = mu * mu;
    let (s2, s3) = (2f64.sqrt(), 3f64.sqrt());
    #[rustfmt::skip]
    let omega = DMatrix::from_row_slice(4, 4, &[
        1.0 - m2,                  0.0,                              0.0,                              0.0,
        mu * s2 * (1.0 + 2.0 * m2), 0.5 * s2 * (1.0 - 2.0 * m2),     0.0,                              0.0,
        0.0,                       mu * s2 * (1.0 + 3.0 * m2),       0.25 * s2 * (1.0 - 3.0 * m2),     0.0,
        0.0,                       0.0,                              0.5 * mu * s3,                    s3 / 12.0,
    ]);
    #[rustfmt::skip]
    let omega_inverse = DMatrix::from_row_slice(4, 4, &[
        1.0 + m2,                        0.0,                              0.0,                              0.0,
        -2.0 * mu * (1.0 + m2),          s2 * (1.0 + 2.0 * m2),            0.0,                              0.0,
        0.0,                             -4.0 * mu * s2 * (1.0 + 2.0 * m2), 2.0 * s2 * (1.0 + 3.0 * m2),     0.0,
        0.0,                             0.0,                              -12.0 * mu * s2 * (1.0 + 3.0 * m2), 4.0 * s3,
    ]);
    DysonMap {
        omega,
        omega_inverse,
        source: DysonSource::Perturbative { order: 4, mu },
    }
}

/// Conjugated position matrix and its distance from symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct Hermitized {
    pub matrix: DMatrix<f64>,
    /// `||q - q^T||_inf`
    pub asymmetry: f64,
}

/// `q = Omega Q Omega^{-1}`. Symmetric exactly when `Omega^T Omega` is
/// compatible with `Q`.
pub fn hermitized_position(q: &PositionMatrix, map: &DysonMap) -> Result<Hermitized> {
    let matrix = map.conjugate(&q.to_dense())?;
    let asymmetry = asymmetry(&matrix);
    Ok(Hermitized { matrix, asymmetry })
}

/// Tridiagonal first-order approximation to the Hermitized `N = 4` position
/// matrix under the tridiagonal metric `theta1(mu)`.
pub fn approx_q1(mu: f64) -> DMatrix<f64> {
    let (s2, s6) = (2f64.sqrt(), 2f64.sqrt() * 3f64.sqrt());
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        -2.0 * mu, s2,        0.0,       0.0,
        s2,        -2.0 * mu, 2.0,       0.0,
        0.0,       2.0,       -2.0 * mu, s6,
        0.0,       0.0,       s6,        6.0 * mu,
    ]);
    m
}
