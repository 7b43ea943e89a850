//! Hamiltonians compatible with a metric, and the metric-weighted inner product.

use nalgebra::{Complex, DMatrix, DVector};

use crate::dieudonne::MetricCandidate;
use crate::error::{Error, Result};
use crate::hermitization::{cholesky_factor, DysonMap};
use crate::linalg::{self, general_eigenvalues, inf_norm, max_abs};

/// A real square operator, typically not symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    pub matrix: DMatrix<f64>,
    pub label: String,
}

impl Observable {
    pub fn new(matrix: DMatrix<f64>, label: impl Into<String>) -> Result<Self> {
        if matrix.nrows() == 0 {
            return Err(Error::EmptyDimension);
        }
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        Ok(Self {
            matrix,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Eigenvalues sorted by real part, then imaginary part.
    pub fn spectrum(&self) -> Result<Vec<Complex<f64>>> {
        general_eigenvalues(&self.matrix)
    }

    /// True when every eigenvalue has imaginary part below `tol` times the
    /// spectral radius.
    pub fn has_real_spectrum(&self, tol: f64) -> Result<bool> {
        let ev = self.spectrum()?;
        let radius = ev.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        Ok(ev.iter().all(|z| z.im.abs() <= tol * radius))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    components: DVector<f64>,
}

impl StateVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if let Some(k) = components.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("state component {k} is not finite")));
        }
        Ok(Self {
            components: DVector::from_vec(components),
        })
    }

    /// `k`-th unit vector of length `n`.
    pub fn unit(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, dimension: n });
        }
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        Self::new(v)
    }

    pub fn components(&self) -> &DVector<f64> {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `||H^T T - T H||_inf / (||H||_inf ||T||_inf)`.
pub fn quasi_hermiticity_residual(h: &Observable, theta: &MetricCandidate) -> Result<f64> {
    check_dim(theta.dim(), h.dim())?;
    let t = theta.matrix();
    let defect = inf_norm(&(h.matrix.transpose() * t - t * &h.matrix));
    let scale = (inf_norm(&h.matrix) * inf_norm(t)).max(f64::MIN_POSITIVE);
    Ok(defect / scale)
}

/// `H = Omega^{-1} h Omega` for a symmetric `h`.
pub fn pullback_hamiltonian(h: &DMatrix<f64>, map: &DysonMap) -> Result<Observable> {
    let asym = linalg::max_abs(&(h - h.transpose()));
    if asym > 1e-14 * max_abs(h) {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    Observable::new(map.pull_back(h)?, "pullback")
}

/// Basis of all `H` with `H^T T = T H`: the pullbacks `Omega^{-1} S Omega` of
/// the symmetric unit matrices `S = E_ij + E_ji`, `i <= j`, each scaled to
/// unit largest entry. Ordered row by row over the upper triangle.
pub fn admissible_hamiltonian_basis(theta: &MetricCandidate) -> Result<Vec<Observable>> {
    let map = cholesky_factor(theta)?;
    let n = theta.dim();
    let mut basis = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            let mut s = DMatrix::zeros(n, n);
            s[(i, j)] = 1.0;
            s[(j, i)] = 1.0;
            let h = map.pull_back(&s)?;
            let scale = max_abs(&h);
            basis.push(Observable::new(h / scale, format!("S({i},{j})"))?);
        }
    }
    Ok(basis)
}

/// Dimension of the solution space of `H^T T = T H` from a dense nullspace of
/// the vectorized map. Independent of any factorization of `T`.
pub fn admissible_dimension_by_nullspace(theta: &MetricCandidate) -> usize {
    let n = theta.dim();
    let t = theta.matrix();
    // Column (a, b) holds the image of the unit matrix E_ab.
    let mut op = DMatrix::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            let mut e = DMatrix::zeros(n, n);
            e[(a, b)] = 1.0;
            let image = e.transpose() * t - t * e;
            for (r, v) in image.iter().enumerate() {
                op[(r, a * n + b)] = *v;
            }
        }
    }
    linalg::nullspace(&op, 1e-10).ncols()
}

/// `psi^T T phi`, summed so that swapping the two states gives the same bits.
pub fn inner_product(psi: &StateVector, phi: &StateVector, theta: &MetricCandidate) -> Result<f64> {
    let n = theta.dim();
    check_dim(n, psi.dim())?;
    check_dim(n, phi.dim())?;
    let (x, y, t) = (psi.components(), phi.components(), theta.matrix());
    let mut sum = 0.0;
    for i in 0..n {
        sum += t[(i, i)] * (x[i] * y[i]);
        for j in i + 1..n {
            sum += t[(i, j)] * (x[i] * y[j] + x[j] * y[i]);
        }
    }
    Ok(sum)
}

/// `sqrt(psi^T T psi)`; a negative quadratic form is reported as an error.
pub fn theta_norm(psi: &StateVector, theta: &MetricCandidate) -> Result<f64> {
    let v = inner_product(psi, psi, theta)?;
    if v < 0.0 {
        return Err(Error::IndefiniteNorm { value: v });
    }
    Ok(v.sqrt())
}
