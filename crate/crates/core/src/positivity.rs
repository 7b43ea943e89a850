//! Positive-definiteness of metric candidates: spectra, 1D boundaries by
//! bisection, 2D lattice scans of the pentadiagonal `N = 4` family and its
//! secular determinant.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::dieudonne::{theta2, MetricCandidate};
use crate::error::{Error, Result};
use crate::linalg::{inf_norm, symmetric_eigenvalues};
use crate::output::Table;

/// Relative margin below which a smallest eigenvalue does not count as positive.
pub const POSITIVITY_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PositivityReport {
    pub smallest_eigenvalue: f64,
    pub is_positive: bool,
    /// Full spectrum, ascending.
    pub eigenvalues: Vec<f64>,
}

/// Full spectrum of `theta` plus a positivity verdict.
///
/// The verdict requires a positive diagonal and a smallest eigenvalue above
/// `POSITIVITY_REL_TOL * ||.||_inf` for the unit-diagonal congruent matrix
/// `D^{-1/2} T D^{-1/2}`. Congruence preserves inertia, and the scaled matrix
/// stays well conditioned even when the diagonal of `T` spans many decades, as
/// it does for the compatible metrics at larger `N`.
pub fn positivity_check(theta: &MetricCandidate) -> Result<PositivityReport> {
    let m = theta.matrix();
    let eigenvalues = symmetric_eigenvalues(m)?;
    let smallest_eigenvalue = eigenvalues[0];
    let is_positive = smallest_eigenvalue > 0.0 && scaled_is_positive(m)?;
    Ok(PositivityReport {
        smallest_eigenvalue,
        is_positive,
        eigenvalues,
    })
}

fn scaled_is_positive(m: &DMatrix<f64>) -> Result<bool> {
    let n = m.nrows();
    if (0..n).any(|i| !(m[(i, i)] > 0.0)) {
        return Ok(false);
    }
    let s: Vec<f64> = (0..n).map(|i| 1.0 / m[(i, i)].sqrt()).collect();
    let scaled = DMatrix::from_fn(n, n, |i, j| m[(i, j)] * s[i] * s[j]);
    let lambda = symmetric_eigenvalues(&scaled)?[0];
    Ok(lambda > POSITIVITY_REL_TOL * inf_norm(&scaled))
}

fn smallest_eigenvalue(theta: &MetricCandidate) -> Result<f64> {
    Ok(symmetric_eigenvalues(theta.matrix())?[0])
}

/// Bisection for the point in `[a, b]` where the smallest eigenvalue of the
/// family changes sign. The returned value is within `tol` of the switch.
pub fn positivity_boundary_1d<F>(family: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<MetricCandidate>,
{
    if !(tol > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "bracket [{a}, {b}] with tolerance {tol}"
        )));
    }
    let positive = |x: f64| -> Result<bool> { Ok(smallest_eigenvalue(&family(x)?)? > 0.0) };
    let (mut lo, mut hi) = (a, b);
    let lo_positive = positive(lo)?;
    if lo_positive == positive(hi)? {
        return Err(Error::NoSignChange { lower: a, upper: b });
    }
    while (hi - lo).abs() > tol {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if positive(mid)? == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Uniform lattice `min, min + step, ...` up to `max` (inclusive up to rounding).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeAxis {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl LatticeAxis {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && step.is_finite()) {
            return Err(Error::InvalidParameter("lattice bounds must be finite".into()));
        }
        if !(step > 0.0) {
            return Err(Error::InvalidParameter(format!("lattice step {step} must be positive")));
        }
        if max < min {
            return Err(Error::EmptyLattice);
        }
        Ok(Self { min, max, step })
    }

    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> f64 {
        self.min + i as f64 * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

/// Smallest eigenvalue over a `(mu, p)` lattice; `values[(i, j)]` belongs to
/// `mu_axis.point(i)` and `p_axis.point(j)`.
#[derive(Debug, Clone)]
pub struct DomainScan {
    pub mu_axis: LatticeAxis,
    pub p_axis: LatticeAxis,
    pub values: DMatrix<f64>,
    /// Sign changes between lattice neighbours, interpolated linearly.
    pub boundary: Vec<(f64, f64)>,
}

impl DomainScan {
    /// Rows `(mu, p, smallest_eigenvalue)`, `p` varying fastest.
    pub fn values_table(&self) -> Table {
        let mut t = Table::new(["mu", "p", "smallest_eigenvalue"]);
        for i in 0..self.mu_axis.len() {
            for j in 0..self.p_axis.len() {
                t.push(vec![self.mu_axis.point(i), self.p_axis.point(j), self.values[(i, j)]]);
            }
        }
        t
    }

    pub fn boundary_table(&self) -> Table {
        let mut t = Table::new(["mu", "p"]);
        for &(mu, p) in &self.boundary {
            t.push(vec![mu, p]);
        }
        t
    }
}

/// Scans the pentadiagonal family `theta2(mu, p)`.
pub fn positivity_scan_2d(mu_axis: LatticeAxis, p_axis: LatticeAxis) -> Result<DomainScan> {
    positivity_scan_2d_with(mu_axis, p_axis, |mu, p| Ok(theta2(mu, p)))
}

/// Scans an arbitrary two-parameter family. Lattice points are evaluated in
/// parallel; the result does not depend on scheduling.
pub fn positivity_scan_2d_with<F>(mu_axis: LatticeAxis, p_axis: LatticeAxis, family: F) -> Result<DomainScan>
where
    F: Fn(f64, f64) -> Result<MetricCandidate> + Sync,
{
    let (nm, np) = (mu_axis.len(), p_axis.len());
    let flat: Vec<f64> = (0..nm * np)
        .into_par_iter()
        .map(|k| smallest_eigenvalue(&family(mu_axis.point(k / np), p_axis.point(k % np))?))
        .collect::<Result<_>>()?;
    let values = DMatrix::from_row_slice(nm, np, &flat);

    let mut boundary = Vec::new();
    let mut crossing = |(mu0, p0, v0): (f64, f64, f64), (mu1, p1, v1): (f64, f64, f64)| {
        if (v0 > 0.0) != (v1 > 0.0) {
            let t = v0 / (v0 - v1);
            boundary.push((mu0 + t * (mu1 - mu0), p0 + t * (p1 - p0)));
        }
    };
    for i in 0..nm {
        for j in 0..np {
            let here = (mu_axis.point(i), p_axis.point(j), values[(i, j)]);
            if j + 1 < np {
                crossing(here, (mu_axis.point(i), p_axis.point(j + 1), values[(i, j + 1)]));
            }
            if i + 1 < nm {
                crossing(here, (mu_axis.point(i + 1), p_axis.point(j), values[(i + 1, j)]));
            }
        }
    }
    Ok(DomainScan {
        mu_axis,
        p_axis,
        values,
        boundary,
    })
}

/// `det theta2(mu, p)` by LU decomposition.
pub fn secular_det(mu: f64, p: f64) -> f64 {
    theta2(mu, p).into_matrix().determinant()
}

fn secular_terms(mu: f64, p: f64) -> [f64; 8] {
    let (m2, p2) = (mu * mu, p * p);
    [
        1.0 / 768.0,
        -p2 * m2 / 8.0,
        -p2 * p / 6.0,
        p2 / 16.0,
        p2 * p2 / 12.0,
        p / 48.0,
        -m2 / 64.0,
        m2 * m2 / 64.0,
    ]
}

/// Closed-form polynomial for `det theta2(mu, p)`.
pub fn secular_polynomial(mu: f64, p: f64) -> f64 {
    secular_terms(mu, p).iter().sum()
}

/// Sum of the absolute values of the polynomial's terms: the magnitude the
/// evaluation works at, and the natural scale for comparing two evaluations
/// near a zero of the determinant.
pub fn secular_scale(mu: f64, p: f64) -> f64 {
    secular_terms(mu, p).iter().map(|t| t.abs()).sum()
}

/// Length of the `mu`-interval around 0 on which `theta2(., p)` is positive.
/// Zero when `theta2(0, p)` is not positive. Each endpoint is bisected to `tol`
/// inside `[-mu_max, mu_max]`.
pub fn positivity_width(p: f64, mu_max: f64, tol: f64) -> Result<f64> {
    if smallest_eigenvalue(&theta2(0.0, p))? <= 0.0 {
        return Ok(0.0);
    }
    let family = |mu: f64| Ok(theta2(mu, p));
    let upper = positivity_boundary_1d(family, 0.0, mu_max, tol)?;
    let lower = positivity_boundary_1d(family, -mu_max, 0.0, tol)?;
    Ok(upper - lower)
}

/// Widths over a list of `p` values as a `(p, width)` table.
pub fn positivity_width_curve(ps: &[f64], mu_max: f64, tol: f64) -> Result<Table> {
    let widths: Vec<f64> = ps
        .par_iter()
        .map(|&p| positivity_width(p, mu_max, tol))
        .collect::<Result<_>>()?;
    let mut t = Table::new(["p", "width"]);
    for (&p, w) in ps.iter().zip(widths) {
        t.push(vec![p, w]);
    }
    Ok(t)
}
