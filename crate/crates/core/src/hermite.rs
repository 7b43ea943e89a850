//! Hermite polynomials, the tridiagonal position matrix and its grid points.
//!
//! The raw position matrix has unit superdiagonal and subdiagonal
//! `2, 4, ..., 2N - 2`. It is the companion form of the three-term recurrence
//! `H_{n+1}(z) = 2z H_n(z) - 2n H_{n-1}(z)` evaluated at `z = x / 2`, so its
//! eigenvalues are the points `x` with `H_N(x / 2) = 0` and its eigenvectors are
//! `(H_0(x/2), ..., H_{N-1}(x/2))`. A diagonal similarity turns it into the
//! symmetric matrix with off-diagonal `sqrt(2n)`, which is what the eigensolver
//! works on.

use serde::{Deserialize, Serialize};

use crate::band::BandMatrix;
use crate::error::{Error, Result};
use crate::linalg;
use crate::tridiag::symmetric_tridiagonal_eigen;

/// `H_degree(x)` by the three-term recurrence.
pub fn hermite_eval(degree: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if degree == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for n in 1..degree {
        let next = 2.0 * x * cur - 2.0 * n as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Values `H_0(x), ..., H_max_degree(x)` at a single argument.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteTable {
    argument: f64,
    values: Vec<f64>,
}

impl HermiteTable {
    pub fn new(max_degree: usize, argument: f64) -> Self {
        let mut values = Vec::with_capacity(max_degree + 1);
        values.push(1.0);
        if max_degree >= 1 {
            values.push(2.0 * argument);
        }
        for n in 1..max_degree {
            values.push(2.0 * argument * values[n] - 2.0 * n as f64 * values[n - 1]);
        }
        Self { argument, values }
    }

    pub fn argument(&self) -> f64 {
        self.argument
    }

    pub fn max_degree(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, degree: usize) -> Option<f64> {
        self.values.get(degree).copied()
    }
}

/// Scale of the rounding error made when evaluating `H_degree(x)`: the same
/// recurrence run on `|x|` with all signs made positive.
pub fn hermite_abs_scale(degree: usize, x: f64) -> f64 {
    let x = x.abs();
    let mut prev = 1.0;
    if degree == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for n in 1..degree {
        let next = 2.0 * x * cur + 2.0 * n as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PositionFlavor {
    /// Non-symmetric form: superdiagonal 1, subdiagonal 2n.
    Raw,
    /// Symmetric form: off-diagonal sqrt(2n).
    Symmetrized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionMatrix {
    flavor: PositionFlavor,
    band: BandMatrix,
}

impl PositionMatrix {
    pub fn dim(&self) -> usize {
        self.band.dim()
    }

    pub fn flavor(&self) -> PositionFlavor {
        self.flavor
    }

    pub fn band(&self) -> &BandMatrix {
        &self.band
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        self.band.to_dense()
    }
}

/// The raw `N x N` position matrix.
pub fn build_position_matrix(n: usize) -> Result<PositionMatrix> {
    let mut band = BandMatrix::zeros(n, 1, 1)?;
    for k in 1..n {
        band.set(k - 1, k, 1.0)?;
        band.set(k, k - 1, 2.0 * k as f64)?;
    }
    Ok(PositionMatrix {
        flavor: PositionFlavor::Raw,
        band,
    })
}

/// The symmetric tridiagonal position matrix with off-diagonal `sqrt(2n)`.
pub fn build_symmetrized_position(n: usize) -> Result<PositionMatrix> {
    let mut band = BandMatrix::zeros(n, 1, 1)?;
    for k in 1..n {
        let v = (2.0 * k as f64).sqrt();
        band.set(k - 1, k, v)?;
        band.set(k, k - 1, v)?;
    }
    Ok(PositionMatrix {
        flavor: PositionFlavor::Symmetrized,
        band,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridProvenance {
    ClosedForm,
    Eigensolver,
}

/// Ordered grid of positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    points: Vec<f64>,
    provenance: GridProvenance,
}

impl Grid {
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn provenance(&self) -> GridProvenance {
        self.provenance
    }
}

/// The `N` points with `H_N(x / 2) = 0`, ascending, computed as eigenvalues of
/// the symmetrized position matrix.
pub fn grid_points(n: usize) -> Result<Grid> {
    let q = build_symmetrized_position(n)?;
    let diag = q.band().diagonal(0);
    let off = q.band().diagonal(1);
    let mut points = symmetric_tridiagonal_eigen(&diag, &off, false)?.values;

    // The spectrum is symmetric about zero; make the output exactly so.
    for j in 0..n / 2 {
        let half = 0.5 * (points[n - 1 - j] - points[j]);
        points[j] = -half;
        points[n - 1 - j] = half;
    }
    if n % 2 == 1 {
        points[n / 2] = 0.0;
    }

    Ok(Grid {
        points,
        provenance: GridProvenance::Eigensolver,
    })
}

/// Eigenvalues of the raw (non-symmetric) position matrix from a general
/// eigensolver; real parts sorted ascending. Cross-check route only.
///
/// The Hessenberg QR iteration is run on the transpose, whose small unit
/// subdiagonal deflates cleanly; on the original orientation (subdiagonal
/// growing like 2n) it loses accuracy quickly beyond N of about 12.
pub fn raw_position_eigenvalues(n: usize) -> Result<Vec<f64>> {
    let q = build_position_matrix(n)?;
    let values = linalg::general_eigenvalues(&q.band().transpose().to_dense())?;
    Ok(values.into_iter().map(|z| z.re).collect())
}

/// `|H_N(x / 2)|` divided by its evaluation scale; zero for an exact root.
pub fn grid_residual(n: usize, x: f64) -> f64 {
    let value = hermite_eval(n, 0.5 * x).abs();
    if value == 0.0 {
        0.0
    } else {
        value / hermite_abs_scale(n, 0.5 * x)
    }
}

/// Eigenvector `(H_0(x/2), ..., H_{N-1}(x/2))` of the raw position matrix for
/// the `index`-th grid point.
pub fn position_eigenvector(n: usize, index: usize) -> Result<Vec<f64>> {
    let grid = grid_points(n)?;
    let x = *grid.points().get(index).ok_or(Error::IndexOutOfRange {
        index,
        dimension: n,
    })?;
    Ok(HermiteTable::new(n - 1, 0.5 * x).values)
}

/// Equidistant grid `x0 + h j`, `j = 0..N-1`.
pub fn runge_kutta_grid(n: usize, x0: f64, h: f64) -> Result<Grid> {
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("grid step must be positive, got {h}")));
    }
    Ok(Grid {
        points: (0..n).map(|j| x0 + h * j as f64).collect(),
        provenance: GridProvenance::ClosedForm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn hermite_values() {
        assert_eq!(hermite_eval(0, 7.3), 1.0);
        assert_eq!(hermite_eval(2, 1.0), 2.0);
        // 8x^3 - 12x at x = 2
        assert_eq!(hermite_eval(3, 2.0), 8.0 * 8.0 - 12.0 * 2.0);
        assert_eq!(hermite_eval(3, 2.0), 40.0);
    }

    #[test]
    fn table_matches_direct_evaluation() {
        let t = HermiteTable::new(6, 0.7);
        assert_eq!(t.max_degree(), 6);
        assert_eq!(t.get(0), Some(1.0));
        assert_eq!(t.get(1), Some(1.4));
        for n in 0..=6 {
            assert_eq!(t.get(n).unwrap(), hermite_eval(n, 0.7));
        }
        assert_eq!(t.get(7), None);
        assert_eq!(HermiteTable::new(0, 3.0).values(), &[1.0]);
    }

    #[test]
    fn raw_position_matrix_layout() {
        assert_eq!(
            build_position_matrix(2).unwrap().to_dense(),
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0])
        );
        assert_eq!(build_position_matrix(1).unwrap().to_dense(), DMatrix::zeros(1, 1));
        let q4 = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 1.0, 0.0, 0.0, //
                2.0, 0.0, 1.0, 0.0, //
                0.0, 4.0, 0.0, 1.0, //
                0.0, 0.0, 6.0, 0.0,
            ],
        );
        assert_eq!(build_position_matrix(4).unwrap().to_dense(), q4);
        assert!(build_position_matrix(0).is_err());
    }

    #[test]
    fn symmetrized_position_layout() {
        let q = build_symmetrized_position(4).unwrap();
        assert_eq!(q.flavor(), PositionFlavor::Symmetrized);
        assert_eq!(q.band().diagonal(1), vec![2f64.sqrt(), 2.0, 6f64.sqrt()]);
        assert!(q.band().is_symmetric());
        assert_eq!(q.band().diagonal(0), vec![0.0; 4]);
        assert_eq!(
            build_symmetrized_position(3).unwrap().band().diagonal(-1),
            vec![2f64.sqrt(), 2.0]
        );
        assert_eq!(build_symmetrized_position(1).unwrap().to_dense(), DMatrix::zeros(1, 1));
        assert!(build_symmetrized_position(0).is_err());
    }

    #[test]
    fn small_grids_match_closed_forms() {
        let s2 = 2f64.sqrt();
        let g1 = grid_points(1).unwrap();
        assert_eq!(g1.points(), &[0.0]);
        let g2 = grid_points(2).unwrap();
        assert!((g2.points()[0] + s2).abs() < 1e-14 && (g2.points()[1] - s2).abs() < 1e-14);
        let r6 = 6f64.sqrt();
        let g4 = grid_points(4).unwrap();
        let expected = [
            -(6.0 + 2.0 * r6).sqrt(),
            -(6.0 - 2.0 * r6).sqrt(),
            (6.0 - 2.0 * r6).sqrt(),
            (6.0 + 2.0 * r6).sqrt(),
        ];
        for (a, b) in g4.points().iter().zip(expected) {
            assert!((a - b).abs() < 1e-13);
        }
        assert_eq!(g4.provenance(), GridProvenance::Eigensolver);
    }

    #[test]
    fn eigenvectors_from_hermite_values() {
        let v = position_eigenvector(2, 1).unwrap();
        assert_eq!(v[0], 1.0);
        assert!((v[1] - 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(position_eigenvector(1, 0).unwrap(), vec![1.0]);
        assert_eq!(position_eigenvector(3, 1).unwrap(), vec![1.0, 0.0, -2.0]);
        assert_eq!(
            position_eigenvector(3, 3),
            Err(Error::IndexOutOfRange { index: 3, dimension: 3 })
        );
    }

    #[test]
    fn eigenvector_residuals_up_to_twenty() {
        for n in 1..=20 {
            let q = build_position_matrix(n).unwrap();
            let grid = grid_points(n).unwrap();
            for (k, &x) in grid.points().iter().enumerate() {
                let v = position_eigenvector(n, k).unwrap();
                let qv = q.band().mul_vec(&v).unwrap();
                let vmax = v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
                let res = qv
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - x * b).abs())
                    .fold(0.0, f64::max);
                assert!(res / vmax < 1e-8, "n={n} k={k} residual {res}");
            }
        }
    }

    #[test]
    fn raw_and_symmetrized_spectra_coincide() {
        for n in 1..=50 {
            let raw = raw_position_eigenvalues(n).unwrap();
            let grid = grid_points(n).unwrap();
            for (a, b) in raw.iter().zip(grid.points()) {
                assert!((a - b).abs() < 1e-10, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn grid_points_are_hermite_roots_and_symmetric() {
        for n in 1..=50 {
            let grid = grid_points(n).unwrap();
            let p = grid.points();
            assert_eq!(p.len(), n);
            for j in 0..n {
                assert_eq!(p[j], -p[n - 1 - j]);
                assert!(grid_residual(n, p[j]) < 1e-8, "n={n} j={j}");
            }
            assert!(p.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn runge_kutta_grids() {
        assert_eq!(runge_kutta_grid(3, -1.0, 1.0).unwrap().points(), &[-1.0, 0.0, 1.0]);
        assert_eq!(runge_kutta_grid(1, 5.0, 2.0).unwrap().points(), &[5.0]);
        assert_eq!(
            runge_kutta_grid(4, 0.0, 0.5).unwrap().points(),
            &[0.0, 0.5, 1.0, 1.5]
        );
        assert!(runge_kutta_grid(3, 0.0, 0.0).is_err());
        assert!(runge_kutta_grid(3, 0.0, -1.0).is_err());
        assert!(runge_kutta_grid(3, 0.0, f64::NAN).is_err());
    }
}
