//! Plot-ready tables: eigenvalue drift of the first-order Hermitized position
//! matrix, the spectrum of the tridiagonal metric family, and the positivity
//! scan of the pentadiagonal family.

use crate::dieudonne::metric_from_first_row;
use crate::error::Result;
use crate::hermite::{build_position_matrix, grid_points};
use crate::hermitization::approx_q1;
use crate::linalg::symmetric_eigenvalues;
use crate::positivity::{positivity_check, positivity_scan_2d, DomainScan, LatticeAxis};
use crate::output::Table;

/// Columns `mu, eig_1..eig_4` (first-order approximation) and
/// `exact_1..exact_4` (the `N = 4` grid).
pub fn approximation_drift(mu_axis: LatticeAxis) -> Result<Table> {
    let exact = grid_points(4)?;
    let mut columns = vec!["mu".to_string()];
    columns.extend((1..=4).map(|k| format!("eig_{k}")));
    columns.extend((1..=4).map(|k| format!("exact_{k}")));
    let mut t = Table::new(columns);
    for mu in mu_axis.points() {
        let mut row = vec![mu];
        row.extend(symmetric_eigenvalues(&approx_q1(mu))?);
        row.extend_from_slice(exact.points());
        t.push(row);
    }
    Ok(t)
}

/// Columns `mu, eig_1..eig_N`: spectrum of the tridiagonal metric with first
/// row `(1, mu, 0, ..., 0)`.
pub fn tridiagonal_metric_spectrum(n: usize, mu_axis: LatticeAxis) -> Result<Table> {
    let q = build_position_matrix(n)?;
    let mut columns = vec!["mu".to_string()];
    columns.extend((1..=n).map(|k| format!("eig_{k}")));
    let mut t = Table::new(columns);
    for mu in mu_axis.points() {
        let mut first = vec![0.0; n];
        first[0] = 1.0;
        if n > 1 {
            first[1] = mu;
        }
        let report = positivity_check(&metric_from_first_row(&q, &first)?)?;
        let mut row = vec![mu];
        row.extend(report.eigenvalues);
        t.push(row);
    }
    Ok(t)
}

/// Positivity scan of the pentadiagonal family.
pub fn pentadiagonal_domain(mu_axis: LatticeAxis, p_axis: LatticeAxis) -> Result<DomainScan> {
    positivity_scan_2d(mu_axis, p_axis)
}
