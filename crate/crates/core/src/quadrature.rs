//! Gauss-Hermite quadrature for `int e^{-x^2} f(x) dx` over the real line.
//!
//! Nodes are the standard Hermite zeros `z_j`, i.e. half of the grid points
//! returned by [`crate::hermite::grid_points`]. Weights follow
//! `w_j = 2^{N-1} N! sqrt(pi) / (N^2 H_{N-1}(z_j)^2)`, evaluated through the
//! normalized functions `phi_k = H_k / sqrt(2^k k!)`, for which the formula
//! reads `w_j = sqrt(pi) / (N phi_{N-1}(z_j)^2)` and nothing overflows.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hermite::{build_symmetrized_position, grid_points};
use crate::output::Table;
use crate::tridiag::symmetric_tridiagonal_eigen;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Standard Hermite zeros, ascending.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes in the doubled scaling used by the position grid.
    pub fn grid_nodes(&self) -> Vec<f64> {
        self.nodes.iter().map(|z| 2.0 * z).collect()
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["node", "weight"]);
        for (&z, &w) in self.nodes.iter().zip(&self.weights) {
            t.push(vec![z, w]);
        }
        t
    }
}

/// `phi_{k}(z)` for `k = degree`, with `phi_0 = 1`.
fn normalized_hermite(degree: usize, z: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..degree {
        let kf = k as f64;
        let next = z * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

pub fn gauss_hermite_rule(n: usize) -> Result<QuadratureRule> {
    let grid = grid_points(n)?;
    let nodes: Vec<f64> = grid.points().iter().map(|x| 0.5 * x).collect();
    let weights = nodes
        .iter()
        .map(|&z| {
            let phi = normalized_hermite(n - 1, z);
            PI.sqrt() / (n as f64 * phi * phi)
        })
        .collect();
    Ok(QuadratureRule { nodes, weights })
}

/// Weights from the first components of the Jacobi-matrix eigenvectors,
/// `w_j = sqrt(pi) v_{0j}^2`. Independent route used for cross-checks.
pub fn golub_welsch_weights(n: usize) -> Result<Vec<f64>> {
    let q0 = build_symmetrized_position(n)?;
    let diag: Vec<f64> = q0.band().diagonal(0).iter().map(|v| 0.5 * v).collect();
    let off: Vec<f64> = q0.band().diagonal(1).iter().map(|v| 0.5 * v).collect();
    let eig = symmetric_tridiagonal_eigen(&diag, &off, true)?;
    let v = eig.vectors.expect("eigenvectors requested");
    Ok((0..n).map(|j| PI.sqrt() * v[(0, j)] * v[(0, j)]).collect())
}

/// Neumaier-compensated sum.
fn compensated_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            c += (sum - s) + t;
        } else {
            c += (t - s) + sum;
        }
        sum = s;
    }
    sum + c
}

/// `sum_j w_j f(z_j)`.
pub fn integrate<F: Fn(f64) -> f64>(rule: &QuadratureRule, f: F) -> Result<f64> {
    let mut terms = Vec::with_capacity(rule.len());
    for (node, (&z, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let v = f(z);
        if !v.is_finite() {
            return Err(Error::NonFinite { node, x: z });
        }
        terms.push(w * v);
    }
    Ok(compensated_sum(terms))
}

/// `int_{-L}^{L} e^{-x^2} f(x) dx` by the composite trapezoid rule on `n`
/// equidistant points; a single point uses the midpoint rule.
pub fn trapezoid<F: Fn(f64) -> f64>(f: F, n: usize, half_width: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    if !(half_width > 0.0) || !half_width.is_finite() {
        return Err(Error::InvalidParameter(format!("half width {half_width} must be positive")));
    }
    let g = |x: f64| (-x * x).exp() * f(x);
    if n == 1 {
        let v = g(0.0);
        if !v.is_finite() {
            return Err(Error::NonFinite { node: 0, x: 0.0 });
        }
        return Ok(2.0 * half_width * v);
    }
    let h = 2.0 * half_width / (n - 1) as f64;
    let mut terms = Vec::with_capacity(n);
    for k in 0..n {
        let x = -half_width + k as f64 * h;
        let v = g(x);
        if !v.is_finite() {
            return Err(Error::NonFinite { node: k, x });
        }
        let edge = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
        terms.push(edge * h * v);
    }
    Ok(compensated_sum(terms))
}

/// Number of points in the reference trapezoid rule.
pub const REFERENCE_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureComparison {
    pub n: usize,
    pub half_width: f64,
    pub gauss_hermite: f64,
    pub trapezoid: f64,
    pub reference: f64,
    pub gauss_hermite_error: f64,
    pub trapezoid_error: f64,
}

impl QuadratureComparison {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new([
            "n",
            "half_width",
            "gauss_hermite",
            "trapezoid",
            "reference",
            "gauss_hermite_error",
            "trapezoid_error",
        ]);
        t.push(vec![
            self.n as f64,
            self.half_width,
            self.gauss_hermite,
            self.trapezoid,
            self.reference,
            self.gauss_hermite_error,
            self.trapezoid_error,
        ]);
        t
    }
}

/// `n`-point Gauss-Hermite against `n`-point equidistant trapezoid on
/// `[-L, L]`, both measured against a `REFERENCE_POINTS` trapezoid.
pub fn equidistant_compare<F: Fn(f64) -> f64>(f: F, n: usize, half_width: f64) -> Result<QuadratureComparison> {
    let gauss_hermite = integrate(&gauss_hermite_rule(n)?, &f)?;
    let trapezoid_value = trapezoid(&f, n, half_width)?;
    let reference = trapezoid(&f, REFERENCE_POINTS, half_width)?;
    Ok(QuadratureComparison {
        n,
        half_width,
        gauss_hermite,
        trapezoid: trapezoid_value,
        reference,
        gauss_hermite_error: (gauss_hermite - reference).abs(),
        trapezoid_error: (trapezoid_value - reference).abs(),
    })
}

/// `int x^k e^{-x^2} dx`: zero for odd `k`, `(k-1)!! sqrt(pi) / 2^{k/2}` otherwise.
pub fn gaussian_moment(k: u32) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let mut m = PI.sqrt();
    for j in (1..k).step_by(2) {
        m *= j as f64 / 2.0;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::hermite_eval;

    #[test]
    fn small_rules() {
        let r = gauss_hermite_rule(1).unwrap();
        assert_eq!(r.nodes(), &[0.0]);
        assert!((r.weights()[0] - PI.sqrt()).abs() < 1e-15);

        let r = gauss_hermite_rule(2).unwrap();
        let s = 0.5f64.sqrt();
        assert!((r.nodes()[0] + s).abs() < 1e-15 && (r.nodes()[1] - s).abs() < 1e-15);
        for w in r.weights() {
            assert!((w - PI.sqrt() / 2.0).abs() < 1e-15);
        }

        let r = gauss_hermite_rule(5).unwrap();
        let s10 = 10f64.sqrt();
        let expected = [
            -(10.0 + 2.0 * s10).sqrt() / 2.0,
            -(10.0 - 2.0 * s10).sqrt() / 2.0,
            0.0,
            (10.0 - 2.0 * s10).sqrt() / 2.0,
            (10.0 + 2.0 * s10).sqrt() / 2.0,
        ];
        for (a, b) in r.nodes().iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(gauss_hermite_rule(0).is_err());
    }

    #[test]
    fn weights_match_literal_formula() {
        for n in 1..=20usize {
            let r = gauss_hermite_rule(n).unwrap();
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            for (&z, &w) in r.nodes().iter().zip(r.weights()) {
                let h = hermite_eval(n - 1, z);
                let literal = 2f64.powi(n as i32 - 1) * fact * PI.sqrt() / ((n * n) as f64 * h * h);
                assert!((w - literal).abs() < 1e-13 * literal, "n = {n}");
            }
        }
    }

    #[test]
    fn weights_match_eigenvector_route() {
        for n in 1..=30 {
            let r = gauss_hermite_rule(n).unwrap();
            let gw = golub_welsch_weights(n).unwrap();
            for (a, b) in r.weights().iter().zip(&gw) {
                assert!((a - b).abs() < 1e-12 * a.max(1e-300) || (a - b).abs() < 1e-15 * PI.sqrt(), "n = {n}");
            }
        }
    }

    #[test]
    fn weights_are_positive_symmetric_and_sum_to_sqrt_pi() {
        for n in 1..=64 {
            let r = gauss_hermite_rule(n).unwrap();
            let w = r.weights();
            assert!(w.iter().all(|&v| v > 0.0));
            for j in 0..n {
                assert_eq!(w[j], w[n - 1 - j]);
                assert_eq!(r.nodes()[j], -r.nodes()[n - 1 - j]);
            }
            assert!(r.nodes().windows(2).all(|p| p[0] < p[1]));
            let total = compensated_sum(w.iter().copied());
            assert!((total - PI.sqrt()).abs() < 1e-12 * PI.sqrt(), "n = {n}");
        }
    }

    #[test]
    fn moments_are_exact_up_to_degree_2n_minus_1() {
        for n in 1..=20usize {
            let r = gauss_hermite_rule(n).unwrap();
            for k in 0..(2 * n as u32) {
                let got = integrate(&r, |x| x.powi(k as i32)).unwrap();
                let exact = gaussian_moment(k);
                let scale = integrate(&r, |x| x.abs().powi(k as i32)).unwrap();
                assert!((got - exact).abs() <= 1e-12 * scale, "n = {n}, k = {k}: {got} vs {exact}");
            }
            let k = 2 * n as u32;
            let got = integrate(&r, |x| x.powi(k as i32)).unwrap();
            assert!((got - gaussian_moment(k)).abs() > 1e-6 * gaussian_moment(k));
        }
    }

    #[test]
    fn nodes_are_half_the_grid() {
        for n in 1..=40 {
            let r = gauss_hermite_rule(n).unwrap();
            let g = grid_points(n).unwrap();
            for (a, b) in r.grid_nodes().iter().zip(g.points()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn integrate_examples() {
        let r = gauss_hermite_rule(6).unwrap();
        assert!((integrate(&r, |_| 1.0).unwrap() - PI.sqrt()).abs() < 1e-14);
        assert!((integrate(&r, |x| x * x).unwrap() - PI.sqrt() / 2.0).abs() < 1e-14);
        let odd = gauss_hermite_rule(5).unwrap();
        assert_eq!(integrate(&odd, |x| 1.0 / x), Err(Error::NonFinite { node: 2, x: 0.0 }));
        assert!(matches!(integrate(&r, |x| if x > 0.0 { f64::NAN } else { 0.0 }), Err(Error::NonFinite { node: 3, .. })));
    }

    #[test]
    fn comparison_examples() {
        let c = equidistant_compare(|_| 1.0, 20, 6.0).unwrap();
        assert!((c.gauss_hermite - PI.sqrt()).abs() < 1e-13);
        assert!((c.trapezoid - PI.sqrt()).abs() < 1e-8);
        assert!(c.gauss_hermite_error <= c.trapezoid_error);

        let exact = 3.0 * PI.sqrt() / 4.0;
        let c = equidistant_compare(|x| x.powi(4), 10, 6.0).unwrap();
        assert!((c.gauss_hermite - exact).abs() < 1e-13);
        assert!((c.trapezoid - exact).abs() > 1e-6);

        let c = equidistant_compare(f64::cos, 15, 6.0).unwrap();
        let exact = PI.sqrt() * (-0.25f64).exp();
        assert!((c.reference - exact).abs() < 1e-12);
        assert!(c.gauss_hermite_error.is_finite() && c.trapezoid_error.is_finite());
        assert_eq!(c.to_table().rows.len(), 1);

        assert!(equidistant_compare(|_| 1.0, 5, 0.0).is_err());
        assert!((trapezoid(|_| 1.0, 1, 2.0).unwrap() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn rule_table() {
        let t = gauss_hermite_rule(3).unwrap().to_table();
        assert_eq!(t.columns, ["node", "weight"]);
        assert_eq!(t.rows.len(), 3);
    }
}
