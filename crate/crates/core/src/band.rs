//! Compact storage for real square matrices with a declared band profile.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real `n x n` matrix whose nonzero entries satisfy `-lower <= j - i <= upper`.
///
/// Entries are stored diagonal-by-diagonal per row: row `i` keeps the
/// `lower + upper + 1` slots for columns `i - lower ..= i + upper`. Slots that
/// fall outside the matrix are kept at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        let lower = lower.min(n - 1);
        let upper = upper.min(n - 1);
        Ok(Self {
            n,
            lower,
            upper,
            data: vec![0.0; n * (lower + upper + 1)],
        })
    }

    /// Copies a dense matrix, rejecting any nonzero entry outside the band.
    pub fn from_dense(m: &DMatrix<f64>, lower: usize, upper: usize) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let mut band = Self::zeros(m.nrows(), lower, upper)?;
        for i in 0..band.n {
            for j in 0..band.n {
                let v = m[(i, j)];
                if band.in_band(i, j) {
                    band.set(i, j, v)?;
                } else if v != 0.0 {
                    return Err(Error::OutsideBand { row: i, col: j });
                }
            }
        }
        Ok(band)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.lower >= i && j <= i + self.upper
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        i * self.width() + (j + self.lower - i)
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.slot(i, j)]
        } else {
            0.0
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        if !self.in_band(i, j) {
            return Err(Error::OutsideBand { row: i, col: j });
        }
        let k = self.slot(i, j);
        self.data[k] = value;
        Ok(())
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self {
            n: self.n,
            lower: self.upper,
            upper: self.lower,
            data: vec![0.0; self.data.len()],
        };
        for i in 0..self.n {
            let lo = i.saturating_sub(self.lower);
            let hi = (i + self.upper).min(self.n - 1);
            for j in lo..=hi {
                let k = t.slot(j, i);
                t.data[k] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        Ok((0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.lower);
                let hi = (i + self.upper).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * v[j]).sum()
            })
            .collect())
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Diagonal `offset` (positive = above the main diagonal) as a vector.
    pub fn diagonal(&self, offset: isize) -> Vec<f64> {
        let shift = offset.unsigned_abs();
        if shift >= self.n {
            return Vec::new();
        }
        (0..self.n - shift)
            .map(|k| {
                if offset >= 0 {
                    self.get(k, k + shift)
                } else {
                    self.get(k + shift, k)
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_outside_band_is_rejected() {
        let mut b = BandMatrix::zeros(4, 1, 1).unwrap();
        assert!(b.set(1, 2, 3.0).is_ok());
        assert_eq!(b.set(0, 2, 1.0), Err(Error::OutsideBand { row: 0, col: 2 }));
        assert_eq!(b.get(0, 3), 0.0);
    }

    #[test]
    fn dense_round_trip_and_transpose() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 4.0, 5.0, 6.0, 0.0, 8.0, 9.0]);
        let b = BandMatrix::from_dense(&m, 1, 1).unwrap();
        assert_eq!(b.to_dense(), m);
        assert_eq!(b.transpose().to_dense(), m.transpose());
        assert_eq!(b.mul_vec(&[1.0, 1.0, 1.0]).unwrap(), vec![3.0, 15.0, 17.0]);
        assert_eq!(b.diagonal(1), vec![2.0, 6.0]);
        assert_eq!(b.diagonal(-1), vec![4.0, 8.0]);
    }

    #[test]
    fn from_dense_rejects_fill_outside_band() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert!(BandMatrix::from_dense(&m, 0, 1).is_err());
        assert!(BandMatrix::zeros(0, 0, 0).is_err());
    }

    #[test]
    fn asymmetric_lower_upper_transpose() {
        let mut b = BandMatrix::zeros(4, 2, 0).unwrap();
        b.set(3, 1, 7.0).unwrap();
        let t = b.transpose();
        assert_eq!((t.lower(), t.upper()), (0, 2));
        assert_eq!(t.get(1, 3), 7.0);
    }
}
