//! Dense row-major matrix over a generic scalar.
//!
//! Every matrix in this problem domain is desk scale (a handful of rows and
//! columns), so a flat `Vec` with explicit indexing beats pulling in a full
//! linear-algebra stack, and keeps the crate `no_std`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Mat<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch { expected: rows * cols, got: data.len() });
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::ShapeMismatch { expected: c, got: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(Mat { rows: r, cols: c, data })
    }

    pub fn fill(rows: usize, cols: usize, value: T) -> Self {
        Mat { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut T {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn values(&self) -> &[T] {
        &self.data
    }

    pub fn into_values(self) -> Vec<T> {
        self.data
    }

    pub fn transpose(&self) -> Mat<T> {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.at(r, c).clone());
            }
        }
        Mat { rows: self.cols, cols: self.rows, data }
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat::fill(rows, cols, T::zero())
    }

    pub fn sum(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, v| acc + v.clone())
    }

    /// Rank-1 outer product of a row vector and a column vector.
    pub fn outer(x: &[T], y: &[T]) -> Self {
        let mut data = Vec::with_capacity(x.len() * y.len());
        for a in x {
            for b in y {
                data.push(a.clone() * b.clone());
            }
        }
        Mat { rows: x.len(), cols: y.len(), data }
    }

    pub fn add_assign(&mut self, other: &Mat<T>) {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = a.clone() + b.clone();
        }
    }

    pub fn to_f64(&self) -> Mat<f64> {
        self.map(Scalar::to_f64)
    }

    /// Maximum absolute entry difference against `other`.
    pub fn max_abs_diff(&self, other: &Mat<T>) -> T {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut best = T::zero();
        for (a, b) in self.data.iter().zip(&other.data) {
            let d = (a.clone() - b.clone()).abs();
            if d > best {
                best = d;
            }
        }
        best
    }
}

impl Mat<f64> {
    pub fn matmul(&self, other: &Mat<f64>) -> Mat<f64> {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::fill(self.rows, other.cols, 0.0);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let v = *self.at(r, k);
                if v == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    *out.at_mut(r, c) += v * other.at(k, c);
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn sub(&self, other: &Mat<f64>) -> Mat<f64> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_checked() {
        assert!(Mat::new(2, 2, vec![1.0; 3]).is_err());
        assert!(Mat::new(2, 2, vec![1.0; 4]).is_ok());
    }

    #[test]
    fn outer_and_matmul_agree() {
        let x = [1.0, 2.0];
        let y = [3.0, 4.0, 5.0];
        let o = Mat::outer(&x, &y);
        let xm = Mat::new(2, 1, x.to_vec()).unwrap();
        let ym = Mat::new(1, 3, y.to_vec()).unwrap();
        assert_eq!(o, xm.matmul(&ym));
    }

    #[test]
    fn transpose_roundtrip() {
        let m = Mat::new(2, 3, vec![1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(m.transpose().transpose(), m);
    }
}
