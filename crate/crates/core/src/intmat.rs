//! Arbitrary-precision integer matrices and exact rational solving.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("ragged integer matrix".into()));
        }
        Ok(IntMatrix { rows: rows.len(), cols, data: rows.iter().flatten().map(|&v| BigInt::from(v)).collect() })
    }

    /// Builds a matrix column by column.
    pub fn from_columns(rows: usize, columns: &[Vec<i64>]) -> Result<Self> {
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::ShapeMismatch("column length differs from row count".into()));
        }
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                m.data[i * m.cols + j] = BigInt::from(v);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul_vec(&self, x: &[i64]) -> Result<Vec<BigInt>> {
        if x.len() != self.cols {
            return Err(Error::ShapeMismatch(format!("vector of length {} against {} columns", x.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * BigInt::from(x[j])).fold(BigInt::zero(), |a, b| a + b))
            .collect())
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !a[i * n + k].is_zero()) else {
                    return Ok(BigInt::zero());
                };
                for j in 0..n {
                    a.swap(k * n + j, swap * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j]) / &prev;
                    a[i * n + j] = v;
                }
            }
            prev = a[k * n + k].clone();
        }
        Ok(sign * &a[n * n - 1])
    }

    /// Unique rational solution of `A x = b` by Gauss-Jordan over the rationals.
    pub fn solve_rational(&self, b: &[BigInt]) -> Result<Vec<BigRational>> {
        if self.rows != self.cols || b.len() != self.rows {
            return Err(Error::ShapeMismatch(format!(
                "need a square system, got {}x{} with {} right-hand entries",
                self.rows,
                self.cols,
                b.len()
            )));
        }
        let n = self.rows;
        let w = n + 1;
        let mut a: Vec<BigRational> = Vec::with_capacity(n * w);
        for i in 0..n {
            for j in 0..n {
                a.push(BigRational::from_integer(self.get(i, j).clone()));
            }
            a.push(BigRational::from_integer(b[i].clone()));
        }
        for c in 0..n {
            let piv = (c..n).find(|&i| !a[i * w + c].is_zero()).ok_or(Error::SingularMatrix)?;
            if piv != c {
                for j in 0..w {
                    a.swap(c * w + j, piv * w + j);
                }
            }
            let inv = a[c * w + c].recip();
            for j in c..w {
                a[c * w + j] = &a[c * w + j] * &inv;
            }
            for i in 0..n {
                if i == c || a[i * w + c].is_zero() {
                    continue;
                }
                let factor = a[i * w + c].clone();
                for j in c..w {
                    let v = &a[i * w + j] - &factor * &a[c * w + j];
                    a[i * w + j] = v;
                }
            }
        }
        Ok((0..n).map(|i| a[i * w + n].clone()).collect())
    }
}

/// Solves `A x = b` exactly and insists the answer is a nonnegative integer vector.
pub fn solve_nonneg_integer(a: &IntMatrix, b: &[i64]) -> Result<Vec<u64>> {
    let rhs: Vec<BigInt> = b.iter().map(|&v| BigInt::from(v)).collect();
    let x = a.solve_rational(&rhs)?;
    x.iter()
        .enumerate()
        .map(|(index, v)| {
            if !v.is_integer() {
                return Err(Error::NonIntegralSolution { index, value: v.to_string() });
            }
            if v.is_negative() {
                return Err(Error::NegativeMultiplicity { index, value: v.to_string() });
            }
            v.to_integer().to_u64().ok_or_else(|| Error::RangeError(format!("coordinate {index} overflows u64")))
        })
        .collect()
}
