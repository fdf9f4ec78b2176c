//! Dense matrices over a prime field GF(p).
//!
//! Every rank in the crate bottoms out here. Entries are stored as canonical
//! residues `0 <= e < p` in row-major order, and `p < 2^31` so that a product of
//! two residues fits in a `u64` without overflow.

use std::fmt;
use std::ops::Mul;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Default modulus: the largest prime below 2^15.
pub const DEFAULT_PRIME: u32 = 32749;

/// The prime field GF(p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeField {
    p: u32,
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField { p: DEFAULT_PRIME }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeField {
    /// Checks primality once; every matrix built from the returned value trusts it.
    pub fn new(p: u64) -> Result<Self> {
        if p >= 1 << 31 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p: p as u32 })
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    /// Representative in `(-p/2, p/2]`, used when printing matrices.
    pub fn to_signed(self, v: u32) -> i64 {
        let v = v as i64;
        let p = self.p as i64;
        if v > p / 2 {
            v - p
        } else {
            v
        }
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1u32 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.p), "zero has no inverse in GF({})", self.p);
        self.pow(a, self.p as u64 - 2)
    }

    fn check_same(self, other: PrimeField) -> Result<()> {
        if self != other {
            return Err(Error::FieldMismatch(self.p, other.p));
        }
        Ok(())
    }
}

/// A dense `rows x cols` matrix over GF(p).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldMatrix<{}>{}x{}", self.field.p, self.rows, self.cols)?;
        f.debug_list().entries(self.to_signed_rows()).finish()
    }
}

/// Result of row reduction: the reduced row-echelon form and its pivot columns.
#[derive(Clone, Debug)]
pub struct RowEchelon {
    pub reduced: FieldMatrix,
    pub pivots: Vec<usize>,
}

impl FieldMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        FieldMatrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.p;
        }
        m
    }

    pub fn from_fn(field: PrimeField, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(field.reduce(f(i, j)));
            }
        }
        FieldMatrix { field, rows, cols, data }
    }

    /// Builds a matrix from integer entries in row-major order, reducing them mod p.
    pub fn from_row_major(field: PrimeField, rows: usize, cols: usize, entries: &[i64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(FieldMatrix { field, rows, cols, data: entries.iter().map(|&e| field.reduce(e)).collect() })
    }

    /// Builds a matrix from a list of integer rows. An empty list is a `0 x 0` matrix.
    pub fn from_rows(field: PrimeField, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch(format!("row {bad} has {} entries, expected {cols}", rows[bad].len())));
        }
        let flat: Vec<i64> = rows.iter().flatten().copied().collect();
        Self::from_row_major(field, rows.len(), cols, &flat)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.field.p;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&e| e == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn to_signed_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|&e| self.field.to_signed(e)).collect()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn matmul(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        self.field.check_same(other.field)?;
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.field.p as u64;
        let n = other.cols;
        let mut acc = vec![0u64; self.rows * n];
        for i in 0..self.rows {
            let out = &mut acc[i * n..(i + 1) * n];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k] as u64;
                if a == 0 {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out.iter_mut().zip(brow) {
                    *o = (*o + a * b as u64) % p;
                }
            }
        }
        Ok(FieldMatrix {
            field: self.field,
            rows: self.rows,
            cols: n,
            data: acc.into_iter().map(|e| e as u32).collect(),
        })
    }

    pub fn add(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        self.zip_with(other, |f, a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        self.zip_with(other, |f, a, b| f.sub(a, b))
    }

    fn zip_with(&self, other: &FieldMatrix, op: impl Fn(PrimeField, u32, u32) -> u32) -> Result<FieldMatrix> {
        self.field.check_same(other.field)?;
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch(format!("{}x{} vs {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        Ok(FieldMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| op(self.field, a, b)).collect(),
        })
    }

    pub fn scale(&self, c: u32) -> FieldMatrix {
        let mut m = self.clone();
        for e in &mut m.data {
            *e = self.field.mul(*e, c);
        }
        m
    }

    /// `self^k` for a square matrix; `k = 0` gives the identity.
    pub fn pow(&self, k: usize) -> FieldMatrix {
        assert!(self.is_square(), "pow needs a square matrix");
        let mut acc = FieldMatrix::identity(self.field, self.rows);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Gauss-Jordan elimination to reduced row-echelon form.
    pub fn row_echelon(&self) -> RowEchelon {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(piv) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            m.swap_rows(r, piv);
            let inv = f.inv(m.get(r, c));
            for j in c..m.cols {
                let v = f.mul(m.get(r, j), inv);
                m.data[r * m.cols + j] = v;
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor == 0 {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.data[i * m.cols + j] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        RowEchelon { reduced: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Rank over GF(p), by forward elimination only.
    pub fn rank(&self) -> usize {
        // eliminate on the smaller orientation
        let mut m = if self.rows > self.cols { self.transpose() } else { self.clone() };
        let f = m.field;
        let (rows, cols) = (m.rows, m.cols);
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(piv) = (r..rows).find(|&i| m.data[i * cols + c] != 0) else {
                continue;
            };
            m.swap_rows(r, piv);
            let inv = f.inv(m.data[r * cols + c]);
            for i in r + 1..rows {
                let v = m.data[i * cols + c];
                if v == 0 {
                    continue;
                }
                let factor = f.mul(v, inv);
                for j in c..cols {
                    let sub = f.mul(factor, m.data[r * cols + j]);
                    m.data[i * cols + j] = f.sub(m.data[i * cols + j], sub);
                }
            }
            r += 1;
        }
        r
    }

    /// Canonical basis of the column space: the columns are the nonzero rows of
    /// the reduced row-echelon form of the transpose, so equal column spaces give
    /// identical output.
    pub fn image_basis(&self) -> FieldMatrix {
        let ech = self.transpose().row_echelon();
        let rank = ech.pivots.len();
        let mut basis = FieldMatrix::zeros(self.field, self.rows, rank);
        for k in 0..rank {
            for i in 0..self.rows {
                basis.data[i * rank + k] = ech.reduced.get(k, i);
            }
        }
        basis
    }

    /// Basis of `{ x : A x = 0 }` as columns.
    pub fn kernel_basis(&self) -> FieldMatrix {
        let ech = self.row_echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !ech.pivots.contains(c)).collect();
        let mut k = FieldMatrix::zeros(self.field, self.cols, free.len());
        for (t, &fc) in free.iter().enumerate() {
            k.data[fc * free.len() + t] = 1;
            for (r, &pc) in ech.pivots.iter().enumerate() {
                let v = self.field.neg(ech.reduced.get(r, fc));
                k.data[pc * free.len() + t] = v;
            }
        }
        k
    }

    /// One solution `X` of `self * X = rhs`, or `None` when the system is inconsistent.
    pub fn solve(&self, rhs: &FieldMatrix) -> Result<Option<FieldMatrix>> {
        self.field.check_same(rhs.field)?;
        if self.rows != rhs.rows {
            return Err(Error::ShapeMismatch(format!(
                "system has {} equations but right-hand side has {} rows",
                self.rows, rhs.rows
            )));
        }
        let aug = FieldMatrix::hstack(&[self, rhs])?;
        let ech = aug.row_echelon();
        if ech.pivots.iter().any(|&c| c >= self.cols) {
            return Ok(None);
        }
        let mut x = FieldMatrix::zeros(self.field, self.cols, rhs.cols);
        for (r, &pc) in ech.pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.data[pc * rhs.cols + j] = ech.reduced.get(r, self.cols + j);
            }
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Result<FieldMatrix> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!("cannot invert a {}x{} matrix", self.rows, self.cols)));
        }
        if self.rows == 0 {
            return Ok(self.clone());
        }
        let id = FieldMatrix::identity(self.field, self.rows);
        let aug = FieldMatrix::hstack(&[self, &id])?;
        let ech = aug.row_echelon();
        // invertible iff the first n pivots are exactly the left block's columns
        if ech.pivots.len() < self.rows || ech.pivots[self.rows - 1] >= self.cols {
            return Err(Error::SingularMatrix);
        }
        Ok(FieldMatrix::from_fn(self.field, self.rows, self.rows, |i, j| ech.reduced.get(i, self.cols + j) as i64))
    }

    pub fn hstack(parts: &[&FieldMatrix]) -> Result<FieldMatrix> {
        let Some(first) = parts.first() else {
            return Err(Error::ShapeMismatch("hstack of nothing".into()));
        };
        let rows = first.rows;
        let mut cols = 0;
        for p in parts {
            first.field.check_same(p.field)?;
            if p.rows != rows {
                return Err(Error::ShapeMismatch(format!("hstack rows {} vs {}", rows, p.rows)));
            }
            cols += p.cols;
        }
        let mut m = FieldMatrix::zeros(first.field, rows, cols);
        let mut off = 0;
        for p in parts {
            for i in 0..rows {
                m.data[i * cols + off..i * cols + off + p.cols].copy_from_slice(p.row(i));
            }
            off += p.cols;
        }
        Ok(m)
    }

    pub fn vstack(parts: &[&FieldMatrix]) -> Result<FieldMatrix> {
        let Some(first) = parts.first() else {
            return Err(Error::ShapeMismatch("vstack of nothing".into()));
        };
        let cols = first.cols;
        let mut data = Vec::new();
        let mut rows = 0;
        for p in parts {
            first.field.check_same(p.field)?;
            if p.cols != cols {
                return Err(Error::ShapeMismatch(format!("vstack cols {} vs {}", cols, p.cols)));
            }
            data.extend_from_slice(&p.data);
            rows += p.rows;
        }
        Ok(FieldMatrix { field: first.field, rows, cols, data })
    }

    /// Assembles a block matrix. Every block row must have the same number of
    /// blocks, blocks in one block row share a height and blocks in one block
    /// column share a width.
    pub fn block_assemble(blocks: &[Vec<FieldMatrix>]) -> Result<FieldMatrix> {
        let Some(first_row) = blocks.first() else {
            return Err(Error::ShapeMismatch("empty block grid".into()));
        };
        let width = first_row.len();
        if width == 0 {
            return Err(Error::ShapeMismatch("block row without blocks".into()));
        }
        if let Some(bad) = blocks.iter().position(|r| r.len() != width) {
            return Err(Error::ShapeMismatch(format!(
                "ragged block grid: row {bad} has {} blocks, expected {width}",
                blocks[bad].len()
            )));
        }
        let col_widths: Vec<usize> = first_row.iter().map(FieldMatrix::cols).collect();
        let mut rows_out = Vec::with_capacity(blocks.len());
        for (bi, row) in blocks.iter().enumerate() {
            for (bj, b) in row.iter().enumerate() {
                if b.cols != col_widths[bj] {
                    return Err(Error::ShapeMismatch(format!(
                        "block ({bi},{bj}) has width {}, column expects {}",
                        b.cols, col_widths[bj]
                    )));
                }
            }
            let refs: Vec<&FieldMatrix> = row.iter().collect();
            rows_out.push(FieldMatrix::hstack(&refs)?);
        }
        let refs: Vec<&FieldMatrix> = rows_out.iter().collect();
        FieldMatrix::vstack(&refs)
    }

    /// Block diagonal `diag(A, B)`.
    pub fn direct_sum(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        self.field.check_same(other.field)?;
        Ok(FieldMatrix::block_diag(self.field, [self, other]))
    }

    pub fn block_diag<'a>(field: PrimeField, parts: impl IntoIterator<Item = &'a FieldMatrix>) -> FieldMatrix {
        let parts: Vec<&FieldMatrix> = parts.into_iter().collect();
        let rows: usize = parts.iter().map(|p| p.rows).sum();
        let cols: usize = parts.iter().map(|p| p.cols).sum();
        let mut m = FieldMatrix::zeros(field, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for p in parts {
            assert_eq!(p.field, field, "block_diag over mixed fields");
            for i in 0..p.rows {
                m.data[(r0 + i) * cols + c0..(r0 + i) * cols + c0 + p.cols].copy_from_slice(p.row(i));
            }
            r0 += p.rows;
            c0 += p.cols;
        }
        m
    }

    /// Uniformly random matrix.
    pub fn random<R: Rng + ?Sized>(field: PrimeField, rows: usize, cols: usize, rng: &mut R) -> FieldMatrix {
        FieldMatrix { field, rows, cols, data: (0..rows * cols).map(|_| rng.gen_range(0..field.p)).collect() }
    }

    /// Random invertible matrix by rejection sampling, deterministic in `seed`.
    pub fn random_invertible(field: PrimeField, n: usize, seed: u64) -> FieldMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_invertible_with(field, n, &mut rng)
    }

    pub fn random_invertible_with<R: Rng + ?Sized>(field: PrimeField, n: usize, rng: &mut R) -> FieldMatrix {
        loop {
            let m = Self::random(field, n, n, rng);
            if m.rank() == n {
                return m;
            }
        }
    }
}

impl Mul for &FieldMatrix {
    type Output = FieldMatrix;

    /// Panicking product; use [`FieldMatrix::matmul`] for fallible shapes.
    fn mul(self, rhs: &FieldMatrix) -> FieldMatrix {
        match self.matmul(rhs) {
            Ok(m) => m,
            Err(e) => panic!("{e}"),
        }
    }
}
