//! Dense matrices over GF(p) and enumeration of GL(2,p).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeModulus};

/// Largest prime for which GL(2,p) may be enumerated.
pub const GL2_ENUMERATION_LIMIT: u32 = 200;

/// A row-major matrix of canonical residues.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Fp>,
    modulus: PrimeModulus,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Fp>, modulus: PrimeModulus) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch("entry count differs from rows*cols"));
        }
        if entries.iter().any(|e| e.modulus() != modulus) {
            return Err(Error::ModulusMismatch);
        }
        Ok(Self {
            rows,
            cols,
            entries,
            modulus,
        })
    }

    pub fn zeros(rows: usize, cols: usize, modulus: PrimeModulus) -> Self {
        Self {
            rows,
            cols,
            entries: vec![modulus.zero(); rows * cols],
            modulus,
        }
    }

    pub fn identity(n: usize, modulus: PrimeModulus) -> Self {
        let mut m = Self::zeros(n, n, modulus);
        for i in 0..n {
            m.entries[i * n + i] = modulus.one();
        }
        m
    }

    /// Builds a matrix from signed integer rows, reducing each entry mod p.
    pub fn from_rows<const C: usize>(modulus: PrimeModulus, rows: &[[i64; C]]) -> Self {
        let entries = rows
            .iter()
            .flat_map(|r| r.iter().map(|&v| modulus.normalize(v)))
            .collect();
        Self {
            rows: rows.len(),
            cols: C,
            entries,
            modulus,
        }
    }

    pub fn scalar(n: usize, k: Fp) -> Self {
        let mut m = Self::zeros(n, n, k.modulus());
        for i in 0..n {
            m.entries[i * n + i] = k;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    #[inline]
    pub fn entries(&self) -> &[Fp] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Fp {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Fp) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Fp] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows, self.modulus);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn scale(&self, k: Fp) -> Matrix {
        Matrix {
            entries: self.entries.iter().map(|&e| e * k).collect(),
            ..self.clone()
        }
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.modulus != rhs.modulus {
            return Err(Error::ModulusMismatch);
        }
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch("left cols != right rows"));
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols, self.modulus);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let cur = out.get(r, c);
                    out.set(r, c, cur + a * rhs.get(k, c));
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[Fp]) -> Result<Vec<Fp>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch("vector length != rows"));
        }
        let mut out = vec![self.modulus.zero(); self.cols];
        for (k, &a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (c, o) in out.iter_mut().enumerate() {
                *o += a * self.get(k, c);
            }
        }
        Ok(out)
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        row_reduce(&mut m, None)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Gauss-Jordan inverse.
    pub fn inv(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix"));
        }
        let n = self.rows;
        let mut work = self.clone();
        let mut inv = Matrix::identity(n, self.modulus);
        if row_reduce(&mut work, Some(&mut inv)) < n {
            return Err(Error::Singular);
        }
        Ok(inv)
    }

    pub fn det2(&self) -> Result<Fp> {
        if self.rows != 2 || self.cols != 2 {
            return Err(Error::DimensionMismatch("det2 expects a 2x2 matrix"));
        }
        Ok(self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0))
    }

    /// Entries as plain integers, row by row.
    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|e| e.value()).collect())
            .collect()
    }
}

// Reduces `m` to reduced row echelon form, mirroring every row operation on
// `companion` when given. Returns the rank.
fn row_reduce(m: &mut Matrix, mut companion: Option<&mut Matrix>) -> usize {
    let (rows, cols) = (m.rows, m.cols);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !m.get(r, col).is_zero()) else {
            continue;
        };
        swap_rows(m, pivot, rank);
        if let Some(c) = companion.as_deref_mut() {
            swap_rows(c, pivot, rank);
        }
        let inv = m.get(rank, col).inv().expect("pivot is nonzero");
        scale_row(m, rank, inv);
        if let Some(c) = companion.as_deref_mut() {
            scale_row(c, rank, inv);
        }
        for r in 0..rows {
            if r == rank {
                continue;
            }
            let factor = m.get(r, col);
            if factor.is_zero() {
                continue;
            }
            add_row_multiple(m, r, rank, -factor);
            if let Some(c) = companion.as_deref_mut() {
                add_row_multiple(c, r, rank, -factor);
            }
        }
        rank += 1;
    }
    rank
}

fn swap_rows(m: &mut Matrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for c in 0..m.cols {
        m.entries.swap(a * m.cols + c, b * m.cols + c);
    }
}

fn scale_row(m: &mut Matrix, r: usize, k: Fp) {
    for c in 0..m.cols {
        let v = m.get(r, c);
        m.set(r, c, v * k);
    }
}

fn add_row_multiple(m: &mut Matrix, target: usize, source: usize, k: Fp) {
    for c in 0..m.cols {
        let v = m.get(target, c) + k * m.get(source, c);
        m.set(target, c, v);
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for r in 0..self.rows {
            if r > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{:?}", self.row(r))?;
        }
        write!(f, "] mod {}", self.modulus)
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

/// |GL(2,p)| = (p^2 - 1)(p^2 - p).
pub fn gl2_order(p: PrimeModulus) -> u64 {
    let q = u64::from(p.get());
    (q * q - 1) * (q * q - q)
}

/// Every invertible 2x2 matrix over GF(p), each exactly once, in
/// lexicographic order of `(a, b, c, d)` for `[[a, b], [c, d]]`.
pub fn gl2_enumerate(p: PrimeModulus) -> Result<Gl2Iter> {
    if p.get() > GL2_ENUMERATION_LIMIT {
        return Err(Error::ParameterTooLarge(format!(
            "GL(2,{p}) enumeration is capped at p <= {GL2_ENUMERATION_LIMIT}"
        )));
    }
    Ok(Gl2Iter { p, next: 0 })
}

#[derive(Clone, Debug)]
pub struct Gl2Iter {
    p: PrimeModulus,
    next: u64,
}

impl Iterator for Gl2Iter {
    type Item = Matrix;

    fn next(&mut self) -> Option<Matrix> {
        let q = u64::from(self.p.get());
        let total = q * q * q * q;
        while self.next < total {
            let n = self.next;
            self.next += 1;
            let (a, b, c, d) = (n / (q * q * q), (n / (q * q)) % q, (n / q) % q, n % q);
            if (a * d) % q == (b * c) % q {
                continue;
            }
            let f = |v: u64| self.p.elem(v);
            return Some(Matrix {
                rows: 2,
                cols: 2,
                entries: vec![f(a), f(b), f(c), f(d)],
                modulus: self.p,
            });
        }
        None
    }
}
