//! Elements of V⊗W as 2×m coordinate grids, projective directions in V, and
//! the dense mixed-radix vertex numbering of V⊗W.
//!
//! Row `i` of a grid holds the coefficients of `e_i ⊗ f_j`. Linear maps act
//! on the right with row vectors, so `A∘B` sends the grid `X` to `Aᵀ·X·B`.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeModulus};
use crate::matrix::Matrix;

/// Vertex sets above this size are refused by the exhaustive routines.
pub const DESK_SCALE_LIMIT: u64 = 1_000_000;

const MAX_DIGITS: usize = 40;

/// A 1-space of V: `⟨e1 + μ e2⟩` for a finite slope μ, or `⟨e2⟩` at infinity.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum ProjPoint {
    Finite(Fp),
    Infinity,
}

impl ProjPoint {
    /// The normalized spanning vector `(1, μ)` or `(0, 1)`.
    pub fn vector(self, p: PrimeModulus) -> [Fp; 2] {
        match self {
            ProjPoint::Finite(mu) => [p.one(), mu],
            ProjPoint::Infinity => [p.zero(), p.one()],
        }
    }

    /// The point spanned by a nonzero vector.
    pub fn from_vector(v: [Fp; 2]) -> Option<ProjPoint> {
        if !v[0].is_zero() {
            Some(ProjPoint::Finite(v[1] * v[0].inv().ok()?))
        } else if !v[1].is_zero() {
            Some(ProjPoint::Infinity)
        } else {
            None
        }
    }

    /// Image under `v ↦ v·A`.
    pub fn apply(self, a: &Matrix) -> ProjPoint {
        let v = self.vector(a.modulus());
        let img = [
            v[0] * a.get(0, 0) + v[1] * a.get(1, 0),
            v[0] * a.get(0, 1) + v[1] * a.get(1, 1),
        ];
        ProjPoint::from_vector(img).expect("invertible matrices map nonzero vectors to nonzero vectors")
    }

    pub fn finite(self) -> Option<Fp> {
        match self {
            ProjPoint::Finite(mu) => Some(mu),
            ProjPoint::Infinity => None,
        }
    }
}

impl PartialOrd for ProjPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ProjPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ProjPoint::Finite(a), ProjPoint::Finite(b)) => a.value().cmp(&b.value()),
            (ProjPoint::Finite(_), ProjPoint::Infinity) => Ordering::Less,
            (ProjPoint::Infinity, ProjPoint::Finite(_)) => Ordering::Greater,
            (ProjPoint::Infinity, ProjPoint::Infinity) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Finite(mu) => write!(f, "{mu}"),
            ProjPoint::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for ProjPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        match self {
            ProjPoint::Finite(mu) => s.serialize_u32(mu.value()),
            ProjPoint::Infinity => s.serialize_str("inf"),
        }
    }
}

/// An element of V⊗W.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tensor {
    coords: Matrix,
}

impl Tensor {
    pub fn zero(m: usize, p: PrimeModulus) -> Tensor {
        Tensor {
            coords: Matrix::zeros(2, m, p),
        }
    }

    pub fn from_matrix(coords: Matrix) -> Result<Tensor> {
        if coords.rows() != 2 || coords.cols() < 2 {
            return Err(Error::DimensionMismatch("tensor grids are 2 x m with m >= 2"));
        }
        Ok(Tensor { coords })
    }

    /// Row-major coordinates, e1-row first; the wire format of a tensor.
    pub fn from_coords(m: usize, p: PrimeModulus, coords: &[i64]) -> Result<Tensor> {
        if coords.len() != 2 * m {
            return Err(Error::DimensionMismatch("tensor needs exactly 2m coordinates"));
        }
        let entries = coords.iter().map(|&c| p.normalize(c)).collect();
        Tensor::from_matrix(Matrix::new(2, m, entries, p)?)
    }

    /// The simple tensor `v ⊗ w`.
    pub fn simple(v: [Fp; 2], w: &[Fp]) -> Result<Tensor> {
        let p = v[0].modulus();
        let entries = v.iter().flat_map(|&vi| w.iter().map(move |&wj| vi * wj)).collect();
        Tensor::from_matrix(Matrix::new(2, w.len(), entries, p)?)
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.coords.cols()
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.coords.modulus()
    }

    pub fn coords(&self) -> &Matrix {
        &self.coords
    }

    pub fn row(&self, i: usize) -> &[Fp] {
        self.coords.row(i)
    }

    pub fn to_wire(&self) -> Vec<u32> {
        self.coords.entries().iter().map(|e| e.value()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_zero()
    }

    pub fn rank(&self) -> usize {
        self.coords.rank()
    }

    fn zip_with(&self, other: &Tensor, f: impl Fn(Fp, Fp) -> Fp) -> Tensor {
        assert_eq!(self.m(), other.m(), "tensor dimensions differ");
        let entries = self
            .coords
            .entries()
            .iter()
            .zip(other.coords.entries())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Tensor {
            coords: Matrix::new(2, self.m(), entries, self.modulus()).expect("shape preserved"),
        }
    }

    pub fn add(&self, other: &Tensor) -> Tensor {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, k: Fp) -> Tensor {
        Tensor {
            coords: self.coords.scale(k),
        }
    }

    pub fn neg(&self) -> Tensor {
        self.scale(-self.modulus().one())
    }

    /// Writes `self` as `v ⊗ w` with the first nonzero entry of `v` equal to
    /// one. `None` for non-simple (rank 2) tensors.
    pub fn factorize(&self) -> Result<Option<([Fp; 2], Vec<Fp>)>> {
        if self.is_zero() {
            return Err(Error::ZeroTensor);
        }
        let p = self.modulus();
        let (r1, r2) = (self.row(0), self.row(1));
        if r1.iter().all(|e| e.is_zero()) {
            return Ok(Some(([p.zero(), p.one()], r2.to_vec())));
        }
        let pivot = r1.iter().position(|e| !e.is_zero()).expect("row is nonzero");
        let c = r2[pivot] * r1[pivot].inv()?;
        if r1.iter().zip(r2).any(|(&a, &b)| b != c * a) {
            return Ok(None);
        }
        Ok(Some(([p.one(), c], r1.to_vec())))
    }

    /// The direction `⟨v⟩` of a nonzero simple tensor `v ⊗ w`.
    pub fn direction(&self) -> Result<Option<ProjPoint>> {
        Ok(self
            .factorize()?
            .map(|(v, _)| ProjPoint::from_vector(v).expect("normalized vector is nonzero")))
    }

    /// Splits `self = (d1 ⊗ a) + (d2 ⊗ b)` along two distinct directions,
    /// using their normalized spanning vectors.
    pub fn decompose(&self, d1: ProjPoint, d2: ProjPoint) -> Result<(Vec<Fp>, Vec<Fp>)> {
        let p = self.modulus();
        let [u1, u2] = d1.vector(p);
        let [v1, v2] = d2.vector(p);
        let det = u1 * v2 - u2 * v1;
        let inv = det
            .inv()
            .map_err(|_| Error::DegenerateConfig(format!("directions {d1} and {d2} coincide")))?;
        let (r1, r2) = (self.row(0), self.row(1));
        let a = r1.iter().zip(r2).map(|(&x, &y)| (x * v2 - y * v1) * inv).collect();
        let b = r1.iter().zip(r2).map(|(&x, &y)| (u1 * y - u2 * x) * inv).collect();
        Ok((a, b))
    }
}

impl fmt::Debug for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tensor{:?}", self.to_wire())
    }
}

impl Serialize for Tensor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        self.to_wire().serialize(s)
    }
}

/// `x^(A∘B)`, i.e. the grid `Aᵀ·X·B`.
pub fn tensor_apply(a: &Matrix, b: &Matrix, x: &Tensor) -> Result<Tensor> {
    if a.rows() != 2 || a.cols() != 2 || b.rows() != x.m() || b.cols() != x.m() {
        return Err(Error::DimensionMismatch("A must be 2x2 and B must be m x m"));
    }
    if a.modulus() != x.modulus() || b.modulus() != x.modulus() {
        return Err(Error::ModulusMismatch);
    }
    if !a.is_invertible() || !b.is_invertible() {
        return Err(Error::Singular);
    }
    let y = a.transpose().mul(x.coords())?.mul(b)?;
    Tensor::from_matrix(y)
}

/// Dense numbering of V⊗W: a tensor is the integer `Σ c_k p^k` where `c_k` is
/// its k-th coordinate in row-major order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VertexSpace {
    p: PrimeModulus,
    m: usize,
    size: u32,
    w_size: u32,
}

impl VertexSpace {
    pub fn new(m: usize, p: PrimeModulus) -> Result<Self> {
        if m < 2 {
            return Err(Error::DimensionMismatch("m must be at least 2"));
        }
        let size = u64::from(p.get())
            .checked_pow(2 * m as u32)
            .filter(|&s| s <= DESK_SCALE_LIMIT && 2 * m <= MAX_DIGITS)
            .ok_or_else(|| {
                Error::ParameterTooLarge(format!("p^(2m) for p = {p}, m = {m} exceeds {DESK_SCALE_LIMIT}"))
            })?;
        Ok(Self {
            p,
            m,
            size: size as u32,
            w_size: u64::from(p.get()).pow(m as u32) as u32,
        })
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    /// p^(2m).
    #[inline]
    pub fn size(&self) -> u32 {
        self.size
    }

    /// p^m, the number of vectors in W.
    #[inline]
    pub fn w_size(&self) -> u32 {
        self.w_size
    }

    #[inline]
    pub(crate) fn digits(&self, mut idx: u32) -> [u32; MAX_DIGITS] {
        let p = self.p.get();
        let mut d = [0u32; MAX_DIGITS];
        for slot in d.iter_mut().take(2 * self.m) {
            *slot = idx % p;
            idx /= p;
        }
        d
    }

    #[inline]
    pub(crate) fn index_of_digits(&self, d: &[u32]) -> u32 {
        let p = self.p.get();
        d[..2 * self.m].iter().rev().fold(0u32, |acc, &c| acc * p + c)
    }

    pub fn decode(&self, idx: u32) -> Tensor {
        let d = self.digits(idx);
        let entries = d[..2 * self.m].iter().map(|&c| self.p.elem(u64::from(c))).collect();
        Tensor {
            coords: Matrix::new(2, self.m, entries, self.p).expect("2m digits"),
        }
    }

    pub fn encode(&self, x: &Tensor) -> u32 {
        debug_assert_eq!(x.m(), self.m);
        let d: Vec<u32> = x.coords.entries().iter().map(|e| e.value()).collect();
        self.index_of_digits(&d)
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let p = self.p.get();
        let (da, db) = (self.digits(a), self.digits(b));
        let mut out = [0u32; MAX_DIGITS];
        for k in 0..2 * self.m {
            let s = da[k] + db[k];
            out[k] = if s >= p { s - p } else { s };
        }
        self.index_of_digits(&out)
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        let p = self.p.get();
        let (da, db) = (self.digits(a), self.digits(b));
        let mut out = [0u32; MAX_DIGITS];
        for k in 0..2 * self.m {
            out[k] = if da[k] >= db[k] {
                da[k] - db[k]
            } else {
                da[k] + p - db[k]
            };
        }
        self.index_of_digits(&out)
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.sub(0, a)
    }

    /// Index of the vector `w ∈ W` among the p^m vectors of W.
    pub fn w_index(&self, w: &[Fp]) -> u32 {
        let p = self.p.get();
        w.iter().rev().fold(0u32, |acc, c| acc * p + c.value())
    }

    pub fn w_vector(&self, mut idx: u32) -> Vec<Fp> {
        let p = self.p.get();
        (0..self.m)
            .map(|_| {
                let c = idx % p;
                idx /= p;
                self.p.elem(u64::from(c))
            })
            .collect()
    }

    pub fn vertices(&self) -> core::ops::Range<u32> {
        0..self.size
    }
}

/// Precomputed `x ↦ x^(A∘B)` on vertex indices.
#[derive(Clone, Debug)]
pub struct IndexAction {
    space: VertexSpace,
    a: [[u64; 2]; 2],
    b: Vec<u64>,
}

impl IndexAction {
    pub fn new(space: VertexSpace, a: &Matrix, b: &Matrix) -> Result<Self> {
        if a.rows() != 2 || a.cols() != 2 || b.rows() != space.m || b.cols() != space.m {
            return Err(Error::DimensionMismatch("A must be 2x2 and B must be m x m"));
        }
        if !a.is_invertible() || !b.is_invertible() {
            return Err(Error::Singular);
        }
        let v = |e: Fp| u64::from(e.value());
        Ok(Self {
            space,
            a: [[v(a.get(0, 0)), v(a.get(0, 1))], [v(a.get(1, 0)), v(a.get(1, 1))]],
            b: b.entries().iter().map(|&e| v(e)).collect(),
        })
    }

    #[inline]
    pub fn apply(&self, idx: u32) -> u32 {
        let m = self.space.m;
        let p = u64::from(self.space.p.get());
        let d = self.space.digits(idx);
        // z = X·B, then y = Aᵀ·z
        let mut z = [[0u64; MAX_DIGITS / 2]; 2];
        for (i, zi) in z.iter_mut().enumerate() {
            for (c, zc) in zi.iter_mut().take(m).enumerate() {
                let mut acc = 0u64;
                for j in 0..m {
                    acc += u64::from(d[i * m + j]) * self.b[j * m + c];
                }
                *zc = acc % p;
            }
        }
        let mut out = [0u32; MAX_DIGITS];
        for k in 0..2 {
            for c in 0..m {
                out[k * m + c] = ((self.a[0][k] * z[0][c] + self.a[1][k] * z[1][c]) % p) as u32;
            }
        }
        self.space.index_of_digits(&out)
    }
}

/// Number of nonzero simple tensors, `(p + 1)(p^m - 1)`.
pub fn simple_nonzero_count(space: &VertexSpace) -> u64 {
    (u64::from(space.modulus().get()) + 1) * (u64::from(space.w_size()) - 1)
}

/// Every nonzero vector of W, in index order.
pub fn nonzero_w_vectors(space: &VertexSpace) -> impl Iterator<Item = Vec<Fp>> + '_ {
    (1..space.w_size()).map(move |i| space.w_vector(i))
}

/// The punctured direction space `⟨d⟩ ⊗ W ∖ {0}` as vertex indices.
pub fn direction_space(space: &VertexSpace, d: ProjPoint) -> Vec<u32> {
    let v = d.vector(space.modulus());
    let mut out: Vec<u32> = nonzero_w_vectors(space)
        .map(|w| space.encode(&Tensor::simple(v, &w).expect("m >= 2")))
        .collect();
    out.sort_unstable();
    out
}
