//! Residue arithmetic in GF(p) for odd primes p < 2^31.

use core::fmt;
use core::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::Serialize;

use crate::error::{Error, Result};

/// An odd prime modulus, checked at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct PrimeModulus(u32);

impl PrimeModulus {
    pub fn new(p: u32) -> Result<Self> {
        if p < 3 || p.is_multiple_of(2) || p >= 1 << 31 || !is_prime(u64::from(p)) {
            return Err(Error::NotOddPrime(u64::from(p)));
        }
        Ok(Self(p))
    }

    #[inline]
    pub const fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn zero(self) -> Fp {
        Fp {
            value: 0,
            modulus: self,
        }
    }

    #[inline]
    pub fn one(self) -> Fp {
        Fp {
            value: 1,
            modulus: self,
        }
    }

    /// Reduces an unsigned integer to its canonical residue.
    #[inline]
    pub fn elem(self, n: u64) -> Fp {
        Fp {
            value: (n % u64::from(self.0)) as u32,
            modulus: self,
        }
    }

    /// Canonical residue of a signed integer. This is the only entry point
    /// that accepts signed input.
    pub fn normalize(self, n: i64) -> Fp {
        let p = i64::from(self.0);
        Fp {
            value: n.rem_euclid(p) as u32,
            modulus: self,
        }
    }

    /// Every residue 0, 1, ..., p-1 in order.
    pub fn elements(self) -> impl Iterator<Item = Fp> + Clone {
        (0..self.0).map(move |v| Fp {
            value: v,
            modulus: self,
        })
    }

    /// The nonzero residues 1, ..., p-1 in order.
    pub fn units(self) -> impl Iterator<Item = Fp> + Clone {
        (1..self.0).map(move |v| Fp {
            value: v,
            modulus: self,
        })
    }

    /// The smaller square root of -1, present iff p = 1 (mod 4).
    pub fn sqrt_minus_one(self) -> Option<Fp> {
        if self.0 % 4 != 1 {
            return None;
        }
        // A quadratic non-residue c gives c^((p-1)/4) as a root of -1.
        let minus_one = self.normalize(-1);
        let root = self
            .units()
            .map(|c| c.pow(u64::from((self.0 - 1) / 4)))
            .find(|r| *r * *r == minus_one)?;
        let other = -root;
        Some(if other.value < root.value { other } else { root })
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Deterministic primality by trial division; adequate below 2^32.
pub fn is_prime(n: u64) -> bool {
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

/// An element of GF(p), always held as its canonical representative.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u32,
    modulus: PrimeModulus,
}

impl Fp {
    #[inline]
    pub const fn value(self) -> u32 {
        self.value
    }

    #[inline]
    pub const fn modulus(self) -> PrimeModulus {
        self.modulus
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.value == 0
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(self) -> Result<Fp> {
        if self.value == 0 {
            return Err(Error::ZeroInverse);
        }
        let p = i64::from(self.modulus.0);
        let (mut r0, mut r1) = (p, i64::from(self.value));
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.modulus.normalize(t0))
    }

    /// Square-and-multiply; `a^0 = 1` for every `a`, including zero.
    pub fn pow(self, mut n: u64) -> Fp {
        let mut base = self;
        let mut acc = self.modulus.one();
        while n > 0 {
            if n & 1 == 1 {
                acc *= base;
            }
            base *= base;
            n >>= 1;
        }
        acc
    }

    /// Division; fails only on a zero divisor.
    pub fn checked_div(self, rhs: Fp) -> Result<Fp> {
        Ok(self * rhs.inv()?)
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Serialize for Fp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.serialize_u32(self.value)
    }
}

impl Add for Fp {
    type Output = Fp;
    #[inline]
    fn add(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let p = self.modulus.0;
        let s = self.value + rhs.value;
        Fp {
            value: if s >= p { s - p } else { s },
            modulus: self.modulus,
        }
    }
}

impl Sub for Fp {
    type Output = Fp;
    #[inline]
    fn sub(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let p = self.modulus.0;
        Fp {
            value: if self.value >= rhs.value {
                self.value - rhs.value
            } else {
                self.value + p - rhs.value
            },
            modulus: self.modulus,
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    #[inline]
    fn mul(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Fp {
            value: ((u64::from(self.value) * u64::from(rhs.value)) % u64::from(self.modulus.0)) as u32,
            modulus: self.modulus,
        }
    }
}

impl Neg for Fp {
    type Output = Fp;
    #[inline]
    fn neg(self) -> Fp {
        Fp {
            value: if self.value == 0 {
                0
            } else {
                self.modulus.0 - self.value
            },
            modulus: self.modulus,
        }
    }
}

impl AddAssign for Fp {
    fn add_assign(&mut self, rhs: Fp) {
        *self = *self + rhs;
    }
}

impl SubAssign for Fp {
    fn sub_assign(&mut self, rhs: Fp) {
        *self = *self - rhs;
    }
}

impl MulAssign for Fp {
    fn mul_assign(&mut self, rhs: Fp) {
        *self = *self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    // Exhaustive-search oracle, independent of the Euclid path.
    fn inverse_by_search(a: u32, p: u32) -> u32 {
        (1..p)
            .find(|b| (u64::from(a) * u64::from(*b)) % u64::from(p) == 1)
            .unwrap()
    }

    fn pow_by_repetition(a: u32, n: u32, p: u32) -> u32 {
        (0..n).fold(1u64, |acc, _| acc * u64::from(a) % u64::from(p)) as u32
    }

    #[test]
    fn rejects_non_primes_and_two() {
        for bad in [0, 1, 2, 4, 9, 15, 91, 1 << 31] {
            assert!(PrimeModulus::new(bad).is_err(), "{bad}");
        }
        assert!(PrimeModulus::new(2_147_483_647).is_ok());
        assert!(PrimeModulus::new(2_147_483_629).is_ok());
    }

    #[test]
    fn inverse_examples() {
        for p in [3, 5, 7, 13] {
            assert_eq!(gf(p).one().inv().unwrap().value(), 1);
        }
        assert_eq!(inverse_by_search(2, 5), 3);
        assert_eq!(gf(5).elem(2).inv().unwrap().value(), 3);
        assert_eq!(inverse_by_search(2, 13), 7);
        assert_eq!(gf(13).elem(2).inv().unwrap().value(), 7);
        assert_eq!(gf(7).zero().inv(), Err(Error::ZeroInverse));
    }

    #[test]
    fn inverse_matches_search_exhaustively() {
        for p in [3u32, 5, 7, 11, 13, 17, 97, 199] {
            for a in gf(p).units() {
                let b = a.inv().unwrap();
                assert_eq!(b.value(), inverse_by_search(a.value(), p));
                assert_eq!((a * b).value(), 1);
            }
        }
    }

    #[test]
    fn pow_examples() {
        assert_eq!(pow_by_repetition(2, 4, 7), 2);
        assert_eq!(gf(7).elem(2).pow(4).value(), 2);
        assert_eq!(pow_by_repetition(2, 8, 13), 9);
        assert_eq!(gf(13).elem(2).pow(8).value(), 9);
        assert_eq!(gf(11).elem(6).pow(1).value(), 6);
        assert_eq!(gf(11).zero().pow(0).value(), 1);
    }

    #[test]
    fn fermat_holds_for_small_primes() {
        for p in (3..=200u32).filter(|p| is_prime(u64::from(*p))) {
            for a in gf(p).units() {
                assert_eq!(a.pow(u64::from(p - 1)).value(), 1, "{a} mod {p}");
                assert_eq!(a.pow(7).value(), pow_by_repetition(a.value(), 7, p));
            }
        }
    }

    #[test]
    fn sqrt_minus_one_examples() {
        assert_eq!(gf(5).sqrt_minus_one().map(Fp::value), Some(2));
        assert_eq!(gf(7).sqrt_minus_one(), None);
        // Search oracle: the smallest i with i^2 = -1.
        let search = (1..13u32).find(|i| (i * i) % 13 == 12);
        assert_eq!(search, Some(5));
        assert_eq!(gf(13).sqrt_minus_one().map(Fp::value), Some(5));
    }

    #[test]
    fn sqrt_minus_one_iff_one_mod_four() {
        for p in (3..=200u32).filter(|p| is_prime(u64::from(*p))) {
            let m = gf(p);
            match m.sqrt_minus_one() {
                Some(i) => {
                    assert_eq!(p % 4, 1);
                    assert!((i * i + m.one()).is_zero());
                    assert!(i.value() <= p / 2);
                }
                None => assert_eq!(p % 4, 3),
            }
        }
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(gf(7).normalize(-7).value(), 0);
        assert_eq!(gf(13).normalize(0).value(), 0);
        assert_eq!(481 % 13, 0);
        assert_eq!(gf(13).normalize(481).value(), 0);
        assert_eq!(gf(5).normalize(-1).value(), 4);
        assert_eq!(gf(5).normalize(i64::MIN).value(), (i64::MIN).rem_euclid(5) as u32);
    }

    #[test]
    fn arithmetic_near_the_top_of_the_range() {
        let m = gf(2_147_483_629);
        let a = m.normalize(-1);
        assert_eq!((a * a).value(), 1);
        assert_eq!((a + a).value(), m.get() - 2);
        assert_eq!((a * a.inv().unwrap()).value(), 1);
    }
}
