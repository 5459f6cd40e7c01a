//! Gaussian integers Z[i] with the Euclidean structure used by factorization
//! and by fraction-free elimination.
//!
//! Z[i] is Euclidean for the norm a^2 + b^2: nearest-rounding division leaves
//! a remainder of norm at most half the divisor's. Canonical associates pick
//! one element out of each orbit under multiplication by {1, i, -1, -i}:
//! re > 0 and im >= 0 (zero stays zero).

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GaussInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        Self { re: re.into(), im: im.into() }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn i() -> Self {
        Self::new(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn neg(&self) -> Self {
        Self { re: -self.re.clone(), im: -self.im.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    /// Multiplication by i^k.
    pub fn mul_unit(&self, k: u8) -> Self {
        match k % 4 {
            0 => self.clone(),
            1 => Self { re: -self.im.clone(), im: self.re.clone() },
            2 => self.neg(),
            _ => Self { re: self.im.clone(), im: -self.re.clone() },
        }
    }

    /// Euclidean division with nearest rounding: `self = q*d + r`,
    /// `norm(r) <= norm(d)/2`. `d` must be nonzero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        debug_assert!(!d.is_zero());
        let n = d.norm();
        let t = self.mul(&d.conj());
        let q = Self { re: round_div(&t.re, &n), im: round_div(&t.im, &n) };
        let r = self.sub(&q.mul(d));
        (q, r)
    }

    /// Exact quotient, or None when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    /// Greatest common divisor, returned as a canonical associate.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.canonical().0
    }

    /// The canonical associate together with k such that `self = i^k * canonical`.
    pub fn canonical(&self) -> (Self, u8) {
        if self.is_zero() {
            return (self.clone(), 0);
        }
        for k in 0u8..4 {
            // self = i^k * c  <=>  c = i^(4-k) * self.
            let c = self.mul_unit((4 - k) % 4);
            if c.re.is_positive() && !c.im.is_negative() {
                return (c, k);
            }
        }
        unreachable!("every nonzero Gaussian integer has exactly one canonical associate");
    }
}

/// Rounds a/b to the nearest integer, ties away from zero. `b > 0`.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let two_a: BigInt = a * 2;
    let shifted = if two_a.is_negative() { two_a - b } else { two_a + b };
    shifted / (b * 2)
}

impl fmt::Display for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return match () {
                _ if self.im.is_one() => write!(f, "i"),
                _ if (-&self.im).is_one() => write!(f, "-i"),
                _ => write!(f, "{}i", self.im),
            };
        }
        write!(f, "{}", self.re)?;
        if !self.im.is_negative() {
            write!(f, "+")?;
        }
        if self.im.is_one() {
            write!(f, "i")
        } else if (-&self.im).is_one() {
            write!(f, "-i")
        } else {
            write!(f, "{}i", self.im)
        }
    }
}

impl fmt::Debug for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GaussInt({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(re: i64, im: i64) -> GaussInt {
        GaussInt::new(re, im)
    }

    #[test]
    fn euclidean_division_shrinks_norm() {
        let a = z(27, -23);
        let d = z(8, 1);
        let (q, r) = a.div_rem(&d);
        assert_eq!(a, q.mul(&d).add(&r));
        assert!(r.norm() * 2u8 <= d.norm());
    }

    #[test]
    fn gcd_of_associated_primes() {
        // 5 = (2+i)(2-i); gcd(5, 3+4i) = gcd(5, (2+i)^2) = 2+i.
        assert_eq!(z(5, 0).gcd(&z(3, 4)), z(2, 1));
        assert_eq!(z(4, 0).gcd(&z(6, 0)), z(2, 0));
        assert_eq!(z(1, 1).gcd(&z(1, -1)), z(1, 1));
    }

    #[test]
    fn canonical_associates() {
        assert_eq!(z(0, 2).canonical(), (z(2, 0), 1));
        assert_eq!(z(-3, 0).canonical(), (z(3, 0), 2));
        assert_eq!(z(2, -1).canonical(), (z(1, 2), 3));
        assert_eq!(z(1, 1).canonical(), (z(1, 1), 0));
        for k in 0u8..4 {
            let p = z(2, 1).mul_unit(k);
            let (c, u) = p.canonical();
            assert_eq!(c, z(2, 1));
            assert_eq!(u, k);
        }
    }
}
