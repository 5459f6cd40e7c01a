//! Exact arithmetic in Q(i), the field of Gaussian rationals.
//!
//! A value is stored as `(num_re + num_im*i) / den` with `den > 0` and
//! `gcd(num_re, num_im, den) = 1`. Construction always normalizes, so two
//! values are equal iff their stored fields are equal. The derived `Ord` is
//! the structural order on the normalized triple; it exists so values can
//! key ordered containers and has no numeric meaning on complex numbers.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GaussianRational {
    num_re: BigInt,
    num_im: BigInt,
    den: BigInt,
}

impl GaussianRational {
    /// Builds `(num_re + num_im*i) / den`, normalizing. `den` must be nonzero.
    pub fn new(num_re: BigInt, num_im: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroArgument("denominator"));
        }
        Ok(Self::normalized(num_re, num_im, den))
    }

    fn normalized(mut num_re: BigInt, mut num_im: BigInt, mut den: BigInt) -> Self {
        if den.is_negative() {
            num_re = -num_re;
            num_im = -num_im;
            den = -den;
        }
        if num_re.is_zero() && num_im.is_zero() {
            return Self { num_re, num_im, den: BigInt::one() };
        }
        let g = num_re.gcd(&num_im).gcd(&den);
        if !g.is_one() {
            num_re /= &g;
            num_im /= &g;
            den /= &g;
        }
        Self { num_re, num_im, den }
    }

    pub fn zero() -> Self {
        Self { num_re: BigInt::zero(), num_im: BigInt::zero(), den: BigInt::one() }
    }

    pub fn one() -> Self {
        Self { num_re: BigInt::one(), num_im: BigInt::zero(), den: BigInt::one() }
    }

    /// The imaginary unit i.
    pub fn i() -> Self {
        Self { num_re: BigInt::zero(), num_im: BigInt::one(), den: BigInt::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Self { num_re: BigInt::from(n), num_im: BigInt::zero(), den: BigInt::one() }
    }

    /// The real rational n/d. `d` must be nonzero.
    pub fn from_ratio(n: i64, d: i64) -> Result<Self> {
        Self::new(BigInt::from(n), BigInt::zero(), BigInt::from(d))
    }

    /// `(re_num + im_num*i) / den` from machine integers. `den` must be nonzero.
    pub fn from_parts(re_num: i64, im_num: i64, den: i64) -> Result<Self> {
        Self::new(BigInt::from(re_num), BigInt::from(im_num), BigInt::from(den))
    }

    pub fn num_re(&self) -> &BigInt {
        &self.num_re
    }

    pub fn num_im(&self) -> &BigInt {
        &self.num_im
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num_re.is_zero() && self.num_im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num_im.is_zero() && self.den.is_one() && self.num_re.is_one()
    }

    pub fn is_real(&self) -> bool {
        self.num_im.is_zero()
    }

    /// True for elements of Z[i] (denominator 1).
    pub fn is_gaussian_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn conj(&self) -> Self {
        Self { num_re: self.num_re.clone(), num_im: -self.num_im.clone(), den: self.den.clone() }
    }

    /// Squared modulus as an exact nonnegative rational (numerator, denominator).
    pub fn norm_sqr(&self) -> (BigInt, BigInt) {
        let n = &self.num_re * &self.num_re + &self.num_im * &self.num_im;
        (n, &self.den * &self.den)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroArgument("divisor"));
        }
        // 1/z = conj(z)/|z|^2; with z = (a+bi)/d this is d*(a-bi)/(a^2+b^2).
        let n = &self.num_re * &self.num_re + &self.num_im * &self.num_im;
        Ok(Self::normalized(&self.den * &self.num_re, -(&self.den * &self.num_im), n))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    /// Exact integer power; negative exponents invert (zero base rejected).
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e == 0 {
            return Ok(Self::one());
        }
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        let mut sq = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            k >>= 1;
            if k > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// Floating-point image (re, im). Exact only within f64 range.
    pub fn to_f64(&self) -> (f64, f64) {
        let d = self.den.to_f64().unwrap_or(f64::INFINITY);
        let re = self.num_re.to_f64().unwrap_or(f64::NAN) / d;
        let im = self.num_im.to_f64().unwrap_or(f64::NAN) / d;
        (re, im)
    }

    /// Parses the display format; see the module docs of the format below.
    pub fn parse(input: &str) -> Result<Self> {
        let s = input.trim();
        let offset = input.len() - input.trim_start().len();
        let mut p = NumParser { bytes: s.as_bytes(), pos: 0, offset };
        let v = p.parse_sum()?;
        p.skip_ws();
        if p.pos < p.bytes.len() {
            return Err(p.err("trailing input after number"));
        }
        Ok(v)
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GaussianRational({self})")
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::normalized(
            &self.num_re * &rhs.den + &rhs.num_re * &self.den,
            &self.num_im * &rhs.den + &rhs.num_im * &self.den,
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::normalized(
            &self.num_re * &rhs.den - &rhs.num_re * &self.den,
            &self.num_im * &rhs.den - &rhs.num_im * &self.den,
            &self.den * &rhs.den,
        )
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::normalized(
            &self.num_re * &rhs.num_re - &self.num_im * &rhs.num_im,
            &self.num_re * &rhs.num_im + &self.num_im * &rhs.num_re,
            &self.den * &rhs.den,
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            num_re: -self.num_re.clone(),
            num_im: -self.num_im.clone(),
            den: self.den.clone(),
        }
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

/// Text format: `a/b+c/di` with both parts optional, e.g. `3/5+4/5i`,
/// `-1`, `i`, `2i`, `1-2i`. Pure-unit imaginary parts print as `i`/`-i`;
/// the parser additionally accepts `1i`. Printing then parsing is exact.
impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn rational(num: &BigInt, den: &BigInt, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if den.is_one() {
                write!(f, "{num}")
            } else {
                write!(f, "{num}/{den}")
            }
        }
        fn imaginary(num: &BigInt, den: &BigInt, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if den.is_one() && num.magnitude().is_one() {
                if num.is_negative() {
                    write!(f, "-i")
                } else {
                    write!(f, "i")
                }
            } else {
                rational(num, den, f)?;
                write!(f, "i")
            }
        }

        if self.is_zero() {
            return write!(f, "0");
        }
        if self.num_im.is_zero() {
            return rational(&self.num_re, &self.den, f);
        }
        if self.num_re.is_zero() {
            return imaginary(&self.num_im, &self.den, f);
        }
        rational(&self.num_re, &self.den, f)?;
        if !self.num_im.is_negative() {
            write!(f, "+")?;
        }
        imaginary(&self.num_im, &self.den, f)
    }
}

impl FromStr for GaussianRational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

struct NumParser<'a> {
    bytes: &'a [u8],
    pos: usize,
    /// Byte offset of `bytes[0]` in the original input, for error positions.
    offset: usize,
}

impl<'a> NumParser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.offset + self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn parse_sum(&mut self) -> Result<GaussianRational> {
        self.skip_ws();
        let mut total = self.parse_signed_part()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') | Some(b'-') => {
                    let next = self.parse_signed_part()?;
                    if (total.1 && next.1) || (!total.1 && !next.1) {
                        return Err(self.err("duplicate real or imaginary part"));
                    }
                    total = (&total.0 + &next.0, true);
                }
                None => break,
                _ => return Err(self.err("expected '+', '-', or end of number")),
            }
        }
        Ok(total.0)
    }

    /// One signed part; the bool records whether it was imaginary.
    fn parse_signed_part(&mut self) -> Result<(GaussianRational, bool)> {
        self.skip_ws();
        let mut negative = false;
        match self.peek() {
            Some(b'+') => self.pos += 1,
            Some(b'-') => {
                negative = true;
                self.pos += 1;
            }
            _ => {}
        }
        self.skip_ws();
        let (mut value, imaginary) = self.parse_unsigned_part()?;
        if negative {
            value = -value;
        }
        Ok((value, imaginary))
    }

    fn parse_unsigned_part(&mut self) -> Result<(GaussianRational, bool)> {
        if self.peek() == Some(b'i') {
            self.pos += 1;
            return Ok((GaussianRational::i(), true));
        }
        let num = self.parse_digits()?;
        let den = if self.peek() == Some(b'/') {
            self.pos += 1;
            let d = self.parse_digits()?;
            if d.is_zero() {
                return Err(self.err("zero denominator"));
            }
            d
        } else {
            BigInt::one()
        };
        if self.peek() == Some(b'i') {
            self.pos += 1;
            Ok((GaussianRational::normalized(BigInt::zero(), num, den), true))
        } else {
            Ok((GaussianRational::normalized(num, BigInt::zero(), den), false))
        }
    }

    fn parse_digits(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected digits"));
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        Ok(s.parse::<BigInt>().unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(re: i64, im: i64, den: i64) -> GaussianRational {
        GaussianRational::from_parts(re, im, den).unwrap()
    }

    #[test]
    fn normalization_shares_one_denominator() {
        let z = q(2, 4, 6);
        assert_eq!(z, q(1, 2, 3));
        assert_eq!(q(-1, 0, -2), q(1, 0, 2));
        assert_eq!(q(0, 0, 17), GaussianRational::zero());
    }

    #[test]
    fn field_operations() {
        let a = q(1, 1, 2); // (1+i)/2
        let b = q(0, 1, 1); // i
        assert_eq!(&a * &b, q(-1, 1, 2));
        assert_eq!(&a + &b, q(1, 3, 2));
        assert_eq!(&a - &a, GaussianRational::zero());
        assert_eq!(a.div(&a).unwrap(), GaussianRational::one());
        // (1+i)/2 * (1-i) = 1
        assert_eq!(&a * &q(1, -1, 1), GaussianRational::one());
        assert_eq!(a.inv().unwrap(), q(1, -1, 1));
    }

    #[test]
    fn powers_with_negative_exponent() {
        let z = q(1, 1, 1);
        assert_eq!(z.pow(2).unwrap(), q(0, 2, 1));
        assert_eq!(z.pow(-2).unwrap(), q(0, -1, 2));
        assert_eq!(z.pow(0).unwrap(), GaussianRational::one());
        assert!(GaussianRational::zero().pow(-1).is_err());
    }

    #[test]
    fn display_matches_expected_forms() {
        assert_eq!(q(3, 4, 5).to_string(), "3/5+4/5i");
        assert_eq!(q(-1, 0, 1).to_string(), "-1");
        assert_eq!(q(0, 1, 1).to_string(), "i");
        assert_eq!(q(0, 2, 1).to_string(), "2i");
        assert_eq!(q(1, -2, 1).to_string(), "1-2i");
        assert_eq!(q(0, -1, 1).to_string(), "-i");
        assert_eq!(q(0, 0, 1).to_string(), "0");
        assert_eq!(q(-1, -1, 2).to_string(), "-1/2-1/2i");
    }

    #[test]
    fn parse_accepts_variants() {
        assert_eq!(GaussianRational::parse("1+1i").unwrap(), q(1, 1, 1));
        assert_eq!(GaussianRational::parse("  -i ").unwrap(), q(0, -1, 1));
        assert_eq!(GaussianRational::parse("4/5i").unwrap(), q(0, 4, 5));
        assert_eq!(GaussianRational::parse("2i+1").unwrap(), q(1, 2, 1));
        assert!(GaussianRational::parse("1+2").is_err());
        assert!(GaussianRational::parse("i+i").is_err());
        assert!(GaussianRational::parse("1/0").is_err());
        assert!(GaussianRational::parse("").is_err());
    }

    #[test]
    fn parse_error_positions_point_into_input() {
        match GaussianRational::parse("3/5+4/5j") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 7),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
