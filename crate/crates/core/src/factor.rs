//! Factorization of Gaussian rationals into canonical Gaussian primes.
//!
//! Every nonzero z in Q(i) factors uniquely as i^u * prod p_j^{e_j} with
//! canonical primes p_j (re > 0, im >= 0) and e_j in Z. The ramified prime
//! above 2 is 1+i; a rational prime p = 3 mod 4 stays prime; p = 1 mod 4
//! splits into a conjugate pair, both associates normalized canonically.
//!
//! The norm is factored by trial division, so inputs are expected at desk
//! scale (norms around 10^12 or smaller stay fast).

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gaussian::GaussianRational;
use crate::gaussint::GaussInt;

/// `i^unit_exp * prod factors[j].0 ^ factors[j].1`, primes canonical and
/// sorted by (norm, re, im); exponents are nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussianFactorization {
    pub unit_exp: u8,
    pub factors: Vec<(GaussInt, i64)>,
}

impl GaussianFactorization {
    /// Multiplies the factorization back out.
    pub fn reconstruct(&self) -> GaussianRational {
        let mut acc = GaussianRational::i().pow(self.unit_exp as i64).unwrap();
        for (p, e) in &self.factors {
            let q = GaussianRational::new(p.re.clone(), p.im.clone(), BigInt::one()).unwrap();
            acc = &acc * &q.pow(*e).unwrap();
        }
        acc
    }
}

/// Factors a nonzero Gaussian rational into canonical Gaussian primes.
pub fn gauss_factor(z: &GaussianRational) -> Result<GaussianFactorization> {
    if z.is_zero() {
        return Err(Error::ZeroArgument("factorization argument"));
    }
    let numerator = GaussInt { re: z.num_re().clone(), im: z.num_im().clone() };
    let denominator = GaussInt { re: z.den().clone(), im: BigInt::zero() };

    let (num_unit, num_factors) = factor_gauss_integer(&numerator);
    let (den_unit, den_factors) = factor_gauss_integer(&denominator);

    let mut merged: std::collections::BTreeMap<(BigInt, BigInt, BigInt), i64> =
        std::collections::BTreeMap::new();
    let mut insert = |p: GaussInt, e: i64| {
        let key = (p.norm(), p.re, p.im);
        *merged.entry(key).or_insert(0) += e;
    };
    for (p, e) in num_factors {
        insert(p, e);
    }
    for (p, e) in den_factors {
        insert(p, -e);
    }

    let factors: Vec<(GaussInt, i64)> = merged
        .into_iter()
        .filter(|(_, e)| *e != 0)
        .map(|((_, re, im), e)| (GaussInt { re, im }, e))
        .collect();

    // unit(num) / unit(den) = i^(num - den mod 4).
    let unit_exp = (4 + num_unit - den_unit) % 4;
    Ok(GaussianFactorization { unit_exp, factors })
}

/// Factors a nonzero Gaussian integer; returns (unit exponent, prime powers).
fn factor_gauss_integer(g: &GaussInt) -> (u8, Vec<(GaussInt, i64)>) {
    debug_assert!(!g.is_zero());
    let mut rest = g.clone();
    let mut factors: Vec<(GaussInt, i64)> = Vec::new();

    for p in rational_prime_divisors(&rest.norm()) {
        if p == 2 {
            let ramified = GaussInt::new(1, 1);
            let e = divide_out(&mut rest, &ramified);
            if e > 0 {
                factors.push((ramified, e));
            }
        } else if p % 4 == 3 {
            let inert = GaussInt::new(BigInt::from(p), BigInt::zero());
            let e = divide_out(&mut rest, &inert);
            if e > 0 {
                factors.push((inert, e));
            }
        } else {
            // p = 1 mod 4 splits; find a square root of -1 mod p, then the
            // prime above p is gcd(p, c + i).
            let c = sqrt_minus_one(p);
            let pi = GaussInt::new(BigInt::from(p), BigInt::zero())
                .gcd(&GaussInt::new(BigInt::from(c), BigInt::one()));
            let pi_bar = pi.conj().canonical().0;
            let e = divide_out(&mut rest, &pi);
            if e > 0 {
                factors.push((pi.clone(), e));
            }
            let e_bar = divide_out(&mut rest, &pi_bar);
            if e_bar > 0 {
                factors.push((pi_bar, e_bar));
            }
        }
    }

    debug_assert!(rest.is_unit(), "all prime content removed");
    let (c, unit_exp) = rest.canonical();
    debug_assert!(c.is_one());
    factors.sort_by_key(|(p, _)| (p.norm(), p.re.clone(), p.im.clone()));
    (unit_exp, factors)
}

/// Divides `g` by the canonical prime `p` as often as possible.
fn divide_out(g: &mut GaussInt, p: &GaussInt) -> i64 {
    let mut e = 0;
    while let Some(q) = g.div_exact(p) {
        *g = q;
        e += 1;
    }
    e
}

/// Distinct rational primes dividing n > 0, ascending.
fn rational_prime_divisors(n: &BigInt) -> Vec<u64> {
    let mut primes = Vec::new();
    if let Some(mut m) = n.to_u128() {
        let mut d: u128 = 2;
        while d * d <= m {
            if m % d == 0 {
                primes.push(d as u64);
                while m % d == 0 {
                    m /= d;
                }
            }
            d += if d == 2 { 1 } else { 2 };
        }
        if m > 1 {
            primes.push(u64::try_from(m).expect("residual prime of a desk-scale norm"));
        }
        return primes;
    }
    // Beyond u128 norms: trial-divide with big integers (slow, correct).
    let mut m = n.clone();
    let mut d = BigInt::from(2u8);
    while &d * &d <= m {
        if (&m % &d).is_zero() {
            primes.push(d.to_u64().expect("trial divisor fits u64"));
            while (&m % &d).is_zero() {
                m /= &d;
            }
        }
        d += 1u8;
    }
    if m > BigInt::one() {
        primes.push(m.to_u64().expect("residual prime of a desk-scale norm"));
    }
    primes
}

/// A square root of -1 modulo a prime p = 1 mod 4, via c = a^((p-1)/4) for
/// the first quadratic non-residue a.
fn sqrt_minus_one(p: u64) -> u64 {
    for a in 2..p {
        let c = pow_mod(a, (p - 1) / 4, p);
        if mul_mod(c, c, p) == p - 1 {
            return c;
        }
    }
    unreachable!("a non-residue exists below every split prime");
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(re: i64, im: i64, den: i64) -> GaussianRational {
        GaussianRational::from_parts(re, im, den).unwrap()
    }

    #[test]
    fn two_is_a_unit_times_the_ramified_square() {
        // 2 = i^3 * (1+i)^2
        let f = gauss_factor(&q(2, 0, 1)).unwrap();
        assert_eq!(f.unit_exp, 3);
        assert_eq!(f.factors, vec![(GaussInt::new(1, 1), 2)]);
        assert_eq!(f.reconstruct(), q(2, 0, 1));
    }

    #[test]
    fn units_have_empty_factor_lists() {
        for (z, u) in [(q(1, 0, 1), 0u8), (q(0, 1, 1), 1), (q(-1, 0, 1), 2), (q(0, -1, 1), 3)] {
            let f = gauss_factor(&z).unwrap();
            assert_eq!(f.unit_exp, u);
            assert!(f.factors.is_empty());
        }
    }

    #[test]
    fn split_prime_quotient() {
        // (3+4i)/5 = i * (2+i) * (1+2i)^(-1): numerator (2+i)^2, denominator
        // (2+i)(2-i) with 2-i = i^3 (1+2i).
        let f = gauss_factor(&q(3, 4, 5)).unwrap();
        assert_eq!(f.factors, vec![(GaussInt::new(1, 2), -1), (GaussInt::new(2, 1), 1)]);
        assert_eq!(f.reconstruct(), q(3, 4, 5));
        assert_eq!(f.unit_exp, 1);
    }

    #[test]
    fn inert_primes_stay_whole() {
        let f = gauss_factor(&q(9, 0, 7)).unwrap();
        assert_eq!(
            f.factors,
            vec![(GaussInt::new(3, 0), 2), (GaussInt::new(7, 0), -1)]
        );
        assert_eq!(f.reconstruct(), q(9, 0, 7));
    }

    #[test]
    fn factoring_zero_is_rejected() {
        assert!(gauss_factor(&GaussianRational::zero()).is_err());
    }
}
