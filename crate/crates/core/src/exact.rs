//! Canonical arbitrary-precision rationals.
//!
//! [`Rational`] is always stored in lowest terms with a positive denominator,
//! so the denominator can be read directly by the valuation code.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `num/den` in canonical form. The sign ends up on the numerator.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(num.into(), den)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// `1/k`. Panics if `k == 0`.
    pub fn unit_fraction(k: u64) -> Self {
        assert!(k != 0, "unit fraction with zero denominator");
        Rational(BigRational::new_raw(BigInt::one(), BigInt::from(k)))
    }

    /// `self + 1/k`.
    pub fn add_unit_fraction(&self, k: u64) -> Rational {
        assert!(k != 0, "unit fraction with zero denominator");
        let d = BigInt::from(k);
        let primes = prime_factors(k);
        add_with_primes(self, &BigInt::one(), &d, &primes)
    }

    /// `self + rhs`, skipping the full big-integer gcd when one denominator
    /// splits over primes below [`SMALL_PRIME_LIMIT`].
    ///
    /// For `a/b + c/d` in lowest terms with `g = gcd(b, d)`, the unreduced sum
    /// is `(a·(d/g) + c·(b/g)) / (b·(d/g))` and every prime dividing both
    /// parts also divides `d`. Stripping those primes alone gives lowest terms.
    pub fn add_fast(&self, rhs: &Rational) -> Rational {
        let (big, small) = if self.denom().bits() >= rhs.denom().bits() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        match small_prime_factors(small.denom()) {
            Some(primes) => add_with_primes(big, small.numer(), small.denom(), &primes),
            None => self + rhs,
        }
    }

    /// `self * m` with a gcd taken only against `m`.
    pub fn mul_integer(&self, m: &BigInt) -> Rational {
        if m.is_zero() {
            return Rational::zero();
        }
        let g = (self.denom() % m).gcd(m);
        Rational(BigRational::new_raw(self.numer() * (m / &g), self.denom() / &g))
    }

    /// Whether `self == x + y`, decided by cross-multiplication without
    /// reducing the sum.
    pub fn is_sum_of(&self, x: &Rational, y: &Rational) -> bool {
        let lhs = self.numer() * x.denom() * y.denom();
        let rhs = (x.numer() * y.denom() + y.numer() * x.denom()) * self.denom();
        lhs == rhs
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    pub fn recip(&self) -> Result<Rational> {
        Rational::one().checked_div(self)
    }
}

/// Trial-division bound for [`Rational::add_fast`].
pub const SMALL_PRIME_LIMIT: u64 = 1 << 16;

/// Distinct prime factors of `d` if all of them are below
/// [`SMALL_PRIME_LIMIT`].
fn small_prime_factors(d: &BigInt) -> Option<Vec<u64>> {
    if d.bits() > 1024 {
        return None;
    }
    let mut out = Vec::new();
    if let Some(mut k) = d.to_u64() {
        let mut q = 2;
        while q < SMALL_PRIME_LIMIT && q * q <= k {
            if k % q == 0 {
                out.push(q);
                while k % q == 0 {
                    k /= q;
                }
            }
            q += 1;
        }
        return match k {
            1 => Some(out),
            k if k < SMALL_PRIME_LIMIT => {
                out.push(k);
                Some(out)
            }
            // k is prime (q passed its square root) or has a factor >= limit
            _ => None,
        };
    }
    let mut rest = d.clone();
    for q in 2..SMALL_PRIME_LIMIT {
        if (&rest % q).is_zero() {
            out.push(q);
            while (&rest % q).is_zero() {
                rest /= q;
            }
            if let Some(k) = rest.to_u64() {
                return small_prime_factors(&BigInt::from(k)).map(|tail| {
                    out.extend(tail.into_iter().filter(|&p| p > q));
                    out
                });
            }
        }
    }
    None
}

fn add_with_primes(x: &Rational, c: &BigInt, d: &BigInt, primes: &[u64]) -> Rational {
    let (a, b) = (x.numer(), x.denom());
    let g = (b % d).gcd(d);
    let (b_g, d_g) = (b / &g, d / &g);
    let mut num = a * &d_g + c * &b_g;
    let mut den = b * &d_g;
    if num.is_zero() {
        return Rational::zero();
    }
    for &q in primes {
        let q = BigInt::from(q);
        loop {
            let (nq, nr) = num.div_rem(&q);
            if !nr.is_zero() {
                break;
            }
            let (dq, dr) = den.div_rem(&q);
            if !dr.is_zero() {
                break;
            }
            num = nq;
            den = dq;
        }
    }
    Rational(BigRational::new_raw(num, den))
}

fn prime_factors(mut k: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= k {
        if k.is_multiple_of(q) {
            out.push(q);
            while k.is_multiple_of(q) {
                k /= q;
            }
        }
        q += 1;
    }
    if k > 1 {
        out.push(k);
    }
    out
}

/// Sums the terms pairwise as a balanced tree, which keeps operand sizes
/// matched and avoids the quadratic blow-up of a left fold.
pub fn sum_balanced(terms: &[Rational]) -> Rational {
    match terms.len() {
        0 => Rational::zero(),
        1 => terms[0].clone(),
        len => {
            let (lo, hi) = terms.split_at(len / 2);
            sum_balanced(lo) + sum_balanced(hi)
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(self.0, rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational($trait::$method(self.0, &rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(&self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Mul<&BigInt> for &Rational {
    type Output = Rational;
    fn mul(self, rhs: &BigInt) -> Rational {
        Rational(&self.0 * BigRational::from_integer(rhs.clone()))
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

fn parse_digits(s: &str, allow_minus: bool) -> Option<BigInt> {
    let digits = match s.strip_prefix('-') {
        Some(rest) if allow_minus => rest,
        Some(_) => return None,
        None => s,
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s).ok()
}

/// Accepts `"p/q"` or `"p"` with decimal digits and an optional leading minus
/// on the numerator. Non-reduced input is canonicalized.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(s.to_string());
        match s.split_once('/') {
            None => parse_digits(s, true).map(Rational::from_integer).ok_or_else(bad),
            Some((p, q)) => {
                let num = parse_digits(p, true).ok_or_else(bad)?;
                let den = parse_digits(q, false).ok_or_else(bad)?;
                Rational::new(num, den)
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
