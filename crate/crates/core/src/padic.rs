//! p-adic valuations of integers, rationals, factorials and binomials.
//!
//! Norms are never materialized: `|x|_p = p^(-v)` is represented by the
//! exponent `v`, so a larger norm is a smaller valuation.

use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::Rational;

/// Largest prime accepted by [`Prime::new`]; validation is trial division.
pub const PRIME_LIMIT: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub const TWO: Prime = Prime(2);

    pub fn new(p: u64) -> Result<Prime> {
        if p > PRIME_LIMIT || !is_small_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

fn is_small_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A valuation exponent. `Infinity` is the valuation of zero and compares
/// greater than every finite exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    Finite(i64),
    Infinity,
}

impl Order {
    pub fn finite(self) -> Option<i64> {
        match self {
            Order::Finite(v) => Some(v),
            Order::Infinity => None,
        }
    }
}

impl Add for Order {
    type Output = Order;
    fn add(self, rhs: Order) -> Order {
        match (self, rhs) {
            (Order::Finite(a), Order::Finite(b)) => Order::Finite(a + b),
            _ => Order::Infinity,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(v) => write!(f, "{v}"),
            Order::Infinity => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Valuation {
    pub prime: Prime,
    pub order: Order,
}

impl Valuation {
    pub fn exponent(&self) -> Option<i64> {
        self.order.finite()
    }

    pub fn is_infinite(&self) -> bool {
        self.order == Order::Infinity
    }

    /// `k` such that `|x|_p = p^k`; `None` for `x = 0` (norm 0).
    pub fn norm_exponent(&self) -> Option<i64> {
        self.exponent().map(|v| -v)
    }
}

/// Largest `e` with `p^e | n`; infinite for `n = 0`.
pub fn valuation_int(p: u64, n: &BigInt) -> Result<Valuation> {
    let prime = Prime::new(p)?;
    Ok(Valuation {
        prime,
        order: int_order(prime, n),
    })
}

fn int_order(prime: Prime, n: &BigInt) -> Order {
    if n.is_zero() {
        return Order::Infinity;
    }
    if prime.0 == 2 {
        return Order::Finite(n.trailing_zeros().unwrap_or(0) as i64);
    }
    let p = BigInt::from(prime.0);
    let mut m = n.clone();
    let mut e = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Order::Finite(e);
        }
        m = q;
        e += 1;
    }
}

/// `ν_p(num) − ν_p(den)` of a canonical rational.
pub fn valuation_rat(p: u64, x: &Rational) -> Result<Valuation> {
    let prime = Prime::new(p)?;
    let order = match int_order(prime, x.numer()) {
        Order::Infinity => Order::Infinity,
        Order::Finite(a) => {
            let b = int_order(prime, x.denom()).finite().expect("denominator is nonzero");
            Order::Finite(a - b)
        }
    };
    Ok(Valuation { prime, order })
}

/// Convenience for the common `p = 2` case on a nonzero rational.
pub fn nu2(x: &Rational) -> Option<i64> {
    valuation_rat(2, x).expect("2 is prime").exponent()
}

/// Sum of the base-`p` digits of `n`. Any base `p >= 2` works.
pub fn digit_sum(p: u64, mut n: u64) -> u64 {
    assert!(p >= 2, "digit base must be at least 2");
    if p == 2 {
        return n.count_ones() as u64;
    }
    let mut s = 0;
    while n > 0 {
        s += n % p;
        n /= p;
    }
    s
}

/// The unique `m` with `2^m <= n < 2^(m+1)`.
pub fn ord2(n: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::OrdOfZero);
    }
    Ok(63 - n.leading_zeros())
}

/// `ν_p(n!) = (n − A_p(n)) / (p − 1)`.
pub fn factorial_valuation(p: u64, n: u64) -> Result<u64> {
    let p = Prime::new(p)?.get();
    let diff = n - digit_sum(p, n);
    debug_assert_eq!(diff % (p - 1), 0);
    Ok(diff / (p - 1))
}

/// `ν_2(C(n, k)) = A_2(k) + A_2(n − k) − A_2(n)`, the number of carries when
/// adding `k` and `n − k` in binary.
pub fn binomial_valuation2(n: u64, k: u64) -> Result<u64> {
    if k > n {
        return Err(Error::BinomialRange { n, k });
    }
    Ok(digit_sum(2, k) + digit_sum(2, n - k) - digit_sum(2, n))
}

/// `C(n, k)` as a big integer, by the multiplicative formula.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `ν_p` of a machine integer, mostly for tests and small helpers.
pub fn valuation_u64(p: u64, n: u64) -> Option<u32> {
    if n == 0 {
        return None;
    }
    if p == 2 {
        return Some(n.trailing_zeros());
    }
    let mut m = n;
    let mut e = 0;
    while m.is_multiple_of(p) {
        m /= p;
        e += 1;
    }
    Some(e)
}
