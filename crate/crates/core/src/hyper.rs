//! Harmonic and hyperharmonic numbers, and r-Stirling cycle numbers.
//!
//! `H_n^(1) = H_n` and `H_n^(r) = Σ_{k<=n} H_k^(r-1)`. The closed form
//! `H_n^(r) = C(n+r-1, r-1) (H_{n+r-1} − H_{r-1})` and the identity
//! `n! H_n^(r) = [n+r, r+1]_r` tie the three families together.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::padic::binomial;

/// `Σ_{k=a}^{b} 1/k`, summed as a balanced tree. Empty when `a > b`.
pub fn reciprocal_sum(a: u64, b: u64) -> Rational {
    if a > b {
        return Rational::zero();
    }
    assert!(a >= 1, "reciprocal of zero");
    if b - a < 4 {
        return (a..=b)
            .map(Rational::unit_fraction)
            .fold(Rational::zero(), |acc, t| acc + t);
    }
    let mid = a + (b - a) / 2;
    reciprocal_sum(a, mid) + reciprocal_sum(mid + 1, b)
}

/// `H_n`, with `H_0 = 0`.
pub fn harmonic(n: u64) -> Rational {
    reciprocal_sum(1, n)
}

/// `[H_0, H_1, …, H_n]` by incremental summation. Useful when a whole prefix
/// of harmonic numbers is needed.
pub fn harmonic_prefix(n: u64) -> Vec<Rational> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = Rational::zero();
    out.push(acc.clone());
    for k in 1..=n {
        acc = acc.add_unit_fraction(k);
        out.push(acc.clone());
    }
    out
}

/// `H_n^(r)` from the defining iterated sums, one row at a time.
pub fn hyperharmonic_rec(n: u64, r: u64) -> Rational {
    assert!(n >= 1 && r >= 1, "hyperharmonic indices start at 1");
    let mut row = harmonic_prefix(n);
    row.remove(0);
    for _ in 1..r {
        let mut acc = Rational::zero();
        for slot in row.iter_mut() {
            acc = &acc + &*slot;
            *slot = acc.clone();
        }
    }
    row.pop().expect("n >= 1")
}

/// The pieces of the closed form, kept for display.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedForm {
    pub n: u64,
    pub r: u64,
    /// `C(n+r-1, r-1)`
    #[serde(serialize_with = "ser_display")]
    pub binomial: BigInt,
    /// `H_{n+r-1}`
    pub upper: Rational,
    /// `H_{r-1}`
    pub lower: Rational,
    pub value: Rational,
}

fn ser_display<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(x)
}

pub fn closed_form(n: u64, r: u64) -> ClosedForm {
    assert!(n >= 1 && r >= 1, "hyperharmonic indices start at 1");
    let binomial = binomial(n + r - 1, r - 1);
    let upper = harmonic(n + r - 1);
    let lower = harmonic(r - 1);
    let value = upper.add_fast(&-&lower).mul_integer(&binomial);
    ClosedForm {
        n,
        r,
        binomial,
        upper,
        lower,
        value,
    }
}

/// `H_n^(r) = C(n+r-1, r-1) (H_{n+r-1} − H_{r-1})`.
pub fn hyperharmonic_closed(n: u64, r: u64) -> Rational {
    closed_form(n, r).value
}

/// Closed form evaluated against a precomputed harmonic prefix; `prefix`
/// must reach `H_{n+r-1}`.
pub fn hyperharmonic_from_prefix(prefix: &[Rational], n: u64, r: u64) -> Rational {
    assert!(n >= 1 && r >= 1, "hyperharmonic indices start at 1");
    let top = (n + r - 1) as usize;
    assert!(top < prefix.len(), "harmonic prefix too short for H_{top}");
    prefix[top]
        .add_fast(&-&prefix[r as usize - 1])
        .mul_integer(&binomial(n + r - 1, r - 1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HyperharmonicValue {
    pub n: u64,
    pub r: u64,
    pub value: Rational,
}

impl HyperharmonicValue {
    pub fn new(n: u64, r: u64) -> Self {
        HyperharmonicValue {
            n,
            r,
            value: hyperharmonic_closed(n, r),
        }
    }
}

/// r-Stirling numbers of the first kind `[n, k]_r` for `r <= k <= n <= max_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StirlingTable {
    r: u64,
    max_n: u64,
    // rows[i] holds n = r + i, columns k = r..=n
    rows: Vec<Vec<BigInt>>,
}

impl StirlingTable {
    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn max_n(&self) -> u64 {
        self.max_n
    }

    /// `[n, k]_r`; zero outside `r <= k <= n`. Panics if `n > max_n`.
    pub fn entry(&self, n: u64, k: u64) -> BigInt {
        assert!(n <= self.max_n, "row {n} beyond table bound {}", self.max_n);
        if n < self.r || k < self.r || k > n {
            return BigInt::zero();
        }
        self.rows[(n - self.r) as usize][(k - self.r) as usize].clone()
    }
}

/// Builds the table from `[n, k]_r = (n−1)[n−1, k]_r + [n−1, k−1]_r` for
/// `n > r`, with base row `[r, k]_r = [k = r]`.
pub fn rstirling_table(r: u64, max_n: u64) -> Result<StirlingTable> {
    if max_n < r {
        return Err(Error::InvalidRange(format!(
            "r-Stirling table needs max_n >= r, got max_n = {max_n}, r = {r}"
        )));
    }
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity((max_n - r + 1) as usize);
    rows.push(vec![BigInt::one()]);
    for n in r + 1..=max_n {
        let prev = rows.last().expect("base row");
        let width = (n - r + 1) as usize;
        let row = (0..width)
            .map(|j| {
                let stay = prev.get(j).map(|e| e * (n - 1)).unwrap_or_default();
                let join = if j > 0 { prev[j - 1].clone() } else { BigInt::zero() };
                stay + join
            })
            .collect();
        rows.push(row);
    }
    Ok(StirlingTable { r, max_n, rows })
}

pub const BRUTE_MAX_N: usize = 9;

/// Counts, for each `k`, the permutations of `{1..n}` with exactly `k` cycles
/// in which `1..r` lie in distinct cycles. Index `k` of the result.
pub fn rstirling_brute_row(n: usize, r: usize) -> Result<Vec<BigInt>> {
    if n > BRUTE_MAX_N {
        return Err(Error::EnumerationBound { n, max: BRUTE_MAX_N });
    }
    let mut counts = vec![0u64; n + 1];
    if r > n {
        return Ok(counts.into_iter().map(BigInt::from).collect());
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut tally = |perm: &[usize]| {
        if let Some(k) = restricted_cycle_count(perm, r) {
            counts[k] += 1;
        }
    };
    // Heap's algorithm, iterative form.
    let mut c = vec![0usize; n];
    tally(&perm);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            tally(&perm);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(counts.into_iter().map(BigInt::from).collect())
}

/// Number of cycles of `perm`, or `None` if two of the first `r` elements
/// share a cycle.
fn restricted_cycle_count(perm: &[usize], r: usize) -> Option<usize> {
    let mut seen = 0u32;
    let mut cycles = 0;
    for start in 0..perm.len() {
        if seen & (1 << start) != 0 {
            continue;
        }
        cycles += 1;
        let mut restricted = 0;
        let mut x = start;
        while seen & (1 << x) == 0 {
            seen |= 1 << x;
            if x < r {
                restricted += 1;
            }
            x = perm[x];
        }
        if restricted > 1 {
            return None;
        }
    }
    Some(cycles)
}

/// `[n, k]_r` by direct enumeration of all `n!` permutations.
pub fn rstirling_brute(n: usize, k: usize, r: usize) -> Result<BigInt> {
    let row = rstirling_brute_row(n, r)?;
    Ok(row.get(k).cloned().unwrap_or_default())
}

/// `n!`
pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}
