//! 2-adic norms of harmonic and hyperharmonic numbers from binary digit sums.
//!
//! With `t = n + r − 1`, the binomial factor of the closed form contributes
//! `ν_2 C(t, r−1) = A_2(n) + A_2(r−1) − A_2(t)` and the harmonic difference
//! `H_t − H_{r−1} = 1/r + … + 1/t` has 2-adic norm `2^v`, where `v` is the
//! largest 2-adic valuation of an integer in `[r, t]`. When `ord2(t) >
//! ord2(r−1)` that integer is a power of two and `v = ord2(t)`.
//!
//! Nothing on this path touches a rational: a handful of word operations
//! replace an exact sum whose denominator has tens of thousands of bits.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exact::Rational;
use crate::hyper::{harmonic, hyperharmonic_closed};
use crate::padic::{digit_sum, nu2, ord2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormCase {
    /// Plain harmonic number, no binomial factor.
    Harmonic,
    /// `ord2(n+r−1) > ord2(r−1)`, including `r = 1`.
    Case1,
    /// `ord2(n+r−1) == ord2(r−1)`.
    Case2,
}

impl fmt::Display for NormCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormCase::Harmonic => "harmonic",
            NormCase::Case1 => "case1",
            NormCase::Case2 => "case2",
        })
    }
}

/// The digit sums and peak valuation the norm was assembled from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormComponents {
    /// `A_2(n+r−1)`
    pub top_digits: u64,
    /// `A_2(n)`
    pub n_digits: u64,
    /// `A_2(r−1)`
    pub lower_digits: u64,
    /// `ord2(n+r−1)` in case 1, the peak valuation over `[r, n+r−1]` in case 2.
    pub peak: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormResult {
    pub n: u64,
    pub r: u64,
    /// `ν_2` of the value; the norm is `2^(−nu2)`.
    pub nu2: i64,
    pub case: NormCase,
    pub components: NormComponents,
}

impl NormResult {
    /// `k` with `|H_n^(r)|_2 = 2^k`.
    pub fn norm_exponent(&self) -> i64 {
        -self.nu2
    }
}

/// `ν_2(H_n) = −ord2(n)`.
pub fn harmonic_norm2(n: u64) -> i64 {
    -(ord2(n).expect("harmonic norm needs n >= 1") as i64)
}

pub fn harmonic_norm_result(n: u64) -> NormResult {
    let peak = ord2(n).expect("harmonic norm needs n >= 1");
    NormResult {
        n,
        r: 1,
        nu2: -(peak as i64),
        case: NormCase::Harmonic,
        components: NormComponents {
            top_digits: digit_sum(2, n),
            n_digits: digit_sum(2, n),
            lower_digits: 0,
            peak,
        },
    }
}

/// Parity of the canonical numerator and 2-adic valuation of the denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HarmonicProfile {
    pub numerator_odd: bool,
    pub denominator_nu2: u64,
}

/// Profile read off the exact value of `H_n`.
pub fn harmonic_profile(n: u64) -> HarmonicProfile {
    assert!(n >= 1, "harmonic profile needs n >= 1");
    profile_of(&harmonic(n))
}

pub fn profile_of(x: &Rational) -> HarmonicProfile {
    HarmonicProfile {
        numerator_odd: x.numer().bit(0),
        denominator_nu2: x.denom().trailing_zeros().unwrap_or(0),
    }
}

/// Profile `H_n = odd / (2^ord2(n) · odd)` predicted without summing.
pub fn predicted_profile(n: u64) -> HarmonicProfile {
    HarmonicProfile {
        numerator_odd: true,
        denominator_nu2: ord2(n).expect("n >= 1") as u64,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RangePeak {
    /// Largest `ν_2(k)` for `k ∈ [a, b]`.
    pub valuation: u32,
    /// The `k` attaining it.
    pub witness: u64,
    /// Whether no other `k ∈ [a, b]` attains it.
    pub unique: bool,
}

/// Peak 2-adic valuation over `[a, b]` in constant time.
///
/// The maximizer keeps the common binary prefix of `a − 1` and `b`, then the
/// first bit where they differ (set in `b`), then zeros.
pub fn max_valuation_in_range(a: u64, b: u64) -> RangePeak {
    assert!(1 <= a && a <= b, "need 1 <= a <= b, got [{a}, {b}]");
    let below = a - 1;
    let h = 63 - (below ^ b).leading_zeros();
    let witness = (b >> h) << h;
    let count = |shift: u32| {
        if shift >= 64 {
            0
        } else {
            (b >> shift) - (below >> shift)
        }
    };
    let at_least_h = count(h);
    let above_h = count(h + 1);
    RangePeak {
        valuation: h,
        witness,
        unique: at_least_h == 1 && above_h == 0,
    }
}

/// Case 1 iff `ord2(n+r−1) > ord2(r−1)`, reading `ord2(0)` as −∞.
pub fn norm2_case(n: u64, r: u64) -> NormCase {
    assert!(n >= 1 && r >= 1, "hyperharmonic indices start at 1");
    let top = n + r - 1;
    let lower = r - 1;
    if lower == 0 || ord2(top).expect("top >= 1") > ord2(lower).expect("lower >= 1") {
        NormCase::Case1
    } else {
        NormCase::Case2
    }
}

/// `ν_2(H_n^(r))` from digit sums alone.
pub fn hyperharmonic_norm2(n: u64, r: u64) -> NormResult {
    let case = norm2_case(n, r);
    let top = n + r - 1;
    let top_digits = digit_sum(2, top);
    let n_digits = digit_sum(2, n);
    let lower_digits = digit_sum(2, r - 1);
    let binomial_exp = top_digits as i64 - n_digits as i64 - lower_digits as i64;
    let peak = match case {
        NormCase::Case2 => max_valuation_in_range(r, top).valuation,
        _ => ord2(top).expect("top >= 1"),
    };
    NormResult {
        n,
        r,
        nu2: -(binomial_exp + peak as i64),
        case,
        components: NormComponents {
            top_digits,
            n_digits,
            lower_digits,
            peak,
        },
    }
}

/// `ν_2(H_n^(r))` from the exact rational value. This is the oracle the fast
/// path is checked against.
pub fn exact_norm2(n: u64, r: u64) -> i64 {
    nu2(&hyperharmonic_closed(n, r)).expect("hyperharmonic numbers are nonzero")
}

/// `H_n^(2) = a/b − 2^m` with `b` odd, for `n = 2^m − 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryWitness {
    pub m: u32,
    /// `a/b = 2^m H_{n+1}`
    pub scaled: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H2Boundary {
    pub n: u64,
    pub nu2: i64,
    /// `n + 1` is a power of two.
    pub at_boundary: bool,
    pub witness: Option<BoundaryWitness>,
}

impl H2Boundary {
    /// True when the witness shows `H_n^(2)` is not an integer: `a/b` has an
    /// odd denominator greater than one.
    pub fn witness_proves_non_integer(&self) -> bool {
        self.witness
            .as_ref()
            .is_some_and(|w| w.scaled.denom().bit(0) && !w.scaled.is_integer())
    }
}

/// Norm of `H_n^(2) = H_1 + … + H_n`; it is 1 exactly when `n + 1` is a
/// power of two, and then the witness decomposition is attached.
pub fn h2_norm_boundary(n: u64) -> H2Boundary {
    let nu2 = hyperharmonic_norm2(n, 2).nu2;
    let at_boundary = (n + 1).is_power_of_two();
    let witness = at_boundary.then(|| {
        let m = (n + 1).trailing_zeros();
        let scaled = &harmonic(n + 1) * &num_bigint::BigInt::from(n + 1);
        BoundaryWitness { m, scaled }
    });
    H2Boundary {
        n,
        nu2,
        at_boundary,
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyper::{harmonic_prefix, hyperharmonic_from_prefix};
    use crate::padic::valuation_u64;
    use num_bigint::BigInt;

    #[test]
    fn harmonic_norm_examples() {
        assert_eq!(harmonic_norm2(2), -1);
        assert_eq!(harmonic_norm2(1), 0);
        assert_eq!(harmonic_norm2(11), -3);
        assert_eq!(nu2(&harmonic(11)), Some(-3));
    }

    #[test]
    fn harmonic_norm_grid() {
        let prefix = harmonic_prefix(4096);
        for n in 1..=4096u64 {
            let exact = nu2(&prefix[n as usize]).unwrap();
            assert_eq!(harmonic_norm2(n), exact, "n={n}");
            assert_eq!(exact, -((63 - n.leading_zeros()) as i64));
        }
    }

    #[test]
    fn halving_recursion_on_exact_values() {
        let prefix = harmonic_prefix(2048);
        let v = |n: u64| nu2(&prefix[n as usize]).unwrap();
        for n in 2..=2048u64 {
            let half = if n % 2 == 0 { n / 2 } else { (n - 1) / 2 };
            assert_eq!(v(n), v(half) - 1, "n={n}");
        }
    }

    #[test]
    fn profiles() {
        assert_eq!(
            harmonic_profile(2),
            HarmonicProfile {
                numerator_odd: true,
                denominator_nu2: 1
            }
        );
        assert_eq!(
            harmonic_profile(6),
            HarmonicProfile {
                numerator_odd: true,
                denominator_nu2: 2
            }
        );
        assert_eq!(
            harmonic_profile(1),
            HarmonicProfile {
                numerator_odd: true,
                denominator_nu2: 0
            }
        );
        let prefix = harmonic_prefix(1024);
        for n in 1..=1024u64 {
            assert_eq!(profile_of(&prefix[n as usize]), predicted_profile(n), "n={n}");
        }
    }

    fn brute_peak(a: u64, b: u64) -> (u32, usize) {
        let vals: Vec<u32> = (a..=b).map(|k| valuation_u64(2, k).unwrap()).collect();
        let max = *vals.iter().max().unwrap();
        (max, vals.iter().filter(|&&v| v == max).count())
    }

    #[test]
    fn range_peak_examples() {
        let p = max_valuation_in_range(5, 6);
        assert_eq!((p.valuation, p.witness, p.unique), (1, 6, true));
        for n in 1..=5000u64 {
            assert_eq!(max_valuation_in_range(1, n).valuation, ord2(n).unwrap());
        }
        let p = max_valuation_in_range(7, 7);
        assert_eq!((p.valuation, p.witness, p.unique), (0, 7, true));
        let p = max_valuation_in_range(1, u64::MAX);
        assert_eq!(p.valuation, 63);
    }

    #[test]
    fn range_peak_matches_sweep() {
        for a in 1..=1500u64 {
            let (mut max, mut count) = (0, 0);
            for b in a..=1500u64 {
                let v = b.trailing_zeros();
                if v > max || count == 0 {
                    max = v;
                    count = 1;
                } else if v == max {
                    count += 1;
                }
                let p = max_valuation_in_range(a, b);
                assert_eq!(p.valuation, max, "[{a},{b}]");
                assert_eq!(p.unique, count == 1, "[{a},{b}]");
                assert_eq!(p.witness.trailing_zeros(), max);
                assert!(a <= p.witness && p.witness <= b);
            }
        }
    }

    /// Two integers in an interval sharing the peak valuation `v` would be
    /// consecutive odd multiples of `2^v`, with a multiple of `2^(v+1)`
    /// between them. Checking every such adjacent pair up to the bound covers
    /// every interval `[a, b]` with `b <= bound`.
    #[test]
    fn range_peak_unique_up_to_1e5() {
        const BOUND: u64 = 100_000;
        for x in 1..=BOUND {
            let v = x.trailing_zeros();
            let y = x + (1u64 << (v + 1));
            if y > BOUND {
                continue;
            }
            assert_eq!(y.trailing_zeros(), v);
            let (inner, _) = brute_peak(x + 1, y - 1);
            assert!(inner > v, "[{x},{y}] has a repeated peak");
        }
    }

    #[test]
    fn range_peak_random_large() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..2000 {
            let a = rng.gen_range(1..=100_000u64);
            let b = rng.gen_range(a..=100_000u64);
            let (v, count) = brute_peak(a, b);
            let p = max_valuation_in_range(a, b);
            assert_eq!(p.valuation, v);
            assert!(p.unique && count == 1);
        }
    }

    #[test]
    fn example_nine_decomposition() {
        let res = hyperharmonic_norm2(18, 8);
        assert_eq!(res.nu2, -2);
        assert_eq!(res.norm_exponent(), 2);
        assert_eq!(res.case, NormCase::Case1);
        let c = res.components;
        assert_eq!((c.top_digits, c.n_digits, c.lower_digits, c.peak), (3, 2, 3, 4));
    }

    #[test]
    fn cases() {
        for n in 1..=500 {
            assert_eq!(norm2_case(n, 2), NormCase::Case1);
            assert_eq!(norm2_case(n, 1), NormCase::Case1);
        }
        assert_eq!(norm2_case(2, 5), NormCase::Case2);
        assert_eq!(norm2_case(1, 5), NormCase::Case2);
    }

    #[test]
    fn discriminating_case_two_cell() {
        let res = hyperharmonic_norm2(2, 5);
        assert_eq!(res.case, NormCase::Case2);
        assert_eq!(res.nu2, -1);
        assert_eq!(hyperharmonic_closed(2, 5), "11/2".parse().unwrap());
        assert_eq!(exact_norm2(2, 5), -1);
        // reading the max norm 2^1 as an exponent would give 2^(0 + 2)
        let literal =
            res.components.top_digits as i64 - res.components.n_digits as i64 - res.components.lower_digits as i64
                + (1i64 << res.components.peak);
        assert_ne!(-literal, exact_norm2(2, 5));
    }

    #[test]
    fn single_element_interval_case_two() {
        // n = 1 makes [r, r] a single element; odd r−1 and r both ≥ 3 land in case 2
        for r in 2..=200u64 {
            let res = hyperharmonic_norm2(1, r);
            assert_eq!(res.nu2, 0, "H_1^({r}) = 1");
        }
    }

    #[test]
    fn reduces_to_harmonic_at_r_one() {
        for n in 1..=2000 {
            assert_eq!(hyperharmonic_norm2(n, 1).nu2, harmonic_norm2(n));
            assert_eq!(harmonic_norm_result(n).nu2, harmonic_norm2(n));
        }
    }

    #[test]
    fn fast_norm_matches_exact_grid() {
        let prefix = harmonic_prefix(256 + 64);
        for n in 1..=256u64 {
            for r in 1..=64u64 {
                let exact = nu2(&hyperharmonic_from_prefix(&prefix, n, r)).unwrap();
                assert_eq!(hyperharmonic_norm2(n, r).nu2, exact, "n={n} r={r}");
            }
        }
    }

    #[test]
    fn h2_boundary() {
        let b3 = h2_norm_boundary(3);
        assert_eq!(b3.nu2, 0);
        assert!(b3.at_boundary);
        let w = b3.witness.clone().unwrap();
        assert_eq!(w.m, 2);
        assert_eq!(w.scaled, "25/3".parse().unwrap());
        assert_eq!(
            &w.scaled - &Rational::from_integer(BigInt::from(4)),
            hyperharmonic_closed(3, 2)
        );
        assert!(b3.witness_proves_non_integer());

        let b2 = h2_norm_boundary(2);
        assert!(b2.nu2 < 0 && !b2.at_boundary && b2.witness.is_none());

        let b1 = h2_norm_boundary(1);
        assert!(b1.at_boundary);
        assert_eq!(hyperharmonic_closed(1, 2), Rational::one());
        assert!(!b1.witness_proves_non_integer());

        for n in 2..=600u64 {
            let b = h2_norm_boundary(n);
            assert_eq!(b.nu2 == 0, b.at_boundary, "n={n}");
            if b.at_boundary {
                assert!(b.witness_proves_non_integer(), "n={n}");
            }
        }
    }
}
