//! Verification suites: each formula checked against an exact oracle over a
//! bounded range, reporting every disagreement with its witness.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::fastnorm::{harmonic_norm2, hyperharmonic_norm2, predicted_profile, profile_of, NormCase};
use crate::hyper::{
    factorial, harmonic_prefix, hyperharmonic_from_prefix, rstirling_brute_row, rstirling_table, BRUTE_MAX_N,
};
use crate::padic::{digit_sum, factorial_valuation, nu2, valuation_int};
use crate::search::scan_low_orders;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Suite {
    #[serde(rename = "theorem1")]
    HarmonicNorm,
    #[serde(rename = "lemma3")]
    Legendre,
    #[serde(rename = "theorem5")]
    HyperharmonicNorm,
    #[serde(rename = "corollaries")]
    LowOrders,
    #[serde(rename = "stirling")]
    Stirling,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "theorem1" => Suite::HarmonicNorm,
            "lemma3" => Suite::Legendre,
            "theorem5" => Suite::HyperharmonicNorm,
            "corollaries" => Suite::LowOrders,
            "stirling" => Suite::Stirling,
            other => return Err(Error::InvalidRange(format!("unknown suite {other:?}"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::HarmonicNorm => "theorem1",
            Suite::Legendre => "lemma3",
            Suite::HyperharmonicNorm => "theorem5",
            Suite::LowOrders => "corollaries",
            Suite::Stirling => "stirling",
        })
    }
}

/// Bounds for a suite. `r_max` is ignored by suites without an `r` axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub n_max: u64,
    pub r_max: u64,
}

impl Suite {
    pub fn default_bounds(self) -> Bounds {
        match self {
            Suite::HarmonicNorm => Bounds { n_max: 4096, r_max: 1 },
            Suite::Legendre => Bounds { n_max: 2000, r_max: 1 },
            Suite::HyperharmonicNorm => Bounds { n_max: 256, r_max: 64 },
            Suite::LowOrders => Bounds { n_max: 4096, r_max: 3 },
            Suite::Stirling => Bounds {
                n_max: BRUTE_MAX_N as u64,
                r_max: 10,
            },
        }
    }

    /// Largest bounds the suite accepts.
    pub fn limits(self) -> Bounds {
        match self {
            Suite::HarmonicNorm => Bounds {
                n_max: 1 << 16,
                r_max: 1,
            },
            Suite::Legendre => Bounds {
                n_max: 10_000,
                r_max: 1,
            },
            Suite::HyperharmonicNorm => Bounds {
                n_max: 1024,
                r_max: 256,
            },
            Suite::LowOrders => Bounds {
                n_max: 1 << 15,
                r_max: 3,
            },
            Suite::Stirling => Bounds {
                n_max: BRUTE_MAX_N as u64,
                r_max: 32,
            },
        }
    }

    pub fn check_bounds(self, b: Bounds) -> Result<()> {
        let lim = self.limits();
        let min_n = if self == Suite::LowOrders { 2 } else { 1 };
        if b.n_max < min_n || b.n_max > lim.n_max {
            return Err(Error::InvalidRange(format!(
                "{self}: --n-max must lie in [{min_n}, {}], got {}",
                lim.n_max, b.n_max
            )));
        }
        if matches!(self, Suite::HyperharmonicNorm | Suite::Stirling) && (b.r_max < 1 || b.r_max > lim.r_max) {
            return Err(Error::InvalidRange(format!(
                "{self}: --r-max must lie in [1, {}], got {}",
                lim.r_max, b.r_max
            )));
        }
        Ok(())
    }
}

/// One disagreement between a formula and its oracle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub check: &'static str,
    pub n: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u64>,
    pub expected: String,
    pub got: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: n={}", self.check, self.n)?;
        if let Some(r) = self.r {
            write!(f, " r={r}")?;
        }
        write!(f, " expected={} got={}", self.expected, self.got)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub bounds: Bounds,
    pub checked: u64,
    pub failures: Vec<Failure>,
    /// Named counts, e.g. how many cells fell in each case.
    pub tallies: Vec<(String, u64)>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn run_suite(suite: Suite, bounds: Bounds) -> Result<VerifyReport> {
    suite.check_bounds(bounds)?;
    let mut report = VerifyReport {
        suite,
        bounds,
        checked: 0,
        failures: Vec::new(),
        tallies: Vec::new(),
    };
    match suite {
        Suite::HarmonicNorm => harmonic_norm(bounds.n_max, &mut report),
        Suite::Legendre => legendre(bounds.n_max, &mut report),
        Suite::HyperharmonicNorm => hyperharmonic_norm(bounds.n_max, bounds.r_max, &mut report),
        Suite::LowOrders => low_orders(bounds.n_max, &mut report)?,
        Suite::Stirling => stirling(bounds.n_max, bounds.r_max, &mut report)?,
    }
    Ok(report)
}

fn fail(
    report: &mut VerifyReport,
    check: &'static str,
    n: u64,
    r: Option<u64>,
    expected: impl ToString,
    got: impl ToString,
) {
    report.failures.push(Failure {
        check,
        n,
        r,
        expected: expected.to_string(),
        got: got.to_string(),
    });
}

fn harmonic_norm(n_max: u64, report: &mut VerifyReport) {
    let prefix = harmonic_prefix(n_max);
    for n in 1..=n_max {
        let h = &prefix[n as usize];
        let exact = nu2(h).expect("H_n > 0");
        let fast = harmonic_norm2(n);
        if fast != exact {
            fail(report, "nu2(H_n)", n, None, exact, fast);
        }
        let profile = profile_of(h);
        let predicted = predicted_profile(n);
        if profile != predicted {
            fail(
                report,
                "profile(H_n)",
                n,
                None,
                format!("{predicted:?}"),
                format!("{profile:?}"),
            );
        }
        report.checked += 1;
    }
}

fn legendre(n_max: u64, report: &mut VerifyReport) {
    for p in [2u64, 3, 5, 7] {
        let mut fact = BigInt::one();
        for n in 0..=n_max {
            if n > 0 {
                fact *= n;
            }
            let direct = valuation_int(p, &fact).expect("prime").exponent().expect("n! > 0");
            let legendre = factorial_valuation(p, n).expect("prime") as i64;
            if direct != legendre {
                fail(report, "nu_p(n!)", n, Some(p), direct, legendre);
            }
            report.checked += 1;
        }
    }
    report.tallies.push(("A_2(11)".into(), digit_sum(2, 11)));
    report
        .tallies
        .push(("nu_2(11!)".into(), factorial_valuation(2, 11).expect("prime")));
}

fn hyperharmonic_norm(n_max: u64, r_max: u64, report: &mut VerifyReport) {
    let prefix = harmonic_prefix(n_max + r_max - 1);
    let (mut case1, mut case2) = (0, 0);
    for n in 1..=n_max {
        for r in 1..=r_max {
            let exact = nu2(&hyperharmonic_from_prefix(&prefix, n, r)).expect("nonzero");
            let fast = hyperharmonic_norm2(n, r);
            match fast.case {
                NormCase::Case2 => case2 += 1,
                _ => case1 += 1,
            }
            if fast.nu2 != exact {
                let check = if fast.case == NormCase::Case2 {
                    "nu2(H_n^r) case2"
                } else {
                    "nu2(H_n^r) case1"
                };
                fail(report, check, n, Some(r), exact, fast.nu2);
            }
            report.checked += 1;
        }
    }
    report.tallies.push(("case1".into(), case1));
    report.tallies.push(("case2".into(), case2));
}

fn low_orders(n_max: u64, report: &mut VerifyReport) -> Result<()> {
    let sweep = scan_low_orders(n_max)?;
    report.checked = 2 * (n_max - 1);
    for &n in &sweep.h2_integers {
        fail(report, "H_n^(2) non-integer", n, Some(2), "non-integer", "integer");
    }
    for &n in &sweep.h3_integers {
        fail(report, "H_n^(3) non-integer", n, Some(3), "non-integer", "integer");
    }
    for &n in &sweep.identity_failures {
        fail(report, "H_n^(2) = H_1 + ... + H_n", n, Some(2), "equal", "different");
    }
    for &n in &sweep.boundary_mismatches {
        let expected = if (n + 1).is_power_of_two() {
            "nu2 = 0"
        } else {
            "nu2 < 0"
        };
        fail(
            report,
            "nu2(H_n^(2)) = 0 iff n = 2^m - 1",
            n,
            Some(2),
            expected,
            "opposite",
        );
    }
    for &(n, r) in &sweep.fast_mismatches {
        fail(report, "fast nu2 vs exact", n, Some(r), "exact", "fast differs");
    }
    report
        .tallies
        .push(("unit-norm H_n^(2)".into(), sweep.unit_norm.len() as u64));
    Ok(())
}

/// Rows of the identity check `[n+r, r+1]_r = n! H_n^(r)`.
pub const IDENTITY_N_MAX: u64 = 30;

fn stirling(n_max: u64, r_max: u64, report: &mut VerifyReport) -> Result<()> {
    for r in 0..=n_max {
        let table = rstirling_table(r, n_max)?;
        for n in r..=n_max {
            let brute = rstirling_brute_row(n as usize, r as usize)?;
            for k in 0..=n {
                let got = table.entry(n, k);
                if got != brute[k as usize] {
                    fail(report, "table vs enumeration", n, Some(r), &brute[k as usize], got);
                }
                report.checked += 1;
            }
        }
    }
    let prefix = harmonic_prefix(IDENTITY_N_MAX + r_max);
    for r in 1..=r_max {
        let table = rstirling_table(r, IDENTITY_N_MAX + r)?;
        for n in 1..=IDENTITY_N_MAX {
            let lhs = Rational::from_integer(table.entry(n + r, r + 1));
            let rhs = hyperharmonic_from_prefix(&prefix, n, r).mul_integer(&factorial(n));
            if lhs != rhs {
                fail(report, "[n+r, r+1]_r = n! H_n^(r)", n, Some(r), rhs, lhs);
            }
            report.checked += 1;
        }
    }
    Ok(())
}
