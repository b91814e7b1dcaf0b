use hyperharmonic::exact::Rational;
use hyperharmonic::fastnorm::{exact_norm2, hyperharmonic_norm2, max_valuation_in_range, NormCase};
use hyperharmonic::hyper::{closed_form, factorial, harmonic, hyperharmonic_rec, rstirling_table};
use hyperharmonic::padic::{nu2, valuation_rat, Order};
use hyperharmonic::search::{scan_collisions, scan_integers, Constraint, Grid, ScanMode};
use hyperharmonic::Error;

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

#[test]
fn closed_form_parts_recombine() {
    for (n, r) in [(1, 1), (5, 3), (18, 8), (40, 17)] {
        let parts = closed_form(n, r);
        let rebuilt = Rational::from_integer(parts.binomial.clone()) * (&parts.upper - &parts.lower);
        assert_eq!(rebuilt, parts.value);
        assert_eq!(parts.value, hyperharmonic_rec(n, r));
    }
}

#[test]
fn harmonic_values() {
    assert_eq!(harmonic(0), Rational::zero());
    assert_eq!(harmonic(4), q("25/12"));
    assert_eq!(nu2(&harmonic(4)), Some(-2));
}

#[test]
fn zero_has_infinite_valuation() {
    let v = valuation_rat(3, &Rational::zero()).unwrap();
    assert_eq!(v.order, Order::Infinity);
    assert!(valuation_rat(4, &q("1/2")).is_err());
}

#[test]
fn single_point_interval_in_case2() {
    // n = 1 makes [r, n + r - 1] a single point; odd r puts it in case 2 with peak 0.
    for r in (3..200u64).step_by(2) {
        let res = hyperharmonic_norm2(1, r);
        let peak = max_valuation_in_range(r, r);
        assert_eq!(peak.valuation, 0);
        assert!(peak.unique);
        assert_eq!(res.nu2, exact_norm2(1, r), "r={r}");
        assert_eq!(res.nu2, 0);
        if res.case == NormCase::Case2 {
            assert_eq!(res.components.peak, 0);
        }
    }
}

#[test]
fn fast_norm_matches_exact_off_grid() {
    for (n, r) in [(1000, 3), (777, 129), (2048, 2048), (3, 1023), (1, 1024)] {
        assert_eq!(hyperharmonic_norm2(n, r).nu2, exact_norm2(n, r), "({n}, {r})");
    }
}

#[test]
fn stirling_table_rejects_short_range() {
    assert!(matches!(rstirling_table(5, 3), Err(Error::InvalidRange(_))));
    let t = rstirling_table(3, 8).unwrap();
    // [n+r, r+1]_r = n! H_n^(r)
    let lhs = Rational::from_integer(t.entry(8, 4));
    assert_eq!(lhs, hyperharmonic_rec(5, 3).mul_integer(&factorial(5)));
}

#[test]
fn scans_through_the_public_api() {
    let grid = Grid::new(1, 12, 1, 12).unwrap();
    let report = scan_integers(grid, ScanMode::Exact);
    let hits: Vec<_> = report.integer_hits().iter().map(|h| (h.n, h.r)).collect();
    assert!(hits.iter().all(|&(n, _)| n == 1));
    assert_eq!(hits.len(), 12);

    let collisions = scan_collisions(grid, Constraint::BothDiffer);
    assert!(collisions
        .collisions
        .iter()
        .all(|c| c.cells[0].0 != c.cells[1].0 && c.cells[0].1 != c.cells[1].1));
    assert!(Grid::new(3, 2, 1, 1).is_err());
}
