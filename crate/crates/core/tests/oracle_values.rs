//! Reference values computed by the slow oracles in `common`, frozen as
//! literals and checked against the library.

mod common;

use common::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use tmlod_core::farey::{exceptions_census, farey_approx, CensusMode, ExceptionParams};
use tmlod_core::gowers::{build_graph, gowers_bruteforce, recursion_value, OffsetFamily};
use tmlod_core::lod::{
    ap_signed_prefix_extremes, beatty_count, lod_error_total_with_modulus, ps_frequency, s0_discrete, AStrategy,
};
use tmlod_core::metrics::{box_count, carry_census, discrepancy, BoxQuery};
use tmlod_core::{DyadicRational, Rational};

fn r(n: i64, d: i64) -> Rational {
    Rational::frac(n, d)
}

fn big(x: &Rational) -> BigRational {
    x.inner().clone()
}

#[test]
fn gowers_values_match_direct_sums() {
    let cases: [(u32, u32, &[i64], i64); 4] = [
        (2, 3, &[0, 0, 0, 0], 192),
        (2, 4, &[0, 0, 0, 1], -256),
        (3, 2, &[0; 8], 256),
        (2, 5, &[0, 1, 1, 1], -2560),
    ];
    for (m, rho, a, frozen) in cases {
        assert_eq!(gowers_direct(m, rho, a), BigInt::from(frozen));
        let fam = OffsetFamily::new(m, a.to_vec()).unwrap();
        let want = DyadicRational::new(frozen, (m + 1) * rho);
        assert_eq!(gowers_bruteforce(m, rho, &fam, 1e9).unwrap(), want);
        let g = build_graph(m).unwrap();
        if g.index_of(&fam).is_some() {
            assert_eq!(recursion_value(rho, &fam, &g).unwrap(), want);
        }
    }
}

#[test]
fn discrepancy_matches_arc_enumeration() {
    let cases = [((3, 8), 10, (9, 40)), ((55, 144), 20, (73, 720)), ((1, 7), 7, (1, 7)), ((13, 31), 25, (67, 775))];
    for ((n, d), count, (vn, vd)) in cases {
        let alpha = r(n, d);
        assert_eq!(discrepancy_brute(&n_alpha_points(&big(&alpha), count)), q(vn, vd));
        assert_eq!(discrepancy(&alpha, count).unwrap(), r(vn, vd));
    }
}

#[test]
fn farey_matches_stern_brocot_descent() {
    let cases = [((5, 8, 4), (2, 3)), ((355, 113, 7), (22, 7)), ((-22, 7, 5), (-3, 1)), ((1001, 4096, 64), (11, 45))];
    for ((n, d, order), (p, qq)) in cases {
        assert_eq!(farey_approx_naive(n.into(), d.into(), order.into()), (p.into(), qq.into()));
        let got = farey_approx(&r(n, d), order as u64).unwrap();
        assert_eq!((got.p, got.q), (BigInt::from(p), qq as u64));
    }
}

#[test]
fn s0_matches_shift_enumeration() {
    for (n, frozen) in [(8u64, 48i64), (12, 92), (16, 158)] {
        let oracle: i64 = (n..2 * n)
            .map(|d| s0_inner_max_brute(n, d, 1 << (64 - ((n - 1) * d).leading_zeros() + 6)))
            .sum();
        assert_eq!(oracle, frozen);
        let got = s0_discrete(n, n, 2 * n, 0.0, AStrategy::Structured, 1e9).unwrap();
        assert_eq!(got.exact, Some(frozen));
    }
}

#[test]
fn ap_extremes_match_pair_enumeration() {
    assert_eq!(ap_window_brute(3, 1, 64), q(14, 3));
    assert_eq!(ap_signed_prefix_extremes(3, 1, 64).unwrap().max_dev, r(14, 3));
    let oracle = (1..=8u64).fold(BigRational::zero(), |acc, d| acc + (0..d).map(|a| ap_window_brute(d, a, 64)).max().unwrap());
    assert_eq!(oracle, q(15199, 560));
    assert_eq!(lod_error_total_with_modulus(64, 8, 1e9).unwrap().total, r(15199, 560));
}

#[test]
fn ps_count_matches_integer_sqrt() {
    let zeros = (0..1000u64).filter(|&n| popcount_parity((n * n * n).isqrt()) == 0).count();
    assert_eq!(zeros, 523);
    let got = ps_frequency(&r(3, 2), 1000).unwrap();
    assert_eq!((got.zeros, got.exclusions), (523, 0));
}

#[test]
fn census_matches_naive_construction() {
    let (lambda, mu, sigma) = (13u32, 4u32, 1u32);
    let hits = (0..1i128 << lambda)
        .filter(|&al| {
            let (p1, _) = farey_approx_naive(al, 1 << (2 * mu), 1 << (2 * mu + 2 * sigma));
            let (pf1, _) = farey_approx_naive(p1, 1 << mu, 1 << sigma);
            let (pf2, _) = farey_approx_naive(al, 1 << (3 * mu), 1 << (mu + sigma));
            pf1 % 8 == 0 || pf2 % 8 == 0
        })
        .count();
    assert_eq!(hits, 1400);
    let params = ExceptionParams { lambda, mu, sigma, gamma: 1, m: 2 };
    assert_eq!(exceptions_census(params, CensusMode::Discrete, 1e9).unwrap().count, 1400);
}

#[test]
fn beatty_count_matches_value_set() {
    let (alpha, beta) = (q(99, 70), q(1, 3));
    let vals: std::collections::BTreeSet<i64> = (-5..400).map(|n| beatty_floor(n, &alpha, &beta)).collect();
    let oracle = vals.iter().filter(|&&m| (10..300).contains(&m) && popcount_parity(m as u64) == 0).count();
    assert_eq!(oracle, 103);
    assert_eq!(beatty_count(10, 300, &r(99, 70), &r(1, 3)).unwrap(), 103);
}

#[test]
fn box_and_carry_match_direct_counts() {
    let query = BoxQuery { j_start: -20, j_end: 180, alpha: r(37, 11), beta: r(2, 5), t: 1, t_count: 3, k: 2, k_count: 5 };
    let oracle = (-20..180i64)
        .filter(|&n| {
            let f: i64 = ((q(37, 11) * q(n, 1) + q(2, 5)) * q(3, 1)).floor().to_integer().try_into().unwrap();
            f.rem_euclid(3) == 1 && beatty_floor(n, &q(37, 11), &q(2, 5)).rem_euclid(5) == 2
        })
        .count();
    assert_eq!(oracle, 11);
    assert_eq!(box_count(&query).unwrap().count, 11);

    let (alpha, beta) = (q(1001, 7), q(3, 4));
    let low = |v: i64| ((v as u64) & 63).count_ones() as i64;
    let s = |v: i64| (v as u64).count_ones() as i64;
    let oracle = (0..500i64)
        .filter(|&n| {
            let (a, b) = (beatty_floor(n + 3, &alpha, &beta), beatty_floor(n, &alpha, &beta));
            s(a) - s(b) != low(a) - low(b)
        })
        .count();
    assert_eq!(oracle, 343);
    assert_eq!(carry_census(0, 500, 3, &r(1001, 7), &r(3, 4), 6).unwrap().count, 343);
}
