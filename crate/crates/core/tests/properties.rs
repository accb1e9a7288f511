mod common;

use common::*;
use proptest::prelude::*;
use tmlod_core::digits::{tm_bit, tm_bits, truncated_digit_sum, twofold_digit_sum, TruncationWindow};
use tmlod_core::farey::{farey_approx, farey_bracket, farey_interval, mediant};
use tmlod_core::lod::{ap_signed_prefix_extremes, beatty_count, s0_discrete, AStrategy};
use tmlod_core::metrics::{discrepancy, vdc_check_exact};
use tmlod_core::{DyadicRational, Rational};

fn rational() -> impl Strategy<Value = Rational> {
    (-5000i64..5000, 1i64..500).prop_map(|(n, d)| Rational::frac(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn truncated_sum_is_periodic(n in 0u128..1 << 100, lambda in 0u32..64) {
        prop_assert_eq!(truncated_digit_sum(n, lambda), truncated_digit_sum(n + (1u128 << lambda), lambda));
    }

    #[test]
    fn twofold_sum_is_a_difference(n in any::<u64>(), mu in 0u32..40, extra in 0u32..24) {
        let w = TruncationWindow::new(mu, mu + extra).unwrap();
        let n = u128::from(n);
        prop_assert_eq!(
            twofold_digit_sum(n, w) as i64,
            truncated_digit_sum(n, mu + extra) as i64 - truncated_digit_sum(n, mu) as i64
        );
    }

    #[test]
    fn tm_stream_matches_pointwise(start in 0u64..1 << 40, len in 0u64..10_000) {
        let bits = tm_bits(start, start + len);
        for (i, b) in bits.iter().enumerate() {
            prop_assert_eq!(*b, tm_bit(start + i as u64));
        }
    }

    #[test]
    fn farey_approx_agrees_with_descent(n in -100_000i64..100_000, d in 1i64..10_000, order in 1u64..300) {
        let alpha = Rational::frac(n, d);
        let got = farey_approx(&alpha, order).unwrap();
        prop_assert!(got.verify(&alpha));
        let (p, q) = farey_approx_naive(n.into(), d.into(), order.into());
        prop_assert_eq!((got.p, got.q as i128), (p.into(), q));
    }

    #[test]
    fn farey_interval_contains_its_points(n in 0i64..100_000, d in 1i64..10_000, order in 1u64..200) {
        let alpha = Rational::frac(n, d);
        let centre = farey_approx(&alpha, order).unwrap().as_rational();
        let (lo, hi) = farey_interval(&centre, order).unwrap();
        prop_assert!(lo <= alpha && alpha < hi);
        let (a, b) = farey_bracket(&alpha, order).unwrap();
        let med = mediant(&a, &b).unwrap();
        prop_assert!(a < med && med < b);
    }

    #[test]
    fn discrepancy_is_periodic_and_even(alpha in rational(), n in 1u64..150) {
        let d = discrepancy(&alpha, n).unwrap();
        let shifted = alpha.clone() + Rational::from_integer(3);
        prop_assert_eq!(&discrepancy(&shifted, n).unwrap(), &d);
        let neg = Rational::zero() - alpha.clone();
        prop_assert_eq!(&discrepancy(&neg, n).unwrap(), &d);
        prop_assert!(d >= Rational::new(1, n).unwrap() && d <= Rational::one());
    }

    #[test]
    fn discrepancy_matches_arc_oracle(alpha in rational(), n in 1u64..25) {
        let oracle = discrepancy_brute(&n_alpha_points(alpha.inner(), n));
        let got = discrepancy(&alpha, n).unwrap();
        prop_assert_eq!(got.inner(), &oracle);
    }

    #[test]
    fn vdc_holds_exactly(z in prop::collection::vec((-8i64..=8, -8i64..=8), 1..24), k in 1usize..6, r in 1usize..6) {
        let z: Vec<(Rational, Rational)> = z.into_iter().map(|(a, b)| (Rational::frac(a, 8), Rational::frac(b, 8))).collect();
        prop_assert!(vdc_check_exact(&z, k, r).unwrap().ok);
    }

    #[test]
    fn beatty_count_matches_values(extra in 0i64..400, d in 1i64..100, b in 0i64..50, y in 0u64..200, len in 0u64..200) {
        let n = d + extra;
        let alpha = Rational::frac(n, d);
        let beta = Rational::frac(b, 7);
        let hi = (y + len) as i64;
        let top = hi * d / n + 3;
        let vals: std::collections::BTreeSet<i64> = (-2..=top).map(|k| beatty_floor(k, alpha.inner(), beta.inner())).collect();
        let want = vals.iter().filter(|&&m| m >= y as i64 && m < hi && popcount_parity(m as u64) == 0).count() as u64;
        prop_assert_eq!(beatty_count(y, y + len, &alpha, &beta).unwrap(), want);
    }

    #[test]
    fn dyadic_normal_form(n in -1_000_000i64..1_000_000, k in 0u32..40, extra in 0u32..8) {
        let x = DyadicRational::new(n, k);
        let y = DyadicRational::new(n << extra, k + extra);
        prop_assert_eq!(&x, &y);
        prop_assert_eq!(x.to_rational(), Rational::new(n, 1i64 << k).unwrap());
    }

    #[test]
    fn rational_text_round_trip(x in rational()) {
        let back: Rational = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn ap_extremes_match_pairs(d in 1u64..6, a_off in 0u64..6, x in 0u64..60) {
        let a = a_off % d;
        let got = ap_signed_prefix_extremes(d, a, x).unwrap().max_dev;
        prop_assert_eq!(got.inner(), &ap_window_brute(d, a, x));
    }

    #[test]
    fn structured_s0_dominates_and_is_attained(n in 1u64..12, d in 1u64..12) {
        let exact = s0_discrete(n, d, d + 1, 0.0, AStrategy::Structured, 1e9).unwrap();
        let l = 64 - ((n - 1) * d).leading_zeros();
        let brute = s0_inner_max_brute(n, d, 1 << (l + 4));
        prop_assert_eq!(exact.exact, Some(brute));
        let capped = s0_discrete(n, d, d + 1, 0.0, AStrategy::ExhaustiveCapped { cap: 64 }, 1e9).unwrap();
        prop_assert!(capped.value <= exact.value);
    }
}
