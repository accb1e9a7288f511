//! Real-number notation: nearest integer `<x> = floor(x + 1/2)`, distance to
//! the nearest integer `||x||`, and fractional part `{x}`.
//!
//! Exact [`Rational`] inputs are used wherever a floor decision matters;
//! the `f64` implementations exist for reporting.

use num_bigint::BigInt;

use crate::rational::Rational;

pub trait RealNotation {
    type Int;
    type Real;

    fn nearest_integer(&self) -> Self::Int;
    fn dist_to_integer(&self) -> Self::Real;
    fn frac(&self) -> Self::Real;
}

impl RealNotation for f64 {
    type Int = f64;
    type Real = f64;

    fn nearest_integer(&self) -> f64 {
        (self + 0.5).floor()
    }

    fn dist_to_integer(&self) -> f64 {
        let f = self - self.floor();
        f.min(1.0 - f)
    }

    fn frac(&self) -> f64 {
        self - self.floor()
    }
}

impl RealNotation for Rational {
    type Int = BigInt;
    type Real = Rational;

    fn nearest_integer(&self) -> BigInt {
        Rational::nearest_integer(self)
    }

    fn dist_to_integer(&self) -> Rational {
        Rational::dist_to_integer(self)
    }

    fn frac(&self) -> Rational {
        self.fract()
    }
}

/// Evaluates the three elementary fractional-part facts exactly:
///
/// 1. `||a|| < eps` and `||b|| >= eps` imply `floor(a + b) = <a> + floor(b)`;
/// 2. `||n a|| <= n ||a||`;
/// 3. `||a|| < eps` and `2 n eps < 1` imply `<n a> = n <a>`.
///
/// Each entry is `true` when the implication holds (vacuously if the
/// hypothesis fails).
pub fn fractional_part_facts_check(a: &Rational, b: &Rational, n: u64, eps: &Rational) -> [bool; 3] {
    let na = a * &Rational::from_integer(n);
    let da = a.dist_to_integer();

    let first = if da < *eps && b.dist_to_integer() >= *eps {
        (a + b).floor() == a.nearest_integer() + b.floor()
    } else {
        true
    };

    let second = na.dist_to_integer() <= &Rational::from_integer(n) * &da;

    let third = if da < *eps && &Rational::from_integer(2 * n) * eps < Rational::one() {
        na.nearest_integer() == a.nearest_integer() * BigInt::from(n)
    } else {
        true
    };

    [first, second, third]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn float_helpers() {
        assert_eq!(0.5f64.nearest_integer(), 1.0);
        assert!((0.7f64.dist_to_integer() - 0.3).abs() < 1e-12);
        assert!(((-0.25f64).frac() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn facts_examples() {
        let r = fractional_part_facts_check(
            &Rational::frac(1, 100),
            &Rational::frac(1, 2),
            1,
            &Rational::frac(1, 10),
        );
        assert_eq!(r, [true; 3]);
        assert_eq!((Rational::frac(1, 100) + Rational::frac(1, 2)).floor(), BigInt::from(0));

        let a = Rational::frac(1, 8);
        let r = fractional_part_facts_check(&a, &Rational::zero(), 3, &Rational::frac(1, 4));
        assert!(r[1]);
        assert_eq!(Rational::frac(3, 8).dist_to_integer(), Rational::frac(3, 8));
    }

    #[test]
    fn nearest_integer_scales_for_small_offsets() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let k: i64 = rng.gen_range(-50..50);
            let den: i64 = rng.gen_range(100..10_000);
            let off: i64 = rng.gen_range(-(den / 100)..=(den / 100));
            let a = Rational::from_integer(k) + Rational::frac(off, den);
            let eps = Rational::frac(den / 100 + 1, den);
            let n: u64 = rng.gen_range(1..(den as u64 / (2 * (den as u64 / 100 + 1))).max(2));
            if &Rational::from_integer(2 * n) * &eps < Rational::one() {
                assert_eq!(
                    (&a * &Rational::from_integer(n)).nearest_integer(),
                    a.nearest_integer() * BigInt::from(n)
                );
            }
        }
    }

    #[test]
    fn facts_hold_on_random_rationals() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100_000 {
            let a = Rational::frac(rng.gen_range(-2000..2000), rng.gen_range(1..200));
            let b = Rational::frac(rng.gen_range(-2000..2000), rng.gen_range(1..200));
            let eps = Rational::frac(rng.gen_range(1..50), rng.gen_range(50..400));
            let n = rng.gen_range(0..40);
            assert_eq!(fractional_part_facts_check(&a, &b, n, &eps), [true; 3], "a={a} b={b} n={n} eps={eps}");
        }
    }
}
