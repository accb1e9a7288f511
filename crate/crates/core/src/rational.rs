//! Exact rationals and dyadic rationals.
//!
//! [`Rational`] always stores a reduced fraction with positive denominator
//! and serializes as `num/den`. [`DyadicRational`] stores `num/2^k` with an
//! odd numerator (or zero with `k = 0`) and serializes as `num/2^k`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return invalid("rational with zero denominator");
        }
        Ok(Self(BigRational::new(num.into(), den)))
    }

    /// Panicking constructor for literals in code and tests.
    pub fn frac(num: i64, den: i64) -> Self {
        Self::new(num, den).expect("nonzero denominator")
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    /// `2^-k`.
    pub fn pow2_inv(k: u32) -> Self {
        Self(BigRational::new(BigInt::one(), BigInt::one() << k))
    }

    pub fn pow2(k: u32) -> Self {
        Self::from_integer(BigInt::one() << k)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    pub fn floor(&self) -> BigInt {
        self.numer().div_floor(self.denom())
    }

    pub fn ceil(&self) -> BigInt {
        -((-self.numer()).div_floor(self.denom()))
    }

    /// `{x} = x - floor(x)`, in `[0, 1)`.
    pub fn fract(&self) -> Self {
        Self(BigRational::new(self.numer().mod_floor(self.denom()), self.denom().clone()))
    }

    /// `<x> = floor(x + 1/2)`.
    pub fn nearest_integer(&self) -> BigInt {
        (self.numer() * BigInt::from(2) + self.denom()).div_floor(&(self.denom() * BigInt::from(2)))
    }

    /// `||x|| = min_n |x - n|`, in `[0, 1/2]`.
    pub fn dist_to_integer(&self) -> Self {
        let f = self.fract();
        let g = Self::one() - f.clone();
        f.min(g)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact value of a finite float.
    pub fn from_f64_exact(x: f64) -> Result<Self> {
        BigRational::from_float(x)
            .map(Self)
            .ok_or_else(|| Error::InvalidArgument(format!("non-finite value {x}")))
    }

    /// `(num, den)` as machine integers when both fit in `bits` bits.
    pub fn to_i128_parts(&self, bits: u32) -> Option<(i128, i128)> {
        if self.numer().bits() > u64::from(bits) || self.denom().bits() > u64::from(bits) {
            return None;
        }
        Some((self.numer().to_i128()?, self.denom().to_i128()?))
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return invalid("reciprocal of zero");
        }
        Ok(Self(self.0.recip()))
    }

    pub fn pow(&self, e: i32) -> Self {
        Self(num_traits::Pow::pow(&self.0, e))
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Self(r)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Self::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

/// Accepts `num/den`, an integer, or a finite decimal such as `-1.25`
/// (read exactly, not through floating point).
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("cannot parse rational from {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            return Rational::new(n, d);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int.starts_with('-');
            let int_part: BigInt = match int {
                "" | "-" | "+" => BigInt::zero(),
                _ => int.parse().map_err(|_| bad())?,
            };
            let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            let magnitude = int_part.abs() * &scale + frac_part;
            let num = if negative { -magnitude } else { magnitude };
            return Rational::new(num, scale);
        }
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Rational::from_integer(n))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0.clone())
    }
}

/// Exact `num / 2^exponent`, normalized to an odd numerator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    numerator: BigInt,
    exponent: u32,
}

impl DyadicRational {
    pub fn new(numerator: impl Into<BigInt>, exponent: u32) -> Self {
        let mut numerator = numerator.into();
        let mut exponent = exponent;
        if numerator.is_zero() {
            return Self { numerator, exponent: 0 };
        }
        let tz = numerator.trailing_zeros().unwrap_or(0);
        let shift = tz.min(u64::from(exponent)) as u32;
        if shift > 0 {
            numerator >>= shift;
            exponent -= shift;
        }
        Self { numerator, exponent }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.numerator.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.numerator.is_negative()
    }

    pub fn signum(&self) -> i32 {
        match self.numerator.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Self { numerator: self.numerator.abs(), exponent: self.exponent }
    }

    /// Numerator rescaled to denominator `2^exponent` (requires
    /// `exponent >= self.exponent`).
    pub fn numerator_at(&self, exponent: u32) -> BigInt {
        debug_assert!(exponent >= self.exponent);
        &self.numerator << (exponent - self.exponent)
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.numerator.clone(), BigInt::one() << self.exponent).expect("nonzero")
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64()
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.exponent)
    }
}

impl FromStr for DyadicRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse dyadic rational from {s:?}"));
        let (n, k) = s.trim().split_once("/2^").ok_or_else(bad)?;
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let k: u32 = k.parse().map_err(|_| bad())?;
        Ok(Self::new(n, k))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.max(other.exponent);
        self.numerator_at(e).cmp(&other.numerator_at(e))
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &DyadicRational {
    type Output = DyadicRational;
    fn add(self, rhs: &DyadicRational) -> DyadicRational {
        let e = self.exponent.max(rhs.exponent);
        DyadicRational::new(self.numerator_at(e) + rhs.numerator_at(e), e)
    }
}

impl Sub for &DyadicRational {
    type Output = DyadicRational;
    fn sub(self, rhs: &DyadicRational) -> DyadicRational {
        let e = self.exponent.max(rhs.exponent);
        DyadicRational::new(self.numerator_at(e) - rhs.numerator_at(e), e)
    }
}

impl Mul for &DyadicRational {
    type Output = DyadicRational;
    fn mul(self, rhs: &DyadicRational) -> DyadicRational {
        DyadicRational::new(&self.numerator * &rhs.numerator, self.exponent + rhs.exponent)
    }
}

impl Neg for DyadicRational {
    type Output = DyadicRational;
    fn neg(self) -> DyadicRational {
        DyadicRational { numerator: -self.numerator, exponent: self.exponent }
    }
}

/// Integer carrier for hot loops: `i128` when magnitudes allow, `BigInt`
/// otherwise. Callers pick the instance after checking operand sizes.
pub trait Int:
    Integer + Signed + Clone + FromPrimitive + ToPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    fn from_big(b: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    /// `s(|x|)`.
    fn popcount(&self) -> u32;
    /// `s_lambda(x)` for `x >= 0`.
    fn low_popcount(&self, lambda: u32) -> u32;
}

impl Int for i128 {
    fn from_big(b: &BigInt) -> Option<Self> {
        b.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    #[inline]
    fn popcount(&self) -> u32 {
        self.unsigned_abs().count_ones()
    }
    #[inline]
    fn low_popcount(&self, lambda: u32) -> u32 {
        crate::digits::truncated_digit_sum(*self as u128, lambda)
    }
}

impl Int for i64 {
    fn from_big(b: &BigInt) -> Option<Self> {
        b.to_i64()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    #[inline]
    fn popcount(&self) -> u32 {
        self.unsigned_abs().count_ones()
    }
    #[inline]
    fn low_popcount(&self, lambda: u32) -> u32 {
        crate::digits::truncated_digit_sum(*self as u64 as u128, lambda)
    }
}

impl Int for BigInt {
    fn from_big(b: &BigInt) -> Option<Self> {
        Some(b.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn popcount(&self) -> u32 {
        self.magnitude().count_ones() as u32
    }
    fn low_popcount(&self, lambda: u32) -> u32 {
        let mag = self.magnitude();
        let mask = (num_bigint::BigUint::one() << lambda) - 1u32;
        (mag & mask).count_ones() as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let r: Rational = "6/-4".parse().unwrap();
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!("1.25".parse::<Rational>().unwrap(), Rational::frac(5, 4));
        assert_eq!("-0.5".parse::<Rational>().unwrap(), Rational::frac(-1, 2));
        assert_eq!("7".parse::<Rational>().unwrap(), Rational::from_integer(7));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
    }

    #[test]
    fn notation_helpers() {
        let half = Rational::frac(1, 2);
        assert_eq!(half.nearest_integer(), BigInt::from(1));
        assert_eq!(Rational::frac(7, 10).dist_to_integer(), Rational::frac(3, 10));
        assert_eq!(Rational::frac(-7, 4).floor(), BigInt::from(-2));
        assert_eq!(Rational::frac(-7, 4).ceil(), BigInt::from(-1));
        assert_eq!(Rational::frac(-7, 4).fract(), Rational::frac(1, 4));
        assert_eq!(Rational::frac(-1, 2).nearest_integer(), BigInt::from(0));
    }

    #[test]
    fn dyadic_normalizes() {
        let d = DyadicRational::new(12, 4);
        assert_eq!(d.numerator(), &BigInt::from(3));
        assert_eq!(d.exponent(), 2);
        assert_eq!(d.to_string(), "3/2^2");
        assert_eq!(DyadicRational::new(0, 9), DyadicRational::zero());
        assert_eq!(DyadicRational::new(8, 2), DyadicRational::new(2, 0));
        assert_eq!("3/2^2".parse::<DyadicRational>().unwrap(), d);
        let a = DyadicRational::new(1, 1);
        let b = DyadicRational::new(1, 2);
        assert_eq!(&a + &b, DyadicRational::new(3, 2));
        assert_eq!(&a - &b, DyadicRational::new(1, 2));
        assert_eq!(&a * &b, DyadicRational::new(1, 3));
        assert!(b < a);
        assert_eq!(d.to_rational(), Rational::frac(3, 4));
    }

    #[test]
    fn int_popcounts_agree() {
        for x in [0i128, 1, 5, 255, 1 << 70, (1 << 90) + 77] {
            let b = BigInt::from(x);
            assert_eq!(x.popcount(), b.popcount());
            for lambda in [0, 1, 3, 64, 100, 130] {
                assert_eq!(x.low_popcount(lambda), b.low_popcount(lambda));
            }
        }
    }
}
