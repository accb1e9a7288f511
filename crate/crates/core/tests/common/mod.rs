//! Slow, independent reference implementations used as test oracles.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn popcount_parity(n: u64) -> u32 {
    let mut n = n;
    let mut p = 0;
    while n > 0 {
        p ^= (n % 2) as u32;
        n /= 2;
    }
    p
}

/// Farey approximation `(p, q)` of `num/den` of order `order`, by unit-step
/// Stern–Brocot descent on the fractional part and the mediant rule.
pub fn farey_approx_naive(num: i128, den: i128, order: i128) -> (i128, i128) {
    let k = num.div_euclid(den);
    let x = num.rem_euclid(den);
    // x/den in [0, 1); bracket a/b <= x/den < c/d
    let (mut a, mut b, mut c, mut d) = (0i128, 1i128, 1i128, 1i128);
    while b + d <= order {
        if x * (b + d) < (a + c) * den {
            c += a;
            d += b;
        } else {
            a += c;
            b += d;
        }
    }
    let (p, qq) = if x * (b + d) < (a + c) * den { (a, b) } else { (c, d) };
    (k * qq + p, qq)
}

/// All arcs spanned by pairs of points, closed and open, plus the empty and
/// full arcs: the supremum of the count deviation over every arc.
pub fn discrepancy_brute(points: &[BigRational]) -> BigRational {
    let n = points.len();
    let nn = BigRational::from_integer(BigInt::from(n));
    let one = BigRational::one();
    let mut best = BigRational::zero();
    let count_in = |lo: &BigRational, len: &BigRational, closed_lo: bool, closed_hi: bool| -> usize {
        points
            .iter()
            .filter(|p| {
                let mut off = (*p - lo) - (*p - lo).floor();
                // points equal to lo sit at offset 0; the far end is offset len
                if off.is_zero() && !closed_lo {
                    off = one.clone();
                }
                if off < *len {
                    true
                } else {
                    off == *len && closed_hi
                }
            })
            .count()
    };
    for i in 0..n {
        for j in 0..n {
            let lo = &points[i];
            let mut len = &points[j] - lo;
            len = &len - len.floor();
            let lens = if len.is_zero() { vec![BigRational::zero(), one.clone()] } else { vec![len] };
            for len in lens {
                for (cl, ch) in [(true, true), (true, false), (false, true), (false, false)] {
                    if len == one && cl && ch {
                        continue;
                    }
                    let c = count_in(lo, &len, cl, ch);
                    let dev = (BigRational::from_integer(BigInt::from(c)) / &nn - &len).abs();
                    if dev > best {
                        best = dev;
                    }
                }
            }
        }
    }
    best
}

pub fn n_alpha_points(alpha: &BigRational, n: u64) -> Vec<BigRational> {
    (0..n)
        .map(|k| {
            let v = alpha * BigRational::from_integer(BigInt::from(k));
            &v - v.floor()
        })
        .collect()
}

/// `A_rho(a)` numerator over `2^{(m+1) rho}` by nested loops.
pub fn gowers_direct(m: u32, rho: u32, a: &[i64]) -> BigInt {
    let size = 1i64 << rho;
    let mut total = 0i64;
    let mut r = vec![0i64; m as usize];
    loop {
        for n in 0..size {
            let mut s = 0i64;
            for (eps, &ae) in a.iter().enumerate() {
                let mut v = n + ae;
                for (i, ri) in r.iter().enumerate() {
                    if eps >> i & 1 == 1 {
                        v += ri;
                    }
                }
                s += i64::from(v.rem_euclid(size).count_ones());
            }
            total += if s % 2 == 0 { 1 } else { -1 };
        }
        // odometer over r
        let mut i = 0;
        loop {
            if i == r.len() {
                return BigInt::from(total);
            }
            r[i] += 1;
            if r[i] < size {
                break;
            }
            r[i] = 0;
            i += 1;
        }
    }
}

/// `max_{a <= cap} |sum_{n<N} (-1)^{s(nd+a)}|` by direct summation.
pub fn s0_inner_max_brute(n: u64, d: u64, cap: u64) -> i64 {
    (0..=cap)
        .map(|a| {
            (0..n)
                .map(|k| 1 - 2 * i64::from(popcount_parity(k * d + a)))
                .sum::<i64>()
                .abs()
        })
        .max()
        .unwrap()
}

/// `#{y <= m < z : m = a (mod d), t(m) = 0}`.
pub fn ap_count(y: u64, z: u64, d: u64, a: u64) -> u64 {
    (y..z).filter(|&m| m % d == a && popcount_parity(m) == 0).count() as u64
}

/// `max_{0 <= y <= z <= x} |A(y,z;d,a) - (z-y)/(2d)|` over all pairs.
pub fn ap_window_brute(d: u64, a: u64, x: u64) -> BigRational {
    let mut best = BigRational::zero();
    for y in 0..=x {
        for z in y..=x {
            let dev = (BigRational::from_integer(BigInt::from(ap_count(y, z, d, a))) - q((z - y) as i64, 2 * d as i64)).abs();
            if dev > best {
                best = dev;
            }
        }
    }
    best
}

/// Sorted Farey series of order `n` inside `[0, 1]`.
pub fn farey_unit(n: i64) -> Vec<BigRational> {
    let mut v = Vec::new();
    for qq in 1..=n {
        for p in 0..=qq {
            if p.gcd(&qq) == 1 {
                v.push(q(p, qq));
            }
        }
    }
    v.sort();
    v
}

/// `floor(n alpha + beta)` with exact rationals.
pub fn beatty_floor(n: i64, alpha: &BigRational, beta: &BigRational) -> i64 {
    (alpha * BigRational::from_integer(BigInt::from(n)) + beta).floor().to_integer().to_i64().unwrap()
}

/// Ordinary least squares slope of `(ln x, ln y)`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

pub fn is_sorted_unique<T: Ord>(v: &[T]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

pub fn abs_big(x: &BigInt) -> BigInt {
    x.abs()
}
