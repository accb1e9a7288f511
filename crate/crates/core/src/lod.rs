//! Level-of-distribution experiments: Thue–Morse counts along arithmetic
//! progressions and Beatty sequences, the sums `S_0` over moduli, and
//! Piatetski-Shapiro frequencies.

use std::f64::consts::TAU;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, Pow, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::digits::{tm_bit, truncated_digit_sum};
use crate::error::{check_budget, invalid, Error, Result};
use crate::rational::{Int, Rational};

/// `floor((n a d + c b) / (b d))` for `alpha = a/b`, `beta = c/d`.
struct AffineFloor<T: Int> {
    step: T,
    offset: T,
    den: T,
}

impl<T: Int> AffineFloor<T> {
    fn at(&self, n: &T) -> T {
        (n.clone() * self.step.clone() + self.offset.clone()).div_floor(&self.den)
    }

    /// Smallest `n` with `n alpha + beta >= m`.
    fn first_reaching(&self, m: &T) -> T {
        let num = m.clone() * self.den.clone() - self.offset.clone();
        let (q, r) = num.div_mod_floor(&self.step);
        if r.is_zero() {
            q
        } else {
            q + T::one()
        }
    }
}

fn beatty_count_generic<T: Int>(y: u64, z: u64, f: &AffineFloor<T>) -> Result<u64> {
    let mut count = 0;
    for m in y..z {
        if tm_bit(m) != 0 {
            continue;
        }
        let mt = T::from_u64(m).expect("fits");
        let n = f.first_reaching(&mt);
        if f.at(&n) == mt {
            if f.at(&(n.clone() + T::one())) == mt {
                return Err(Error::Internal(format!("two indices hit the Beatty value {m}")));
            }
            count += 1;
        }
    }
    Ok(count)
}

/// `A(y, z; alpha, beta)`: the number of `m in [y, z)` with `t(m) = 0` that
/// equal `floor(n alpha + beta)` for some integer `n`.
pub fn beatty_count(y: u64, z: u64, alpha: &Rational, beta: &Rational) -> Result<u64> {
    if alpha < &Rational::one() {
        return invalid(format!("Beatty count needs alpha >= 1, got {alpha}"));
    }
    if beta.is_negative() {
        return invalid("Beatty count needs beta >= 0");
    }
    if z < y {
        return invalid("Beatty count needs y <= z");
    }
    let (a, b) = (alpha.numer(), alpha.denom());
    let (c, d) = (beta.numer(), beta.denom());
    let step = a * d;
    let offset = c * b;
    let den = b * d;
    let small = step.bits() < 40 && offset.bits() < 80 && den.bits() < 40 && z < (1 << 40);
    if small {
        let f = AffineFloor {
            step: step.to_i128().unwrap(),
            offset: offset.to_i128().unwrap(),
            den: den.to_i128().unwrap(),
        };
        beatty_count_generic(y, z, &f)
    } else {
        beatty_count_generic(y, z, &AffineFloor { step, offset, den })
    }
}

/// Extremes of the centered count `A(start, y; d, a) - (y - start)/(2d)`
/// over `y in [start, start + len]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct APWindowStat {
    pub d: u64,
    pub a: u64,
    /// `max |T(z) - T(y)|` over `y <= z` in the window.
    pub max_dev: Rational,
    pub arg_y: u64,
    pub arg_z: u64,
}

/// Scaled extremes `(max U, arg, min U, arg)` with `U(y) = 2d A - (y - start)`.
fn ap_extremes_scaled(d: u64, a: u64, start: u64, len: u64) -> (i64, u64, i64, u64) {
    let two_d = 2 * d as i64;
    let end = start + len;
    let (mut hi, mut hi_at, mut lo, mut lo_at) = (0i64, start, 0i64, start);
    let mut count = 0i64;
    // first n >= start with n = a (mod d)
    let mut n = start + (a + d - start % d) % d;
    let note = |u: i64, y: u64, hi: &mut i64, hi_at: &mut u64, lo: &mut i64, lo_at: &mut u64| {
        if u > *hi {
            *hi = u;
            *hi_at = y;
        }
        if u < *lo {
            *lo = u;
            *lo_at = y;
        }
    };
    while n < end {
        let before = two_d * count - (n - start) as i64;
        note(before, n, &mut hi, &mut hi_at, &mut lo, &mut lo_at);
        if n.count_ones() & 1 == 0 {
            count += 1;
        }
        let after = two_d * count - (n + 1 - start) as i64;
        note(after, n + 1, &mut hi, &mut hi_at, &mut lo, &mut lo_at);
        n += d;
    }
    let last = two_d * count - len as i64;
    note(last, end, &mut hi, &mut hi_at, &mut lo, &mut lo_at);
    (hi, hi_at, lo, lo_at)
}

/// Window variant of [`ap_signed_prefix_extremes`] over `[start, start + len]`.
pub fn ap_window_extremes(d: u64, a: u64, start: u64, len: u64) -> Result<APWindowStat> {
    if d == 0 || a >= d {
        return invalid(format!("need d >= 1 and 0 <= a < d, got d={d} a={a}"));
    }
    if start.checked_add(len).is_none_or(|e| e >= 1 << 62) {
        return invalid("window end out of range");
    }
    let (hi, hi_at, lo, lo_at) = ap_extremes_scaled(d, a, start, len);
    Ok(APWindowStat {
        d,
        a,
        max_dev: Rational::new(hi - lo, 2 * d)?,
        arg_y: hi_at.min(lo_at),
        arg_z: hi_at.max(lo_at),
    })
}

/// `max_{0 <= y <= z <= x} |A(y, z; d, a) - (z - y)/(2d)|` with an attaining pair.
pub fn ap_signed_prefix_extremes(d: u64, a: u64, x: u64) -> Result<APWindowStat> {
    ap_window_extremes(d, a, 0, x)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoDSummary {
    pub x: u64,
    pub d_max: u64,
    /// Sum over `d` of the per-`d` maxima.
    pub total: Rational,
    /// For each `d`, the residue class attaining the maximum.
    pub per_d: Vec<APWindowStat>,
}

/// `floor(x^theta)`, snapping to an integer when the float lands within
/// rounding distance of one.
pub fn modulus_bound(x: u64, theta: f64) -> u64 {
    let v = (x as f64).powf(theta);
    let r = v.round();
    if (v - r).abs() <= 1e-9 * v.max(1.0) {
        r as u64
    } else {
        v.floor() as u64
    }
}

/// Default compute budget for the level-of-distribution sum, in visited terms.
pub const LOD_DEFAULT_BUDGET: f64 = 4e10;

/// Level-of-distribution error sum with `D = floor(x^theta)`.
pub fn lod_error_total(x: u64, theta: f64, budget: f64) -> Result<LoDSummary> {
    if x == 0 {
        return invalid("lod total needs x >= 1");
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return invalid(format!("theta must lie in (0, 1], got {theta}"));
    }
    lod_error_total_with_modulus(x, modulus_bound(x, theta), budget)
}

/// Level-of-distribution error sum over `1 <= d <= d_max`.
pub fn lod_error_total_with_modulus(x: u64, d_max: u64, budget: f64) -> Result<LoDSummary> {
    if x == 0 || x >= 1 << 62 {
        return invalid("lod total needs 1 <= x < 2^62");
    }
    check_budget(x as f64 * d_max as f64, budget)?;
    let per_d: Vec<APWindowStat> = (1..=d_max)
        .into_par_iter()
        .map(|d| {
            let mut best: Option<(i64, u64, u64, u64)> = None;
            for a in 0..d {
                let (hi, hi_at, lo, lo_at) = ap_extremes_scaled(d, a, 0, x);
                if best.is_none_or(|b| hi - lo > b.0) {
                    best = Some((hi - lo, a, hi_at.min(lo_at), hi_at.max(lo_at)));
                }
            }
            let (span, a, y, z) = best.expect("d >= 1");
            APWindowStat { d, a, max_dev: Rational::new(span, 2 * d).expect("d >= 1"), arg_y: y, arg_z: z }
        })
        .collect();
    let total = per_d
        .iter()
        .fold(Rational::zero(), |acc, s| acc + s.max_dev.clone());
    Ok(LoDSummary { x, d_max, total, per_d })
}

/// How the maximum over shifts `a >= 0` is searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AStrategy {
    /// `a < cap`; a certified lower bound for the true maximum.
    ExhaustiveCapped { cap: u64 },
    /// Exact maximum over all `a >= 0`.
    Structured,
}

#[derive(Debug, Clone, PartialEq)]
pub struct S0Term {
    pub d: u64,
    pub max_abs: f64,
    /// A shift attaining `max_abs`.
    pub arg_a: BigUint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct S0Result {
    pub value: f64,
    /// Exact integer value when `xi = 0`.
    pub exact: Option<i64>,
    pub terms: Vec<S0Term>,
}

trait DpValue: Copy + Send + Sync {
    fn zero() -> Self;
    fn unit(negative: bool) -> Self;
    fn combine(x: Self, neg_x: bool, y: Self, neg_y: bool, phase: Complex64) -> Self;
    fn magnitude(self) -> f64;
}

impl DpValue for i32 {
    fn zero() -> Self {
        0
    }
    fn unit(negative: bool) -> Self {
        1 - 2 * i32::from(negative)
    }
    fn combine(x: Self, neg_x: bool, y: Self, neg_y: bool, _: Complex64) -> Self {
        (if neg_x { -x } else { x }) + (if neg_y { -y } else { y })
    }
    fn magnitude(self) -> f64 {
        f64::from(self.abs())
    }
}

impl DpValue for i16 {
    fn zero() -> Self {
        0
    }
    fn unit(negative: bool) -> Self {
        1 - 2 * i16::from(negative)
    }
    fn combine(x: Self, neg_x: bool, y: Self, neg_y: bool, _: Complex64) -> Self {
        (if neg_x { -x } else { x }) + (if neg_y { -y } else { y })
    }
    fn magnitude(self) -> f64 {
        f64::from(self.unsigned_abs())
    }
}

impl DpValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn unit(negative: bool) -> Self {
        Complex64::new(if negative { -1.0 } else { 1.0 }, 0.0)
    }
    fn combine(x: Self, neg_x: bool, y: Self, neg_y: bool, phase: Complex64) -> Self {
        (if neg_x { -x } else { x }) + phase * (if neg_y { -y } else { y })
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// `e(x) = exp(2 pi i x)`, reducing the argument mod 1 first.
pub fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * (x - x.floor()))
}

/// Smallest `L` with `(n - 1) d < 2^L`.
pub fn shift_bits(n: u64, d: u64) -> u32 {
    let span = (n - 1) as u128 * d as u128;
    128 - span.leading_zeros()
}

/// `max_{a0 < 2^L} |sum_{n<N} (-1)^{s(nd + a0)} e(n xi)|` (and the same with
/// `s` replaced by `s_L`), for all `a0` at once.
///
/// Splitting `n` by parity gives
/// `G_j(c, a) = (-1)^a G_{j+1}(ceil(c/2), floor(a/2))
///            + (-1)^{a+d} e(2^j xi) G_{j+1}(floor(c/2), floor((a+d)/2))`,
/// evaluated level by level from the top, where only two counts survive.
fn s0_shift_dp<V: DpValue>(n: u64, d: u64, xi: f64, bits: u32, truncated: bool) -> (f64, u64) {
    // index ranges per level, padded so that pairs (2i, 2i+1) never read past the end
    let mut hi = vec![1usize << bits];
    let mut counts = vec![(n, n)];
    let half = (d / 2) as usize;
    while counts.last().unwrap().1 > 1 {
        let (c_lo, c_hi) = *counts.last().unwrap();
        let h = *hi.last().unwrap();
        counts.push((c_lo / 2, c_hi.div_ceil(2)));
        hi.push(h.div_ceil(2) + half + 2);
    }
    let top = counts.len() - 1;
    let base = |c: u64, a: usize| -> V {
        if c == 0 {
            return V::zero();
        }
        let parity = if truncated {
            truncated_digit_sum(a as u128, bits - top as u32) & 1
        } else {
            a.count_ones() & 1
        };
        V::unit(parity == 1)
    };
    let (c_lo, c_hi) = counts[top];
    let mut hi_vals: Vec<V> = (0..hi[top]).map(|a| base(c_hi, a)).collect();
    let mut lo_vals: Vec<V> = if c_lo == c_hi { Vec::new() } else { (0..hi[top]).map(|a| base(c_lo, a)).collect() };
    for j in (0..top).rev() {
        let (c_lo_j, c_hi_j) = counts[j];
        let c_hi_k = counts[j + 1].1;
        let phase = e(xi * 2f64.powi(j as i32));
        let len = hi[j];
        let level = |c: u64| -> Vec<V> {
            let child = |c: u64| if c == c_hi_k { &hi_vals } else { &lo_vals };
            let (even, odd) = (child(c.div_ceil(2)), child(c / 2));
            let pairs = len.div_ceil(2);
            let mut out = Vec::with_capacity(2 * pairs);
            if d % 2 == 0 {
                // (2i + d) and (2i + 1 + d) both halve to i + d/2
                for (x, y) in even[..pairs].iter().zip(&odd[half..half + pairs]) {
                    out.push(V::combine(*x, false, *y, false, phase));
                    out.push(V::combine(*x, true, *y, true, phase));
                }
            } else {
                for i in 0..pairs {
                    let x = even[i];
                    out.push(V::combine(x, false, odd[i + half], true, phase));
                    out.push(V::combine(x, true, odd[i + half + 1], false, phase));
                }
            }
            out.truncate(len);
            out
        };
        let new_hi = level(c_hi_j);
        lo_vals = if c_lo_j == c_hi_j { Vec::new() } else { level(c_lo_j) };
        hi_vals = new_hi;
    }
    let mut best = (f64::NEG_INFINITY, 0u64);
    for (a, v) in hi_vals.iter().enumerate() {
        let m = v.magnitude();
        if m > best.0 {
            best = (m, a as u64);
        }
    }
    best
}

/// `|sum_{n<N} (-1)^{s(nd + a)} e(n xi)|` by direct summation.
pub fn s0_inner_direct(n: u64, d: u64, a: &BigUint, xi: f64) -> f64 {
    if xi == 0.0 {
        let mut acc = 0i64;
        let mut v = a.clone();
        for _ in 0..n {
            acc += 1 - 2 * i64::from(v.count_ones() & 1 == 1);
            v += d;
        }
        return acc.unsigned_abs() as f64;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut v = a.clone();
    for k in 0..n {
        let sign = if v.count_ones() & 1 == 1 { -1.0 } else { 1.0 };
        acc += e(k as f64 * xi) * sign;
        v += d;
    }
    acc.norm()
}

fn s0_term_structured(n: u64, d: u64, xi: f64) -> S0Term {
    let bits = shift_bits(n, d);
    let run = |truncated| {
        if xi == 0.0 && n < 1 << 15 {
            s0_shift_dp::<i16>(n, d, xi, bits, truncated)
        } else if xi == 0.0 {
            s0_shift_dp::<i32>(n, d, xi, bits, truncated)
        } else {
            s0_shift_dp::<Complex64>(n, d, xi, bits, truncated)
        }
    };
    let (full, full_at) = run(false);
    let (trunc, trunc_at) = run(true);
    if full >= trunc {
        S0Term { d, max_abs: full, arg_a: BigUint::from(full_at) }
    } else {
        // a1 = 1 has s(1) = s(2) = 1: the high part adds a constant sign
        S0Term { d, max_abs: trunc, arg_a: BigUint::from(trunc_at) + (BigUint::one() << bits) }
    }
}

/// Default budget for `S_0`, in array cells touched.
pub const S0_DEFAULT_BUDGET: f64 = 4e11;

/// `S_0 = sum_{d_lo <= d < d_hi} max_{a >= 0} |sum_{n<N} (-1)^{s(nd+a)} e(n xi)|`.
///
/// The structured strategy is exact. Write `a = a0 + 2^L a1` with
/// `(N-1) d < 2^L` and `a0 < 2^L`. Every `nd + a0` is below `2^{L+1}`, so
/// the high part contributes `s(a1 + carry)` with one carry bit. Up to a
/// global sign the sum is then the plain sum when `s(a1)` and `s(a1+1)` have
/// different parity (`a1 = 0`), and the sum with `s` replaced by `s_L` when
/// they agree (`a1 = 1`). Both are maximized over all `a0` by a digit
/// recursion.
pub fn s0_discrete(n: u64, d_lo: u64, d_hi: u64, xi: f64, strategy: AStrategy, budget: f64) -> Result<S0Result> {
    if n == 0 {
        return invalid("S_0 needs N >= 1");
    }
    if d_lo == 0 || d_hi < d_lo {
        return invalid(format!("need 1 <= d_lo <= d_hi, got [{d_lo}, {d_hi})"));
    }
    if !xi.is_finite() {
        return invalid("xi must be finite");
    }
    let cost = match strategy {
        AStrategy::Structured => (d_lo..d_hi).map(|d| 6.0 * 2f64.powi(shift_bits(n, d) as i32)).sum::<f64>(),
        AStrategy::ExhaustiveCapped { cap } => cap as f64 * n as f64 * (d_hi - d_lo) as f64,
    };
    check_budget(cost, budget)?;
    if let AStrategy::Structured = strategy {
        if (d_hi > 1 && shift_bits(n, d_hi - 1) > 40) || n > i32::MAX as u64 {
            return invalid("S_0 structured search out of range");
        }
    }
    let terms: Vec<S0Term> = (d_lo..d_hi)
        .into_par_iter()
        .map(|d| match strategy {
            AStrategy::Structured => s0_term_structured(n, d, xi),
            AStrategy::ExhaustiveCapped { cap } => {
                let mut best = S0Term { d, max_abs: f64::NEG_INFINITY, arg_a: BigUint::zero() };
                for a in 0..cap.max(1) {
                    let v = s0_inner_direct(n, d, &BigUint::from(a), xi);
                    if v > best.max_abs {
                        best.max_abs = v;
                        best.arg_a = BigUint::from(a);
                    }
                }
                best
            }
        })
        .collect();
    let value = terms.iter().map(|t| t.max_abs).sum();
    let exact = (xi == 0.0).then(|| terms.iter().map(|t| t.max_abs as i64).sum());
    Ok(S0Result { value, exact, terms })
}

/// How the supremum over `beta >= 0` is evaluated at each node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaStrategy {
    /// All breakpoints `{-n alpha}` of the fractional part: exact.
    Breakpoints,
    /// `grid` equally spaced fractional parts: a lower bound.
    Grid { grid: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct S0BeattyResult {
    pub value: f64,
    /// Exact quadrature value when `xi = 0`.
    pub exact: Option<Rational>,
    pub strategy: BetaStrategy,
}

/// `max_{b >= 0} |sum_{n<N} (-1)^{s(x_n + b)} e(n xi)|` for a nondecreasing
/// integer sequence `x_n >= 0`.
fn max_over_integer_shift(xs: &[u64], xi: f64, phases: &[Complex64]) -> f64 {
    let top = *xs.last().unwrap_or(&0);
    let bits = 64 - top.leading_zeros();
    let mut best = 0.0f64;
    for b0 in 0..(1u64 << bits) {
        for truncated in [false, true] {
            let parity = |v: u64| {
                if truncated {
                    truncated_digit_sum(u128::from(v), bits) & 1
                } else {
                    v.count_ones() & 1
                }
            };
            let m = if xi == 0.0 {
                xs.iter()
                    .map(|&x| 1 - 2 * i64::from(parity(x + b0) == 1))
                    .sum::<i64>()
                    .unsigned_abs() as f64
            } else {
                xs.iter()
                    .zip(phases)
                    .map(|(&x, &p)| if parity(x + b0) == 1 { -p } else { p })
                    .sum::<Complex64>()
                    .norm()
            };
            best = best.max(m);
        }
    }
    best
}

/// Default budget for the Beatty `S_0`, in summed terms.
pub const S0_BEATTY_DEFAULT_BUDGET: f64 = 2e9;

/// Midpoint quadrature of
/// `int_D^{2D} sup_{beta >= 0} |sum_{n<N} (-1)^{s(floor(n alpha + beta))} e(n xi)| d alpha`.
///
/// The integer part of `beta` is handled exactly by the same shift
/// reduction as in [`s0_discrete`].
pub fn s0_beatty(
    n: u64,
    d: &Rational,
    xi: f64,
    alpha_grid: u64,
    strategy: BetaStrategy,
    budget: f64,
) -> Result<S0BeattyResult> {
    if n == 0 || alpha_grid == 0 {
        return invalid("need N >= 1 and alpha_grid >= 1");
    }
    if d < &Rational::one() {
        return invalid("need D >= 1");
    }
    let betas_per_node = match strategy {
        BetaStrategy::Breakpoints => n,
        BetaStrategy::Grid { grid } => {
            if grid == 0 {
                return invalid("beta grid must be >= 1");
            }
            grid
        }
    };
    let span = 2.0 * d.to_f64() * n as f64 + 2.0;
    let cost = alpha_grid as f64 * betas_per_node as f64 * 4.0 * span * n as f64;
    check_budget(cost, budget)?;
    let phases: Vec<Complex64> = (0..n).map(|k| e(k as f64 * xi)).collect();
    let g = Rational::from_integer(alpha_grid);
    let node_values: Vec<f64> = (0..alpha_grid)
        .into_par_iter()
        .map(|j| {
            let alpha = d + &(d * &Rational::new(2 * j + 1, 2 * alpha_grid).expect("grid >= 1"));
            let betas: Vec<Rational> = match strategy {
                BetaStrategy::Breakpoints => {
                    let mut v: Vec<Rational> = (0..n)
                        .map(|k| (-(&alpha * &Rational::from_integer(k))).fract())
                        .collect();
                    v.sort();
                    v.dedup();
                    v
                }
                BetaStrategy::Grid { grid } => (0..grid).map(|i| Rational::new(i, grid).expect("grid >= 1")).collect(),
            };
            betas
                .iter()
                .map(|beta| {
                    let xs: Vec<u64> = (0..n)
                        .map(|k| {
                            (&alpha * &Rational::from_integer(k) + beta.clone())
                                .floor()
                                .to_u64()
                                .expect("nonnegative")
                        })
                        .collect();
                    max_over_integer_shift(&xs, xi, &phases)
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let width = d / &g;
    let value = node_values.iter().sum::<f64>() * width.to_f64();
    let exact = (xi == 0.0).then(|| {
        let sum: i64 = node_values.iter().map(|v| *v as i64).sum();
        Rational::from_integer(sum) * width.clone()
    });
    Ok(S0BeattyResult { value, exact, strategy })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PSExperiment {
    pub c: Rational,
    pub n: u64,
    pub zeros: u64,
    pub freq0: Rational,
    pub deviation: Rational,
    /// Indices whose floor could not be certified.
    pub exclusions: u64,
}

/// `floor(n^{p/q})` certified by `k^q <= n^p < (k+1)^q`, or `None` when the
/// float estimate is too far off to repair cheaply.
fn certified_floor_pow(n: u64, p: u32, q: u32, c: f64) -> Option<u64> {
    if n == 0 {
        return Some(0);
    }
    let guess = (n as f64).powf(c).floor();
    if !guess.is_finite() || guess >= 2f64.powi(63) {
        return None;
    }
    let mut k = guess as u64;
    let np_bits = f64::from(p) * (n as f64).log2();
    let kq_bits = f64::from(q) * ((k + 2) as f64).log2();
    let mut steps = 0;
    if np_bits < 126.0 && kq_bits < 126.0 {
        let target = (n as u128).pow(p);
        let pow = |k: u64| (k as u128).checked_pow(q);
        loop {
            let below = pow(k)? <= target;
            let above = target < pow(k + 1)?;
            match (below, above) {
                (true, true) => return Some(k),
                (false, _) => k = k.checked_sub(1)?,
                (true, false) => k += 1,
            }
            steps += 1;
            if steps > 4 {
                return None;
            }
        }
    }
    let target = BigUint::from(n).pow(p);
    let pow = |k: u64| BigUint::from(k).pow(q);
    loop {
        let below = pow(k) <= target;
        let above = target < pow(k + 1);
        match (below, above) {
            (true, true) => return Some(k),
            (false, _) => k = k.checked_sub(1)?,
            (true, false) => k += 1,
        }
        steps += 1;
        if steps > 4 {
            return None;
        }
    }
}

/// Frequency of `t(floor(n^c)) = 0` for `n < N`, reported at each checkpoint.
pub fn ps_frequency_checkpoints(c: &Rational, checkpoints: &[u64]) -> Result<Vec<PSExperiment>> {
    if c <= &Rational::one() || c >= &Rational::from_integer(2) {
        return invalid(format!("Piatetski-Shapiro exponent must lie in (1, 2), got {c}"));
    }
    if checkpoints.is_empty() || checkpoints.contains(&0) {
        return invalid("checkpoints must be nonempty and positive");
    }
    let (p, q) = (
        c.numer().to_u32().ok_or_else(|| Error::InvalidArgument("exponent numerator too large".into()))?,
        c.denom().to_u32().ok_or_else(|| Error::InvalidArgument("exponent denominator too large".into()))?,
    );
    let cf = c.to_f64();
    let mut sorted = checkpoints.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let last = *sorted.last().unwrap();
    const CHUNK: u64 = 1 << 14;
    let chunks: Vec<(u64, u64)> = (0..last.div_ceil(CHUNK))
        .into_par_iter()
        .map(|ci| {
            let lo = ci * CHUNK;
            let hi = (lo + CHUNK).min(last);
            let (mut zeros, mut excluded) = (0u64, 0u64);
            for k in lo..hi {
                match certified_floor_pow(k, p, q, cf) {
                    Some(v) => zeros += u64::from(tm_bit(v) == 0),
                    None => excluded += 1,
                }
            }
            (zeros, excluded)
        })
        .collect();
    // chunk boundaries need not match checkpoints; recount the partial chunk
    let mut out = Vec::with_capacity(sorted.len());
    for &cp in &sorted {
        let full = (cp / CHUNK) as usize;
        let (mut zeros, mut excluded) = chunks[..full]
            .iter()
            .fold((0u64, 0u64), |acc, c| (acc.0 + c.0, acc.1 + c.1));
        for k in (full as u64 * CHUNK)..cp {
            match certified_floor_pow(k, p, q, cf) {
                Some(v) => zeros += u64::from(tm_bit(v) == 0),
                None => excluded += 1,
            }
        }
        let counted = cp - excluded;
        let freq0 = if counted == 0 { Rational::zero() } else { Rational::new(zeros, counted)? };
        let deviation = (freq0.clone() - Rational::frac(1, 2)).abs();
        out.push(PSExperiment { c: c.clone(), n: cp, zeros, freq0, deviation, exclusions: excluded });
    }
    Ok(out)
}

pub fn ps_frequency(c: &Rational, n: u64) -> Result<PSExperiment> {
    Ok(ps_frequency_checkpoints(c, &[n])?.remove(0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

/// Least-squares line through `(ln x, ln y)`.
pub fn slope_fit(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 2 {
        return invalid("slope fit needs at least 2 points");
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return invalid("slope fit needs positive coordinates");
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return invalid("slope fit needs at least two distinct x values");
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = logs.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(SlopeFit { slope, intercept, residual: (sse / k).sqrt() })
}
