//! Exact discrepancy of `n alpha` sequences, the box-counting and carry
//! censuses, and a checker for the van der Corput inequality.
//!
//! Extreme discrepancy is position-free: with `F(t) = #{p < t}/N - t`
//! extended 1-periodically, the count deviation of the arc `[y, y + x)` is
//! `F(y + x) - F(y)`, so `D_N = sup F - inf F`. Both extremes sit at the
//! sorted residues, which turns the supremum into one sorted pass.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::digits::truncated_digit_sum;
use crate::error::{invalid, Error, Result};
use crate::rational::{Int, Rational};

/// Residues in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    points: Vec<Rational>,
}

impl PointSet {
    pub fn new(points: Vec<Rational>) -> Result<Self> {
        let zero = Rational::zero();
        let one = Rational::one();
        if let Some(p) = points.iter().find(|p| **p < zero || **p >= one) {
            return invalid(format!("residue {p} is outside [0, 1)"));
        }
        Ok(Self { points })
    }

    /// `{n alpha mod 1 : 0 <= n < N}`.
    pub fn n_alpha(alpha: &Rational, n: u64) -> Self {
        let points = (0..n)
            .map(|k| (alpha * &Rational::from_integer(k)).fract())
            .collect();
        Self { points }
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Extreme discrepancy of the point set (0 for the empty set).
    pub fn discrepancy(&self) -> Rational {
        if self.points.is_empty() {
            return Rational::zero();
        }
        let n = Rational::from_integer(self.points.len() as u64);
        let mut sorted = self.points.clone();
        sorted.sort();
        let mut hi = Rational::zero();
        let mut lo = Rational::zero();
        let mut i = 0;
        while i < sorted.len() {
            let mut j = i;
            while j < sorted.len() && sorted[j] == sorted[i] {
                j += 1;
            }
            let below = Rational::from_integer(i as u64) / n.clone() - sorted[i].clone();
            let upto = Rational::from_integer(j as u64) / n.clone() - sorted[i].clone();
            lo = lo.min(below);
            hi = hi.max(upto);
            i = j;
        }
        hi - lo
    }
}

/// `(sup F - inf F) * N * b` over sorted integer residues `v / b`.
fn discrepancy_scaled<T: Int>(sorted: &[T], b: &T) -> T {
    let n = T::from_usize(sorted.len()).expect("length fits");
    let mut hi = T::zero();
    let mut lo = T::zero();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let v = sorted[i].clone() * n.clone();
        let below = T::from_usize(i).unwrap() * b.clone() - v.clone();
        let upto = T::from_usize(j).unwrap() * b.clone() - v;
        if below < lo {
            lo = below;
        }
        if upto > hi {
            hi = upto;
        }
        i = j;
    }
    hi - lo
}

fn residues<T: Int>(a: &T, b: &T, n: u64) -> Vec<T> {
    let step = a.mod_floor(b);
    let mut cur = T::zero();
    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..n {
        out.push(cur.clone());
        cur = cur + step.clone();
        if &cur >= b {
            cur = cur - b.clone();
        }
    }
    out.sort();
    out
}

/// Exact extreme discrepancy `D_N(alpha)` of `{n alpha mod 1 : n < N}`.
pub fn discrepancy(alpha: &Rational, n: u64) -> Result<Rational> {
    if n == 0 {
        return invalid("discrepancy needs N >= 1");
    }
    let (a, b) = (alpha.numer(), alpha.denom());
    let scaled = if b.bits() < 62 && n < (1 << 31) {
        let (a, b) = (a.mod_floor(b).to_i128().unwrap(), b.to_i128().unwrap());
        BigInt::from(discrepancy_scaled(&residues(&a, &b, n), &b))
    } else {
        discrepancy_scaled(&residues(a, b, n), b)
    };
    Rational::new(scaled, b * BigInt::from(n))
}

/// Parameters of the box count: `n in [j_start, j_end)` with
/// `t/T <= {n alpha + beta} < (t+1)/T` and `floor(n alpha + beta) = k (mod K)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxQuery {
    pub j_start: i64,
    pub j_end: i64,
    pub alpha: Rational,
    pub beta: Rational,
    pub t: u64,
    pub t_count: u64,
    pub k: u64,
    pub k_count: u64,
}

impl BoxQuery {
    pub fn validate(&self) -> Result<()> {
        if self.j_end < self.j_start {
            return invalid("box interval has end < start");
        }
        if self.t_count == 0 || self.t >= self.t_count {
            return invalid(format!("need 0 <= t < T, got t={} T={}", self.t, self.t_count));
        }
        if self.k_count == 0 || self.k >= self.k_count {
            return invalid(format!("need 0 <= k < K, got k={} K={}", self.k, self.k_count));
        }
        Ok(())
    }

    pub fn len(&self) -> u64 {
        (self.j_end - self.j_start) as u64
    }

    pub fn is_empty(&self) -> bool {
        self.j_end == self.j_start
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxResult {
    pub count: u64,
    /// `N / (K T)`.
    pub predicted: Rational,
    /// `|count - N/(KT)|`.
    pub residual: Rational,
    /// `N D_N(alpha / K)`, the scale of the error term.
    pub error_scale: Rational,
}

/// Exact box count with its predicted main term.
pub fn box_count(query: &BoxQuery) -> Result<BoxResult> {
    query.validate()?;
    let n = query.len();
    let t_big = BigInt::from(query.t_count);
    let k_big = BigInt::from(query.k_count);
    // T (n alpha + beta) over the common denominator b d
    let (a, b) = (query.alpha.numer(), query.alpha.denom());
    let (c, d) = (query.beta.numer(), query.beta.denom());
    let den = b * d;
    let step = a * d * &t_big;
    let mut num = (BigInt::from(query.j_start) * a * d + c * b) * &t_big;
    let mut count = 0u64;
    for _ in 0..n {
        let scaled_floor = num.div_floor(&den);
        let (int_part, slot) = scaled_floor.div_mod_floor(&t_big);
        if slot == BigInt::from(query.t) && int_part.mod_floor(&k_big) == BigInt::from(query.k) {
            count += 1;
        }
        num += &step;
    }
    let predicted = Rational::new(n, BigInt::from(query.k_count * query.t_count))?;
    let residual = (Rational::from_integer(count) - predicted.clone()).abs();
    let error_scale = if n == 0 {
        Rational::zero()
    } else {
        let alpha_k = &query.alpha / &Rational::from_integer(query.k_count);
        Rational::from_integer(n) * discrepancy(&alpha_k, n)?
    };
    Ok(BoxResult { count, predicted, residual, error_scale })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarryResult {
    pub count: u64,
    /// `r (N alpha / 2^lambda + 2)`.
    pub bound: Rational,
}

/// Counts `n in [start, end)` where replacing `s` by `s_lambda` changes
/// `s(floor((n+r) alpha + beta)) - s(floor(n alpha + beta))`.
pub fn carry_census(
    start: u64,
    end: u64,
    r: u64,
    alpha: &Rational,
    beta: &Rational,
    lambda: u32,
) -> Result<CarryResult> {
    if end < start {
        return invalid("carry interval has end < start");
    }
    if alpha.is_negative() || alpha.is_zero() {
        return invalid("carry census needs alpha > 0");
    }
    if beta.is_negative() {
        return invalid("carry census needs beta >= 0");
    }
    let n = end - start;
    let (a, b) = (alpha.numer(), alpha.denom());
    let (c, d) = (beta.numer(), beta.denom());
    let den = b * d;
    let step = a * d;
    let base = c * b;
    let count = match (den.to_i128(), step.to_i128(), base.to_i128()) {
        (Some(den), Some(step), Some(base))
            if den.unsigned_abs().max(step.unsigned_abs()).max(base.unsigned_abs()) < 1 << 60
                && end.checked_add(r).is_some_and(|e| e < 1 << 60) =>
        {
            carry_count_small(start, end, r, den, step, base, lambda)
        }
        _ => carry_count_big(start, end, r, &den, &step, &base, lambda),
    };
    let bound = Rational::from_integer(r)
        * (Rational::from_integer(n) * alpha.clone() / Rational::pow2(lambda) + Rational::from_integer(2));
    if Rational::from_integer(count) > bound {
        return Err(Error::Internal(format!(
            "carry count {count} exceeds r(N alpha/2^lambda + 2) = {bound}"
        )));
    }
    Ok(CarryResult { count, bound })
}

fn carry_count_small(start: u64, end: u64, r: u64, den: i128, step: i128, base: i128, lambda: u32) -> u64 {
    let floor_at = |k: u64| -> u128 { (i128::from(k) * step + base).div_euclid(den) as u128 };
    let sums = |v: u128| (v.count_ones(), truncated_digit_sum(v, lambda));
    (start..end)
        .filter(|&k| {
            let (s0, l0) = sums(floor_at(k));
            let (s1, l1) = sums(floor_at(k + r));
            s1 as i64 - s0 as i64 != l1 as i64 - l0 as i64
        })
        .count() as u64
}

fn carry_count_big(start: u64, end: u64, r: u64, den: &BigInt, step: &BigInt, base: &BigInt, lambda: u32) -> u64 {
    let floor_at = |k: u64| -> BigInt { (BigInt::from(k) * step + base).div_floor(den) };
    let digit_sums = |v: &BigInt| -> (u64, u64) {
        let (_, digits) = v.to_u64_digits();
        let full: u64 = digits.iter().map(|w| u64::from(w.count_ones())).sum();
        let low = digits.first().copied().unwrap_or(0);
        let low = if lambda >= 64 {
            let mut acc = 0u64;
            for (i, w) in digits.iter().enumerate() {
                let lo_bit = 64 * i as u32;
                if lo_bit >= lambda {
                    break;
                }
                acc += u64::from(truncated_digit_sum(u128::from(*w), lambda - lo_bit));
            }
            acc
        } else {
            u64::from(truncated_digit_sum(u128::from(low), lambda))
        };
        (full, low)
    };
    let mut count = 0u64;
    for k in start..end {
        let (s0, l0) = digit_sums(&floor_at(k));
        let (s1, l1) = digit_sums(&floor_at(k + r));
        if s1 as i64 - s0 as i64 != l1 as i64 - l0 as i64 {
            count += 1;
        }
    }
    count
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VdcResult {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Relative slack allowed in the floating-point check.
pub const VDC_TOLERANCE: f64 = 1e-9;

/// Evaluates `|sum z_n|^2` and
/// `(N + K(R-1))/R * sum_{|r|<R} (1 - |r|/R) sum_{n, n+Kr in I} z_{n+Kr} conj(z_n)`.
///
/// The tolerance is relative to `(N + K(R-1)) * sum |z_n|^2`, the natural
/// size of the right-hand side.
pub fn vdc_check(z: &[Complex64], k: usize, r: usize) -> Result<VdcResult> {
    if k == 0 || r == 0 {
        return invalid("van der Corput check needs K >= 1 and R >= 1");
    }
    let n = z.len();
    let total: Complex64 = z.iter().sum();
    let lhs = total.norm_sqr();
    let mut inner = 0.0;
    for shift in 0..r {
        let weight = 1.0 - shift as f64 / r as f64;
        let offset = k * shift;
        let mut corr = Complex64::new(0.0, 0.0);
        for i in 0..n.saturating_sub(offset) {
            corr += z[i + offset] * z[i].conj();
        }
        // shifts r and -r are complex conjugates
        let mult = if shift == 0 { 1.0 } else { 2.0 };
        inner += mult * weight * corr.re;
    }
    let factor = (n + k * (r - 1)) as f64 / r as f64;
    let rhs = factor * inner;
    let energy: f64 = z.iter().map(|x| x.norm_sqr()).sum();
    let scale = (n + k * (r - 1)) as f64 * energy;
    Ok(VdcResult { lhs, rhs, ok: lhs <= rhs + VDC_TOLERANCE * scale.max(lhs) })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VdcExact {
    pub lhs: Rational,
    pub rhs: Rational,
    pub ok: bool,
}

/// Exact form of [`vdc_check`] for Gaussian rationals `(re, im)`.
pub fn vdc_check_exact(z: &[(Rational, Rational)], k: usize, r: usize) -> Result<VdcExact> {
    if k == 0 || r == 0 {
        return invalid("van der Corput check needs K >= 1 and R >= 1");
    }
    let n = z.len();
    let (mut sre, mut sim) = (Rational::zero(), Rational::zero());
    for (a, b) in z {
        sre = sre + a.clone();
        sim = sim + b.clone();
    }
    let lhs = &sre * &sre + &sim * &sim;
    let rr = Rational::from_integer(r as u64);
    let mut inner = Rational::zero();
    for shift in 0..r {
        let offset = k * shift;
        let mut corr = Rational::zero();
        for i in 0..n.saturating_sub(offset) {
            let (a, b) = &z[i + offset];
            let (c, d) = &z[i];
            corr = corr + a * c + b * d;
        }
        let weight = Rational::one() - Rational::from_integer(shift as u64) / rr.clone();
        let mult = Rational::from_integer(if shift == 0 { 1 } else { 2 });
        inner = inner + mult * weight * corr;
    }
    let rhs = Rational::from_integer((n + k * (r - 1)) as u64) / rr * inner;
    let ok = lhs <= rhs;
    Ok(VdcExact { lhs, rhs, ok })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanMode {
    /// `sum_{d < 2^mu} D_N(d / 2^mu)`.
    Discrete,
    /// Midpoint rule for `int_0^1 D_N(alpha) d alpha` on `grid` nodes.
    ContinuousSampled { grid: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanDiscrepancy {
    pub value: Rational,
    /// `(N + 2^mu)/N (log+ N)^2` in discrete mode, `(log+ N)^2 / N` otherwise.
    pub bound_shape: f64,
}

/// `log+ x = max(1, log x)`.
pub fn log_plus(x: f64) -> f64 {
    x.ln().max(1.0)
}

pub fn mean_discrepancy_sum(mu: u32, n: u64, mode: MeanMode) -> Result<MeanDiscrepancy> {
    if n == 0 {
        return invalid("mean discrepancy needs N >= 1");
    }
    let lp = log_plus(n as f64);
    match mode {
        MeanMode::Discrete => {
            if mu > 30 {
                return invalid("mu too large for an exhaustive sum");
            }
            let mut value = Rational::zero();
            for d in 0..(1u64 << mu) {
                value = value + discrepancy(&Rational::new(d, 1u64 << mu)?, n)?;
            }
            let bound_shape = (n as f64 + (1u64 << mu) as f64) / n as f64 * lp * lp;
            Ok(MeanDiscrepancy { value, bound_shape })
        }
        MeanMode::ContinuousSampled { grid } => {
            if grid == 0 {
                return invalid("grid must be >= 1");
            }
            let mut value = Rational::zero();
            for j in 0..grid {
                value = value + discrepancy(&Rational::new(2 * j + 1, 2 * grid)?, n)?;
            }
            value = value / Rational::from_integer(grid);
            Ok(MeanDiscrepancy { value, bound_shape: lp * lp / n as f64 })
        }
    }
}
