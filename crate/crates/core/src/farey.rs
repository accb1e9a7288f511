//! Farey series, the Farey dissection `p_Q(alpha)/q_Q(alpha)`, and the
//! digit-removal constructions `K_i`, `M_i`, `p_i` built on top of it.
//!
//! The Farey series of order `Q` has unbounded numerators, so it is
//! invariant under integer translation. Every routine here works on the
//! fractional part in `[0, 1)` and translates the result back by the
//! integer part. Brackets are found by Stern–Brocot descent with batched
//! steps, which takes `O(log Q)` iterations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{check_budget, invalid, Error, Result};
use crate::rational::{Int, Rational};

/// `(a + c) / (b + d)` for `a/b < c/d`.
pub fn mediant(left: &Rational, right: &Rational) -> Result<Rational> {
    if left >= right {
        return invalid(format!("mediant needs left < right, got {left} >= {right}"));
    }
    Rational::new(left.numer() + right.numer(), left.denom() + right.denom())
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let eg = a.mod_floor(m).extended_gcd(m);
    if eg.gcd.is_one() {
        Some(eg.x.mod_floor(m))
    } else {
        None
    }
}

/// Largest `d <= n` with `d = r (mod b)`.
fn largest_congruent(n: &BigInt, r: &BigInt, b: &BigInt) -> BigInt {
    n - (n - r).mod_floor(b)
}

/// Left and right neighbours of `x` in the Farey series `F_n`.
///
/// For `x = a/b` the right neighbour `c/d` solves `bc - ad = 1` with the
/// largest admissible `d <= n`; the left neighbour is symmetric.
pub fn farey_neighbors(x: &Rational, n: u64) -> Result<(Rational, Rational)> {
    if n == 0 {
        return invalid("Farey order must be >= 1");
    }
    let a = x.numer();
    let b = x.denom();
    let nb = BigInt::from(n);
    if b > &nb {
        return invalid(format!("{x} is not in F_{n}: denominator exceeds order"));
    }
    let inv = mod_inverse(a, b).unwrap_or_else(BigInt::zero);
    // right: a d = -1 (mod b)
    let r_right = (-&inv).mod_floor(b);
    let d = largest_congruent(&nb, &r_right, b);
    let c = (BigInt::one() + a * &d) / b;
    // left: a g = 1 (mod b)
    let g = largest_congruent(&nb, &inv.mod_floor(b), b);
    let e = (a * &g - BigInt::one()) / b;
    Ok((Rational::new(e, g)?, Rational::new(c, d)?))
}

/// Bracketing neighbours `a/b <= x/y < c/d` in `F_order`, for
/// `0 <= x < y`. Fractions are returned as `(numerator, denominator)`.
pub(crate) fn bracket_unit<T: Int>(x: &T, y: &T, order: &T) -> ((T, T), (T, T)) {
    let (mut a, mut b) = (T::zero(), T::one());
    let (mut c, mut d) = (T::one(), T::one());
    if y <= order {
        // x/y itself lies in F_order
        let g = x.gcd(y);
        let (p, q) = (x.clone() / g.clone(), y.clone() / g);
        if p.is_zero() {
            let right = (T::one(), order.clone());
            return ((T::zero(), T::one()), right);
        }
        // right neighbour of p/q by the same descent, from the left endpoint
        a = p;
        b = q;
        let (lc, ld) = right_neighbor_of(&a, &b, order);
        return ((a, b), (lc, ld));
    }
    loop {
        let mb = b.clone() + d.clone();
        if &mb > order {
            break;
        }
        let ma = a.clone() + c.clone();
        // P = x b - y a >= 0, R = y c - x d > 0
        let p = x.clone() * b.clone() - y.clone() * a.clone();
        let r = y.clone() * c.clone() - x.clone() * d.clone();
        if x.clone() * mb.clone() < ma.clone() * y.clone() {
            let k_order = (order.clone() - d.clone()) / b.clone();
            let k = if p.is_zero() {
                k_order
            } else {
                ((r - T::one()) / p).min(k_order)
            };
            c = k.clone() * a.clone() + c;
            d = k * b.clone() + d;
        } else {
            let k_order = (order.clone() - b.clone()) / d.clone();
            let k = (p / r).min(k_order);
            a = a + k.clone() * c.clone();
            b = b + k * d.clone();
        }
    }
    ((a, b), (c, d))
}

/// Right neighbour of the reduced fraction `p/q` in `F_order` (`q <= order`).
fn right_neighbor_of<T: Int>(p: &T, q: &T, order: &T) -> (T, T) {
    if q.is_one() {
        return (p.clone() * order.clone() + T::one(), order.clone());
    }
    let eg = p.mod_floor(q).extended_gcd(q);
    let inv = eg.x.mod_floor(q);
    let r = (T::zero() - inv).mod_floor(q);
    let d = order.clone() - (order.clone() - r).mod_floor(q);
    let c = (T::one() + p.clone() * d.clone()) / q.clone();
    (c, d)
}

/// `(p_Q(x/y), q_Q(x/y))` for any `x/y` with `y > 0`.
pub(crate) fn approx_generic<T: Int>(x: &T, y: &T, order: &T) -> (T, T) {
    let (k, frac) = x.div_mod_floor(y);
    let ((a, b), (c, d)) = bracket_unit(&frac, y, order);
    // alpha < (a + c)/(b + d) selects the left endpoint
    let (p, q) = if frac.clone() * (b.clone() + d.clone()) < (a.clone() + c.clone()) * y.clone() {
        (a, b)
    } else {
        (c, d)
    };
    (p + k * q.clone(), q)
}

/// Result of the Farey dissection of order `Q` at a point `alpha`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FareyApprox {
    pub p: BigInt,
    pub q: u64,
    pub order: u64,
}

impl FareyApprox {
    pub fn as_rational(&self) -> Rational {
        Rational::new(self.p.clone(), self.q).expect("q >= 1")
    }

    /// Checks `1 <= q <= Q` and `|q alpha - p| < 1/Q`.
    pub fn verify(&self, alpha: &Rational) -> bool {
        if self.q == 0 || self.q > self.order {
            return false;
        }
        let err = (alpha * &Rational::from_integer(self.q) - Rational::from_integer(self.p.clone())).abs();
        err < Rational::new(1, self.order).expect("order >= 1")
    }
}

fn order_check(order: u64) -> Result<()> {
    if order == 0 {
        return invalid("Farey order must be >= 1");
    }
    Ok(())
}

/// Neighbours `a/b <= alpha < c/d` of `F_Q` around `alpha`.
pub fn farey_bracket(alpha: &Rational, order: u64) -> Result<(Rational, Rational)> {
    order_check(order)?;
    let x = alpha.numer();
    let y = alpha.denom();
    let (k, frac) = x.div_mod_floor(y);
    let ((a, b), (c, d)) = if let Some(((fx, fy), q)) = small_parts(&frac, y, order) {
        let ((a, b), (c, d)) = bracket_unit(&fx, &fy, &q);
        ((BigInt::from(a), BigInt::from(b)), (BigInt::from(c), BigInt::from(d)))
    } else {
        bracket_unit(&frac, y, &BigInt::from(order))
    };
    Ok((Rational::new(a + &k * &b, b)?, Rational::new(c + &k * &d, d)?))
}

fn small_parts(x: &BigInt, y: &BigInt, order: u64) -> Option<((i128, i128), i128)> {
    if y.bits() > 60 || order > (1 << 60) {
        return None;
    }
    Some(((x.to_i128()?, y.to_i128()?), order as i128))
}

/// The Farey dissection `p_Q(alpha)/q_Q(alpha)`. The result always
/// satisfies `|q alpha - p| < 1/Q`.
pub fn farey_approx(alpha: &Rational, order: u64) -> Result<FareyApprox> {
    order_check(order)?;
    let x = alpha.numer();
    let y = alpha.denom();
    let (k, frac) = x.div_mod_floor(y);
    let (p, q) = if let Some(((fx, fy), ord)) = small_parts(&frac, y, order) {
        let (p, q) = approx_generic(&fx, &fy, &ord);
        (BigInt::from(p), BigInt::from(q))
    } else {
        approx_generic(&frac, y, &BigInt::from(order))
    };
    let q = q.to_u64().expect("q <= order fits u64");
    let approx = FareyApprox { p: p + k * BigInt::from(q), q, order };
    if !approx.verify(alpha) {
        return Err(Error::Internal(format!(
            "Farey approximation {}/{} of {alpha} at order {order} violates the Dirichlet bound",
            approx.p, approx.q
        )));
    }
    Ok(approx)
}

/// The Farey interval around `p/q` at order `Q`: all `alpha` with
/// `p_Q(alpha) = p`, `q_Q(alpha) = q`. Half-open `[lo, hi)`.
pub fn farey_interval(center: &Rational, order: u64) -> Result<(Rational, Rational)> {
    let (left, right) = farey_neighbors(center, order)?;
    Ok((mediant(&left, center)?, mediant(center, &right)?))
}

/// `K_i`, `M_i` and `p_i` for `i = 1..m` together with their inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FareyConstruction {
    pub m: u32,
    pub mu: u32,
    pub sigma: u32,
    pub alpha: Rational,
    pub k: Vec<BigInt>,
    pub m_vals: Vec<BigInt>,
    pub p_frak: Vec<BigInt>,
}

/// One `(K_i, M_i, p_i)` triple. `i` is 1-based.
fn construction_term<T: Int>(num: &T, den: &T, m: u32, mu: u32, sigma: u32, i: u32) -> (T, T, T) {
    let two = |e: u32| -> T {
        let mut v = T::one();
        for _ in 0..e {
            v = v.clone() + v;
        }
        v
    };
    if i == m {
        let (p, q) = approx_generic(num, &(den.clone() * two((m + 1) * mu)), &two(mu + sigma));
        return (q, p.clone(), p);
    }
    let (shift, order) = if i == 1 {
        (2 * mu, two(2 * mu + 2 * sigma))
    } else {
        ((i + 1) * mu, two(mu + 2 * sigma))
    };
    let (p1, q1) = approx_generic(num, &(den.clone() * two(shift)), &order);
    let (pp, qq) = approx_generic(&p1, &two((m - i) * mu), &two(sigma));
    (q1 * qq.clone(), p1 * qq, pp)
}

fn fits_i64(num: &BigInt, den: &BigInt, m: u32, mu: u32, sigma: u32) -> bool {
    let scale = u64::from((m + 1) * mu);
    let order_bits = u64::from(2 * mu + 2 * sigma) + 2;
    num.bits().max(den.bits() + scale) + order_bits < 61
}

fn fits_i128(num: &BigInt, den: &BigInt, m: u32, mu: u32, sigma: u32) -> bool {
    let scale = u64::from((m + 1) * mu);
    let order_bits = u64::from(2 * mu + 2 * sigma) + 2;
    num.bits().max(den.bits() + scale) + order_bits < 124
}

fn construction_terms(alpha: &Rational, m: u32, mu: u32, sigma: u32) -> Vec<(BigInt, BigInt, BigInt)> {
    let (num, den) = (alpha.numer(), alpha.denom());
    let big = |(a, b, c): (i128, i128, i128)| (BigInt::from(a), BigInt::from(b), BigInt::from(c));
    (1..=m)
        .map(|i| {
            if fits_i128(num, den, m, mu, sigma) {
                let (n, d) = (num.to_i128().unwrap(), den.to_i128().unwrap());
                big(construction_term(&n, &d, m, mu, sigma, i))
            } else {
                construction_term(num, den, m, mu, sigma, i)
            }
        })
        .collect()
}

/// Builds `K_i`, `M_i`, `p_i` for `alpha` and checks the three
/// approximation bounds
/// `|K_1 alpha - 2^{2mu} M_1| < 2^-sigma`,
/// `|K_i alpha / 2^{i mu} - 2^mu M_i| < 2^-sigma` for `2 <= i <= m`.
pub fn build_farey_construction(alpha: &Rational, m: u32, mu: u32, sigma: u32) -> Result<FareyConstruction> {
    if m < 2 {
        return invalid(format!("construction needs m >= 2, got {m}"));
    }
    if alpha.is_negative() {
        return invalid("construction needs alpha >= 0");
    }
    let terms = construction_terms(alpha, m, mu, sigma);
    let bound = Rational::pow2_inv(sigma);
    for (idx, (k, mv, _)) in terms.iter().enumerate() {
        let i = idx as u32 + 1;
        if k.is_zero() || k.is_negative() {
            return Err(Error::Internal(format!("K_{i} = {k} is not positive")));
        }
        let lhs = if i == 1 {
            alpha * &Rational::from_integer(k.clone()) - Rational::from_integer(mv << (2 * mu))
        } else {
            alpha * &Rational::from_integer(k.clone()) / Rational::pow2(i * mu)
                - Rational::from_integer(mv << mu)
        };
        if lhs.abs() >= bound {
            return Err(Error::Internal(format!(
                "approximation bound {i} violated: |{lhs}| >= 2^-{sigma} for alpha={alpha}"
            )));
        }
    }
    let (k, rest): (Vec<_>, Vec<_>) = terms.into_iter().map(|(k, m, p)| (k, (m, p))).unzip();
    let (m_vals, p_frak) = rest.into_iter().unzip();
    Ok(FareyConstruction { m, mu, sigma, alpha: alpha.clone(), k, m_vals, p_frak })
}

/// Exact and sampled measure of `{x in [0,1] : 2^gamma | q_K(x)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QDivisibility {
    pub exact: Rational,
    /// Fraction of the `grid` midpoints `(j + 1/2)/grid` in the set.
    pub sampled: Rational,
    /// `2^-gamma + 1/K`, the shape of the expected bound.
    pub bound: Rational,
}

/// Sums the Farey-interval lengths (clipped to `[0,1]`) around every
/// `p/q in [0,1]` with `q <= K` and `2^gamma | q`.
pub fn q_divisibility_measure(order: u64, gamma: u32, grid: u64) -> Result<QDivisibility> {
    order_check(order)?;
    if grid == 0 {
        return invalid("grid must be >= 1");
    }
    let step = 1u64.checked_shl(gamma).unwrap_or(0);
    let zero = Rational::zero();
    let one = Rational::one();
    let mut exact = Rational::zero();
    if step != 0 {
        let mut q = step;
        while q <= order {
            for p in 0..=q {
                if p.gcd(&q) != 1 {
                    continue;
                }
                let center = Rational::new(p, q)?;
                let (lo, hi) = farey_interval(&center, order)?;
                let lo = lo.max(zero.clone());
                let hi = hi.min(one.clone());
                if hi > lo {
                    exact = exact + (hi - lo);
                }
            }
            q += step;
        }
    }
    let hits = (0..grid)
        .filter(|&j| {
            let x = Rational::new(2 * j + 1, 2 * grid).expect("grid >= 1");
            let a = farey_approx(&x, order).expect("valid order");
            step != 0 && a.q % step == 0
        })
        .count() as u64;
    Ok(QDivisibility {
        exact,
        sampled: Rational::new(hits, grid)?,
        bound: Rational::pow2_inv(gamma) + Rational::new(1, order)?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpacedCount {
    pub count: u64,
    /// `K^2/2^gamma + (1/delta)(2^-gamma + 1/K)`.
    pub bound: Rational,
}

/// Counts points with `2^gamma | q_K(x_i)` among `delta`-spaced points of
/// the circle.
pub fn spaced_points_divisibility_count(
    points: &[Rational],
    delta: &Rational,
    order: u64,
    gamma: u32,
) -> Result<SpacedCount> {
    order_check(order)?;
    if delta.is_negative() || delta.is_zero() {
        return invalid("delta must be positive");
    }
    let zero = Rational::zero();
    let one = Rational::one();
    if points.iter().any(|x| x < &zero || x > &one) {
        return invalid("points must lie in [0, 1]");
    }
    let mut residues: Vec<Rational> = points.iter().map(|x| x.fract()).collect();
    residues.sort();
    if residues.len() > 1 {
        for w in residues.windows(2) {
            if &(&w[1] - &w[0]) < delta {
                return invalid(format!("points {} and {} are closer than delta={delta}", w[0], w[1]));
            }
        }
        let wrap = &residues[0] + &one - residues[residues.len() - 1].clone();
        if &wrap < delta {
            return invalid(format!("points wrap around closer than delta={delta}"));
        }
    }
    let step = 1u64.checked_shl(gamma).unwrap_or(0);
    let mut count = 0;
    for x in points {
        let a = farey_approx(x, order)?;
        if step != 0 && a.q % step == 0 {
            count += 1;
        }
    }
    let kq = Rational::from_integer(order);
    let bound = &kq * &kq / Rational::pow2(gamma)
        + delta.recip()? * (Rational::pow2_inv(gamma) + kq.recip()?);
    Ok(SpacedCount { count, bound })
}

/// Parameter system under which the exceptional set is small:
/// `lambda >= (m+1) mu`, `gamma <= lambda - (m+1) mu`, `mu >= 4 sigma`,
/// `sigma >= gamma >= 1`, `m >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExceptionParams {
    pub lambda: u32,
    pub mu: u32,
    pub sigma: u32,
    pub gamma: u32,
    pub m: u32,
}

impl ExceptionParams {
    pub fn validate(&self) -> Result<()> {
        let ExceptionParams { lambda, mu, sigma, gamma, m } = *self;
        if m < 2 {
            return invalid(format!("violated m >= 2 (m={m})"));
        }
        let scaled = (m + 1) * mu;
        if lambda < scaled {
            return invalid(format!("violated lambda >= (m+1)mu ({lambda} < {scaled})"));
        }
        if gamma > lambda - scaled {
            return invalid(format!("violated gamma <= lambda-(m+1)mu ({gamma} > {})", lambda - scaled));
        }
        if mu < 4 * sigma {
            return invalid(format!("violated mu >= 4 sigma ({mu} < {})", 4 * sigma));
        }
        if sigma < gamma {
            return invalid(format!("violated sigma >= gamma ({sigma} < {gamma})"));
        }
        if gamma < 1 {
            return invalid("violated gamma >= 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CensusMode {
    /// `alpha` runs over `{0, ..., 2^lambda - 1}`.
    Discrete,
    /// `alpha` runs over `j / 2^grid_bits` in `[0, 2^lambda)`; each point
    /// stands for a cell of length `2^-grid_bits`.
    ContinuousSampled { grid_bits: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusResult {
    pub params: ExceptionParams,
    pub mode: CensusMode,
    /// Number of grid points in the exceptional set.
    pub count: u64,
    /// `count` scaled by the cell length (equals `count` in discrete mode).
    pub measure: Rational,
    /// `measure * 2^(gamma - lambda)`.
    pub normalized: Rational,
}

fn is_exception<T: Int>(num: &T, den: &T, p: &ExceptionParams, modulus: &T) -> bool {
    (1..=p.m).any(|i| {
        let (_, _, pf) = construction_term(num, den, p.m, p.mu, p.sigma, i);
        pf.mod_floor(modulus).is_zero()
    })
}

/// Counts `alpha < 2^lambda` such that `2^{3 gamma}` divides some `p_i`.
pub fn exceptions_census(params: ExceptionParams, mode: CensusMode, budget: f64) -> Result<CensusResult> {
    params.validate()?;
    let grid_bits = match mode {
        CensusMode::Discrete => 0,
        CensusMode::ContinuousSampled { grid_bits } => {
            if grid_bits <= 2 * params.sigma {
                return invalid(format!(
                    "continuous census needs grid_bits > 2 sigma = {}, got {grid_bits}",
                    2 * params.sigma
                ));
            }
            grid_bits
        }
    };
    let total_bits = params.lambda + grid_bits;
    if total_bits > 40 {
        return invalid(format!("census over 2^{total_bits} points is out of range"));
    }
    let points = 1u64 << total_bits;
    check_budget(points as f64 * f64::from(params.m), budget)?;

    let num_bits = BigInt::from(points);
    let den_big = BigInt::one() << grid_bits;
    let count = if fits_i64(&num_bits, &den_big, params.m, params.mu, params.sigma) {
        let den = 1i64 << grid_bits;
        let modulus = 1i64 << (3 * params.gamma);
        count_parallel(points, |a| is_exception(&(a as i64), &den, &params, &modulus))
    } else if fits_i128(&num_bits, &den_big, params.m, params.mu, params.sigma) {
        let den = 1i128 << grid_bits;
        let modulus = 1i128 << (3 * params.gamma);
        count_parallel(points, |a| is_exception(&(a as i128), &den, &params, &modulus))
    } else {
        let modulus = BigInt::one() << (3 * params.gamma);
        count_parallel(points, |a| is_exception(&BigInt::from(a), &den_big, &params, &modulus))
    };
    let measure = Rational::new(count, BigInt::one() << grid_bits)?;
    let normalized = &measure * &Rational::pow2(params.gamma) / Rational::pow2(params.lambda);
    Ok(CensusResult { params, mode, count, measure, normalized })
}

fn count_parallel(points: u64, pred: impl Fn(u64) -> bool + Sync) -> u64 {
    const CHUNK: u64 = 1 << 16;
    let chunks = points.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(points);
            (lo..hi).filter(|&a| pred(a)).count() as u64
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// All fractions p/q in [lo, hi] with q <= n, sorted (brute force).
    fn farey_brute(n: u64, lo: i64, hi: i64) -> Vec<Rational> {
        let mut v = Vec::new();
        for q in 1..=n as i64 {
            for p in lo * q..=hi * q {
                v.push(Rational::frac(p, q));
            }
        }
        v.sort();
        v.dedup();
        v
    }

    fn approx_brute(alpha: &Rational, n: u64) -> (BigInt, u64) {
        let fl = alpha.floor().to_i64().unwrap();
        let f = farey_brute(n, fl - 1, fl + 2);
        let i = f.iter().rposition(|x| x <= alpha).unwrap();
        let (l, r) = (&f[i], &f[i + 1]);
        let med = mediant(l, r).unwrap();
        let pick = if alpha < &med { l } else { r };
        (pick.numer().clone(), pick.denom().to_u64().unwrap())
    }

    #[test]
    fn mediant_examples() {
        assert_eq!(mediant(&Rational::frac(0, 1), &Rational::frac(1, 1)).unwrap(), Rational::frac(1, 2));
        assert_eq!(mediant(&Rational::frac(1, 3), &Rational::frac(1, 2)).unwrap(), Rational::frac(2, 5));
        assert!(mediant(&Rational::frac(1, 2), &Rational::frac(1, 3)).is_err());
    }

    #[test]
    fn neighbor_examples() {
        let (l, r) = farey_neighbors(&Rational::frac(1, 2), 3).unwrap();
        assert_eq!((l, r), (Rational::frac(1, 3), Rational::frac(2, 3)));
        let (_, r) = farey_neighbors(&Rational::frac(0, 1), 1).unwrap();
        assert_eq!(r, Rational::frac(1, 1));
        assert!(farey_neighbors(&Rational::frac(1, 5), 4).is_err());
    }

    #[test]
    fn neighbors_match_enumeration() {
        for n in 1..=12u64 {
            let f = farey_brute(n, -2, 3);
            for i in 1..f.len() - 1 {
                if f[i] < Rational::from_integer(-1) || f[i] > Rational::from_integer(2) {
                    continue;
                }
                let (l, r) = farey_neighbors(&f[i], n).unwrap();
                assert_eq!(l, f[i - 1], "n={n} x={}", f[i]);
                assert_eq!(r, f[i + 1], "n={n} x={}", f[i]);
            }
        }
    }

    #[test]
    fn approx_examples() {
        let a = farey_approx(&Rational::frac(2, 5), 2).unwrap();
        assert_eq!((a.p.clone(), a.q), (BigInt::from(1), 2));
        for q in 1..20 {
            let a = farey_approx(&Rational::from_integer(7), q).unwrap();
            assert_eq!((a.p, a.q), (BigInt::from(7), 1));
        }
        let a = farey_approx(&Rational::frac(1, 3), 3).unwrap();
        assert_eq!((a.p, a.q), (BigInt::from(1), 3));
    }

    #[test]
    fn approx_matches_brute_force() {
        for den in 1..=40i64 {
            for num in 0..=3 * den {
                let alpha = Rational::frac(num, den);
                for n in 1..=13u64 {
                    let a = farey_approx(&alpha, n).unwrap();
                    assert_eq!((a.p.clone(), a.q), approx_brute(&alpha, n), "alpha={alpha} n={n}");
                }
            }
        }
    }

    #[test]
    fn bracket_is_adjacent() {
        for j in 0..512i64 {
            let alpha = Rational::frac(j, 97);
            for n in [1u64, 2, 5, 17, 64, 200] {
                let (l, r) = farey_bracket(&alpha, n).unwrap();
                assert!(l <= alpha && alpha < r);
                let bc_ad = l.denom() * r.numer() - l.numer() * r.denom();
                assert!(bc_ad.is_one());
                assert!(l.denom() + r.denom() > BigInt::from(n));
            }
        }
    }

    #[test]
    fn big_path_agrees_with_small_path() {
        let alpha = Rational::new(BigInt::from(3) << 90, (BigInt::one() << 91) + 1).unwrap();
        let a = farey_approx(&alpha, 1000).unwrap();
        assert!(a.verify(&alpha));
        let small = Rational::frac(3, 2);
        let a = farey_approx(&small, 1 << 61).unwrap();
        assert_eq!((a.p, a.q), (BigInt::from(3), 2));
    }

    #[test]
    fn construction_example_alpha_five() {
        // Farey approximations by enumeration: 5/4 in F_16 is exact,
        // 5/2 in F_2 is exact, 5/8 in F_4 lies in [1/2, 2/3) past 3/5.
        assert_eq!(approx_brute(&Rational::frac(5, 4), 16), (BigInt::from(5), 4));
        assert_eq!(approx_brute(&Rational::frac(5, 2), 2), (BigInt::from(5), 2));
        assert_eq!(approx_brute(&Rational::frac(5, 8), 4), (BigInt::from(2), 3));
        let c = build_farey_construction(&Rational::from_integer(5), 2, 1, 1).unwrap();
        let ints = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(c.k, ints(&[8, 3]));
        assert_eq!(c.m_vals, ints(&[10, 2]));
        assert_eq!(c.p_frak, ints(&[5, 2]));
    }

    #[test]
    fn construction_on_exact_multiples() {
        for (m, mu) in [(2u32, 1u32), (3, 2), (4, 1)] {
            let unit = 1i64 << ((m + 1) * mu);
            for j in 0..6 {
                let alpha = Rational::from_integer(j * unit);
                let c = build_farey_construction(&alpha, m, mu, 1).unwrap();
                assert_eq!(c.k[m as usize - 1], BigInt::one());
                assert_eq!(c.m_vals[m as usize - 1], BigInt::from(j));
                assert_eq!(c.p_frak[m as usize - 1], BigInt::from(j));
            }
        }
    }

    #[test]
    fn construction_bounds_hold_for_dyadic_alpha() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let m = rng.gen_range(2..5);
            let sigma = rng.gen_range(0..3);
            let mu = rng.gen_range(0..5);
            let lambda = 16;
            let k = rng.gen_range(0..8);
            let alpha = Rational::new(rng.gen_range(0..(1i64 << (lambda + k))), 1i64 << k).unwrap();
            build_farey_construction(&alpha, m, mu, sigma).unwrap();
        }
    }

    #[test]
    fn q_measure_examples() {
        for k in [1, 2, 5, 9] {
            assert_eq!(q_divisibility_measure(k, 0, 16).unwrap().exact, Rational::one());
        }
        // F_4 in [0,1]: 0,1/4,1/3,1/2,2/3,3/4,1. Even denominators and their
        // mediant intervals: [1/5,2/7), [2/5,3/5), [5/7,4/5).
        let expected = (Rational::frac(2, 7) - Rational::frac(1, 5))
            + (Rational::frac(3, 5) - Rational::frac(2, 5))
            + (Rational::frac(4, 5) - Rational::frac(5, 7));
        let got = q_divisibility_measure(4, 1, 1000).unwrap();
        assert_eq!(got.exact, expected);
        assert_eq!(expected, Rational::frac(13, 35));
        let diff = (got.sampled.to_f64() - got.exact.to_f64()).abs();
        assert!(diff < 0.01);
    }

    #[test]
    fn spaced_points_examples() {
        let pts: Vec<Rational> = (0..64).map(|j| Rational::frac(j, 64)).collect();
        let r = spaced_points_divisibility_count(&pts, &Rational::frac(1, 64), 16, 0).unwrap();
        assert_eq!(r.count, 64);
        let r = spaced_points_divisibility_count(&pts, &Rational::frac(1, 64), 16, 2).unwrap();
        let direct = pts
            .iter()
            .filter(|x| approx_brute(x, 16).1 % 4 == 0)
            .count() as u64;
        assert_eq!(r.count, direct);
        assert!(spaced_points_divisibility_count(&pts, &Rational::frac(1, 32), 16, 2).is_err());
    }

    #[test]
    fn census_constraints_are_named() {
        let p = ExceptionParams { lambda: 11, mu: 4, sigma: 1, gamma: 1, m: 2 };
        let err = exceptions_census(p, CensusMode::Discrete, 1e12).unwrap_err();
        assert!(err.to_string().contains("lambda >= (m+1)mu"));
        let p = ExceptionParams { lambda: 13, mu: 3, sigma: 1, gamma: 1, m: 2 };
        assert!(exceptions_census(p, CensusMode::Discrete, 1e12).unwrap_err().to_string().contains("mu >= 4 sigma"));
        let p = ExceptionParams { lambda: 13, mu: 4, sigma: 1, gamma: 2, m: 2 };
        assert!(exceptions_census(p, CensusMode::Discrete, 1e12).is_err());
    }

    #[test]
    fn census_matches_exhaustive_oracle() {
        let p = ExceptionParams { lambda: 13, mu: 4, sigma: 1, gamma: 1, m: 2 };
        let got = exceptions_census(p, CensusMode::Discrete, 1e12).unwrap();
        let mut oracle = 0u64;
        for a in 0..(1i64 << 13) {
            let c = build_farey_construction(&Rational::from_integer(a), 2, 4, 1).unwrap();
            if c.p_frak.iter().any(|x| x.mod_floor(&BigInt::from(8)).is_zero()) {
                oracle += 1;
            }
        }
        assert_eq!(got.count, oracle);
        let again = exceptions_census(p, CensusMode::Discrete, 1e12).unwrap();
        assert_eq!(got, again);
    }

    #[test]
    fn census_continuous_counts_grid_cells() {
        let p = ExceptionParams { lambda: 13, mu: 4, sigma: 1, gamma: 1, m: 2 };
        let r = exceptions_census(p, CensusMode::ContinuousSampled { grid_bits: 3 }, 1e12).unwrap();
        assert_eq!(r.measure, Rational::new(r.count, 8).unwrap());
        assert!(exceptions_census(p, CensusMode::ContinuousSampled { grid_bits: 2 }, 1e12).is_err());
    }

    #[test]
    fn mediant_is_strictly_between() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let a = Rational::frac(rng.gen_range(-500..500), rng.gen_range(1..300));
            let b = Rational::frac(rng.gen_range(-500..500), rng.gen_range(1..300));
            if a == b {
                continue;
            }
            let (l, r) = if a < b { (a, b) } else { (b, a) };
            let m = mediant(&l, &r).unwrap();
            assert!(l < m && m < r);
        }
    }

    #[test]
    fn translation_and_dirichlet_on_dyadic_grid() {
        for j in 0..(1i64 << 10) {
            let alpha = Rational::frac(j, 1 << 10);
            let shifted = &alpha + &Rational::one();
            for order in 1..=64u64 {
                let a = farey_approx(&alpha, order).unwrap();
                let b = farey_approx(&shifted, order).unwrap();
                assert_eq!((b.p, b.q), (&a.p + BigInt::from(a.q), a.q));
                // the chosen fraction's Farey interval contains alpha
                let (lo, hi) = farey_interval(&a.as_rational(), order).unwrap();
                assert!(lo <= alpha && alpha < hi, "alpha={alpha} Q={order}");
                let len = &hi - &lo;
                assert!(len < Rational::new(2, order * a.q).unwrap());
            }
        }
    }
}
