//! Digit-sum and Thue–Morse kernels.
//!
//! Binary digit sums go through hardware population count. Contiguous
//! ranges are produced block-wise from the doubling rule
//! `t(2^k + j) = 1 - t(j)`, so streaming a range costs one table lookup and
//! one xor per element.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{invalid, Result};

/// Base carrier for the general base-`q` digit sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DigitKernel {
    base: u64,
}

impl Default for DigitKernel {
    fn default() -> Self {
        Self { base: 2 }
    }
}

impl DigitKernel {
    pub fn new(base: u64) -> Result<Self> {
        if base < 2 {
            return invalid(format!("digit base must be >= 2, got {base}"));
        }
        Ok(Self { base })
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn sum_of_digits(&self, n: u64) -> u64 {
        if self.base == 2 {
            return u64::from(n.count_ones());
        }
        let mut n = n;
        let mut s = 0;
        while n > 0 {
            s += n % self.base;
            n /= self.base;
        }
        s
    }
}

/// `s_q(n)`, the sum of the base-`q` digits of `n`.
pub fn sum_of_digits(n: u64, base: u64) -> Result<u64> {
    Ok(DigitKernel::new(base)?.sum_of_digits(n))
}

/// Arbitrary-precision variant of [`sum_of_digits`].
pub fn sum_of_digits_big(n: &BigUint, base: u64) -> Result<u64> {
    if base < 2 {
        return invalid(format!("digit base must be >= 2, got {base}"));
    }
    if base == 2 {
        return Ok(n.count_ones());
    }
    let mut n = n.clone();
    let b = BigUint::from(base);
    let mut s = 0u64;
    while !n.is_zero() {
        let r = &n % &b;
        s += r.iter_u64_digits().next().unwrap_or(0);
        n /= &b;
    }
    Ok(s)
}

/// The window `mu <= lambda` of the two-fold restricted digit sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationWindow {
    mu: u32,
    lambda: u32,
}

impl TruncationWindow {
    pub fn new(mu: u32, lambda: u32) -> Result<Self> {
        if mu > lambda {
            return invalid(format!("truncation window needs mu <= lambda, got mu={mu}, lambda={lambda}"));
        }
        Ok(Self { mu, lambda })
    }

    pub fn mu(&self) -> u32 {
        self.mu
    }

    pub fn lambda(&self) -> u32 {
        self.lambda
    }
}

#[inline]
pub fn low_bits(n: u128, lambda: u32) -> u128 {
    if lambda >= 128 {
        n
    } else {
        n & ((1u128 << lambda) - 1)
    }
}

/// `s_lambda(n) = s(n mod 2^lambda)`.
#[inline]
pub fn truncated_digit_sum(n: u128, lambda: u32) -> u32 {
    low_bits(n, lambda).count_ones()
}

/// `s_{mu,lambda}(n) = s_lambda(n) - s_mu(n)`; never negative since the
/// `mu` low bits are a subset of the `lambda` low bits.
#[inline]
pub fn twofold_digit_sum(n: u128, window: TruncationWindow) -> u32 {
    truncated_digit_sum(n, window.lambda) - truncated_digit_sum(n, window.mu)
}

/// Thue–Morse symbol `t(n)`: parity of the binary digit sum.
#[inline]
pub fn tm_bit(n: u64) -> u8 {
    (n.count_ones() & 1) as u8
}

/// `(-1)^{s(n)}`.
#[inline]
pub fn tm_sign(n: u64) -> i8 {
    1 - 2 * tm_bit(n) as i8
}

#[inline]
pub fn tm_sign_u128(n: u128) -> i8 {
    1 - 2 * (n.count_ones() & 1) as i8
}

const BLOCK_BITS: u32 = 12;
const BLOCK: usize = 1 << BLOCK_BITS;

/// Thue–Morse prefix of length `2^bits`, built by repeated complement-and-append.
pub fn tm_prefix_by_doubling(bits: u32) -> Vec<u8> {
    let mut t = Vec::with_capacity(1 << bits);
    t.push(0u8);
    for _ in 0..bits {
        let len = t.len();
        for j in 0..len {
            let v = t[j] ^ 1;
            t.push(v);
        }
    }
    t
}

/// Streams `t(start), t(start+1), ...` block-wise.
///
/// Each aligned block of `2^12` values equals the base table xor the parity
/// of the block index, so no per-element popcount is needed.
pub struct TmRange {
    table: Vec<u8>,
    next: u64,
    end: u64,
}

impl TmRange {
    pub fn new(start: u64, end: u64) -> Self {
        Self {
            table: tm_prefix_by_doubling(BLOCK_BITS),
            next: start,
            end,
        }
    }

    /// Fills `out` with the next symbols and returns how many were written.
    pub fn fill(&mut self, out: &mut [u8]) -> usize {
        let mut written = 0;
        while written < out.len() && self.next < self.end {
            let block = self.next >> BLOCK_BITS;
            let offset = (self.next & (BLOCK as u64 - 1)) as usize;
            let parity = tm_bit(block);
            let avail = (BLOCK - offset)
                .min(out.len() - written)
                .min((self.end - self.next) as usize);
            for (dst, &src) in out[written..written + avail]
                .iter_mut()
                .zip(&self.table[offset..offset + avail])
            {
                *dst = src ^ parity;
            }
            written += avail;
            self.next += avail as u64;
        }
        written
    }
}

impl Iterator for TmRange {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        if self.next >= self.end {
            return None;
        }
        let block = self.next >> BLOCK_BITS;
        let offset = (self.next & (BLOCK as u64 - 1)) as usize;
        self.next += 1;
        Some(self.table[offset] ^ tm_bit(block))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

/// `t(n)` for `n` in `[start, end)`.
pub fn tm_bits(start: u64, end: u64) -> Vec<u8> {
    let mut out = vec![0u8; end.saturating_sub(start) as usize];
    TmRange::new(start, end).fill(&mut out);
    out
}

/// Largest `|sum_{n<M} (-1)^{s(n)}|` over `M <= n_max`.
pub fn max_prefix_imbalance(n_max: u64) -> i64 {
    let mut buf = vec![0u8; BLOCK];
    let mut range = TmRange::new(0, n_max);
    let mut acc = 0i64;
    let mut worst = 0i64;
    loop {
        let k = range.fill(&mut buf);
        if k == 0 {
            break;
        }
        for &b in &buf[..k] {
            acc += 1 - 2 * i64::from(b);
            worst = worst.max(acc.abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_digit_sum(mut n: u64, base: u64) -> u64 {
        let mut s = 0;
        while n > 0 {
            s += n % base;
            n /= base;
        }
        s
    }

    #[test]
    fn digit_sum_examples() {
        assert_eq!(sum_of_digits(0, 2).unwrap(), 0);
        assert_eq!(sum_of_digits(255, 2).unwrap(), 8);
        assert_eq!(sum_of_digits(10, 3).unwrap(), 2);
        assert!(sum_of_digits(5, 1).is_err());
        assert!(DigitKernel::new(0).is_err());
    }

    #[test]
    fn binary_digit_sum_matches_division_exhaustively() {
        let k = DigitKernel::default();
        for n in 0..(1u64 << 16) {
            assert_eq!(k.sum_of_digits(n), naive_digit_sum(n, 2));
        }
    }

    #[test]
    fn bases_two_to_ten_match_division() {
        for base in 2..=10 {
            let k = DigitKernel::new(base).unwrap();
            for n in 0..(1u64 << 12) {
                assert_eq!(k.sum_of_digits(n), naive_digit_sum(n, base), "n={n} base={base}");
                assert_eq!(
                    sum_of_digits_big(&BigUint::from(n), base).unwrap(),
                    naive_digit_sum(n, base)
                );
            }
        }
    }

    #[test]
    fn digit_recurrence() {
        for n in 0..(1u64 << 20) {
            assert_eq!((2 * n).count_ones(), n.count_ones());
            assert_eq!((2 * n + 1).count_ones(), n.count_ones() + 1);
        }
    }

    #[test]
    fn truncated_examples() {
        assert_eq!(truncated_digit_sum(7, 2), 2);
        assert_eq!(truncated_digit_sum(12345, 0), 0);
        assert_eq!(truncated_digit_sum((1 << 10) + 5, 3), 2);
        for n in 0..5000u128 {
            for lambda in 0..14 {
                assert_eq!(
                    truncated_digit_sum(n, lambda),
                    truncated_digit_sum(n + (1 << lambda), lambda)
                );
            }
        }
    }

    #[test]
    fn twofold_examples() {
        let w = TruncationWindow::new(1, 3).unwrap();
        assert_eq!(twofold_digit_sum(7, w), 2);
        let w = TruncationWindow::new(2, 4).unwrap();
        assert_eq!(twofold_digit_sum(12, w), 2);
        let w = TruncationWindow::new(5, 5).unwrap();
        assert_eq!(twofold_digit_sum(0b1011_0111, w), 0);
        assert!(TruncationWindow::new(4, 3).is_err());
    }

    #[test]
    fn sign_prefix() {
        let expected = [1, -1, -1, 1, -1, 1, 1, -1, -1, 1, 1, -1, 1, -1, -1, 1];
        let got: Vec<i8> = (0..16).map(tm_sign).collect();
        assert_eq!(got, expected);
        for k in 0..64 {
            assert_eq!(tm_sign(1 << k), -1);
        }
    }

    #[test]
    fn sign_is_two_multiplicative() {
        for k in 0..=8u32 {
            for a in 0..256u64 {
                for b in 0..(1u64 << k).min(256) {
                    assert_eq!(tm_sign((a << k) + b), tm_sign(a) * tm_sign(b));
                }
            }
        }
    }

    #[test]
    fn doubling_matches_popcount() {
        let t = tm_prefix_by_doubling(14);
        for (n, &b) in t.iter().enumerate() {
            assert_eq!(b, tm_bit(n as u64));
        }
        let start = 123_457;
        let bits = tm_bits(start, start + 20_000);
        for (i, &b) in bits.iter().enumerate() {
            assert_eq!(b, tm_bit(start + i as u64));
        }
        let it: Vec<u8> = TmRange::new(4090, 4110).collect();
        assert_eq!(it, tm_bits(4090, 4110));
    }

    #[test]
    fn prefix_sums_are_balanced() {
        assert!(max_prefix_imbalance(1 << 16) <= 1);
    }
}
