//! Experimental toolkit for the distribution of the Thue–Morse sequence:
//! digit-sum kernels, exact rationals and Farey dissections, discrepancy
//! of `n alpha` sequences, level-of-distribution error sums, and the
//! weighted graph behind Gowers uniformity sums of `(-1)^{s(n)}`.

pub mod digits;
pub mod error;
pub mod farey;
pub mod gowers;
pub mod lod;
pub mod metrics;
pub mod notation;
pub mod rational;

pub use error::{Error, Result};
pub use rational::{DyadicRational, Rational};
