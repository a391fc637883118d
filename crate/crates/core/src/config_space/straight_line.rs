//! Straight-line configurations: sign vectors with a vanishing signed sum.
//!
//! The search is split in two halves (meet in the middle) so each partial
//! sum is formed with at most ~15 additions, which keeps the floating-point
//! path accurate at the top of the supported range. When every length is a
//! small-denominator rational the sums are formed in exact integer
//! arithmetic instead.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::SideLengths;

/// Largest n for which the exhaustive search is attempted.
pub const MAX_EXHAUSTIVE_SIDES: usize = 30;

const MAX_DENOMINATOR: i128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StraightLineReport {
    /// Sign vectors with first entry +1, sorted with + before -.
    pub sign_vectors: Vec<Vec<i8>>,
    /// True when the sums were tested in exact rational arithmetic.
    pub exact: bool,
}

impl StraightLineReport {
    pub fn is_empty(&self) -> bool {
        self.sign_vectors.is_empty()
    }
}

/// Default float tolerance: `1e-9` times the perimeter.
pub fn default_tolerance(lengths: &SideLengths) -> f64 {
    1e-9 * lengths.perimeter()
}

/// All sign vectors (up to global sign) with `|sum eps_i l_i| <= tolerance`.
pub fn straight_line_sign_vectors(lengths: &SideLengths, tolerance: f64) -> Result<StraightLineReport> {
    let n = lengths.len();
    if n > MAX_EXHAUSTIVE_SIDES {
        return Err(Error::UnsupportedSize { n, min: 3, max: MAX_EXHAUSTIVE_SIDES });
    }
    let (masks, exact) = match integer_lengths(lengths.as_slice()) {
        Some(ints) => (matching_masks(&ints, |a, b| a + b == 0), true),
        None => (matching_masks(lengths.as_slice(), |a: f64, b| (a + b).abs() <= tolerance), false),
    };
    let mut sign_vectors: Vec<Vec<i8>> =
        masks.into_iter().map(|m| (0..n).map(|i| if m >> i & 1 == 1 { -1 } else { 1 }).collect()).collect();
    sign_vectors.sort_by_key(|v| v.iter().map(|&s| (s < 0) as u8).collect::<Vec<_>>());
    Ok(StraightLineReport { sign_vectors, exact })
}

/// True when no straight-line configuration exists, using the default
/// tolerance on the float path.
pub fn is_generic(lengths: &SideLengths) -> Result<bool> {
    Ok(straight_line_sign_vectors(lengths, default_tolerance(lengths))?.is_empty())
}

trait Summand: Copy + PartialOrd + std::ops::Add<Output = Self> + std::ops::Neg<Output = Self> {
    const ZERO: Self;
}
impl Summand for f64 {
    const ZERO: Self = 0.0;
}
impl Summand for i128 {
    const ZERO: Self = 0;
}

/// Signed sums over all sign choices of `values[range]`, indexed by mask
/// (bit set = negative sign).
fn subset_sums<T: Summand>(values: &[T]) -> Vec<T> {
    (0..1u64 << values.len())
        .map(|mask| {
            values.iter().enumerate().fold(T::ZERO, |acc, (i, &v)| if mask >> i & 1 == 1 { acc + -v } else { acc + v })
        })
        .collect()
}

/// Masks over all n entries (bit 0 always clear) whose signed sum matches.
fn matching_masks<T: Summand>(values: &[T], matches: impl Fn(T, T) -> bool) -> Vec<u64> {
    let n = values.len();
    let half = n / 2;
    // entry 0 is pinned to +, so the left half covers 1..half+1 plus it
    let left_vals = &values[1..half + 1];
    let right_vals = &values[half + 1..];
    let left: Vec<T> = subset_sums(left_vals).into_iter().map(|s| s + values[0]).collect();
    let mut right: Vec<(T, u64)> = subset_sums(right_vals).into_iter().zip(0u64..).collect();
    right.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite sums"));

    let mut out = Vec::new();
    for (lm, &ls) in left.iter().enumerate() {
        // first right sum that could match: the matcher is monotone in b
        let start = right.partition_point(|&(rs, _)| !(matches(ls, rs) || rs + ls > T::ZERO));
        for &(rs, rm) in &right[start..] {
            if !matches(ls, rs) {
                break;
            }
            out.push(((lm as u64) << 1) | (rm << (half + 1)));
        }
    }
    out
}

/// Scales the lengths to integers when each is p/q with q <= 1e6.
fn integer_lengths(lengths: &[f64]) -> Option<Vec<i128>> {
    let fracs: Vec<(i128, i128)> = lengths.iter().map(|&x| rationalize(x)).collect::<Option<_>>()?;
    let mut lcm: i128 = 1;
    for &(_, q) in &fracs {
        lcm = lcm / gcd(lcm, q) * q;
        if lcm > 1 << 62 {
            return None;
        }
    }
    let ints: Vec<i128> = fracs.iter().map(|&(p, q)| p * (lcm / q)).collect();
    // keep every partial sum well inside i128
    let total: i128 = ints.iter().sum();
    (total < 1 << 100).then_some(ints)
}

/// Continued-fraction recovery of a small-denominator rational.
fn rationalize(x: f64) -> Option<(i128, i128)> {
    if !(x.is_finite() && x > 0.0 && x < 1e15) {
        return None;
    }
    let tol = 4.0 * f64::EPSILON * x;
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > MAX_DENOMINATOR {
            return None;
        }
        if (h2 as f64 / k2 as f64 - x).abs() <= tol {
            return Some((h2, k2));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}
