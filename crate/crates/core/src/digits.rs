//! Little-endian base-p digit vectors.
//!
//! Index `i` holds the coefficient of `p^i`. Zero is the empty vector and no
//! vector carries zeros above its most significant nonzero digit.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Digits {
    base: u64,
    digits: Vec<u64>,
}

impl Digits {
    /// Builds a canonical digit vector, stripping high zeros.
    pub fn new(base: u64, mut digits: Vec<u64>) -> Result<Self> {
        check_base(base)?;
        if let Some(&digit) = digits.iter().find(|&&d| d >= base) {
            return Err(Error::InvalidDigit { digit, base });
        }
        while digits.last() == Some(&0) {
            digits.pop();
        }
        let mut value: u64 = 0;
        for &d in digits.iter().rev() {
            value = value
                .checked_mul(base)
                .and_then(|v| v.checked_add(d))
                .ok_or_else(|| Error::Overflow(format!("{}-digit value in base {base}", digits.len())))?;
        }
        Ok(Digits { base, digits })
    }

    /// Builds from most-significant-first digits, the order used in printed tables.
    pub fn from_msb(base: u64, msb_first: &[u64]) -> Result<Self> {
        Self::new(base, msb_first.iter().rev().copied().collect())
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Digit at position `i`; positions above the top are zero.
    pub fn get(&self, i: usize) -> u64 {
        self.digits.get(i).copied().unwrap_or(0)
    }

    pub fn value(&self) -> u64 {
        from_digits(self)
    }

    /// Little-endian digits zero-padded to `width` (never truncated).
    pub fn padded(&self, width: usize) -> Vec<u64> {
        let mut out = self.digits.clone();
        if out.len() < width {
            out.resize(width, 0);
        }
        out
    }

    /// Most-significant-first rendering, space separated, padded to `width`.
    pub fn render(&self, width: usize) -> String {
        let padded = self.padded(width);
        let parts: Vec<String> = padded.iter().rev().map(u64::to_string).collect();
        parts.join(" ")
    }
}

impl fmt::Display for Digits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.digits.is_empty() {
            return f.write_str("0");
        }
        f.write_str(&self.render(0))
    }
}

impl PartialOrd for Digits {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Digits {
    fn cmp(&self, other: &Self) -> Ordering {
        self.base
            .cmp(&other.base)
            .then(self.digits.len().cmp(&other.digits.len()))
            .then_with(|| self.digits.iter().rev().cmp(other.digits.iter().rev()))
    }
}

fn check_base(p: u64) -> Result<()> {
    if p < 3 {
        Err(Error::InvalidBase(p))
    } else {
        Ok(())
    }
}

pub fn to_digits(mut x: u64, p: u64) -> Result<Digits> {
    check_base(p)?;
    let mut digits = Vec::new();
    while x > 0 {
        digits.push(x % p);
        x /= p;
    }
    Ok(Digits { base: p, digits })
}

pub fn from_digits(d: &Digits) -> u64 {
    d.digits.iter().rev().fold(0u64, |acc, &digit| acc * d.base + digit)
}

pub fn has_digit(d: &Digits, v: u64) -> bool {
    d.digits.contains(&v)
}

/// Allocation-free check used by the sieve-style closed form.
#[inline]
pub fn value_has_digit(mut x: u64, p: u64, v: u64) -> bool {
    while x > 0 {
        if x % p == v {
            return true;
        }
        x /= p;
    }
    false
}

/// Digit `i` of `x` in base `p`.
#[inline]
pub fn digit_at(x: u64, p: u64, i: usize) -> u64 {
    let mut x = x;
    for _ in 0..i {
        x /= p;
        if x == 0 {
            return 0;
        }
    }
    x % p
}

/// Little-endian digits of `x` padded to `width`.
pub fn digits_padded(x: u64, p: u64, width: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(width);
    let mut x = x;
    while x > 0 || out.len() < width {
        out.push(x % p);
        x /= p;
    }
    out
}

/// `p^k`, or an overflow error.
pub fn checked_pow(p: u64, k: u32) -> Result<u64> {
    p.checked_pow(k).ok_or_else(|| Error::Overflow(format!("{p}^{k}")))
}

/// Value of little-endian digits; the caller guarantees the result fits.
pub fn value_of(p: u64, little_endian: &[u64]) -> u64 {
    little_endian.iter().rev().fold(0u64, |acc, &d| acc * p + d)
}
