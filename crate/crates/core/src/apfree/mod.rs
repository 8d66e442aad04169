//! Arithmetic progressions, p-free sets and covering, plain and mod N.
//!
//! Every negative answer comes with a witness that can be re-checked against
//! the set without trusting the search that produced it.

mod set;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use set::{Bitset, IntSet};

use crate::error::{Error, Result};

/// A `length`-term progression `start + i*diff` (reduced mod `modulus` when set)
/// lying entirely inside some set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApWitness {
    pub start: u64,
    pub diff: u64,
    pub length: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub modulus: Option<u64>,
}

impl ApWitness {
    pub fn terms(&self) -> Vec<u64> {
        (0..self.length as u64)
            .map(|i| {
                let t = self.start as u128 + i as u128 * self.diff as u128;
                match self.modulus {
                    Some(n) => (t % n as u128) as u64,
                    None => t as u64,
                }
            })
            .collect()
    }

    pub fn validate(&self, set: &IntSet) -> bool {
        if self.diff == 0 || self.length < 2 {
            return false;
        }
        if let Some(n) = self.modulus {
            if n == 0 || self.diff.is_multiple_of(n) {
                return false;
            }
        }
        self.terms().into_iter().all(|t| set.contains(t))
    }
}

impl fmt::Display for ApWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}-term progression start {} diff {}",
            self.length, self.start, self.diff
        )?;
        if let Some(n) = self.modulus {
            write!(f, " (mod {n})")?;
        }
        Ok(())
    }
}

/// `p - 1` set elements forming an ascending progression that ends one step
/// below `target` (or below `target + modulus` when `wrapped`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverWitness {
    pub target: u64,
    pub diff: u64,
    pub terms: Vec<u64>,
    pub wrapped: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub modulus: Option<u64>,
}

impl CoverWitness {
    /// The top endpoint: `target`, or `target + modulus` for a wrapped cover.
    pub fn top(&self) -> Option<u64> {
        if self.wrapped {
            self.target.checked_add(self.modulus?)
        } else {
            Some(self.target)
        }
    }

    pub fn validate(&self, set: &IntSet, p: u64) -> bool {
        let Some(top) = self.top() else { return false };
        if self.diff == 0 || self.terms.len() as u64 != p - 1 {
            return false;
        }
        if let Some(n) = self.modulus {
            if self.target >= n || self.terms.iter().any(|&t| t >= n) {
                return false;
            }
        }
        let steps_ok = self.terms.windows(2).all(|w| w[0].checked_add(self.diff) == Some(w[1]));
        let top_ok = self.terms.last().and_then(|&t| t.checked_add(self.diff)) == Some(top);
        steps_ok && top_ok && self.terms.iter().all(|&t| set.contains(t))
    }
}

/// First p-term progression in `a`, ordered by top element then difference.
pub fn find_progression(a: &IntSet, p: u64) -> Option<ApWitness> {
    let steps = p - 1;
    for &top in a.elements() {
        for &prev in a.below(top).iter().rev() {
            let diff = top - prev;
            if diff.saturating_mul(steps) > top {
                break;
            }
            if (2..=steps).all(|i| a.contains(top - i * diff)) {
                return Some(ApWitness {
                    start: top - steps * diff,
                    diff,
                    length: p as usize,
                    modulus: None,
                });
            }
        }
    }
    None
}

pub fn is_p_free(a: &IntSet, p: u64) -> bool {
    find_progression(a, p).is_none()
}

/// Smallest-difference covering of `x` by `a`, terms strictly below `x`.
pub fn covers(a: &IntSet, x: u64, p: u64) -> Option<CoverWitness> {
    let steps = p - 1;
    for &prev in a.below(x).iter().rev() {
        let diff = x - prev;
        if diff.saturating_mul(steps) > x {
            break;
        }
        if (2..=steps).all(|i| a.contains(x - i * diff)) {
            let terms = (1..=steps).rev().map(|i| x - i * diff).collect();
            return Some(CoverWitness {
                target: x,
                diff,
                terms,
                wrapped: false,
                modulus: None,
            });
        }
    }
    None
}

fn check_within(a: &IntSet, n: u64) -> Result<()> {
    match a.max() {
        Some(m) if m >= n => Err(Error::OutOfRange { element: m, bound: n }),
        _ => Ok(()),
    }
}

/// Covering of `x` mod `n`: the plain search first, then the search whose top
/// endpoint is `x + n`, both by ascending difference.
pub fn covers_mod(a: &IntSet, x: u64, n: u64, p: u64) -> Result<Option<CoverWitness>> {
    check_within(a, n)?;
    if x >= n {
        return Err(Error::OutOfRange { element: x, bound: n });
    }
    if let Some(mut w) = covers(a, x, p) {
        w.modulus = Some(n);
        return Ok(Some(w));
    }
    let steps = p - 1;
    let top = x + n;
    for &prev in a.elements().iter().rev() {
        let diff = top - prev;
        if diff.saturating_mul(steps) > top {
            break;
        }
        if (2..=steps).all(|i| a.contains(top - i * diff)) {
            let terms = (1..=steps).rev().map(|i| top - i * diff).collect();
            return Ok(Some(CoverWitness {
                target: x,
                diff,
                terms,
                wrapped: true,
                modulus: Some(n),
            }));
        }
    }
    Ok(None)
}

/// First progression mod `n` with nonzero difference whose residues all lie
/// in `a`, ordered by start then difference in `[1, n)`.
pub fn find_progression_mod(a: &IntSet, n: u64, p: u64) -> Result<Option<ApWitness>> {
    check_within(a, n)?;
    let elems = a.elements();
    for (idx, &start) in elems.iter().enumerate() {
        let diffs = elems[idx + 1..]
            .iter()
            .map(|&b| b - start)
            .chain(elems[..idx].iter().map(|&b| b + n - start));
        for diff in diffs {
            let mut t = start + diff;
            if t >= n {
                t -= n;
            }
            let mut ok = true;
            for _ in 2..p {
                t += diff;
                if t >= n {
                    t -= n;
                }
                if !a.contains(t) {
                    ok = false;
                    break;
                }
            }
            if ok {
                return Ok(Some(ApWitness {
                    start,
                    diff,
                    length: p as usize,
                    modulus: Some(n),
                }));
            }
        }
    }
    Ok(None)
}

pub fn is_p_free_mod(a: &IntSet, n: u64, p: u64) -> Result<bool> {
    Ok(find_progression_mod(a, n, p)?.is_none())
}
