//! Greedy p-Stanley sequences S_p(A), the closed form of S_p(0), and the
//! free-and-covering characterization of S_p(A).

use serde::Serialize;

use crate::apfree::{covers, find_progression, ApWitness, Bitset, IntSet};
use crate::digits::{checked_pow, value_has_digit};
use crate::error::{Error, Result};

/// The terms of S_p(seed) up to `limit`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StanleySeq {
    p: u64,
    seed: IntSet,
    terms: IntSet,
    limit: u64,
}

impl StanleySeq {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn seed(&self) -> &IntSet {
        &self.seed
    }

    pub fn terms(&self) -> &IntSet {
        &self.terms
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Continues the greedy construction up to `limit`; a no-op for lower limits.
    pub fn extend_to(&mut self, limit: u64) {
        if limit <= self.limit {
            return;
        }
        let old = self.limit;
        // forbidden[y - old] is set once y completes a progression of existing terms
        let mut forbidden = Bitset::with_len((limit - old) as usize + 1);
        self.terms.reserve_bound(limit + 1);
        let existing = self.terms.len();
        for idx in 0..existing {
            let t = self.terms.elements()[idx];
            mark_completions(&self.terms, self.p, t, old, limit, old, &mut forbidden);
        }
        for x in old + 1..=limit {
            if !forbidden.get((x - old) as usize) {
                self.terms.push_max(x);
                mark_completions(&self.terms, self.p, x, x, limit, old, &mut forbidden);
            }
        }
        self.limit = limit;
    }
}

/// Marks every `t + d` in `(lo, hi]` such that `t - (p-2)d, ..., t - d, t` are
/// terms; bit `y - base` stands for `y`. `t` must be the largest term used.
#[inline]
fn mark_completions(terms: &IntSet, p: u64, t: u64, lo: u64, hi: u64, base: u64, forbidden: &mut Bitset) {
    let inner = p - 2;
    let d_min = if lo >= t { lo - t + 1 } else { 1 };
    let d_max = (hi - t).min(t / inner);
    if d_min > d_max {
        return;
    }
    for &prev in terms.range(t - d_max, t - d_min).iter().rev() {
        let d = t - prev;
        if (2..=inner).all(|i| terms.contains(t - i * d)) {
            forbidden.set((t + d - base) as usize);
        }
    }
}

/// Greedy S_p(seed) up to `limit`.
pub fn generate(seed: &IntSet, p: u64, limit: u64) -> Result<StanleySeq> {
    let top = seed.max().ok_or(Error::EmptySeed)?;
    if top > limit {
        return Err(Error::SeedAboveLimit { element: top, limit });
    }
    if let Some(w) = find_progression(seed, p) {
        return Err(Error::SeedNotFree(w));
    }
    let mut seq = StanleySeq {
        p,
        seed: seed.clone(),
        terms: seed.clone(),
        limit: top,
    };
    seq.extend_to(limit);
    Ok(seq)
}

/// All `x <= limit` with no base-p digit equal to `p - 1`.
pub fn s0_closed_form(p: u64, limit: u64) -> IntSet {
    IntSet::from_sorted((0..=limit).filter(|&x| !value_has_digit(x, p, p - 1)).collect())
}

/// S_p^k: the elements of S_p(0) below `p^k`.
pub fn spk(p: u64, k: u32) -> Result<IntSet> {
    let bound = checked_pow(p, k)?;
    Ok(s0_closed_form(p, bound - 1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CharacterizationFailure {
    SeedMissing { element: u64 },
    NotFree { witness: ApWitness },
    Uncovered { x: u64 },
}

/// Checks that the terms contain the seed, are p-free, and cover every
/// excluded `x` in `(max(seed), limit]`.
pub fn verify_characterization(seq: &StanleySeq) -> std::result::Result<(), CharacterizationFailure> {
    if let Some(element) = seq.seed.iter().find(|&s| !seq.terms.contains(s)) {
        return Err(CharacterizationFailure::SeedMissing { element });
    }
    if let Some(witness) = find_progression(&seq.terms, seq.p) {
        return Err(CharacterizationFailure::NotFree { witness });
    }
    let start = seq.seed.max().map_or(0, |m| m + 1);
    for x in start..=seq.limit {
        if !seq.terms.contains(x) && covers(&seq.terms, x, seq.p).is_none() {
            return Err(CharacterizationFailure::Uncovered { x });
        }
    }
    Ok(())
}

/// Rebuilds a sequence from parts without running the greedy step; used to
/// test the characterization against tampered data.
pub fn from_parts(p: u64, seed: IntSet, terms: IntSet, limit: u64) -> StanleySeq {
    StanleySeq { p, seed, terms, limit }
}
