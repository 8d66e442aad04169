//! The explicit modular sets behind `S_p(0, n)` for `n` in `A_p`.
//!
//! For `p^(k-2) < n <= p^(k-1)` the generating set is
//! `A = {0} ∪ (n + S_p^k) \ {p^(k-1)(p-1)}` and its translate
//! `A' = -n + A (mod p^k)`. Every residue whose canonical covering runs into
//! the removed element `p^(k-1)(p-1) - n` gets one of four alternative
//! coverings, built in [`cases`].

pub mod cases;
pub mod tables;

use rayon::prelude::*;
use serde::Serialize;

use crate::apfree::{covers, find_progression_mod, CoverWitness, IntSet};
use crate::digits::{checked_pow, digits_padded, value_has_digit};
use crate::error::{Error, Result};
use crate::modular::{check_modular_set, expand};
use crate::stanley::{generate, spk};

pub use cases::{alt_covering, alt_covering_with_step, check_case_formulas, select_case, CaseCover, CaseId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ApRejection {
    /// `p^k - n` has a digit equal to `p - 1`.
    NotInS0,
    /// `p^k - n >= (p-2) p^(k-1)`.
    TooLarge,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ApMembership {
    pub n: u64,
    pub p: u64,
    /// Smallest `k` with `n <= p^k`.
    pub k: u32,
    pub m: u64,
    pub member: bool,
    pub reason: Option<ApRejection>,
}

/// Membership of `n` in `A_p`, from both the defining clauses and the digit form.
pub fn in_a_p(n: u64, p: u64) -> Result<ApMembership> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let mut k = 0u32;
    let mut pk = 1u64;
    while pk < n {
        pk = pk
            .checked_mul(p)
            .ok_or_else(|| Error::Overflow(format!("{p}^{}", k + 1)))?;
        k += 1;
    }
    let m = pk - n;
    let in_s0 = !value_has_digit(m, p, p - 1);
    // m < (p-2) p^(k-1), scaled by p so k = 0 needs no fractions
    let small = (m as u128) * (p as u128) < (p as u128 - 2) * pk as u128;
    let reason = if !in_s0 {
        Some(ApRejection::NotInS0)
    } else if !small {
        Some(ApRejection::TooLarge)
    } else {
        None
    };
    let member = reason.is_none();

    let digit_form = if m == 0 {
        true
    } else {
        let d = digits_padded(m, p, k as usize);
        d[k as usize - 1] < p - 2 && !d.contains(&(p - 1))
    };
    assert_eq!(member, digit_form, "clause and digit forms of A_{p} disagree at n={n}");

    Ok(ApMembership {
        n,
        p,
        k,
        m,
        member,
        reason,
    })
}

/// The sets `A` and `A'` for one `n`, with arithmetic membership so that very
/// large moduli never need to be materialized.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremSets {
    pub n: u64,
    pub p: u64,
    /// Exponent of the modulus: `p^(k-2) < n <= p^(k-1)`.
    pub k: u32,
    pub modulus: u64,
    /// `p^(k-1)(p-1) - n`, the element removed from `A'`.
    pub special: u64,
    /// Little-endian digits of `special`, exactly `k` of them.
    pub special_digits: Vec<u64>,
}

impl TheoremSets {
    fn in_spk(&self, x: u64) -> bool {
        x < self.modulus && !value_has_digit(x, self.p, self.p - 1)
    }

    /// The element `p^(k-1)(p-1)` removed from `n + S_p^k`.
    pub fn removed(&self) -> u64 {
        self.special + self.n
    }

    /// Residue of `-n`.
    pub fn minus_n(&self) -> u64 {
        self.modulus - self.n
    }

    pub fn in_a(&self, x: u64) -> bool {
        x == 0 || (x >= self.n && x != self.removed() && self.in_spk(x - self.n))
    }

    /// Membership of a residue in `[0, p^k)`.
    pub fn in_a_prime(&self, x: u64) -> bool {
        x == self.minus_n() || (x != self.special && self.in_spk(x))
    }

    /// Membership of a signed value, reduced mod `p^k`.
    pub fn in_a_prime_signed(&self, x: i64) -> bool {
        self.in_a_prime(x.rem_euclid(self.modulus as i64) as u64)
    }

    pub fn a(&self) -> Result<IntSet> {
        let base = spk(self.p, self.k)?;
        let removed = self.removed();
        let mut out = vec![0];
        out.extend(base.iter().map(|s| s + self.n).filter(|&v| v != removed));
        if let Some(&v) = out.iter().find(|&&v| v >= self.modulus) {
            return Err(Error::Construction(format!("A contains {v} >= {}", self.modulus)));
        }
        Ok(IntSet::from_sorted(out))
    }

    /// `-n + A` as residues mod `p^k`.
    pub fn a_prime(&self) -> Result<IntSet> {
        let a = self.a()?;
        let n = self.n;
        let m = self.modulus;
        Ok(IntSet::from_unsorted(a.iter().map(|v| (v + m - n) % m)))
    }
}

pub fn build_theorem_sets(n: u64, p: u64) -> Result<TheoremSets> {
    let membership = in_a_p(n, p)?;
    if !membership.member {
        return Err(Error::NotInAp { n, p });
    }
    let k = membership.k + 1;
    let modulus = checked_pow(p, k)?;
    let top = modulus / p;
    let special = top * (p - 1) - n;
    let special_digits = digits_padded(special, p, k as usize);
    let ts = TheoremSets {
        n,
        p,
        k,
        modulus,
        special,
        special_digits,
    };
    debug_assert!(ts.in_a_prime(ts.minus_n()) && !ts.in_a_prime(ts.special));
    Ok(ts)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CanonicalCover {
    pub x: u64,
    /// Positions of the digits equal to `p - 1`, ascending.
    pub positions: Vec<usize>,
    pub diff: u64,
    /// `x_0 < x_1 < ... < x_{p-2}`, the digit-substituted values.
    pub terms: Vec<u64>,
}

/// Replaces every digit `p - 1` of `x` by `j` for `j = 0..p-2`.
pub fn canonical_covering(x: u64, p: u64, k: u32) -> Result<CanonicalCover> {
    let bound = checked_pow(p, k)?;
    if x >= bound {
        return Err(Error::OutOfRange { element: x, bound });
    }
    let digits = digits_padded(x, p, k as usize);
    let positions: Vec<usize> = (0..k as usize).filter(|&i| digits[i] == p - 1).collect();
    if positions.is_empty() {
        return Err(Error::Precondition(format!("{x} lies in S_{p}^{k}")));
    }
    let diff: u64 = positions.iter().map(|&i| p.pow(i as u32)).sum();
    let terms = (0..p - 1).map(|j| x - (p - 1 - j) * diff).collect();
    Ok(CanonicalCover {
        x,
        positions,
        diff,
        terms,
    })
}

/// An `x(S)`: the special element with the digits at `positions` raised to `p - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Conflict {
    pub x: u64,
    pub positions: Vec<usize>,
}

/// Every residue outside `A'` whose canonical covering contains the special
/// element, ascending by value.
pub fn enumerate_conflicts(ts: &TheoremSets) -> Result<Vec<Conflict>> {
    let p = ts.p;
    let k = ts.k as usize;
    let mut values: Vec<u64> = ts.special_digits.clone();
    values.sort_unstable();
    values.dedup();
    let mut out = Vec::new();
    for v in values {
        let slots: Vec<usize> = (0..k).filter(|&i| ts.special_digits[i] == v).collect();
        for mask in 1u64..(1u64 << slots.len()) {
            let positions: Vec<usize> = slots
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &i)| i)
                .collect();
            if positions == [k - 1] {
                continue;
            }
            let x = ts.special + positions.iter().map(|&i| (p - 1 - v) * p.pow(i as u32)).sum::<u64>();
            let cc = canonical_covering(x, p, ts.k)?;
            if !cc.terms.contains(&ts.special) {
                return Err(Error::Construction(format!(
                    "canonical covering of {x} misses the special element"
                )));
            }
            out.push(Conflict { x, positions });
        }
    }
    out.sort_by_key(|c| c.x);
    Ok(out)
}

/// `lcm(1, ..., (p-1)/2)` against `p - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LcmCheck {
    pub p: u64,
    pub holds: bool,
    /// The exact lcm, when it fits in 128 bits.
    pub lcm: Option<u128>,
    /// Smallest `m` with `lcm(1..m) >= p - 1`, if any `m <= (p-1)/2` works.
    pub reached_at: Option<u64>,
}

pub fn lcm_lemma_check(p: u64) -> LcmCheck {
    fn gcd(mut a: u128, mut b: u128) -> u128 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }
    let half = (p - 1) / 2;
    let target = (p - 1) as u128;
    let mut acc: Option<u128> = Some(1);
    let mut reached_at = None;
    // once acc overflows it is far past p - 1, so `reached_at` is already set
    for m in 1..=half {
        acc = acc.and_then(|l| (l / gcd(l, m as u128)).checked_mul(m as u128));
        if reached_at.is_none() && acc.is_some_and(|l| l >= target) {
            reached_at = Some(m);
        }
    }
    LcmCheck {
        p,
        holds: reached_at.is_some(),
        lcm: acc,
        reached_at,
    }
}

/// Some `d` in `[1, b+1]` does not divide `p - a - 1`.
pub fn case3_step_exists(a: u64, b: u64, p: u64) -> bool {
    (1..=b + 1).any(|d| !(p - a - 1).is_multiple_of(d))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stage {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub n: u64,
    pub p: u64,
    pub k: u32,
    pub modulus: u64,
    pub limit: u64,
    pub stages: Vec<Stage>,
    /// Alternative coverings produced, indexed by case 1..=4.
    pub case_counts: [usize; 4],
    pub passed: bool,
}

/// Converts an alternative covering in `A'` coordinates into a covering by `A`.
pub fn lift_to_a(ts: &TheoremSets, cover: &CaseCover) -> CoverWitness {
    let n = ts.n as i64;
    let modulus = ts.modulus;
    let terms: Vec<u64> = cover.terms.iter().map(|&t| (t + n) as u64).collect();
    let top = cover.x + ts.n;
    let (target, wrapped) = if top >= modulus {
        (top - modulus, true)
    } else {
        (top, false)
    };
    CoverWitness {
        target,
        diff: cover.diff,
        terms,
        wrapped,
        modulus: Some(modulus),
    }
}

/// Runs the whole pipeline for one `n`: sets, certification of `A`, greedy
/// generation of `S_p(0, n)`, comparison with `A + p^k * S_p(0)`, and every
/// alternative covering.
pub fn verify_theorem(n: u64, p: u64, limit: u64) -> Result<TheoremReport> {
    if p <= 3 {
        return Err(Error::Precondition(format!("the construction needs p > 3, got {p}")));
    }
    let ts = build_theorem_sets(n, p)?;
    if limit < ts.modulus {
        return Err(Error::InsufficientLimit {
            have: limit,
            need: ts.modulus,
        });
    }
    let mut stages = Vec::new();
    let mut stage = |name: &'static str, passed: bool, detail: String| stages.push(Stage { name, passed, detail });

    let a = ts.a()?;
    let a_prime = ts.a_prime()?;
    let sizes_ok =
        a.len() as u64 == (p - 1).pow(ts.k) && !a_prime.contains(ts.special) && a_prime.contains(ts.minus_n());
    stage("sets", sizes_ok, format!("|A| = {}, special = {}", a.len(), ts.special));

    let cert = match check_modular_set(&a, ts.modulus, p)? {
        Ok(cert) => {
            let check = cert.revalidate();
            stage(
                "certify A",
                check.is_ok(),
                check
                    .err()
                    .unwrap_or_else(|| format!("{} coverings", cert.coverings().len())),
            );
            Some(cert)
        }
        Err(failure) => {
            stage("certify A", false, failure.to_string());
            None
        }
    };
    let translated = find_progression_mod(&a_prime, ts.modulus, p)?;
    stage(
        "A' free mod p^k",
        translated.is_none(),
        translated.map_or_else(String::new, |w| w.to_string()),
    );
    // plain coverings by A of every excluded y in (n, p^k + n) other than p^k
    let uncovered = (n + 1..ts.modulus + n)
        .filter(|&y| y != ts.modulus && !a.contains(y))
        .find(|&y| covers(&a, y, p).is_none());
    stage(
        "plain coverings",
        uncovered.is_none(),
        uncovered.map_or_else(String::new, |y| format!("{y} is not covered")),
    );

    let seq = generate(&IntSet::from_sorted(vec![0, n]), p, limit)?;
    let prefix_ok = seq.terms().prefix(ts.modulus) == a;
    stage(
        "prefix",
        prefix_ok,
        format!("{} terms up to {limit}", seq.terms().len()),
    );
    if let Some(cert) = &cert {
        let expanded = expand(cert, limit)?;
        let detail = match expanded.iter().zip(seq.terms().iter()).position(|(e, g)| e != g) {
            Some(i) => format!("first mismatch at index {i}"),
            None if expanded.len() != seq.terms().len() => {
                format!("lengths differ: {} vs {}", expanded.len(), seq.terms().len())
            }
            None => format!("{} terms agree", expanded.len()),
        };
        stage("expansion", expanded == *seq.terms(), detail);
    } else {
        stage("expansion", false, "no certificate".into());
    }

    let conflicts = enumerate_conflicts(&ts)?;
    let results: Vec<std::result::Result<CaseId, String>> = conflicts
        .par_iter()
        .map(|c| {
            let cover = alt_covering(&ts, c).map_err(|e| format!("x={}: {e}", c.x))?;
            check_case_formulas(&ts, &cover).map_err(|e| format!("x={}: {e}", c.x))?;
            if !lift_to_a(&ts, &cover).validate(&a, p) {
                return Err(format!("x={}: lifted covering does not validate against A", c.x));
            }
            Ok(cover.case_id)
        })
        .collect();
    let mut case_counts = [0usize; 4];
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(id) => case_counts[id.index()] += 1,
            Err(e) => failures.push(e),
        }
    }
    let detail = match failures.first() {
        Some(e) => e.clone(),
        None => format!("{} conflicts, cases {:?}", conflicts.len(), case_counts),
    };
    stage("alternative coverings", failures.is_empty(), detail);

    let passed = stages.iter().all(|s| s.passed);
    Ok(TheoremReport {
        n,
        p,
        k: ts.k,
        modulus: ts.modulus,
        limit,
        stages,
        case_counts,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stanley::s0_closed_form;

    #[test]
    fn membership_examples() {
        let m = in_a_p(25, 5).unwrap();
        assert!(m.member && m.m == 0 && m.k == 2);
        let m = in_a_p(16, 5).unwrap();
        assert_eq!((m.member, m.m, m.reason), (false, 9, Some(ApRejection::NotInS0)));
        let m = in_a_p(12, 5).unwrap();
        assert!(m.member && m.m == 13);
        let m = in_a_p(7, 5).unwrap();
        assert_eq!((m.m, m.reason), (18, Some(ApRejection::TooLarge)));
        assert!(in_a_p(1, 5).unwrap().member);
        assert!(in_a_p(0, 5).is_err());
    }

    #[test]
    fn membership_matches_definition_scan() {
        for p in [5u64, 7, 11] {
            let s0 = s0_closed_form(p, p.pow(5));
            for n in 2..=p.pow(4) {
                let k = (1..).find(|&k| p.pow(k) >= n).unwrap();
                let m = p.pow(k) - n;
                let expected = s0.contains(m) && m < (p - 2) * p.pow(k - 1);
                assert_eq!(in_a_p(n, p).unwrap().member, expected, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn theorem_sets_examples() {
        let ts = build_theorem_sets(5, 5).unwrap();
        assert_eq!(ts.k, 2);
        let expected: Vec<u64> = std::iter::once(0)
            .chain(spk(5, 2).unwrap().iter().map(|s| s + 5).filter(|&v| v != 20))
            .collect();
        assert_eq!(ts.a().unwrap().elements(), expected.as_slice());
        assert_eq!(build_theorem_sets(25, 5).unwrap().special, 75);
        assert!(matches!(build_theorem_sets(16, 5), Err(Error::NotInAp { n: 16, p: 5 })));
    }

    #[test]
    fn theorem_set_sizes_and_membership() {
        for n in (1..=125u64).filter(|&n| in_a_p(n, 5).unwrap().member) {
            let ts = build_theorem_sets(n, 5).unwrap();
            let a = ts.a().unwrap();
            let ap = ts.a_prime().unwrap();
            assert_eq!(a.len() as u64, 4u64.pow(ts.k));
            for x in 0..ts.modulus {
                assert_eq!(a.contains(x), ts.in_a(x), "n={n} x={x}");
                assert_eq!(ap.contains(x), ts.in_a_prime(x), "n={n} x={x}");
            }
            assert_eq!(ts.special_digits[ts.k as usize - 1], 3);
            if ts.k >= 2 {
                assert!(ts.special_digits[ts.k as usize - 2] < 3);
            }
        }
    }

    #[test]
    fn canonical_examples() {
        let x = crate::digits::Digits::from_msb(13, &[11, 6, 12, 12, 0, 3, 12])
            .unwrap()
            .value();
        let cc = canonical_covering(x, 13, 7).unwrap();
        assert_eq!(cc.positions, vec![0, 3, 4]);
        assert_eq!(cc.terms.len(), 12);
        let cc = canonical_covering(2, 3, 1).unwrap();
        assert_eq!(cc.terms, vec![0, 1]);
        assert!(canonical_covering(1, 3, 1).is_err());
    }

    #[test]
    fn canonical_terms_cover_in_spk() {
        use rand::{rngs::StdRng, Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(5);
        for p in [3u64, 5, 7, 13] {
            let s = spk(p, 4).unwrap();
            for _ in 0..200 {
                let x = rng.random_range(0..p.pow(4));
                if s.contains(x) {
                    continue;
                }
                let cc = canonical_covering(x, p, 4).unwrap();
                assert!(cc.terms.iter().all(|&t| s.contains(t)));
                let w = crate::apfree::CoverWitness {
                    target: x,
                    diff: cc.diff,
                    terms: cc.terms.clone(),
                    wrapped: false,
                    modulus: None,
                };
                assert!(w.validate(&s, p));
                assert!(crate::apfree::covers(&s, x, p).is_some());
            }
        }
    }

    fn scan_conflicts(ts: &TheoremSets) -> Vec<u64> {
        (0..ts.modulus)
            .filter(|&x| !ts.in_a_prime(x))
            .filter(|&x| {
                canonical_covering(x, ts.p, ts.k)
                    .map(|cc| cc.terms.contains(&ts.special))
                    .unwrap_or(false)
            })
            .collect()
    }

    #[test]
    fn conflicts_match_full_scan() {
        for p in [5u64, 7] {
            for n in (1..=p * p).filter(|&n| in_a_p(n, p).unwrap().member) {
                let ts = build_theorem_sets(n, p).unwrap();
                let fast: Vec<u64> = enumerate_conflicts(&ts).unwrap().iter().map(|c| c.x).collect();
                assert_eq!(fast, scan_conflicts(&ts), "p={p} n={n}");
                assert!(!fast.contains(&ts.minus_n()));
            }
        }
    }

    #[test]
    fn lemma_examples() {
        let c = lcm_lemma_check(7);
        assert!(c.holds);
        assert_eq!(c.lcm, Some(6));
        let c = lcm_lemma_check(11);
        assert_eq!((c.holds, c.lcm, c.reached_at), (true, Some(60), Some(4)));
        // the lemma needs p > 5
        assert!(!lcm_lemma_check(5).holds);
    }

    #[test]
    fn small_theorem_runs() {
        for n in [1u64, 5, 12, 25] {
            let r = verify_theorem(n, 5, 5u64.pow(5)).unwrap();
            assert!(r.passed, "{r:#?}");
        }
        assert!(matches!(verify_theorem(16, 5, 10_000), Err(Error::NotInAp { .. })));
        assert!(verify_theorem(3, 3, 1000).is_err());
    }
}
