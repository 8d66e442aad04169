//! Modular p-free sets: certification, expansion to `A + N * S_p(0)`, and
//! detection of modular structure in generated sequences.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::apfree::{covers_mod, find_progression_mod, ApWitness, CoverWitness, IntSet};
use crate::digits::checked_pow;
use crate::error::{Error, Result};
use crate::stanley::{s0_closed_form, StanleySeq};

/// Evidence that `set` is a modular p-free set mod `modulus`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularCertificate {
    p: u64,
    modulus: u64,
    set: IntSet,
    free_mod: bool,
    contains_zero: bool,
    /// One covering per residue outside `set`, ascending by target.
    coverings: Vec<CoverWitness>,
}

/// The first clause of the modular definition that fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModularFailure {
    MissingZero,
    NotFreeMod { witness: ApWitness },
    Uncovered { x: u64 },
}

impl std::fmt::Display for ModularFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModularFailure::MissingZero => f.write_str("set does not contain 0"),
            ModularFailure::NotFreeMod { witness } => write!(f, "not p-free mod N: {witness}"),
            ModularFailure::Uncovered { x } => write!(f, "{x} is not covered mod N"),
        }
    }
}

pub type Verdict = std::result::Result<ModularCertificate, ModularFailure>;

impl ModularCertificate {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn set(&self) -> &IntSet {
        &self.set
    }

    pub fn coverings(&self) -> &[CoverWitness] {
        &self.coverings
    }

    /// Re-checks every clause from the stored data alone.
    pub fn revalidate(&self) -> std::result::Result<(), String> {
        let n = self.modulus;
        if !self.contains_zero || !self.set.contains(0) {
            return Err("set does not contain 0".into());
        }
        if self.set.max().is_some_and(|m| m >= n) {
            return Err(format!("set is not inside [0, {n})"));
        }
        if !self.free_mod {
            return Err("freeness not attested".into());
        }
        if let Ok(Some(w)) = find_progression_mod(&self.set, n, self.p) {
            return Err(format!("not p-free mod {n}: {w}"));
        }
        let expected = n as usize - self.set.len();
        if self.coverings.len() != expected {
            return Err(format!(
                "{} coverings for {expected} excluded residues",
                self.coverings.len()
            ));
        }
        let mut targets = self.coverings.iter().map(|w| w.target);
        let complement = (0..n).filter(|&x| !self.set.contains(x));
        if !complement.eq(&mut targets) {
            return Err("coverings do not match the complement".into());
        }
        match self
            .coverings
            .iter()
            .find(|w| w.modulus != Some(n) || !w.validate(&self.set, self.p))
        {
            Some(w) => Err(format!("covering of {} does not validate", w.target)),
            None => Ok(()),
        }
    }
}

/// Certifies `a` as a modular p-free set mod `n`, or names the first failing clause.
pub fn check_modular_set(a: &IntSet, n: u64, p: u64) -> Result<Verdict> {
    if n == 0 {
        return Err(Error::Precondition("modulus must be positive".into()));
    }
    if let Some(m) = a.max().filter(|&m| m >= n) {
        return Err(Error::OutOfRange { element: m, bound: n });
    }
    if !a.contains(0) {
        return Ok(Err(ModularFailure::MissingZero));
    }
    if let Some(witness) = find_progression_mod(a, n, p)? {
        return Ok(Err(ModularFailure::NotFreeMod { witness }));
    }
    let complement: Vec<u64> = (0..n).filter(|&x| !a.contains(x)).collect();
    let found: Vec<Option<CoverWitness>> = complement
        .par_iter()
        .map(|&x| covers_mod(a, x, n, p).expect("inputs validated above"))
        .collect();
    let mut coverings = Vec::with_capacity(found.len());
    for (x, w) in complement.into_iter().zip(found) {
        match w {
            Some(w) => coverings.push(w),
            None => return Ok(Err(ModularFailure::Uncovered { x })),
        }
    }
    Ok(Ok(ModularCertificate {
        p,
        modulus: n,
        set: a.clone(),
        free_mod: true,
        contains_zero: true,
        coverings,
    }))
}

/// `{a + N*s : a in set, s in S_p(0)}` restricted to `[0, limit]`.
pub fn expand(cert: &ModularCertificate, limit: u64) -> Result<IntSet> {
    let n = cert.modulus;
    let base = s0_closed_form(cert.p, limit / n);
    let mut out = Vec::with_capacity(base.len() * cert.set.len());
    for s in base.iter() {
        let offset = s.checked_mul(n).ok_or_else(|| Error::Overflow(format!("{n} * {s}")))?;
        for a in cert.set.iter() {
            let v = offset
                .checked_add(a)
                .ok_or_else(|| Error::Overflow(format!("{offset} + {a}")))?;
            if v > limit {
                break;
            }
            out.push(v);
        }
    }
    Ok(IntSet::from_sorted(out))
}

/// Multiple of `p^k` the sequence must reach before modularity at `p^k` is reported.
pub fn default_safety(p: u64) -> u64 {
    p * p
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Detection {
    pub k: u32,
    pub certificate: ModularCertificate,
}

/// Smallest `k <= k_max` such that the prefix below `p^k` is a modular set whose
/// expansion reproduces the whole generated sequence.
pub fn detect_modularity(seq: &StanleySeq, k_max: u32, safety: u64) -> Result<Option<Detection>> {
    let p = seq.p();
    let need = checked_pow(p, k_max)?
        .checked_mul(safety.max(1))
        .ok_or_else(|| Error::Overflow(format!("{p}^{k_max} * {safety}")))?;
    if seq.limit() < need {
        return Err(Error::InsufficientLimit {
            have: seq.limit(),
            need,
        });
    }
    for k in 0..=k_max {
        let n = checked_pow(p, k)?;
        let prefix = seq.terms().prefix(n);
        if !prefix.contains(0) {
            continue;
        }
        let Ok(certificate) = check_modular_set(&prefix, n, p)? else {
            continue;
        };
        if expand(&certificate, seq.limit())? == *seq.terms() {
            return Ok(Some(Detection { k, certificate }));
        }
    }
    Ok(None)
}
