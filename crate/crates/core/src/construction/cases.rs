//! The four alternative coverings of a conflicting `x(S)`.
//!
//! Notation follows the construction: `D` are the digits of the special
//! element, `X` the digits of `x(S)`, `j` the largest position of `S` below
//! the top digit, `a = D_j`, `b = D_{j+1}`.

use serde::{Serialize, Serializer};

use super::{canonical_covering, Conflict, TheoremSets};
use crate::digits::digits_padded;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseId {
    One,
    Two,
    Three,
    Four,
}

impl CaseId {
    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn index(self) -> usize {
        match self {
            CaseId::One => 0,
            CaseId::Two => 1,
            CaseId::Three => 2,
            CaseId::Four => 3,
        }
    }
}

impl Serialize for CaseId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.number())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseCover {
    pub case_id: CaseId,
    pub x: u64,
    pub positions: Vec<usize>,
    pub j: usize,
    pub a: u64,
    pub b: u64,
    pub j_prime: Option<usize>,
    /// Case 3 step digit.
    pub step: Option<u64>,
    /// The construction's `Δ`. For Case 1 the progression steps by
    /// `p^(k-1) + Δ`; for the other cases `diff == delta`.
    pub delta: u64,
    pub diff: u64,
    /// Ascending progression below `x`; only Case 1 has a negative first term.
    pub terms: Vec<i64>,
}

/// Dispatch on `(a, b, p)`; the guards partition the admissible parameters.
pub fn select_case(a: u64, b: u64, p: u64) -> Result<CaseId> {
    let inner = 0 < a && a < p - 1;
    let exception = (a, b, p) == (2, 1, 5);
    let guards = [
        (a == 0, CaseId::One),
        (inner && 2 * b < p - 3, CaseId::Two),
        (inner && p - 3 <= 2 * b && b < p - 1 && !exception, CaseId::Three),
        (exception, CaseId::Four),
    ];
    let mut hits = guards.iter().filter(|(g, _)| *g).map(|&(_, id)| id);
    match (hits.next(), hits.next()) {
        (Some(id), None) => Ok(id),
        (None, _) => Err(Error::Precondition(format!(
            "no case applies to (a, b, p) = ({a}, {b}, {p})"
        ))),
        (Some(_), Some(_)) => Err(Error::Construction(format!("overlapping cases at ({a}, {b}, {p})"))),
    }
}

fn check_conflict(ts: &TheoremSets, c: &Conflict) -> Result<()> {
    let k = ts.k as usize;
    let p = ts.p;
    let s = &c.positions;
    let fail = |msg: String| Err(Error::Precondition(msg));
    if s.is_empty() || s.windows(2).any(|w| w[0] >= w[1]) || s.iter().any(|&i| i >= k) {
        return fail(format!("bad position set {s:?}"));
    }
    let v = ts.special_digits[s[0]];
    if s.iter().any(|&i| ts.special_digits[i] != v) {
        return fail(format!("digits not constant on {s:?}"));
    }
    if s.as_slice() == [k - 1] {
        return fail("S = {k-1} gives -n itself".into());
    }
    if k >= 2 && s.contains(&(k - 1)) && s.contains(&(k - 2)) {
        return fail("S contains both top positions".into());
    }
    let x = ts.special + s.iter().map(|&i| (p - 1 - v) * p.pow(i as u32)).sum::<u64>();
    if x != c.x {
        return fail(format!("x(S) = {x}, conflict says {}", c.x));
    }
    if !canonical_covering(x, p, ts.k)?.terms.contains(&ts.special) {
        return fail(format!("canonical covering of {x} avoids the special element"));
    }
    Ok(())
}

/// Least `d` in `[1, b+1]` not dividing `p - a - 1`.
pub fn least_case3_step(a: u64, b: u64, p: u64) -> Option<u64> {
    (1..=b + 1).find(|&d| !(p - a - 1).is_multiple_of(d))
}

/// The alternative covering of `c.x` selected by the case split, using the
/// least valid step in Case 3.
pub fn alt_covering(ts: &TheoremSets, c: &Conflict) -> Result<CaseCover> {
    build(ts, c, None)
}

/// As [`alt_covering`] but with an explicit Case 3 step `d`.
pub fn alt_covering_with_step(ts: &TheoremSets, c: &Conflict, d: u64) -> Result<CaseCover> {
    build(ts, c, Some(d))
}

fn build(ts: &TheoremSets, c: &Conflict, step: Option<u64>) -> Result<CaseCover> {
    check_conflict(ts, c)?;
    let p = ts.p;
    let k = ts.k as usize;
    let dg = &ts.special_digits;
    let pw = |i: usize| p.pow(i as u32);
    let s = &c.positions;
    let j = *s
        .iter()
        .filter(|&&i| i != k - 1)
        .max()
        .expect("S has a position below k-1");
    let (a, b) = (dg[j], dg[j + 1]);
    let case_id = select_case(a, b, p)?;
    if step.is_some() && case_id != CaseId::Three {
        return Err(Error::Precondition(format!(
            "explicit step given for case {}",
            case_id.number()
        )));
    }
    let sum_outside = |lo: usize, hi: usize| s.iter().filter(|&&i| i < lo || i > hi).map(|&i| pw(i)).sum::<u64>();
    let half = (p - 1) / 2;
    let first_at_least = |from: usize, min: u64| (from..k).find(|&l| dg[l] >= min);

    let mut j_prime = None;
    let mut used_step = None;
    let delta = match case_id {
        CaseId::One => s.iter().map(|&i| pw(i)).sum(),
        CaseId::Two => {
            let jp = first_at_least(j + 1, half).ok_or_else(|| Error::Construction("no j' in case 2".into()))?;
            j_prime = Some(jp);
            (pw(jp) - pw(j)) / 2 + sum_outside(j, jp)
        }
        CaseId::Three => {
            let d = match step {
                Some(d) => {
                    if d == 0 || d > b + 1 || (p - a - 1).is_multiple_of(d) {
                        return Err(Error::Precondition(format!("step {d} is not valid for a={a}, b={b}")));
                    }
                    d
                }
                None => least_case3_step(a, b, p)
                    .ok_or_else(|| Error::Construction(format!("no case 3 step for a={a}, b={b}, p={p}")))?,
            };
            used_step = Some(d);
            d * pw(j) + sum_outside(j, j)
        }
        CaseId::Four => {
            let low = pw(j + 1) + 3 * pw(j);
            if dg[j + 2] >= 1 {
                low + sum_outside(j, j)
            } else {
                let jp = first_at_least(j + 3, 2).ok_or_else(|| Error::Construction("no j' in case 4".into()))?;
                j_prime = Some(jp);
                (pw(jp) - pw(j + 2)) / 2 + low + sum_outside(j, jp)
            }
        }
    };

    let x = c.x as i64;
    let (diff, terms): (u64, Vec<i64>) = match case_id {
        CaseId::One => {
            let diff = pw(k - 1) + delta;
            let first = -(ts.n as i64);
            (diff, (0..p - 1).map(|i| first + (i * diff) as i64).collect())
        }
        _ => (delta, (1..p).rev().map(|i| x - (i * delta) as i64).collect()),
    };
    let cover = CaseCover {
        case_id,
        x: c.x,
        positions: s.clone(),
        j,
        a,
        b,
        j_prime,
        step: used_step,
        delta,
        diff,
        terms,
    };
    validate_cover(ts, &cover)?;
    Ok(cover)
}

/// Progression shape plus membership of every term in `A'`.
pub fn validate_cover(ts: &TheoremSets, cover: &CaseCover) -> Result<()> {
    let bad = |msg: String| Err(Error::Construction(format!("x={}: {msg}", cover.x)));
    let m = ts.modulus as i64;
    if cover.terms.len() as u64 != ts.p - 1 {
        return bad(format!("{} terms", cover.terms.len()));
    }
    let d = cover.diff as i64;
    if cover.terms.windows(2).any(|w| w[1] - w[0] != d) || cover.terms.last().map(|t| t + d) != Some(cover.x as i64) {
        return bad("terms are not a progression ending at x".into());
    }
    if cover.terms.iter().skip(1).any(|&t| t < 0) || cover.terms[0] < -m {
        return bad("more than one wrap".into());
    }
    for &t in &cover.terms {
        let r = t.rem_euclid(m) as u64;
        if r == ts.special {
            return bad(format!("term {t} is the removed element"));
        }
        if !ts.in_a_prime(r) {
            return bad(format!("term {t} is outside A'"));
        }
    }
    Ok(())
}

/// Compares the closed-form digit predictions of each case with the digits
/// obtained by direct subtraction.
pub fn check_case_formulas(ts: &TheoremSets, cover: &CaseCover) -> std::result::Result<(), String> {
    let p = ts.p;
    let k = ts.k as usize;
    let xd = digits_padded(cover.x, p, k);
    let in_s = |l: usize| cover.positions.contains(&l);
    let j = cover.j;
    let half = (p - 1) / 2;

    if cover.case_id == CaseId::One {
        if xd[k - 1] != p - 2 {
            return Err(format!("x(S) leading digit {} != p-2", xd[k - 1]));
        }
        for i in 1..p - 1 {
            let t = cover.terms[i as usize] as u64;
            let got = digits_padded(t, p, k);
            let canonical = digits_padded(ts.special + i * cover.delta, p, k);
            if got.len() != k || got[k - 1] != i - 1 || got[..k - 1] != canonical[..k - 1] {
                return Err(format!("case 1 term {i}: digits {got:?}, canonical {canonical:?}"));
            }
        }
        return Ok(());
    }

    // signed so that a wrong prediction fails the comparison instead of underflowing
    let (p_, half_) = (p as i64, half as i64);
    let x_ = |l: usize| xd[l] as i64;
    let canon = |l: usize, i: i64| if in_s(l) { p_ - 1 - i } else { x_(l) };
    for i in 1..p {
        let value = cover.x - i * cover.delta;
        let got: Vec<i64> = digits_padded(value, p, k).into_iter().map(|d| d as i64).collect();
        if got.len() != k {
            return Err(format!("term {i} has more than {k} digits"));
        }
        let i = i as i64;
        let odd = i % 2 == 1;
        let predicted: Vec<i64> = match cover.case_id {
            CaseId::Two => {
                let jp = cover.j_prime.ok_or("case 2 without j'")?;
                (0..k)
                    .map(|l| {
                        if l < j || l > jp {
                            canon(l, i)
                        } else if l == jp {
                            x_(jp) - (i + 1) / 2
                        } else if l > j + 1 {
                            x_(l) + if odd { half_ } else { 0 }
                        } else if l == j + 1 {
                            x_(l) + 1 + if odd { half_ } else { 0 }
                        } else if odd {
                            half_ + (i - 1) / 2
                        } else {
                            i / 2 - 1
                        }
                    })
                    .collect()
            }
            CaseId::Three => {
                let d = cover.step.ok_or("case 3 without step")? as i64;
                (0..k)
                    .map(|l| {
                        if l == j {
                            (p_ - 1 - i * d).rem_euclid(p_)
                        } else if l == j + 1 {
                            x_(l) - i * d / p_
                        } else {
                            canon(l, i)
                        }
                    })
                    .collect()
            }
            CaseId::Four => {
                // (X_j, X_{j+1}) = (4, 1), stepped down by (3, 1)
                let borrow_j = 3 * i / 5;
                let low_j = 4 + 5 * borrow_j - 3 * i;
                let borrow_up = (i + borrow_j - 1 + 4) / 5;
                let low_j1 = 1 + 5 * borrow_up - i - borrow_j;
                (0..k)
                    .map(|l| match cover.j_prime {
                        _ if l == j => low_j,
                        _ if l == j + 1 => low_j1,
                        None if l == j + 2 => x_(l) - borrow_up,
                        Some(jp) if l == jp => x_(l) - (i + 1) / 2,
                        Some(_) if l == j + 2 => x_(l) + i / 2 + if odd { 3 } else { 0 } - borrow_up,
                        Some(jp) if l > j + 2 && l < jp => x_(l) + if odd { 2 } else { 0 },
                        _ => canon(l, i),
                    })
                    .collect()
            }
            CaseId::One => unreachable!(),
        };
        if predicted != got {
            return Err(format!(
                "case {} term {i}: predicted {predicted:?}, got {got:?}",
                cover.case_id.number()
            ));
        }
        if cover.case_id == CaseId::Two && got[j + 1] == x_(j + 1) {
            return Err(format!("case 2 term {i} re-takes digit b at j+1"));
        }
    }
    if let (CaseId::Three, Some(d)) = (cover.case_id, cover.step) {
        let borrows = xd[j + 1] - digits_padded(cover.x - (p - 1) * cover.delta, p, k)[j + 1];
        if borrows != d - 1 {
            return Err(format!("case 3 borrowed {borrows} times, expected {}", d - 1));
        }
    }
    Ok(())
}
