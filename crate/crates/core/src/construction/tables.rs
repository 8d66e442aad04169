//! Digit tables of coverings, most significant digit first.
//!
//! Layout: one row per value, digits separated by single spaces. The first
//! row is `x(S)`, followed by the covering terms from the largest down. A
//! negative term `t` (only `-n` in Case 1) is shown through `t + p^k` with its
//! leading digit reduced by `p` and parenthesised, e.g. `(-1) 6 0 0 0 3 0`.
//! For Cases 2-4 a `|` marks each side of the block of positions the
//! alternative covering changes.

use serde::Serialize;

use super::cases::{alt_covering, alt_covering_with_step, CaseCover, CaseId};
use super::{build_theorem_sets, canonical_covering, Conflict, TheoremSets};
use crate::digits::{digits_padded, Digits};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RenderedTable {
    pub label: String,
    pub title: String,
    pub rows: Vec<String>,
}

impl RenderedTable {
    pub fn render(&self) -> String {
        let mut out = format!("Table {}: {}\n", self.label, self.title);
        for row in &self.rows {
            out.push_str(row);
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
enum Kind {
    Canonical,
    Alternative { step: Option<u64> },
}

struct Example {
    label: &'static str,
    p: u64,
    special_msb: &'static [u64],
    positions: &'static [usize],
    kind: Kind,
}

const EXAMPLES: &[(u8, Example)] = &[
    (
        1,
        Example {
            label: "1(a)",
            p: 13,
            special_msb: &[11, 6, 0, 0, 0, 3, 0],
            positions: &[0, 3, 4],
            kind: Kind::Canonical,
        },
    ),
    (
        1,
        Example {
            label: "1(b)",
            p: 13,
            special_msb: &[11, 6, 0, 0, 0, 3, 0],
            positions: &[0, 3, 4],
            kind: Kind::Alternative { step: None },
        },
    ),
    (
        2,
        Example {
            label: "2",
            p: 13,
            special_msb: &[11, 6, 3, 6, 4, 5, 4, 11, 10, 11],
            positions: &[0, 2, 9],
            kind: Kind::Alternative { step: None },
        },
    ),
    (
        3,
        Example {
            label: "3",
            p: 13,
            special_msb: &[11, 6, 1, 1, 0, 3, 1],
            positions: &[0, 3, 4],
            kind: Kind::Alternative { step: Some(5) },
        },
    ),
    (
        4,
        Example {
            label: "4(a)",
            p: 5,
            special_msb: &[3, 1, 0, 2, 3, 1, 1, 2, 2],
            positions: &[1],
            kind: Kind::Alternative { step: None },
        },
    ),
    (
        4,
        Example {
            label: "4(b)",
            p: 5,
            special_msb: &[3, 1, 3, 1, 0, 0, 1, 2, 2],
            positions: &[1],
            kind: Kind::Alternative { step: None },
        },
    ),
];

/// `n` whose special element has the given digits.
fn theorem_sets_for(p: u64, special_msb: &[u64]) -> Result<TheoremSets> {
    let k = special_msb.len() as u32;
    let special = Digits::from_msb(p, special_msb)?.value();
    let n = (p - 1) * p.pow(k - 1) - special;
    let ts = build_theorem_sets(n, p)?;
    if ts.special != special {
        return Err(Error::Construction(format!(
            "n = {n} does not reproduce the special element"
        )));
    }
    Ok(ts)
}

fn render_value(ts: &TheoremSets, value: i64, bars: Option<(usize, usize)>) -> String {
    let k = ts.k as usize;
    let p = ts.p as i64;
    let shifted = if value < 0 { value + ts.modulus as i64 } else { value };
    let digits = digits_padded(shifted as u64, ts.p, k);
    let mut parts = Vec::with_capacity(k + 2);
    for pos in (0..k).rev() {
        if let Some((lo, hi)) = bars {
            if pos == hi && hi + 1 < k {
                parts.push("|".to_string());
            }
            if pos + 1 == lo {
                parts.push("|".to_string());
            }
        }
        if value < 0 && pos == k - 1 {
            parts.push(format!("({})", digits[pos] as i64 - p));
        } else {
            parts.push(digits[pos].to_string());
        }
    }
    parts.join(" ")
}

fn block(cover: &CaseCover) -> Option<(usize, usize)> {
    match cover.case_id {
        CaseId::One => None,
        CaseId::Two => cover.j_prime.map(|jp| (cover.j, jp)),
        CaseId::Three => Some((cover.j, cover.j + 1)),
        CaseId::Four => Some((cover.j, cover.j_prime.unwrap_or(cover.j + 2))),
    }
}

fn difference_text(p: u64, value: u64) -> String {
    let d = Digits::new(p, digits_padded(value, p, 0)).expect("digits of a u64 are canonical");
    let spaced = d.to_string();
    if d.as_slice().iter().all(|&x| x < 10) {
        let packed: String = d.as_slice().iter().rev().map(|x| x.to_string()).collect();
        format!("{packed}_{p} ({spaced})")
    } else {
        spaced
    }
}

fn render_example(ex: &Example) -> Result<RenderedTable> {
    let ts = theorem_sets_for(ex.p, ex.special_msb)?;
    let v = ts.special_digits[ex.positions[0]];
    let x = ts.special
        + ex.positions
            .iter()
            .map(|&i| (ex.p - 1 - v) * ex.p.pow(i as u32))
            .sum::<u64>();
    let conflict = Conflict {
        x,
        positions: ex.positions.to_vec(),
    };
    let head = format!("p = {}, n = {}, x(S) = {}", ts.p, ts.n, x);
    match ex.kind {
        Kind::Canonical => {
            let cc = canonical_covering(x, ts.p, ts.k)?;
            let mut rows = vec![render_value(&ts, x as i64, None)];
            rows.extend(cc.terms.iter().rev().map(|&t| render_value(&ts, t as i64, None)));
            Ok(RenderedTable {
                label: ex.label.into(),
                title: format!(
                    "canonical covering, {head}, difference {}",
                    difference_text(ts.p, cc.diff)
                ),
                rows,
            })
        }
        Kind::Alternative { step } => {
            let cover = match step {
                Some(d) => alt_covering_with_step(&ts, &conflict, d)?,
                None => alt_covering(&ts, &conflict)?,
            };
            let bars = block(&cover);
            let mut rows = vec![render_value(&ts, x as i64, bars)];
            rows.extend(cover.terms.iter().rev().map(|&t| render_value(&ts, t, bars)));
            let mut title = format!(
                "alternative covering (case {}), {head}, difference {}",
                cover.case_id.number(),
                difference_text(ts.p, cover.diff)
            );
            if let Some(d) = cover.step {
                title.push_str(&format!(", step d = {d}"));
            }
            Ok(RenderedTable {
                label: ex.label.into(),
                title,
                rows,
            })
        }
    }
}

/// Re-derives the example tables for `which` in `1..=4`.
pub fn example_tables(which: u8) -> Result<Vec<RenderedTable>> {
    let picked: Vec<&Example> = EXAMPLES.iter().filter(|(w, _)| *w == which).map(|(_, e)| e).collect();
    if picked.is_empty() {
        return Err(Error::Precondition(format!("no table {which}; choose 1 to 4")));
    }
    picked.into_iter().map(render_example).collect()
}
