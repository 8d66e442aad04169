//! Growth exponents of generated sequences and range scans for modularity.
//!
//! The fit is ordinary least squares of `ln a_n` against `ln n` on the
//! indices `n = 1, 2, 4, 8, ...` (1-based). The two reference exponents are
//! `log_{p-1} p` for Type I and `(p-1)/(p-2)` for Type II; the Type II
//! logarithmic correction is not modelled, so slowly converging Type II runs
//! fit slightly below their reference.

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::construction::in_a_p;
use crate::digits::checked_pow;
use crate::error::{Error, Result};
use crate::modular::{default_safety, detect_modularity};
use crate::stanley::{generate, StanleySeq};
use crate::IntSet;

pub const MIN_TERMS: usize = 1000;
pub const DEFAULT_TOLERANCE: f64 = 0.08;
pub const DEFAULT_TAIL_FRACTION: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Growth {
    TypeI,
    TypeIILike,
    Inconclusive,
}

impl Growth {
    pub fn label(self) -> &'static str {
        match self {
            Growth::TypeI => "TypeI",
            Growth::TypeIILike => "TypeII-like",
            Growth::Inconclusive => "inconclusive",
        }
    }
}

impl Serialize for Growth {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

pub fn type1_exponent(p: u64) -> f64 {
    (p as f64).ln() / ((p - 1) as f64).ln()
}

pub fn type2_exponent(p: u64) -> f64 {
    (p - 1) as f64 / (p - 2) as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthFit {
    pub p: u64,
    pub seed: Vec<u64>,
    pub limit: u64,
    pub terms: usize,
    /// `(n, a_n)` on the geometric grid.
    pub sample: Vec<(u64, u64)>,
    pub tail_fraction: f64,
    pub tail_points: usize,
    pub exponent: f64,
    pub intercept: f64,
    pub type1_ref: f64,
    pub type2_ref: f64,
    pub tolerance: f64,
    pub classification: Growth,
    /// Root mean square residual of the tail fit in log space.
    pub residual: f64,
}

pub fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

pub fn classify(exponent: f64, p: u64, tolerance: f64) -> Growth {
    let d1 = (exponent - type1_exponent(p)).abs();
    let d2 = (exponent - type2_exponent(p)).abs();
    if d1 < d2 && d1 <= tolerance {
        Growth::TypeI
    } else if d2 < d1 && d2 <= tolerance {
        Growth::TypeIILike
    } else {
        Growth::Inconclusive
    }
}

pub fn fit_exponent(seq: &StanleySeq, tail_fraction: f64) -> Result<GrowthFit> {
    fit_exponent_with(seq, tail_fraction, DEFAULT_TOLERANCE)
}

pub fn fit_exponent_with(seq: &StanleySeq, tail_fraction: f64, tolerance: f64) -> Result<GrowthFit> {
    let p = seq.p();
    let terms = seq.terms().elements();
    if terms.len() < MIN_TERMS {
        return Err(Error::TooFewTerms {
            have: terms.len(),
            need: MIN_TERMS,
        });
    }
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::Precondition(format!(
            "tail fraction {tail_fraction} outside (0, 1]"
        )));
    }
    let (type1_ref, type2_ref) = (type1_exponent(p), type2_exponent(p));
    assert!(type1_ref < type2_ref, "reference exponents out of order for p={p}");

    let sample: Vec<(u64, u64)> = std::iter::successors(Some(1u64), |&n| n.checked_mul(2))
        .take_while(|&n| n as usize <= terms.len())
        .map(|n| (n, terms[n as usize - 1]))
        .filter(|&(_, a)| a > 0)
        .collect();
    let tail_points = ((sample.len() as f64 * tail_fraction).ceil() as usize).clamp(3.min(sample.len()), sample.len());
    let tail: Vec<(f64, f64)> = sample[sample.len() - tail_points..]
        .iter()
        .map(|&(n, a)| ((n as f64).ln(), (a as f64).ln()))
        .collect();
    if tail.len() < 3 {
        return Err(Error::TooFewTerms {
            have: tail.len(),
            need: 3,
        });
    }
    let (exponent, intercept) = least_squares(&tail);
    let residual = (tail
        .iter()
        .map(|(x, y)| (y - exponent * x - intercept).powi(2))
        .sum::<f64>()
        / tail.len() as f64)
        .sqrt();
    Ok(GrowthFit {
        p,
        seed: seq.seed().elements().to_vec(),
        limit: seq.limit(),
        terms: terms.len(),
        sample,
        tail_fraction,
        tail_points,
        exponent,
        intercept,
        type1_ref,
        type2_ref,
        tolerance,
        classification: classify(exponent, p, tolerance),
        residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub n: u64,
    pub k: u32,
    pub member: bool,
    pub detected_k: Option<u32>,
    pub exponent: Option<f64>,
    pub classification: Option<Growth>,
    /// `member == detected`, only meaningful when `within_range`.
    pub agree: bool,
    /// The modulus the construction predicts for members is `p^(k+1)`;
    /// false when that exceeds the scanned `k_max`.
    pub within_range: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanSummary {
    pub total: usize,
    pub members: usize,
    pub detected: usize,
    pub agree: usize,
    /// Members within range that were not detected.
    pub contradictions: Vec<u64>,
    /// Detected non-members.
    pub extra_modular: Vec<u64>,
    pub errors: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub p: u64,
    pub n_max: u64,
    pub k_max: u32,
    pub limit: u64,
    pub rows: Vec<ScanRow>,
    pub summary: ScanSummary,
}

fn scan_one(n: u64, p: u64, k_max: u32, limit: u64) -> ScanRow {
    let membership = match in_a_p(n, p) {
        Ok(m) => m,
        Err(e) => {
            return ScanRow {
                n,
                k: 0,
                member: false,
                detected_k: None,
                exponent: None,
                classification: None,
                agree: false,
                within_range: false,
                error: Some(e.to_string()),
            }
        }
    };
    let within_range = membership.k < k_max;
    let mut row = ScanRow {
        n,
        k: membership.k,
        member: membership.member,
        detected_k: None,
        exponent: None,
        classification: None,
        agree: false,
        within_range,
        error: None,
    };
    let outcome = generate(&IntSet::from_sorted(vec![0, n]), p, limit)
        .and_then(|seq| detect_modularity(&seq, k_max, default_safety(p)).map(|d| (seq, d)));
    match outcome {
        Ok((seq, detection)) => {
            row.detected_k = detection.map(|d| d.k);
            if let Ok(fit) = fit_exponent(&seq, DEFAULT_TAIL_FRACTION) {
                row.exponent = Some(fit.exponent);
                row.classification = Some(fit.classification);
            }
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row.agree = row.member == row.detected_k.is_some();
    row
}

/// Membership in `A_p` against detected modularity of `S_p(0, n)` for `1 <= n <= n_max`.
pub fn scan_range(p: u64, n_max: u64, k_max: u32) -> Result<ScanReport> {
    let limit = checked_pow(p, k_max)?
        .checked_mul(default_safety(p))
        .ok_or_else(|| Error::Overflow(format!("{p}^{k_max} * {}", default_safety(p))))?;
    let rows: Vec<ScanRow> = (1..=n_max)
        .into_par_iter()
        .map(|n| scan_one(n, p, k_max, limit))
        .collect();
    let summary = ScanSummary {
        total: rows.len(),
        members: rows.iter().filter(|r| r.member).count(),
        detected: rows.iter().filter(|r| r.detected_k.is_some()).count(),
        agree: rows.iter().filter(|r| r.agree).count(),
        contradictions: rows
            .iter()
            .filter(|r| r.member && r.within_range && r.detected_k.is_none() && r.error.is_none())
            .map(|r| r.n)
            .collect(),
        extra_modular: rows
            .iter()
            .filter(|r| !r.member && r.detected_k.is_some())
            .map(|r| r.n)
            .collect(),
        errors: rows.iter().filter(|r| r.error.is_some()).count(),
    };
    Ok(ScanReport {
        p,
        n_max,
        k_max,
        limit,
        rows,
        summary,
    })
}

pub const SCAN_CSV_HEADER: &str = "n,k,member,detected_k,exponent,classification";

pub fn scan_csv(report: &ScanReport) -> String {
    let mut out = String::from(SCAN_CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        let detected = r.detected_k.map_or_else(String::new, |k| k.to_string());
        let exponent = r.exponent.map_or_else(String::new, |e| format!("{e:.6}"));
        let class = match (&r.error, r.classification) {
            (Some(_), _) => "error",
            (None, Some(c)) => c.label(),
            (None, None) => "",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n, r.k, r.member, detected, exponent, class
        ));
    }
    out
}
