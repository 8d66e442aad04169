//! Acceptance criteria, one line per criterion. Exits non-zero if any binding
//! criterion fails; non-binding checks are reported but never fail the run.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use pstanley::analysis::{fit_exponent, scan_range, type1_exponent, Growth};
use pstanley::apfree::{covers, covers_mod, is_p_free, is_p_free_mod};
use pstanley::construction::cases::validate_cover;
use pstanley::construction::tables::example_tables;
use pstanley::construction::{
    alt_covering, build_theorem_sets, case3_step_exists, check_case_formulas, enumerate_conflicts, in_a_p,
    lcm_lemma_check, select_case, verify_theorem, CaseId,
};
use pstanley::modular::{check_modular_set, default_safety, detect_modularity};
use pstanley::primes::primes_up_to;
use pstanley::stanley::{generate, s0_closed_form, spk};
use pstanley::IntSet;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, budget: Duration) -> bool {
    elapsed <= budget
}

fn set(v: &[u64]) -> IntSet {
    IntSet::from_sorted(v.to_vec())
}

fn greedy_closed_form() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for p in [3u64, 5, 7] {
        let limit = p.pow(5);
        let seq = generate(&set(&[0]), p, limit).unwrap();
        if *seq.terms() != s0_closed_form(p, limit) {
            bad.push(p);
        }
    }
    let t = start.elapsed();
    outcome(
        bad.is_empty() && within(t, Duration::from_secs(10)),
        format!("mismatched p: {bad:?}, {t:.2?} (budget 10s)"),
    )
}

fn spk_modular() -> Outcome {
    let mut cases = vec![];
    for p in [3u64, 5, 7] {
        cases.extend((0..=3).map(|k| (p, k)));
    }
    cases.extend((0..=2).map(|k| (13, k)));
    let mut bad = Vec::new();
    for &(p, k) in &cases {
        let a = spk(p, k).unwrap();
        let ok = match check_modular_set(&a, p.pow(k), p).unwrap() {
            Ok(cert) => cert.revalidate().is_ok(),
            Err(_) => false,
        };
        if !ok {
            bad.push((p, k));
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} (p, k) pairs, failures {bad:?}", cases.len()),
    )
}

fn theorem_family(p: u64, ns: &[u64], extra_powers: u32) -> (Vec<u64>, Vec<String>) {
    let mut checked = Vec::new();
    let mut failures = Vec::new();
    for &n in ns {
        assert!(in_a_p(n, p).unwrap().member, "{n} not in A_{p}");
        let ts = build_theorem_sets(n, p).unwrap();
        let limit = ts.modulus * p.pow(extra_powers);
        match verify_theorem(n, p, limit) {
            Ok(r) if r.passed => checked.push(n),
            Ok(r) => {
                let st = r.stages.iter().find(|s| !s.passed).unwrap();
                failures.push(format!("n={n}: {} ({})", st.name, st.detail));
            }
            Err(e) => failures.push(format!("n={n}: {e}")),
        }
    }
    (checked, failures)
}

fn members(p: u64, n_max: u64) -> Vec<u64> {
    (1..=n_max).filter(|&n| in_a_p(n, p).unwrap().member).collect()
}

fn theorem_p5() -> Outcome {
    let start = Instant::now();
    let ns = members(5, 125);
    let (checked, failures) = theorem_family(5, &ns, 2);
    let t = start.elapsed();
    outcome(
        failures.is_empty() && within(t, Duration::from_secs(120)),
        format!(
            "{} of {} members verified with limit 5^(k+2), {t:.2?} (budget 2min) {failures:?}",
            checked.len(),
            ns.len()
        ),
    )
}

fn theorem_spot() -> Outcome {
    let start = Instant::now();
    let ns7 = members(7, 49);
    let (c7, mut failures) = theorem_family(7, &ns7, 2);
    // 169 - 157 = 12 is the digit p - 1, so 157 is rejected before verification
    let requested = [169u64, 168, 157, 156];
    let (ns13, skipped): (Vec<u64>, Vec<u64>) = requested.iter().partition(|&&n| in_a_p(n, 13).unwrap().member);
    let skipped_ok = skipped == [157] && in_a_p(157, 13).unwrap().m == 12;
    let (c13, f13) = theorem_family(13, &ns13, 1);
    failures.extend(f13);
    outcome(
        failures.is_empty() && skipped_ok,
        format!(
            "p=7: {}/{} members, p=13: {:?} verified with limit 13^(k+1), {:?} rejected by membership, {:.2?} {failures:?}",
            c7.len(),
            ns7.len(),
            c13,
            skipped,
            start.elapsed()
        ),
    )
}

const FROZEN_ROWS: &str = include_str!("data/table_rows.txt");

fn frozen() -> BTreeMap<String, Vec<String>> {
    let mut out = BTreeMap::new();
    let mut label = String::new();
    for line in FROZEN_ROWS.lines().filter(|l| !l.is_empty()) {
        if let Some(l) = line.strip_prefix("# ") {
            label = l.to_string();
            out.insert(label.clone(), Vec::new());
        } else {
            out.get_mut(&label).unwrap().push(line.to_string());
        }
    }
    out
}

fn tables_reproduced() -> Outcome {
    let expected = frozen();
    let mut mismatched = Vec::new();
    let mut titles = String::new();
    for which in 1..=4 {
        for t in example_tables(which).unwrap() {
            if expected.get(&t.label) != Some(&t.rows) {
                mismatched.push(t.label.clone());
            }
            titles.push_str(&t.title);
            titles.push('\n');
        }
    }
    let diffs_ok = titles.contains("1000666601_13 (1 0 0 0 6 6 6 6 0 1)") && titles.contains("51001_13 (5 1 0 0 1)");

    // the header printed for Table 4(b) is not the top of the progression formed by the other rows
    let rows = &expected["4(b)"];
    let value = |row: &str| {
        row.split_whitespace()
            .filter(|t| *t != "|")
            .fold(0u64, |acc, t| acc * 5 + t.parse::<u64>().unwrap())
    };
    let body: Vec<u64> = rows[1..].iter().map(|r| value(r)).collect();
    let step = body[0] - body[1];
    let consistent = body.windows(2).all(|w| w[0] - w[1] == step) && value(&rows[0]) == body[0] + step;
    let printed = value("3 1 3 0 1 0 1 4 2");
    let printed_inconsistent = printed != body[0] + step;

    outcome(
        mismatched.is_empty() && expected.len() == 6 && diffs_ok && consistent && printed_inconsistent,
        format!(
            "{} tables, mismatched {mismatched:?}, difference captions {}, 4(b) printed header off by {}",
            expected.len(),
            if diffs_ok { "ok" } else { "wrong" },
            (printed as i64 - (body[0] + step) as i64).abs()
        ),
    )
}

/// Samples `n` through `m = p^k - n` digit by digit so that `n` lies in `A_p`.
fn sample_member(rng: &mut StdRng, p: u64, k: u32) -> u64 {
    if rng.random_range(0..20) == 0 {
        return p.pow(k);
    }
    let mut m = 0u64;
    for pos in 0..k {
        let top = if pos == k - 1 { p - 2 } else { p - 1 };
        m += rng.random_range(0..top) * p.pow(pos);
    }
    p.pow(k) - m
}

fn random_conflicts() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    let plan = [(5u64, 2u32..=7u32), (7, 2..=6), (13, 2..=5)];
    let mut failures = Vec::new();
    let mut counts = [0usize; 4];
    let mut sampled = 0;
    while sampled < 500 {
        let (p, ks) = &plan[sampled % plan.len()];
        let k = rng.random_range(ks.clone());
        let n = sample_member(&mut rng, *p, k);
        assert!(in_a_p(n, *p).unwrap().member);
        let ts = build_theorem_sets(n, *p).unwrap();
        let conflicts = enumerate_conflicts(&ts).unwrap();
        if conflicts.is_empty() {
            continue;
        }
        let c = &conflicts[rng.random_range(0..conflicts.len())];
        sampled += 1;
        let result = alt_covering(&ts, c).map_err(|e| e.to_string()).and_then(|cover| {
            validate_cover(&ts, &cover).map_err(|e| e.to_string())?;
            check_case_formulas(&ts, &cover)?;
            if cover
                .terms
                .iter()
                .any(|&t| t.rem_euclid(ts.modulus as i64) as u64 == ts.special)
            {
                return Err("covering meets the removed element".into());
            }
            Ok(cover.case_id)
        });
        match result {
            Ok(id) => counts[id.index()] += 1,
            Err(e) => failures.push(format!("p={p} n={n} x={}: {e}", c.x)),
        }
    }
    outcome(
        failures.is_empty(),
        format!("{sampled} conflicts, cases 1-4 = {counts:?}, failures {failures:?}"),
    )
}

fn lemma_checks() -> Outcome {
    let start = Instant::now();
    let primes = primes_up_to(10_000);
    let lcm_bad: Vec<u64> = primes
        .iter()
        .copied()
        .filter(|&p| p >= 7)
        .filter(|&p| !lcm_lemma_check(p).holds)
        .collect();
    let mut step_pairs = 0;
    let mut step_bad = Vec::new();
    for &p in primes.iter().filter(|&&p| (5..=100).contains(&p)) {
        for a in 1..p - 1 {
            for b in 0..p - 1 {
                if select_case(a, b, p).unwrap() == CaseId::Three {
                    step_pairs += 1;
                    if !case3_step_exists(a, b, p) {
                        step_bad.push((a, b, p));
                    }
                }
            }
        }
    }
    let t = start.elapsed();
    outcome(
        lcm_bad.is_empty() && step_bad.is_empty() && within(t, Duration::from_secs(1)),
        format!(
            "{} primes in [7, 10^4], {step_pairs} case-3 (a, b, p) triples, failures {lcm_bad:?} {step_bad:?}, {t:.2?} (budget 1s)",
            primes.iter().filter(|&&p| p >= 7).count()
        ),
    )
}

fn evidence_scan() -> (Outcome, Outcome) {
    let start = Instant::now();
    let report = scan_range(5, 125, 4).unwrap();
    let t = start.elapsed();
    let s = &report.summary;
    let forward = outcome(
        s.contradictions.is_empty() && s.errors == 0 && within(t, Duration::from_secs(600)),
        format!(
            "{} members, all detected except {:?}, {t:.2?} (budget 10min)",
            s.members, s.contradictions
        ),
    );
    let converse = outcome(
        s.extra_modular.is_empty(),
        format!(
            "{} of {} n agree; modular non-members {:?}",
            s.agree, s.total, s.extra_modular
        ),
    );
    (forward, converse)
}

fn growth_type_one() -> Outcome {
    let runs: [(&[u64], u64, u32); 4] = [(&[0], 3, 12), (&[0], 5, 8), (&[0, 5], 5, 8), (&[0, 25], 5, 8)];
    let mut parts = Vec::new();
    let mut ok = true;
    for (seed, p, e) in runs {
        let limit = p.pow(e);
        let seq = generate(&set(seed), p, limit).unwrap();
        let detected = detect_modularity(&seq, e - 2, default_safety(p)).unwrap().is_some();
        let fit = fit_exponent(&seq, 0.5).unwrap();
        let err = (fit.exponent - type1_exponent(p)).abs();
        ok &= detected && err <= 0.05;
        parts.push(format!(
            "S_{p}({seed:?}) {:.4} (ref {:.4}){}",
            fit.exponent,
            fit.type1_ref,
            if detected { "" } else { " not modular" }
        ));
    }
    outcome(ok, parts.join(", "))
}

fn growth_type_two() -> Outcome {
    let seq = generate(&set(&[0, 4]), 3, 10_000_000).unwrap();
    let fit = fit_exponent(&seq, 0.5).unwrap();
    let ok = fit.classification == Growth::TypeIILike && (1.8..=2.1).contains(&fit.exponent);
    outcome(
        ok,
        format!(
            "S_3(0,4) to 10^7: {} terms, exponent {:.4}, classified {} (refs {:.4} / {:.4})",
            fit.terms,
            fit.exponent,
            fit.classification.label(),
            fit.type1_ref,
            fit.type2_ref
        ),
    )
}

fn brute_free(a: &[u64], p: u64) -> bool {
    for &s in a {
        for &t in a {
            if t > s {
                let d = t - s;
                if (0..p).all(|i| a.contains(&(s + i * d))) {
                    return false;
                }
            }
        }
    }
    true
}

fn brute_covers(a: &[u64], top: u64, p: u64) -> bool {
    (1..=top).any(|d| (1..p).all(|i| i * d <= top && a.contains(&(top - i * d))))
}

fn brute_free_mod(a: &[u64], n: u64, p: u64) -> bool {
    !a.iter()
        .any(|&s| (1..n).any(|d| (0..p).all(|i| a.contains(&((s + i * d) % n)))))
}

fn oracle_check(a: &[u64], p: u64) -> Result<(), String> {
    let s = set(a);
    if is_p_free(&s, p) != brute_free(a, p) {
        return Err(format!("is_p_free {a:?} p={p}"));
    }
    for x in 0..36 {
        if covers(&s, x, p).is_some() != brute_covers(a, x, p) {
            return Err(format!("covers {a:?} x={x} p={p}"));
        }
    }
    for n in [30u64, 31] {
        if is_p_free_mod(&s, n, p).unwrap() != brute_free_mod(a, n, p) {
            return Err(format!("is_p_free_mod {a:?} n={n} p={p}"));
        }
        for x in 0..n {
            let brute = brute_covers(a, x, p) || brute_covers(a, x + n, p);
            if covers_mod(&s, x, n, p).unwrap().is_some() != brute {
                return Err(format!("covers_mod {a:?} x={x} n={n} p={p}"));
            }
        }
    }
    Ok(())
}

fn subsets_up_to(size: usize, universe: u64, out: &mut Vec<Vec<u64>>, cur: &mut Vec<u64>, next: u64) {
    out.push(cur.clone());
    if cur.len() == size {
        return;
    }
    for v in next..universe {
        cur.push(v);
        subsets_up_to(size, universe, out, cur, v + 1);
        cur.pop();
    }
}

fn oracle_equivalence() -> Outcome {
    use rayon::prelude::*;
    let mut exhaustive = Vec::new();
    subsets_up_to(4, 30, &mut exhaustive, &mut Vec::new(), 0);
    let mut rng = StdRng::seed_from_u64(0x5eed_0010);
    let sampled: Vec<Vec<u64>> = (0..20_000)
        .map(|_| {
            let size = rng.random_range(5..=8);
            let mut v: Vec<u64> = rand::seq::index::sample(&mut rng, 30, size)
                .into_iter()
                .map(|i| i as u64)
                .collect();
            v.sort_unstable();
            v
        })
        .collect();
    let all: Vec<&Vec<u64>> = exhaustive.iter().chain(sampled.iter()).collect();
    let failures: Vec<String> = all
        .par_iter()
        .flat_map_iter(|a| [3u64, 5].into_iter().filter_map(move |p| oracle_check(a, p).err()))
        .collect();
    outcome(
        failures.is_empty(),
        format!(
            "{} subsets of size <= 4 exhaustively, {} random subsets of size 5..8, p in {{3, 5}}; failures {:?}",
            exhaustive.len(),
            sampled.len(),
            failures.iter().take(5).collect::<Vec<_>>()
        ),
    )
}

fn main() {
    let mut binding_failed = false;
    let mut report = |id: &str, name: &str, binding: bool, o: Outcome| {
        let mark = match (o.passed, binding) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "FAIL (non-binding)",
        };
        println!("criterion {id} [{mark}] {name}: {}", o.detail);
        binding_failed |= binding && !o.passed;
    };
    report(
        "1",
        "greedy sequence equals the digit closed form",
        true,
        greedy_closed_form(),
    );
    report("2", "S_p^k is a modular p-free set mod p^k", true, spk_modular());
    report(
        "3",
        "S_5(0, n) modular for every n in A_5 up to 125",
        true,
        theorem_p5(),
    );
    report("4", "spot checks for p = 7 and p = 13", true, theorem_spot());
    report("5", "worked tables reproduced", true, tables_reproduced());
    report("6", "random conflict coverings", true, random_conflicts());
    report("7", "lcm lemma and case-3 step existence", true, lemma_checks());
    let (forward, converse) = evidence_scan();
    report("8", "scan p = 5: member implies modular", true, forward);
    report("8", "scan p = 5: modular implies member (evidence)", false, converse);
    report(
        "9",
        "Type I growth exponents of modular sequences",
        true,
        growth_type_one(),
    );
    report("9", "Type II-like growth of S_3(0, 4)", false, growth_type_two());
    report("10", "oracle equivalence on small subsets", true, oracle_equivalence());
    if binding_failed {
        std::process::exit(1);
    }
}
