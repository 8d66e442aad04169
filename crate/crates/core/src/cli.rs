//! Command-line front end.
//!
//! Every subcommand renders either an aligned text report (`--format table`),
//! a JSON document carrying `"schema": 1` (`--format json`), or, for `scan`
//! and `classify`, CSV. Exit status is 0 on success, 1 when a verification
//! fails and 2 on usage errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{fit_exponent, scan_csv, scan_range, DEFAULT_TAIL_FRACTION};
use crate::apfree::{find_progression, find_progression_mod};
use crate::construction::tables::example_tables;
use crate::construction::{build_theorem_sets, in_a_p, lcm_lemma_check, verify_theorem};
use crate::digits::checked_pow;
use crate::error::Error;
use crate::modular::{check_modular_set, default_safety};
use crate::primes::{is_odd_prime, primes_up_to};
use crate::stanley::generate;
use crate::IntSet;

pub const SCHEMA_VERSION: u32 = 1;
pub const MAX_LIMIT: u64 = 1 << 62;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "pstanley", version, about = "p-Stanley sequences and modular p-free sets")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value = "table")]
    pub format: Format,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads for parallel commands (default: logical cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Greedy p-Stanley sequence below a limit.
    Generate {
        #[arg(long, value_parser = parse_prime)]
        p: u64,
        #[arg(long, default_value = "0")]
        seed: String,
        #[arg(long, value_parser = parse_limit)]
        limit: u64,
    },
    /// Whether a set contains a p-term progression, optionally mod N.
    CheckFree {
        #[arg(long, value_parser = parse_prime)]
        p: u64,
        #[arg(long)]
        set: String,
        #[arg(long = "mod", value_parser = parse_limit)]
        modulus: Option<u64>,
    },
    /// Whether a set is p-free modulo N.
    CheckFreeMod {
        #[arg(long, value_parser = parse_prime)]
        p: u64,
        #[arg(long)]
        set: String,
        #[arg(long = "mod", value_parser = parse_limit)]
        modulus: u64,
    },
    /// Certifies a modular p-free set mod N, with one covering per excluded residue.
    CheckModular {
        #[arg(long, value_parser = parse_prime)]
        p: u64,
        #[arg(long = "mod", value_parser = parse_limit)]
        modulus: u64,
        #[arg(long)]
        set: String,
    },
    /// Membership of n in A_p.
    ApMember {
        #[arg(long, value_parser = parse_prime)]
        p: u64,
        #[arg(long)]
        n: u64,
    },
    /// Staged verification that S_p(0, n) is modular.
    VerifyTheorem {
        #[arg(long, value_parser = parse_prime)]
        p: u64,
        #[arg(long)]
        n: u64,
        /// Default: p^(k+1) where p^k is the modulus.
        #[arg(long, value_parser = parse_limit)]
        limit: Option<u64>,
    },
    /// Membership against detected modularity for 1 <= n <= n_max.
    Scan {
        #[arg(long, value_parser = parse_prime)]
        p: u64,
        #[arg(long)]
        n_max: u64,
        #[arg(long)]
        k_max: u32,
    },
    /// Growth exponent fit of a generated sequence.
    Classify {
        #[arg(long, value_parser = parse_prime)]
        p: u64,
        #[arg(long, default_value = "0")]
        seed: String,
        #[arg(long, value_parser = parse_limit)]
        limit: u64,
        #[arg(long, default_value_t = DEFAULT_TAIL_FRACTION)]
        tail_fraction: f64,
    },
    /// lcm(1..(p-1)/2) >= p-1 for primes 7 <= p <= p_max.
    LemmaCheck {
        #[arg(long)]
        p_max: u64,
    },
    /// Worked conflict examples in MSB-first digit layout.
    Tables {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        which: u8,
    },
}

fn parse_prime(s: &str) -> Result<u64, String> {
    let p: u64 = s.trim().parse().map_err(|e| format!("{e}"))?;
    if !is_odd_prime(p) {
        return Err(format!("{p} is not an odd prime"));
    }
    Ok(p)
}

fn parse_limit(s: &str) -> Result<u64, String> {
    let v: u64 = s.trim().parse().map_err(|e| format!("{e}"))?;
    if v > MAX_LIMIT {
        return Err(format!("{v} exceeds 2^62"));
    }
    Ok(v)
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Construction(_)) { 1 } else { 2 };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

struct Report {
    body: String,
    ok: bool,
}

/// Comma-separated nonnegative integers; unsorted or repeated input is normalized.
pub fn parse_set(s: &str, warnings: &mut Vec<String>) -> Result<IntSet, String> {
    let raw: Vec<u64> = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().map_err(|e| format!("bad set element {t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let set = IntSet::from_unsorted(raw.clone());
    if set.elements() != raw.as_slice() {
        warnings.push(format!("warning: set normalized to {}", join(set.elements())));
    }
    Ok(set)
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: u32,
    command: &'a str,
    result: T,
}

fn envelope(command: &str, result: impl Serialize) -> String {
    let doc = Envelope {
        schema: SCHEMA_VERSION,
        command,
        result,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("json renders");
    s.push('\n');
    s
}

fn no_csv(format: Format, command: &str) -> Result<(), Failure> {
    if format == Format::Csv {
        return Err(Failure::usage(format!("{command} has no CSV output")));
    }
    Ok(())
}

fn wrap_terms(v: &[u64]) -> String {
    let mut out = String::new();
    for chunk in v.chunks(16) {
        out.push_str("  ");
        out.push_str(&chunk.iter().map(u64::to_string).collect::<Vec<_>>().join(" "));
        out.push('\n');
    }
    out
}

fn dispatch(cli: &Cli, warnings: &mut Vec<String>) -> Result<Report, Failure> {
    let format = cli.format;
    match &cli.command {
        Command::Generate { p, seed, limit } => {
            no_csv(format, "generate")?;
            let seed = parse_set(seed, warnings).map_err(Failure::usage)?;
            let seq = generate(&seed, *p, *limit)?;
            let body = match format {
                Format::Json => envelope("generate", &seq),
                _ => format!(
                    "S_{}({}) below {}: {} terms\n{}",
                    p,
                    join(seed.elements()),
                    limit,
                    seq.terms().len(),
                    wrap_terms(seq.terms().elements())
                ),
            };
            Ok(Report { body, ok: true })
        }
        Command::CheckFree { p, set, modulus: None } => {
            no_csv(format, "check-free")?;
            let set = parse_set(set, warnings).map_err(Failure::usage)?;
            let witness = find_progression(&set, *p);
            let body = match format {
                Format::Json => envelope(
                    "check-free",
                    json!({ "p": p, "set": &set, "free": witness.is_none(), "witness": &witness }),
                ),
                _ => match &witness {
                    None => format!("{p}-free: yes\n"),
                    Some(w) => format!("{p}-free: no\nprogression: {w}\n"),
                },
            };
            Ok(Report {
                body,
                ok: witness.is_none(),
            })
        }
        Command::CheckFree {
            p,
            set,
            modulus: Some(n),
        }
        | Command::CheckFreeMod { p, set, modulus: n } => {
            no_csv(format, "check-free-mod")?;
            let set = parse_set(set, warnings).map_err(Failure::usage)?;
            let witness = find_progression_mod(&set, *n, *p)?;
            let body = match format {
                Format::Json => envelope(
                    "check-free-mod",
                    json!({ "p": p, "modulus": n, "set": &set, "free": witness.is_none(), "witness": &witness }),
                ),
                _ => match &witness {
                    None => format!("{p}-free mod {n}: yes\n"),
                    Some(w) => format!("{p}-free mod {n}: no\nprogression: {w}\n"),
                },
            };
            Ok(Report {
                body,
                ok: witness.is_none(),
            })
        }
        Command::CheckModular { p, modulus, set } => {
            no_csv(format, "check-modular")?;
            let set = parse_set(set, warnings).map_err(Failure::usage)?;
            let verdict = check_modular_set(&set, *modulus, *p)?;
            let ok = verdict.is_ok();
            let body = match (format, &verdict) {
                (Format::Json, Ok(cert)) => envelope("check-modular", json!({ "modular": true, "certificate": cert })),
                (Format::Json, Err(f)) => envelope("check-modular", json!({ "modular": false, "failure": f })),
                (_, Ok(cert)) => {
                    let mut s = format!(
                        "modular {p}-free mod {modulus}: yes ({} elements, {} coverings)\n",
                        cert.set().len(),
                        cert.coverings().len()
                    );
                    for c in cert.coverings() {
                        let top = if c.wrapped {
                            format!("{}+{modulus}", c.target)
                        } else {
                            c.target.to_string()
                        };
                        s.push_str(&format!("  {top}: {} (d={})\n", join(&c.terms), c.diff));
                    }
                    s
                }
                (_, Err(f)) => format!("modular {p}-free mod {modulus}: no\nreason: {f}\n"),
            };
            Ok(Report { body, ok })
        }
        Command::ApMember { p, n } => {
            no_csv(format, "ap-member")?;
            let m = in_a_p(*n, *p)?;
            let body = match format {
                Format::Json => envelope("ap-member", &m),
                _ => {
                    let verdict = match m.reason {
                        None => "member".to_string(),
                        Some(r) => format!("not a member ({r:?})"),
                    };
                    format!("n={} p={} k={} m={}: {verdict}\n", m.n, m.p, m.k, m.m)
                }
            };
            Ok(Report { body, ok: true })
        }
        Command::VerifyTheorem { p, n, limit } => {
            no_csv(format, "verify-theorem")?;
            let limit = match limit {
                Some(l) => *l,
                None => {
                    let ts = build_theorem_sets(*n, *p)?;
                    ts.modulus
                        .checked_mul(*p)
                        .filter(|&l| l <= MAX_LIMIT)
                        .ok_or_else(|| Failure::usage("default limit exceeds 2^62"))?
                }
            };
            let report = verify_theorem(*n, *p, limit)?;
            let body = match format {
                Format::Json => envelope("verify-theorem", &report),
                _ => {
                    let mut s = format!(
                        "n={} p={} modulus={} limit={}\n",
                        report.n, report.p, report.modulus, report.limit
                    );
                    for st in &report.stages {
                        let mark = if st.passed { "PASS" } else { "FAIL" };
                        if st.detail.is_empty() {
                            s.push_str(&format!("[{mark}] {}\n", st.name));
                        } else {
                            s.push_str(&format!("[{mark}] {}: {}\n", st.name, st.detail));
                        }
                    }
                    let c = report.case_counts;
                    s.push_str(&format!("cases: 1={} 2={} 3={} 4={}\n", c[0], c[1], c[2], c[3]));
                    s.push_str(if report.passed {
                        "result: PASS\n"
                    } else {
                        "result: FAIL\n"
                    });
                    s
                }
            };
            Ok(Report {
                body,
                ok: report.passed,
            })
        }
        Command::Scan { p, n_max, k_max } => {
            checked_pow(*p, *k_max)
                .ok()
                .and_then(|v| v.checked_mul(default_safety(*p)))
                .filter(|&l| l <= MAX_LIMIT)
                .ok_or_else(|| Failure::usage(format!("{p}^{k_max} * {} exceeds 2^62", default_safety(*p))))?;
            let report = scan_range(*p, *n_max, *k_max)?;
            let ok = report.summary.contradictions.is_empty() && report.summary.errors == 0;
            let body = match format {
                Format::Json => envelope("scan", &report),
                Format::Csv => scan_csv(&report),
                Format::Table => {
                    let mut s = format!(
                        "{:>8} {:>3} {:>6} {:>8} {:>9} {}\n",
                        "n", "k", "member", "detected", "exponent", "class"
                    );
                    for r in &report.rows {
                        s.push_str(&format!(
                            "{:>8} {:>3} {:>6} {:>8} {:>9} {}\n",
                            r.n,
                            r.k,
                            r.member,
                            r.detected_k.map_or("-".into(), |k| k.to_string()),
                            r.exponent.map_or("-".into(), |e| format!("{e:.4}")),
                            r.error
                                .as_deref()
                                .unwrap_or(r.classification.map_or("-", |c| c.label())),
                        ));
                    }
                    let sm = &report.summary;
                    s.push_str(&format!(
                        "members={} detected={} agree={}/{} contradictions=[{}] extra=[{}]\n",
                        sm.members,
                        sm.detected,
                        sm.agree,
                        sm.total,
                        join(&sm.contradictions),
                        join(&sm.extra_modular)
                    ));
                    s
                }
            };
            Ok(Report { body, ok })
        }
        Command::Classify {
            p,
            seed,
            limit,
            tail_fraction,
        } => {
            let seed = parse_set(seed, warnings).map_err(Failure::usage)?;
            let seq = generate(&seed, *p, *limit)?;
            let fit = fit_exponent(&seq, *tail_fraction)?;
            let body = match format {
                Format::Json => envelope("classify", &fit),
                Format::Csv => {
                    let mut s = String::from("n,a_n\n");
                    for (n, a) in &fit.sample {
                        s.push_str(&format!("{n},{a}\n"));
                    }
                    s
                }
                Format::Table => format!(
                    "p={} seed={} limit={} terms={}\nexponent={:.6} (tail {} of {} points, rms residual {:.2e})\ntype I ref={:.6} type II ref={:.6} tolerance={}\nclassification: {}\n",
                    fit.p,
                    join(&fit.seed),
                    fit.limit,
                    fit.terms,
                    fit.exponent,
                    fit.tail_points,
                    fit.sample.len(),
                    fit.residual,
                    fit.type1_ref,
                    fit.type2_ref,
                    fit.tolerance,
                    fit.classification.label()
                ),
            };
            Ok(Report { body, ok: true })
        }
        Command::LemmaCheck { p_max } => {
            no_csv(format, "lemma-check")?;
            let checks: Vec<_> = primes_up_to(*p_max)
                .into_iter()
                .filter(|&p| p >= 7)
                .map(lcm_lemma_check)
                .collect();
            let ok = checks.iter().all(|c| c.holds);
            let body = match format {
                Format::Json => {
                    let json_checks: Vec<Value> = checks
                        .iter()
                        .map(|c| json!({ "p": c.p, "holds": c.holds, "lcm": c.lcm.map(|l| l.to_string()), "reached_at": c.reached_at }))
                        .collect();
                    envelope(
                        "lemma-check",
                        json!({ "p_max": p_max, "all_hold": ok, "checks": json_checks }),
                    )
                }
                _ => checks
                    .iter()
                    .map(|c| {
                        let status = if c.holds { "OK" } else { "FAIL" };
                        match c.lcm {
                            Some(l) => format!("{}: {status} (lcm={l})\n", c.p),
                            None => format!("{}: {status} (lcm>2^128)\n", c.p),
                        }
                    })
                    .collect(),
            };
            Ok(Report { body, ok })
        }
        Command::Tables { which } => {
            no_csv(format, "tables")?;
            let tables = example_tables(*which)?;
            let body = match format {
                Format::Json => envelope("tables", &tables),
                _ => tables.iter().map(|t| t.render()).collect::<Vec<_>>().join("\n"),
            };
            Ok(Report { body, ok: true })
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return if code == 0 { 0 } else { 2 };
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            let _ = writeln!(err, "error: --jobs must be positive");
            return 2;
        }
        builder = builder.num_threads(j);
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    let mut warnings = Vec::new();
    let outcome = pool.install(|| dispatch(&cli, &mut warnings));
    for w in &warnings {
        let _ = writeln!(err, "{w}");
    }
    match outcome {
        Ok(report) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, &report.body).map_err(|e| format!("{}: {e}", path.display())),
                None => out.write_all(report.body.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: {e}");
                return 2;
            }
            if report.ok {
                0
            } else {
                1
            }
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
