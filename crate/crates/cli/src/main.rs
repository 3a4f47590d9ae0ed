//! Command-line interface to the exact F_p product-sumset laboratory.
//!
//! Exit codes: 0 on success, 1 when a verification suite records failing
//! checks, 2 on configuration or usage errors (including malformed flags,
//! composite moduli, and bad sweep configs), 3 when a search result is
//! flagged non-optimal because the node budget ran out.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sumprod_core::constructions::{
    default_targets, inverse_closed_sumfree, middle_third, multi_avoider_with_density,
    one_avoider, Density,
};
use sumprod_core::extremal::{mp_branch_bound_best, mp_exhaustive, SearchCertificate, DEFAULT_BUDGET};
use sumprod_core::harness::{
    primes_in, run_sweep, suite_energy, suite_exact, suite_overlap_count, suite_rectification,
    suite_triple_chain, HarnessError, SetSource, SuiteReport, SweepConfig,
};
use sumprod_core::set::{additive_energy, multiplicative_energy};
use sumprod_core::{FieldCtx, FpSet};

#[derive(Parser)]
#[command(
    name = "sumprod",
    version,
    about = "Exact experiments on the sets A(A+A) over prime fields"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Field facts: least primitive root, least nonsquare, size caps.
    FieldInfo {
        #[arg(long)]
        p: u64,
    },
    /// Set operations on an explicit subset of F_p.
    Setops {
        #[arg(long)]
        p: u64,
        /// Comma-separated residues ("1,2,4") or little-endian hex bitmap ("0x16").
        #[arg(long)]
        set: String,
        /// One of: aplusa, missing, energy+, energyx.
        #[arg(long)]
        op: String,
    },
    /// Build a named construction and print it as JSON.
    Construct {
        #[arg(long)]
        p: u64,
        /// One of: theorem3, theorem3k, midthird, invclosed.
        #[arg(long)]
        kind: String,
        /// Density for the avoider kinds ("1/4" or "0.25").
        #[arg(long)]
        c: Option<String>,
        /// Number of targets for theorem3k.
        #[arg(long)]
        k: Option<usize>,
        /// Explicit targets for theorem3k, comma-separated.
        #[arg(long, value_delimiter = ',')]
        targets: Option<Vec<u64>>,
    },
    /// Run a verification suite over a prime range.
    Verify {
        /// One of: exact, thm2, lemma9, energy, rectify.
        #[arg(long)]
        suite: String,
        /// Inclusive range "A..B"; only odd primes inside are used.
        #[arg(long, value_name = "A..B")]
        p_range: String,
        #[arg(long, default_value_t = 20)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Search for the largest A ⊆ F_p∖{0} with A(A+A) ⊉ F_p∖{0}.
    SearchMp {
        #[arg(long)]
        p: u64,
        /// "exhaustive" (definitive, p ≤ 23) or "bb" (branch and bound).
        #[arg(long, default_value = "bb")]
        method: String,
        /// Node budget for bb; the certificate is flagged non-optimal when
        /// it runs out.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Run a JSON-configured sweep and write the CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// A CLI failure: message plus process exit code.
struct Failure {
    msg: String,
    code: u8,
}

impl Failure {
    fn config(msg: impl Into<String>) -> Self {
        Failure { msg: msg.into(), code: 2 }
    }
}

/// Every error bubbling out of the core layers is caused by the invocation
/// (bad modulus, bad literal, bad config), so it maps to exit code 2.
impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { msg: e.to_string(), code: 2 }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.cmd {
        Cmd::FieldInfo { p } => field_info(p),
        Cmd::Setops { p, set, op } => setops(p, &set, &op),
        Cmd::Construct { p, kind, c, k, targets } => construct(p, &kind, c, k, targets),
        Cmd::Verify { suite, p_range, trials, seed } => verify(&suite, &p_range, trials, seed),
        Cmd::SearchMp { p, method, budget } => search_mp(p, &method, budget),
        Cmd::Sweep { config, out } => sweep(&config, &out),
    }
}

fn field_info(p: u64) -> Result<ExitCode, Failure> {
    let ctx = FieldCtx::new(p)?;
    println!("p = {p}");
    println!("generator = {}", ctx.generator());
    println!("least_nonsquare = {}", ctx.least_nonsquare());
    println!("avoider_size_cap = {}", (p + 1) / 3);
    Ok(ExitCode::SUCCESS)
}

fn setops(p: u64, literal: &str, op: &str) -> Result<ExitCode, Failure> {
    let a = FpSet::parse(p, literal)?;
    match op {
        "aplusa" => println!("{}", a.a_aplusa().to_literal()),
        "missing" => println!("{}", a.missing_elements().to_literal()),
        "energy+" => println!("{}", additive_energy(&a)),
        "energyx" => println!("{}", multiplicative_energy(&a)),
        other => {
            return Err(Failure::config(format!(
                "unknown op {other:?} (expected aplusa, missing, energy+, or energyx)"
            )))
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn construct(
    p: u64,
    kind: &str,
    c: Option<String>,
    k: Option<usize>,
    targets: Option<Vec<u64>>,
) -> Result<ExitCode, Failure> {
    let density = match &c {
        None => None,
        Some(text) => Some(text.parse::<Density>().and_then(Density::validate)?),
    };
    let json = match kind {
        "theorem3" => {
            let cons = one_avoider(p, density.unwrap_or(Density::Ratio(1, 4)))?;
            construction_json(p, kind, Some(cons.targets), cons.base_size, cons.overlap, &cons.set)
        }
        "theorem3k" => {
            let k = k.unwrap_or(1);
            let c = density.unwrap_or(Density::Ratio(1, 4 * k as u64));
            let targets = match targets {
                Some(t) => {
                    if t.len() != k {
                        return Err(Failure::config(format!(
                            "expected {k} targets, got {}",
                            t.len()
                        )));
                    }
                    t
                }
                None => default_targets(p, k)?,
            };
            let cons = multi_avoider_with_density(p, &targets, c)?;
            construction_json(p, kind, Some(cons.targets), cons.base_size, cons.overlap, &cons.set)
        }
        "midthird" => {
            let set = middle_third(p)?;
            construction_json(p, kind, None, set.card(), 0, &set)
        }
        "invclosed" => {
            let set = inverse_closed_sumfree(p)?;
            construction_json(p, kind, None, set.card(), 0, &set)
        }
        other => {
            return Err(Failure::config(format!(
                "unknown kind {other:?} (expected theorem3, theorem3k, midthird, or invclosed)"
            )))
        }
    };
    println!("{}", serde_json::to_string_pretty(&json).expect("json"));
    Ok(ExitCode::SUCCESS)
}

fn construction_json(
    p: u64,
    kind: &str,
    targets: Option<Vec<u64>>,
    base_size: usize,
    overlap: usize,
    set: &FpSet,
) -> serde_json::Value {
    let mut obj = serde_json::json!({
        "p": p,
        "kind": kind,
        "size": set.card(),
        "density": set.card() as f64 / p as f64,
        "set": set.to_literal(),
    });
    if let Some(t) = targets {
        obj["targets"] = serde_json::json!(t);
        obj["base_size"] = serde_json::json!(base_size);
        obj["overlap"] = serde_json::json!(overlap);
    }
    obj
}

fn parse_range(text: &str) -> Result<(u64, u64), Failure> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| Failure::config(format!("bad range {text:?}, expected A..B")))?;
    let lo: u64 = lo.trim().parse().map_err(|_| Failure::config(format!("bad range start {lo:?}")))?;
    let hi: u64 = hi.trim().parse().map_err(|_| Failure::config(format!("bad range end {hi:?}")))?;
    if lo > hi {
        return Err(Failure::config(format!("empty range {text:?}")));
    }
    Ok((lo, hi))
}

fn verify(suite: &str, p_range: &str, trials: u64, seed: u64) -> Result<ExitCode, Failure> {
    let (lo, hi) = parse_range(p_range)?;
    let primes = primes_in(lo.max(3), hi);
    if primes.is_empty() {
        return Err(Failure::config(format!("no odd primes in {p_range}")));
    }
    let mut failures = 0usize;
    match suite {
        "exact" => failures += print_report(&suite_exact(&primes, trials, seed)?),
        "thm2" => {
            // Triple-product chain at the three reference densities.
            for &p in &primes {
                for alpha in [0.2f64, 0.3, 0.4] {
                    let r = suite_triple_chain(p, alpha, trials, seed ^ p)?;
                    println!("# alpha = {alpha}");
                    failures += print_report(&r);
                }
            }
        }
        "lemma9" => failures += print_report(&suite_overlap_count(&primes, Density::Ratio(1, 4))?),
        "energy" => {
            for &p in &primes {
                match suite_energy(p, SetSource::InverseClosedCore, trials, seed ^ p) {
                    Err(HarnessError::EmptySet) => {
                        println!("suite energy: p={p} inverse-closed core empty, skipped")
                    }
                    Err(e) => return Err(e.into()),
                    Ok(r) => failures += print_report(&r),
                }
                failures +=
                    print_report(&suite_energy(p, SetSource::RandomSymmetric, trials, seed ^ p)?);
            }
        }
        "rectify" => failures += print_report(&suite_rectification(&primes, trials, seed)?),
        other => {
            return Err(Failure::config(format!(
                "unknown suite {other:?} (expected exact, thm2, lemma9, energy, or rectify)"
            )))
        }
    }
    if failures > 0 {
        println!("RESULT: FAIL ({failures} failing checks)");
        Ok(ExitCode::from(1))
    } else {
        println!("RESULT: PASS");
        Ok(ExitCode::SUCCESS)
    }
}

/// Prints a one-screen summary of a suite report and returns its failure
/// count. The first ten failing checks are listed with their inputs so a
/// failure is reproducible without rerunning the whole suite.
fn print_report(r: &SuiteReport) -> usize {
    let plist = if r.p_list.len() > 6 {
        format!(
            "[{}, …, {}] ({} primes)",
            r.p_list.first().unwrap(),
            r.p_list.last().unwrap(),
            r.p_list.len()
        )
    } else {
        format!("{:?}", r.p_list)
    };
    println!("suite {}: p {} trials {} seed {}", r.suite, plist, r.trials, r.seed);
    let constant = r
        .max_constant
        .map_or_else(|| "n/a".to_string(), |c| format!("{c:.6}"));
    println!(
        "  checks {}  failures {}  skips {}  max_constant {}",
        r.checks.len(),
        r.failures,
        r.skips,
        constant
    );
    for c in r.checks.iter().filter(|c| !c.pass).take(10) {
        println!(
            "  FAIL {} [{}]: lhs {} rhs {} margin {}",
            c.check, c.inputs, c.lhs, c.rhs, c.margin
        );
    }
    if r.failures > 10 {
        println!("  … and {} more failing checks", r.failures - 10);
    }
    r.failures
}

fn search_mp(p: u64, method: &str, budget: Option<u64>) -> Result<ExitCode, Failure> {
    let cert: SearchCertificate = match method {
        "exhaustive" => mp_exhaustive(p)?,
        "bb" => mp_branch_bound_best(p, budget.unwrap_or(DEFAULT_BUDGET))?,
        other => {
            return Err(Failure::config(format!(
                "unknown method {other:?} (expected exhaustive or bb)"
            )))
        }
    };
    println!("{}", serde_json::to_string_pretty(&cert).expect("json"));
    if cert.optimal {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("warning: node budget exhausted; size {} is only a lower bound", cert.size);
        Ok(ExitCode::from(3))
    }
}

fn sweep(config_path: &PathBuf, out_path: &PathBuf) -> Result<ExitCode, Failure> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| Failure::config(format!("cannot read {}: {e}", config_path.display())))?;
    let config: SweepConfig = serde_json::from_str(&text)
        .map_err(|e| Failure::config(format!("bad sweep config: {e}")))?;
    let csv = run_sweep(&config)?;
    std::fs::write(out_path, &csv)
        .map_err(|e| Failure::config(format!("cannot write {}: {e}", out_path.display())))?;
    println!(
        "wrote {} rows to {}",
        csv.lines().count().saturating_sub(1),
        out_path.display()
    );
    Ok(ExitCode::SUCCESS)
}
