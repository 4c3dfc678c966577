//! Command-line front end for the Fishburn-number toolkit: exact and
//! modular xi_{r,s} tables, pentagonal residue sets, congruence-family
//! prediction and verification, empirical congruence search, dissections
//! of the truncated strange series, p-adic digits, and spot checks of the
//! supporting lemmas.
//!
//! Output is plain text by default; `--format json` wraps each command's
//! results in a `{"command", "params", "results", "version"}` envelope
//! with arbitrary-precision integers rendered as decimal strings, and
//! `--format csv` covers the tabular commands (`xi`, `search`).
//!
//! Exit codes: 0 on success; 1 when a congruence is refuted or a checked
//! hypothesis fails (a JSON witness accompanies the verdict); 2 on usage
//! errors; 3 on a corrupt cache file.

mod config;

use std::env;
use std::fmt::Write as _;
use std::io::ErrorKind;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use fishburn::arith::is_prime;
use fishburn::congruence::{
    lemma_checks, predict, predict_p_divides_r, residue_report, search, verify,
    CongruenceFamily, Guarantee, LemmaChecksReport, VerificationOutcome,
};
use fishburn::dissect::{
    check_lemma_alpha, check_lemma_alpha24, check_qq_conjecture, dissection, DissectionReport,
};
use fishburn::padic::expand;
use fishburn::series::CoefficientRing;
use fishburn::xi::{cache_load, cache_store, xi_table, CacheError, XiRequest, XiTable};

use crate::config::{Format, RunConfig};

#[derive(Parser)]
#[command(name = "fishburn", version, about = "Generalized Fishburn numbers and their prime-power congruences")]
struct Cli {
    /// Output format (default text).
    #[arg(long, global = true, value_enum, value_name = "FORMAT")]
    format: Option<Format>,

    /// Read defaults from a `key = value` file (# starts a comment).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Cache file for exact xi tables.  The FISHBURN_CACHE environment
    /// variable overrides this flag; set it empty to disable caching.
    #[arg(long, global = true, value_name = "PATH")]
    cache: Option<PathBuf>,

    /// Guard on the number of series coefficients a command may compute.
    #[arg(long, global = true, value_name = "N")]
    series_limit: Option<usize>,

    /// Worker threads for the parallel commands.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DissectCheck {
    /// (1-q)^n divides every part of F(q, pn-1) at an index outside S(p).
    Alpha,
    /// (q;q)_n divides those parts — a conjectured strengthening.
    Qq,
    /// The correction-term identity at the distinguished index i0.
    Alpha24,
}

#[derive(Subcommand)]
enum Command {
    /// Print xi_{r,s}(n) for n = 0..=n-max, exactly or mod M.
    Xi {
        /// Series argument exponent: the strange series is taken at (1-q)^r.
        #[arg(long, allow_negative_numbers = true)]
        r: i64,
        /// Prefactor exponent: the series is multiplied by (1-q)^s.
        #[arg(long, allow_negative_numbers = true)]
        s: i64,
        /// Largest index to print.
        #[arg(long)]
        n_max: usize,
        /// Reduce mod M instead of computing exactly (skips the cache).
        #[arg(long = "mod", value_name = "M")]
        modulus: Option<u64>,
    },

    /// Print the residue sets S(p,r,s) and S*(p,r,s), the distinguished
    /// residue i0, and the digit-condition verdict.
    Sets {
        #[arg(long)]
        p: u64,
        #[arg(long, allow_negative_numbers = true)]
        r: i64,
        #[arg(long, allow_negative_numbers = true)]
        s: i64,
    },

    /// Predict the families xi_{r,s}(p^lambda m - j) == 0 (mod p^lambda)
    /// justified for (p, r, s, lambda), tagged by guarantee.
    Predict {
        #[arg(long)]
        p: u64,
        #[arg(long, allow_negative_numbers = true)]
        r: i64,
        #[arg(long, allow_negative_numbers = true)]
        s: i64,
        #[arg(long)]
        lambda: u32,
    },

    /// Predict the dense family bundle for r = p^lambda * r0:
    /// xi_r(p m - j) == 0 (mod p^lambda) for every j coprime to p.
    PredictPr {
        #[arg(long)]
        p: u64,
        #[arg(long, allow_negative_numbers = true)]
        r0: i64,
        #[arg(long)]
        lambda: u32,
    },

    /// Check xi_{r,s}(p^lambda m - j) == 0 (mod p^lambda) numerically for
    /// m = 1..=m-max; a refutation exits 1 with a witness.
    Verify {
        #[arg(long)]
        p: u64,
        #[arg(long, allow_negative_numbers = true)]
        r: i64,
        #[arg(long, allow_negative_numbers = true)]
        s: i64,
        #[arg(long)]
        lambda: u32,
        #[arg(long)]
        j: u64,
        #[arg(long)]
        m_max: u64,
    },

    /// Screen every progression alpha*m + beta (alpha <= alpha-max) against
    /// every modulus 2..=rho-max on the plain Fishburn numbers up to n-max.
    Search {
        #[arg(long)]
        alpha_max: u64,
        #[arg(long)]
        rho_max: u64,
        #[arg(long)]
        n_max: usize,
    },

    /// Split F(q, N) by residue class mod p, optionally running a
    /// divisibility check on the parts.
    Dissect {
        #[arg(long)]
        p: u64,
        /// N for a plain dissection of F(q, N).
        #[arg(long)]
        n_terms: Option<u32>,
        /// Run a divisibility check instead (the dissection then uses
        /// N = p*n - 1).
        #[arg(long, value_enum)]
        check: Option<DissectCheck>,
        /// The divisibility exponent n for --check.
        #[arg(long)]
        n: Option<u32>,
        /// Run an alpha24 check past the coefficient-count guard.
        #[arg(long)]
        force: bool,
    },

    /// Print the leading p-adic digits of num/den.
    Digits {
        #[arg(long, allow_negative_numbers = true)]
        num: String,
        #[arg(long, allow_negative_numbers = true)]
        den: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        count: usize,
    },

    /// Spot-check the three supporting lemmas on a sampled grid.
    Lemmas {
        #[arg(long)]
        p: u64,
        #[arg(long, allow_negative_numbers = true)]
        r: i64,
        #[arg(long, allow_negative_numbers = true)]
        s: i64,
        #[arg(long)]
        lambda: u32,
        /// Scales how many m, n and a values are sampled.
        #[arg(long, default_value_t = 3)]
        budget: u64,
    },
}

/// A command's rendered output, before the format is applied.
struct CommandOutput {
    command: &'static str,
    params: Value,
    results: Value,
    text: String,
    /// Only the tabular commands fill this.
    csv: Option<String>,
    /// True when a congruence was refuted or a checked hypothesis failed.
    failed: bool,
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn cache_broken(message: impl Into<String>) -> Failure {
    Failure { code: 3, message: message.into() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("config {}: {e}", path.display())))?;
        cfg.apply_file(&text).map_err(usage)?;
    }
    if let Some(format) = cli.format {
        cfg.output_format = format;
    }
    if let Some(cache) = cli.cache {
        cfg.cache_path = Some(cache);
    }
    if let Some(limit) = cli.series_limit {
        cfg.series_limit = limit;
    }
    if let Some(jobs) = cli.jobs {
        cfg.jobs = jobs;
    }
    if let Some(value) = env::var_os("FISHBURN_CACHE") {
        cfg.cache_path = if value.is_empty() { None } else { Some(PathBuf::from(value)) };
    }
    cfg.validate().map_err(usage)?;

    // The CSV contract is format-level; refuse before doing any work.
    if cfg.output_format == Format::Csv
        && !matches!(cli.command, Command::Xi { .. } | Command::Search { .. })
    {
        return Err(usage("CSV output covers the tabular commands (xi, search) only"));
    }

    let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build_global();

    let out = match cli.command {
        Command::Xi { r, s, n_max, modulus } => cmd_xi(r, s, n_max, modulus, &cfg)?,
        Command::Sets { p, r, s } => cmd_sets(p, r, s)?,
        Command::Predict { p, r, s, lambda } => cmd_predict(p, r, s, lambda)?,
        Command::PredictPr { p, r0, lambda } => cmd_predict_pr(p, r0, lambda)?,
        Command::Verify { p, r, s, lambda, j, m_max } => {
            cmd_verify(p, r, s, lambda, j, m_max, &cfg)?
        }
        Command::Search { alpha_max, rho_max, n_max } => {
            cmd_search(alpha_max, rho_max, n_max, &cfg)?
        }
        Command::Dissect { p, n_terms, check, n, force } => {
            cmd_dissect(p, n_terms, check, n, force)?
        }
        Command::Digits { num, den, p, count } => cmd_digits(&num, &den, p, count)?,
        Command::Lemmas { p, r, s, lambda, budget } => cmd_lemmas(p, r, s, lambda, budget)?,
    };

    match cfg.output_format {
        Format::Json => {
            let envelope = json!({
                "command": out.command,
                "params": out.params,
                "results": out.results,
                "version": env!("CARGO_PKG_VERSION"),
            });
            println!("{envelope}");
        }
        Format::Csv => {
            let csv = out.csv.expect("checked before dispatch");
            print!("{csv}");
        }
        Format::Text => print!("{}", out.text),
    }

    Ok(if out.failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

// ============================================================
// Shared rendering helpers
// ============================================================

fn braces(xs: &[u64]) -> String {
    let body = xs.iter().map(u64::to_string).collect::<Vec<_>>().join(", ");
    format!("{{{body}}}")
}

fn power_text(p: u64, lambda: u32) -> String {
    if lambda == 1 {
        p.to_string()
    } else {
        format!("{p}^{lambda}")
    }
}

/// "xi_{r,s}(p^lambda m - j) == 0 (mod p^lambda)".
fn family_text(f: &CongruenceFamily) -> String {
    let pl = power_text(f.p, f.lambda);
    format!("xi_{{{},{}}}({pl} m - {}) == 0 (mod {pl})", f.r, f.s, f.j)
}

/// The snake_case name a guarantee serializes under.
fn guarantee_name(g: Guarantee) -> String {
    match serde_json::to_value(g).expect("guarantees serialize") {
        Value::String(s) => s,
        _ => unreachable!("guarantees serialize as strings"),
    }
}

fn to_value<T: serde::Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("library types serialize")
}

// ============================================================
// Command handlers
// ============================================================

fn cmd_xi(
    r: i64,
    s: i64,
    n_max: usize,
    modulus: Option<u64>,
    cfg: &RunConfig,
) -> Result<CommandOutput, Failure> {
    if n_max + 1 > cfg.series_limit {
        return Err(usage(format!(
            "the table needs {} coefficients, over the series limit of {}; raise --series-limit",
            n_max + 1,
            cfg.series_limit
        )));
    }
    let ring = match modulus {
        Some(m) => CoefficientRing::modular_u64(m).map_err(|e| usage(e.to_string()))?,
        None => CoefficientRing::exact(),
    };
    let request = XiRequest::new(r, s, n_max, ring).map_err(|e| usage(e.to_string()))?;
    let table = if modulus.is_none() {
        cached_xi_table(&request, cfg)?
    } else {
        xi_table(&request)
    };

    // A cache hit may cover more than was asked for; print only the prefix.
    let values: Vec<BigInt> = table.values().into_iter().take(n_max + 1).collect();
    let mut text = String::new();
    let mut csv = String::from("n,value\n");
    for (n, v) in values.iter().enumerate() {
        writeln!(text, "{n} {v}").unwrap();
        writeln!(csv, "{n},{v}").unwrap();
    }
    Ok(CommandOutput {
        command: "xi",
        params: json!({ "r": r, "s": s, "n_max": n_max, "modulus": modulus }),
        results: json!({ "values": values.iter().map(BigInt::to_string).collect::<Vec<_>>() }),
        text,
        csv: Some(csv),
        failed: false,
    })
}

/// Load the requested exact table from the cache if it is long enough,
/// otherwise compute it and (re)write the cache.  A missing file means
/// compute-and-store; a corrupt one aborts with exit code 3.
fn cached_xi_table(request: &XiRequest, cfg: &RunConfig) -> Result<XiTable, Failure> {
    let Some(path) = &cfg.cache_path else {
        return Ok(xi_table(request));
    };
    match cache_load(path, request) {
        Ok(table) if table.request().n_max() >= request.n_max() => return Ok(table),
        Ok(_) => {} // stored table too short: recompute and overwrite
        Err(CacheError::Io(e)) if e.kind() == ErrorKind::NotFound => {}
        Err(CacheError::Io(e)) => {
            eprintln!("warning: could not read cache {}: {e}", path.display());
        }
        Err(e @ (CacheError::BadHeader { .. } | CacheError::Corrupt { .. })) => {
            return Err(cache_broken(format!("cache {}: {e}", path.display())));
        }
        Err(e @ (CacheError::WrongTable { .. } | CacheError::ModularTable)) => {
            return Err(usage(format!("cache {}: {e}", path.display())));
        }
    }
    let table = xi_table(request);
    if let Err(e) = cache_store(path, &table) {
        eprintln!("warning: could not update cache {}: {e}", path.display());
    }
    Ok(table)
}

fn cmd_sets(p: u64, r: i64, s: i64) -> Result<CommandOutput, Failure> {
    let report = residue_report(p, r, s).map_err(|e| usage(e.to_string()))?;
    let mut text = String::new();
    writeln!(text, "p = {p}  r = {r}  s = {s}").unwrap();
    writeln!(text, "S  = {}", braces(&report.s_set)).unwrap();
    match (&report.s_star, report.i0, report.digit_ok) {
        (Some(star), Some(i0), Some(digit_ok)) => {
            writeln!(text, "S* = {}", braces(star)).unwrap();
            writeln!(text, "i0 = {i0}").unwrap();
            writeln!(text, "digit_ok = {digit_ok}").unwrap();
        }
        _ => writeln!(text, "S*, i0 and the digit condition need p >= 5").unwrap(),
    }
    Ok(CommandOutput {
        command: "sets",
        params: json!({ "p": p, "r": r, "s": s }),
        results: to_value(&report),
        text,
        csv: None,
        failed: false,
    })
}

fn cmd_predict(p: u64, r: i64, s: i64, lambda: u32) -> Result<CommandOutput, Failure> {
    let families = predict(p, r, s, lambda).map_err(|e| usage(e.to_string()))?;
    let mut text = String::new();
    if families.is_empty() {
        writeln!(text, "no families predicted").unwrap();
    } else {
        let js: Vec<u64> = families.iter().map(|f| f.j).collect();
        writeln!(text, "j in {}", braces(&js)).unwrap();
        for f in &families {
            writeln!(text, "{}  [{}]", family_text(f), guarantee_name(f.guaranteed_by)).unwrap();
        }
    }
    Ok(CommandOutput {
        command: "predict",
        params: json!({ "p": p, "r": r, "s": s, "lambda": lambda }),
        results: json!({ "families": to_value(&families) }),
        text,
        csv: None,
        failed: false,
    })
}

fn cmd_predict_pr(p: u64, r0: i64, lambda: u32) -> Result<CommandOutput, Failure> {
    let bundle = predict_p_divides_r(p, r0, lambda).map_err(|e| usage(e.to_string()))?;
    let mut text = String::new();
    writeln!(text, "r = {} = {} * {}", bundle.r, power_text(p, lambda), r0).unwrap();
    writeln!(text, "j in {}", braces(&bundle.js)).unwrap();
    writeln!(
        text,
        "xi_{{{},0}}({p} m - j) == 0 (mod {}) for every j coprime to {p}",
        bundle.r, bundle.modulus
    )
    .unwrap();
    Ok(CommandOutput {
        command: "predict-pr",
        params: json!({ "p": p, "r0": r0, "lambda": lambda }),
        results: to_value(&bundle),
        text,
        csv: None,
        failed: false,
    })
}

fn cmd_verify(
    p: u64,
    r: i64,
    s: i64,
    lambda: u32,
    j: u64,
    m_max: u64,
    cfg: &RunConfig,
) -> Result<CommandOutput, Failure> {
    if !is_prime(p) {
        return Err(usage(format!("{p} is not prime")));
    }
    if j < 1 || j > p - 1 {
        return Err(usage(format!("j must lie in 1..={}, got {j}", p - 1)));
    }
    if m_max < 1 {
        return Err(usage("m-max must be at least 1"));
    }
    // Tag the family with the strongest predicted guarantee when one
    // applies, so the output records what backs it.
    let tag = predict(p, r, s, lambda)
        .ok()
        .and_then(|fams| fams.iter().find(|f| f.j == j).map(|f| f.guaranteed_by))
        .unwrap_or(Guarantee::Empirical);
    let family = CongruenceFamily::new(p, r, s, lambda, j, tag).map_err(|e| usage(e.to_string()))?;
    let result = verify(&family, m_max, cfg.series_limit).map_err(|e| usage(e.to_string()))?;

    let mut text = String::new();
    let mut failed = false;
    match &result.outcome {
        VerificationOutcome::Verified => {
            writeln!(text, "verified: {} for m = 1..={m_max}", family_text(&family)).unwrap();
        }
        VerificationOutcome::Refuted { m, residue } => {
            failed = true;
            writeln!(
                text,
                "refuted: {} fails at m = {m} (residue {residue})",
                family_text(&family)
            )
            .unwrap();
            writeln!(text, "witness: {}", json!({ "m": m, "residue": residue.to_string() }))
                .unwrap();
        }
    }
    Ok(CommandOutput {
        command: "verify",
        params: json!({ "p": p, "r": r, "s": s, "lambda": lambda, "j": j, "m_max": m_max }),
        results: to_value(&result),
        text,
        csv: None,
        failed,
    })
}

fn cmd_search(
    alpha_max: u64,
    rho_max: u64,
    n_max: usize,
    cfg: &RunConfig,
) -> Result<CommandOutput, Failure> {
    if alpha_max < 1 {
        return Err(usage("alpha-max must be at least 1"));
    }
    if rho_max < 2 {
        return Err(usage("rho-max must be at least 2"));
    }
    if n_max < 2 * alpha_max as usize {
        return Err(usage(format!(
            "n-max must be at least 2 * alpha-max = {} so every progression is sampled twice",
            2 * alpha_max
        )));
    }
    if n_max + 1 > cfg.series_limit {
        return Err(usage(format!(
            "the search needs {} coefficients per modulus, over the series limit of {}; raise --series-limit",
            n_max + 1,
            cfg.series_limit
        )));
    }
    let hits = search(alpha_max, rho_max, n_max);
    let mut text = String::new();
    let mut csv = String::from("alpha,beta,rho,n_max\n");
    for hit in &hits {
        writeln!(text, "{} {} {}", hit.alpha, hit.beta, hit.rho).unwrap();
        writeln!(csv, "{},{},{},{}", hit.alpha, hit.beta, hit.rho, hit.n_max).unwrap();
    }
    if hits.is_empty() {
        writeln!(text, "no congruences found").unwrap();
    }
    Ok(CommandOutput {
        command: "search",
        params: json!({ "alpha_max": alpha_max, "rho_max": rho_max, "n_max": n_max }),
        results: json!({ "congruences": to_value(&hits) }),
        text,
        csv: Some(csv),
        failed: false,
    })
}

fn cmd_dissect(
    p: u64,
    n_terms: Option<u32>,
    check: Option<DissectCheck>,
    n: Option<u32>,
    force: bool,
) -> Result<CommandOutput, Failure> {
    let dissect_err = |e: fishburn::dissect::DissectError| usage(e.to_string());
    match (n_terms, check) {
        (Some(_), Some(_)) => {
            Err(usage("choose either --n-terms (plain dissection) or --check, not both"))
        }
        (None, None) => {
            Err(usage("dissect needs --n-terms for a plain dissection, or --check with --n"))
        }
        (Some(nt), None) => {
            if n.is_some() {
                return Err(usage("--n only applies with --check"));
            }
            if force {
                return Err(usage("--force only applies to --check alpha24"));
            }
            let report = dissection(p, nt).map_err(dissect_err)?;
            let mut text = String::new();
            writeln!(text, "F(q, {nt}) by residue class mod {p}:").unwrap();
            for (i, part) in report.parts.iter().enumerate() {
                writeln!(text, "A({i}) = {part}").unwrap();
            }
            Ok(CommandOutput {
                command: "dissect",
                params: json!({ "p": p, "n_terms": nt }),
                results: to_value(&report),
                text,
                csv: None,
                failed: false,
            })
        }
        (None, Some(which)) => {
            let n = n.ok_or_else(|| {
                usage("--check needs --n (the dissection then uses N = p*n - 1)")
            })?;
            if n == 0 {
                return Err(usage("--n must be at least 1"));
            }
            if force && which != DissectCheck::Alpha24 {
                return Err(usage("--force only applies to --check alpha24"));
            }
            let check_name = match which {
                DissectCheck::Alpha => "alpha",
                DissectCheck::Qq => "qq",
                DissectCheck::Alpha24 => "alpha24",
            };
            let params = json!({ "p": p, "check": check_name, "n": n, "force": force });
            match which {
                DissectCheck::Alpha => {
                    let report = check_lemma_alpha(p, n).map_err(dissect_err)?;
                    let divisor = format!("(1-q)^{n}");
                    let (text, failed) = render_part_checks(&divisor, &report);
                    Ok(CommandOutput {
                        command: "dissect",
                        params,
                        results: to_value(&report),
                        text,
                        csv: None,
                        failed,
                    })
                }
                DissectCheck::Qq => {
                    let report = check_qq_conjecture(p, n).map_err(dissect_err)?;
                    let divisor = format!("(q;q)_{n} (hypothesis)");
                    let (text, failed) = render_part_checks(&divisor, &report);
                    Ok(CommandOutput {
                        command: "dissect",
                        params,
                        results: to_value(&report),
                        text,
                        csv: None,
                        failed,
                    })
                }
                DissectCheck::Alpha24 => {
                    let check = check_lemma_alpha24(p, n, force).map_err(dissect_err)?;
                    let mut text = String::new();
                    writeln!(
                        text,
                        "correction-term check at p = {p}, n = {n} (N = {})",
                        p * n as u64 - 1
                    )
                    .unwrap();
                    writeln!(
                        text,
                        "i0 = {}, prefactor = {}, q-shift = {}",
                        check.i0, check.prefactor, check.power_shift
                    )
                    .unwrap();
                    let failed = check.reading.is_none();
                    match check.reading {
                        Some(reading) => {
                            let name = match to_value(&reading) {
                                Value::String(s) => s,
                                _ => unreachable!("readings serialize as strings"),
                            };
                            writeln!(text, "reading = {name}").unwrap();
                        }
                        None => {
                            writeln!(text, "reading = none: neither correction form yields (1-q)^{n} divisibility").unwrap();
                            writeln!(
                                text,
                                "witness: {}",
                                json!({ "i0": check.i0, "witness": check.witness })
                            )
                            .unwrap();
                        }
                    }
                    Ok(CommandOutput {
                        command: "dissect",
                        params,
                        results: to_value(&check),
                        text,
                        csv: None,
                        failed,
                    })
                }
            }
        }
    }
}

/// Text for a per-part divisibility report; returns (text, failed).
fn render_part_checks(divisor: &str, report: &DissectionReport) -> (String, bool) {
    let mut text = String::new();
    writeln!(
        text,
        "{divisor} divisibility of the parts of F(q, {}) at indices outside S({}):",
        report.n_terms, report.p
    )
    .unwrap();
    let mut first_failure = None;
    for c in &report.checks {
        if c.holds {
            writeln!(text, "i = {}: holds", c.i).unwrap();
        } else {
            writeln!(text, "i = {}: FAILS", c.i).unwrap();
            if first_failure.is_none() {
                first_failure = Some(json!({ "i": c.i, "witness": c.witness }));
            }
        }
    }
    if let Some(witness) = first_failure {
        writeln!(text, "witness: {witness}").unwrap();
        (text, true)
    } else {
        writeln!(text, "all {} checks passed", report.checks.len()).unwrap();
        (text, false)
    }
}

fn cmd_digits(num: &str, den: &str, p: u64, count: usize) -> Result<CommandOutput, Failure> {
    let num: BigInt = num.parse().map_err(|_| usage(format!("num must be an integer, got {num:?}")))?;
    let den: BigInt = den.parse().map_err(|_| usage(format!("den must be an integer, got {den:?}")))?;
    let expansion = expand(&num, &den, p, count).map_err(|e| usage(e.to_string()))?;
    let mut text = String::new();
    writeln!(text, "p = {p}").unwrap();
    writeln!(text, "valuation = {}", expansion.valuation).unwrap();
    writeln!(text, "digits = {:?}", expansion.digits).unwrap();
    Ok(CommandOutput {
        command: "digits",
        params: json!({ "num": num.to_string(), "den": den.to_string(), "p": p, "count": count }),
        results: to_value(&expansion),
        text,
        csv: None,
        failed: false,
    })
}

fn cmd_lemmas(p: u64, r: i64, s: i64, lambda: u32, budget: u64) -> Result<CommandOutput, Failure> {
    let report = lemma_checks(p, r, s, lambda, budget).map_err(|e| usage(e.to_string()))?;
    let passed = report.all_passed();
    let text = render_lemma_report(&report, passed);
    Ok(CommandOutput {
        command: "lemmas",
        params: json!({ "p": p, "r": r, "s": s, "lambda": lambda, "budget": budget }),
        results: json!({ "all_passed": passed, "report": to_value(&report) }),
        text,
        csv: None,
        failed: !passed,
    })
}

fn render_lemma_report(report: &LemmaChecksReport, passed: bool) -> String {
    let mut text = String::new();
    let scaled = &report.scaled_r;
    let scaled_passed = scaled.samples.iter().filter(|s| s.passed).count();
    if scaled.vacuous {
        writeln!(text, "scaled-r: vacuous at lambda = {} (modulus 1)", report.lambda).unwrap();
    } else {
        writeln!(
            text,
            "scaled-r (mod {}): {} samples, {} passed",
            scaled.modulus,
            scaled.samples.len(),
            scaled_passed
        )
        .unwrap();
    }
    let power_passed = report.power_valuation.iter().filter(|s| s.passed).count();
    writeln!(
        text,
        "power-valuation: {} samples, {} passed",
        report.power_valuation.len(),
        power_passed
    )
    .unwrap();
    writeln!(
        text,
        "binomial-vanishing: {} binomials, {} nonzero",
        report.binomial_vanishing.samples,
        report.binomial_vanishing.failures.len()
    )
    .unwrap();
    if passed {
        writeln!(text, "all lemma checks passed").unwrap();
    } else {
        let witness = first_lemma_witness(report);
        writeln!(text, "LEMMA CHECKS FAILED").unwrap();
        writeln!(text, "witness: {witness}").unwrap();
    }
    text
}

fn first_lemma_witness(report: &LemmaChecksReport) -> Value {
    if let Some(s) = report.scaled_r.samples.iter().find(|s| !s.passed) {
        return json!({ "check": "scaled-r", "j": s.j, "m_checked": s.m_checked });
    }
    if let Some(s) = report.power_valuation.iter().find(|s| !s.passed) {
        return json!({ "check": "power-valuation", "n": s.n, "bound": s.bound, "valuation": s.valuation });
    }
    if let Some(f) = report.binomial_vanishing.failures.first() {
        return json!({ "check": "binomial-vanishing", "a": f.a, "i": f.i, "j": f.j, "m": f.m });
    }
    Value::Null
}
