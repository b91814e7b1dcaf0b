//! Command-line front end. Each command writes its report to the supplied
//! writer and returns the process exit status.

use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use hyperharmonic::fastnorm::{self, NormCase, NormResult};
use hyperharmonic::hyper::{self, closed_form};
use hyperharmonic::search::{self, Constraint, Grid, ScanMode, ScanOptions, ScanOutcome};
use hyperharmonic::verify::{self, Bounds, Suite};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// A usage error raised after argument parsing (exit status 2).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

#[derive(Debug, Parser)]
#[command(
    name = "hyperharmonic",
    version,
    about = "Exact hyperharmonic numbers and their 2-adic norms"
)]
pub struct Cli {
    /// Emit JSON lines instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact H_n^(r) with its closed-form decomposition and 2-adic norm.
    Compute { n: u64, r: u64 },
    /// 2-adic norm of H_n^(r) (or H_n when r is omitted) from digit sums.
    Norm {
        n: u64,
        r: Option<u64>,
        /// Also compute the exact value and compare.
        #[arg(long)]
        check: bool,
    },
    /// r-Stirling cycle numbers [n, k]_r for r <= k <= n <= max_n.
    Stirling { r: u64, max_n: u64 },
    /// Check a formula against its exact oracle over a range.
    Verify {
        #[arg(value_parser = ["theorem1", "lemma3", "theorem5", "corollaries", "stirling"])]
        suite: String,
        #[arg(long)]
        n_max: Option<u64>,
        #[arg(long)]
        r_max: Option<u64>,
    },
    /// Scan a grid for integer hyperharmonic numbers.
    SearchInteger(IntegerArgs),
    /// Scan a grid for equal hyperharmonic numbers.
    SearchCollision(CollisionArgs),
    /// Time the digit-sum norm against the exact-rational oracle.
    Bench {
        n: u64,
        r: u64,
        #[arg(long, default_value_t = 5)]
        repetitions: u32,
    },
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 2)]
    pub n_min: u64,
    #[arg(long, default_value_t = 64)]
    pub n_max: u64,
    #[arg(long, default_value_t = 2)]
    pub r_min: u64,
    #[arg(long, default_value_t = 64)]
    pub r_max: u64,
}

impl GridArgs {
    fn grid(&self) -> Result<Grid> {
        if self.n_max > SEARCH_N_LIMIT || self.r_max > SEARCH_R_LIMIT {
            return usage(format!("grid limited to n <= {SEARCH_N_LIMIT}, r <= {SEARCH_R_LIMIT}"));
        }
        Grid::new(self.n_min, self.n_max, self.r_min, self.r_max).or_else(|e| usage(e.to_string()))
    }
}

pub const SEARCH_N_LIMIT: u64 = 8192;
pub const SEARCH_R_LIMIT: u64 = 1024;
/// Bound on `n + r` for anything that evaluates an exact value.
pub const EXACT_LIMIT: u64 = 200_000;
/// Bound on indices for the digit-sum norm alone.
pub const FAST_LIMIT: u64 = 1 << 62;

#[derive(Debug, Args)]
pub struct IntegerArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value = "hybrid", value_parser = ["fast", "exact", "hybrid"])]
    pub mode: String,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Resume from and save progress to this file.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Stop after this many cells, leaving the checkpoint for a later resume.
    #[arg(long, hide = true)]
    pub stop_after: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CollisionArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value = "both", value_parser = ["both", "either"])]
    pub constraint: String,
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<u8> {
    match &cli.command {
        Command::Compute { n, r } => compute(*n, *r, cli.json, out),
        Command::Norm { n, r, check } => norm(*n, *r, *check, cli.json, out),
        Command::Stirling { r, max_n } => stirling(*r, *max_n, cli.json, out),
        Command::Verify { suite, n_max, r_max } => verify(suite, *n_max, *r_max, cli.json, out),
        Command::SearchInteger(args) => search_integer(args, cli.json, out),
        Command::SearchCollision(args) => search_collision(args, cli.json, out),
        Command::Bench { n, r, repetitions } => bench(*n, *r, *repetitions, cli.json, out),
    }
}

fn check_indices(n: u64, r: u64, exact: bool) -> Result<()> {
    if n == 0 || r == 0 {
        return usage("n and r must be positive");
    }
    if n > FAST_LIMIT || r > FAST_LIMIT {
        return usage("n and r must be at most 2^62");
    }
    if exact && n + r > EXACT_LIMIT {
        return usage(format!("exact evaluation limited to n + r <= {EXACT_LIMIT}"));
    }
    Ok(())
}

fn norm_json(res: &NormResult) -> serde_json::Value {
    json!({
        "n": res.n,
        "r": res.r,
        "nu2": res.nu2,
        "norm_exponent": res.norm_exponent(),
        "case": res.case.to_string(),
        "components": {
            "a2_top": res.components.top_digits,
            "a2_n": res.components.n_digits,
            "a2_lower": res.components.lower_digits,
            "peak": res.components.peak,
        },
    })
}

fn write_norm_text(res: &NormResult, out: &mut dyn Write) -> Result<()> {
    let c = &res.components;
    if res.case == NormCase::Harmonic {
        writeln!(
            out,
            "norm     |H_{}|_2 = 2^{}   (nu2 = {}, ord2({}) = {})",
            res.n,
            res.norm_exponent(),
            res.nu2,
            res.n,
            c.peak
        )?;
        return Ok(());
    }
    writeln!(
        out,
        "norm     |H_{}^({})|_2 = 2^{}   (nu2 = {}, {})",
        res.n,
        res.r,
        res.norm_exponent(),
        res.nu2,
        res.case
    )?;
    writeln!(
        out,
        "digits   A_2({}) = {}, A_2({}) = {}, A_2({}) = {}, peak = {}",
        res.n + res.r - 1,
        c.top_digits,
        res.r - 1,
        c.lower_digits,
        res.n,
        c.n_digits,
        c.peak
    )?;
    Ok(())
}

fn compute(n: u64, r: u64, json: bool, out: &mut dyn Write) -> Result<u8> {
    check_indices(n, r, true)?;
    let parts = closed_form(n, r);
    let norm = fastnorm::hyperharmonic_norm2(n, r);
    if json {
        let line = json!({
            "n": n,
            "r": r,
            "value": parts.value.to_string(),
            "binomial": parts.binomial.to_string(),
            "h_upper": parts.upper.to_string(),
            "h_lower": parts.lower.to_string(),
            "integer": parts.value.is_integer(),
            "norm": norm_json(&norm),
        });
        writeln!(out, "{line}")?;
        return Ok(EXIT_OK);
    }
    writeln!(out, "value    H_{n}^({r}) = {}", parts.value)?;
    writeln!(out, "binomial C({}, {}) = {}", n + r - 1, r - 1, parts.binomial)?;
    writeln!(out, "upper    H_{} = {}", n + r - 1, parts.upper)?;
    writeln!(out, "lower    H_{} = {}", r - 1, parts.lower)?;
    write_norm_text(&norm, out)?;
    Ok(EXIT_OK)
}

fn norm(n: u64, r: Option<u64>, check: bool, json: bool, out: &mut dyn Write) -> Result<u8> {
    check_indices(n, r.unwrap_or(1), check)?;
    let res = match r {
        Some(r) => fastnorm::hyperharmonic_norm2(n, r),
        None => fastnorm::harmonic_norm_result(n),
    };
    let exact = check.then(|| fastnorm::exact_norm2(n, res.r));
    let agrees = exact.is_none_or(|e| e == res.nu2);
    if json {
        let mut line = norm_json(&res);
        if let Some(e) = exact {
            line["exact_nu2"] = json!(e);
            line["agree"] = json!(agrees);
        }
        writeln!(out, "{line}")?;
    } else {
        write_norm_text(&res, out)?;
        if let Some(e) = exact {
            writeln!(
                out,
                "exact    nu2 = {e} ({})",
                if agrees { "agrees" } else { "MISMATCH" }
            )?;
        }
    }
    Ok(if agrees { EXIT_OK } else { EXIT_FAILED })
}

pub const STIRLING_LIMIT: u64 = 200;

fn stirling(r: u64, max_n: u64, json: bool, out: &mut dyn Write) -> Result<u8> {
    if max_n < r || max_n > STIRLING_LIMIT {
        return usage(format!("need r <= max_n <= {STIRLING_LIMIT}"));
    }
    let table = hyper::rstirling_table(r, max_n)?;
    for n in r..=max_n {
        let row: Vec<String> = (r..=n).map(|k| table.entry(n, k).to_string()).collect();
        if json {
            writeln!(out, "{}", json!({ "r": r, "n": n, "k_min": r, "entries": row }))?;
        } else {
            writeln!(out, "n={n:<4} {}", row.join(" "))?;
        }
    }
    Ok(EXIT_OK)
}

fn verify(suite: &str, n_max: Option<u64>, r_max: Option<u64>, json: bool, out: &mut dyn Write) -> Result<u8> {
    let suite: Suite = suite.parse()?;
    let defaults = suite.default_bounds();
    let bounds = Bounds {
        n_max: n_max.unwrap_or(defaults.n_max),
        r_max: r_max.unwrap_or(defaults.r_max),
    };
    if let Err(e) = suite.check_bounds(bounds) {
        return usage(e.to_string());
    }
    let report = verify::run_suite(suite, bounds)?;
    if json {
        for f in &report.failures {
            writeln!(out, "{}", serde_json::to_string(f)?)?;
        }
        let summary = json!({
            "suite": suite.to_string(),
            "n_max": bounds.n_max,
            "r_max": bounds.r_max,
            "checked": report.checked,
            "failures": report.failures.len(),
            "tallies": report.tallies.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<serde_json::Map<_, _>>(),
            "pass": report.passed(),
        });
        writeln!(out, "{summary}")?;
    } else {
        for f in &report.failures {
            writeln!(out, "FAIL {f}")?;
        }
        let tallies: Vec<String> = report.tallies.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(
            out,
            "{} {suite}: {} checked, {} failures{}",
            if report.passed() { "PASS" } else { "FAIL" },
            report.checked,
            report.failures.len(),
            if tallies.is_empty() {
                String::new()
            } else {
                format!(" ({})", tallies.join(", "))
            }
        )?;
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILED })
}

fn search_integer(args: &IntegerArgs, json: bool, out: &mut dyn Write) -> Result<u8> {
    let grid = args.grid.grid()?;
    let mode: ScanMode = args.mode.parse()?;
    if args.threads == Some(0) {
        return usage("--threads must be positive");
    }
    let options = ScanOptions {
        threads: args.threads,
        checkpoint: args.checkpoint.clone(),
        stop_after: args.stop_after,
    };
    let outcome = match search::scan_integers_with(grid, mode, &options) {
        Err(e @ hyperharmonic::Error::Checkpoint(_)) => return usage(e.to_string()),
        other => other?,
    };
    let report = match outcome {
        ScanOutcome::Complete(report) => report,
        ScanOutcome::Interrupted { done } => {
            writeln!(out, "stopped after {done} of {} cells", grid.len())?;
            return Ok(EXIT_OK);
        }
    };
    let hits = report.integer_hits();
    if json {
        report.write_jsonl(&mut *out)?;
    } else {
        writeln!(out, "grid     {grid}, mode {mode:?}, {} cells", report.records.len())?;
        writeln!(
            out,
            "exact    {} cells with norm <= 1 confirmed exactly",
            report.exact_confirmations()
        )?;
        if let Some(spot) = &report.spot_check {
            writeln!(
                out,
                "spot     {} filtered cells re-derived, {} failures",
                spot.checked,
                spot.failures.len()
            )?;
        }
        for h in &hits {
            writeln!(
                out,
                "INTEGER  H_{}^({}) = {}",
                h.n,
                h.r,
                h.value.as_ref().map(|v| v.to_string()).unwrap_or_default()
            )?;
        }
        writeln!(out, "integers {}", hits.len())?;
    }
    let spot_ok = report.spot_check.as_ref().is_none_or(|s| s.failures.is_empty());
    if !spot_ok {
        bail!(
            "fast filter disagreed with exact values on {:?}",
            report.spot_check.map(|s| s.failures)
        );
    }
    Ok(EXIT_OK)
}

fn search_collision(args: &CollisionArgs, json: bool, out: &mut dyn Write) -> Result<u8> {
    let grid = args.grid.grid()?;
    let constraint: Constraint = args.constraint.parse()?;
    let report = search::scan_collisions(grid, constraint);
    if json {
        report.write_jsonl(&mut *out)?;
    } else {
        writeln!(out, "grid     {grid}, constraint {constraint:?}")?;
        for c in &report.collisions {
            let [(n1, r1), (n2, r2)] = c.cells;
            writeln!(out, "EQUAL    H_{n1}^({r1}) = H_{n2}^({r2}) = {}", c.value)?;
        }
        writeln!(out, "collisions {}", report.collisions.len())?;
    }
    Ok(EXIT_OK)
}

/// Median wall time of the two norm paths.
#[derive(Clone, Debug)]
pub struct BenchResult {
    pub fast_nu2: i64,
    pub exact_nu2: i64,
    pub fast: Duration,
    pub exact: Duration,
}

impl BenchResult {
    pub fn speedup(&self) -> f64 {
        self.exact.as_secs_f64() / self.fast.as_secs_f64().max(1e-9)
    }
}

fn median(mut xs: Vec<Duration>) -> Duration {
    xs.sort();
    xs[xs.len() / 2]
}

/// Runs each path `repetitions` times and reports the medians. The fast path
/// is timed in batches, since one call is far below timer resolution.
pub fn bench_norms(n: u64, r: u64, repetitions: u32) -> BenchResult {
    const BATCH: u32 = 1000;
    let mut fast_times = Vec::new();
    let mut exact_times = Vec::new();
    let mut fast_nu2 = 0;
    let mut exact_nu2 = 0;
    for _ in 0..repetitions.max(1) {
        let start = Instant::now();
        for _ in 0..BATCH {
            fast_nu2 = std::hint::black_box(fastnorm::hyperharmonic_norm2(std::hint::black_box(n), r)).nu2;
        }
        fast_times.push(start.elapsed() / BATCH);

        let start = Instant::now();
        exact_nu2 = fastnorm::exact_norm2(std::hint::black_box(n), r);
        exact_times.push(start.elapsed());
    }
    BenchResult {
        fast_nu2,
        exact_nu2,
        fast: median(fast_times),
        exact: median(exact_times),
    }
}

fn bench(n: u64, r: u64, repetitions: u32, json: bool, out: &mut dyn Write) -> Result<u8> {
    check_indices(n, r, true)?;
    if repetitions == 0 {
        return usage("--repetitions must be positive");
    }
    let res = bench_norms(n, r, repetitions);
    let agree = res.fast_nu2 == res.exact_nu2;
    if json {
        let line = json!({
            "n": n,
            "r": r,
            "repetitions": repetitions,
            "fast_nu2": res.fast_nu2,
            "exact_nu2": res.exact_nu2,
            "agree": agree,
            "fast_ns": res.fast.as_nanos() as u64,
            "exact_ns": res.exact.as_nanos() as u64,
            "speedup": res.speedup(),
        });
        writeln!(out, "{line}")?;
    } else {
        writeln!(out, "path     median time      nu2")?;
        writeln!(out, "fast     {:>14?}  {:>4}", res.fast, res.fast_nu2)?;
        writeln!(out, "exact    {:>14?}  {:>4}", res.exact, res.exact_nu2)?;
        writeln!(
            out,
            "speedup  {:.1}x, {}",
            res.speedup(),
            if agree { "agree" } else { "DISAGREE" }
        )?;
    }
    Ok(if agree { EXIT_OK } else { EXIT_FAILED })
}
