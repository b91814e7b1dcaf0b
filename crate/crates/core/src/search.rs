//! Grid searches over hyperharmonic numbers: integrality scans with a 2-adic
//! fast filter, the low-order sweeps for `r = 2, 3`, and value collisions.
//!
//! Cells are visited row-major in `n`, then `r`. Reports and checkpoints are
//! pure functions of the grid and mode, whatever the thread count.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::fastnorm::hyperharmonic_norm2;
use crate::hyper::{harmonic_prefix, hyperharmonic_from_prefix};
use crate::padic::nu2;

/// Inclusive bounds `n ∈ [n_min, n_max]`, `r ∈ [r_min, r_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub n_min: u64,
    pub n_max: u64,
    pub r_min: u64,
    pub r_max: u64,
}

impl Grid {
    pub fn new(n_min: u64, n_max: u64, r_min: u64, r_max: u64) -> Result<Grid> {
        if n_min == 0 || r_min == 0 {
            return Err(Error::InvalidRange("indices start at 1".into()));
        }
        if n_min > n_max || r_min > r_max {
            return Err(Error::InvalidRange(format!(
                "empty grid n ∈ [{n_min}, {n_max}], r ∈ [{r_min}, {r_max}]"
            )));
        }
        Ok(Grid {
            n_min,
            n_max,
            r_min,
            r_max,
        })
    }

    pub fn len(&self) -> usize {
        ((self.n_max - self.n_min + 1) * (self.r_max - self.r_min + 1)) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cell at position `i` of the scan order.
    pub fn cell(&self, i: usize) -> (u64, u64) {
        let width = self.r_max - self.r_min + 1;
        let i = i as u64;
        (self.n_min + i / width, self.r_min + i % width)
    }

    pub fn cells(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        (0..self.len()).map(|i| self.cell(i))
    }

    /// Largest harmonic index a closed-form evaluation on this grid needs.
    fn harmonic_reach(&self) -> u64 {
        self.n_max + self.r_max - 1
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n ∈ [{}, {}], r ∈ [{}, {}]",
            self.n_min, self.n_max, self.r_min, self.r_max
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    /// Digit-sum norm on every cell; cells with norm <= 1 are confirmed
    /// exactly but their values are not reported.
    Fast,
    /// Exact value and exact valuation on every cell.
    Exact,
    /// Fast filter, exact confirmation with values on norm <= 1 cells, and a
    /// soundness spot check of filtered cells.
    Hybrid,
}

impl std::str::FromStr for ScanMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(ScanMode::Fast),
            "exact" => Ok(ScanMode::Exact),
            "hybrid" => Ok(ScanMode::Hybrid),
            other => Err(Error::InvalidRange(format!("unknown scan mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Confirmation {
    #[serde(rename = "fast")]
    FastFilter,
    #[serde(rename = "exact")]
    ExactCheck,
}

/// One scanned cell. Serializes to the JSONL report schema.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub n: u64,
    pub r: u64,
    pub nu2: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Rational>,
    #[serde(rename = "integer")]
    pub integer_flag: bool,
    pub confirmation: Confirmation,
}

/// Evaluates one cell. `prefix` must cover `H_{n+r-1}`.
pub fn scan_cell(prefix: &[Rational], n: u64, r: u64, mode: ScanMode) -> SearchRecord {
    let exact = |n, r| {
        let value = hyperharmonic_from_prefix(prefix, n, r);
        let nu2 = nu2(&value).expect("hyperharmonic numbers are nonzero");
        (value, nu2)
    };
    if mode == ScanMode::Exact {
        let (value, nu2) = exact(n, r);
        return SearchRecord {
            n,
            r,
            nu2,
            integer_flag: value.is_integer(),
            value: Some(value),
            confirmation: Confirmation::ExactCheck,
        };
    }
    let fast = hyperharmonic_norm2(n, r).nu2;
    if fast < 0 {
        return SearchRecord {
            n,
            r,
            nu2: fast,
            value: None,
            integer_flag: false,
            confirmation: Confirmation::FastFilter,
        };
    }
    let (value, exact_nu2) = exact(n, r);
    debug_assert_eq!(fast, exact_nu2);
    SearchRecord {
        n,
        r,
        nu2: exact_nu2,
        integer_flag: value.is_integer(),
        value: (mode == ScanMode::Hybrid).then_some(value),
        confirmation: Confirmation::ExactCheck,
    }
}

/// Result of re-deriving filtered cells exactly.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub checked: usize,
    /// Cells where the filter claimed norm > 1 but the exact denominator was odd.
    pub failures: Vec<(u64, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanReport {
    pub grid: Grid,
    pub mode: ScanMode,
    pub records: Vec<SearchRecord>,
    pub spot_check: Option<SpotCheck>,
}

impl ScanReport {
    /// Cells whose value is an integer.
    pub fn integer_hits(&self) -> Vec<&SearchRecord> {
        self.records.iter().filter(|r| r.integer_flag).collect()
    }

    pub fn exact_confirmations(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.confirmation == Confirmation::ExactCheck)
            .count()
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for rec in &self.records {
            serde_json::to_writer(&mut out, rec)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }
}

/// Number of filtered cells re-derived exactly by a hybrid scan.
pub const SPOT_CHECK_CELLS: usize = 1000;

#[derive(Clone, Debug, Default)]
pub struct ScanOptions {
    /// Worker threads; `None` or `Some(1)` scans on the calling thread.
    pub threads: Option<usize>,
    /// Where to persist progress after every row of `n`.
    pub checkpoint: Option<PathBuf>,
    /// Stop once this many cells are done, as if interrupted.
    pub stop_after: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScanOutcome {
    Complete(ScanReport),
    /// Stopped early; the checkpoint (if any) holds `done` cells.
    Interrupted {
        done: usize,
    },
}

impl ScanOutcome {
    pub fn complete(self) -> Option<ScanReport> {
        match self {
            ScanOutcome::Complete(report) => Some(report),
            ScanOutcome::Interrupted { .. } => None,
        }
    }
}

pub const CHECKPOINT_VERSION: u32 = 1;

/// Saved scan progress: the first `cursor` cells of the scan order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub grid: Grid,
    pub mode: ScanMode,
    pub cursor: usize,
    pub findings: Vec<SearchRecord>,
}

impl Checkpoint {
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_vec_pretty(self)?)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Loads a checkpoint; a missing or empty file yields `None`.
    pub fn load(path: &Path) -> Result<Option<Checkpoint>> {
        let bytes = match fs::read(path) {
            Ok(bytes) => bytes,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        if bytes.iter().all(u8::is_ascii_whitespace) {
            return Ok(None);
        }
        let cp: Checkpoint = serde_json::from_slice(&bytes)
            .map_err(|e| Error::Checkpoint(format!("unreadable checkpoint {}: {e}", path.display())))?;
        if cp.format_version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!(
                "format version {} not supported (expected {CHECKPOINT_VERSION})",
                cp.format_version
            )));
        }
        Ok(Some(cp))
    }

    /// Checks that this checkpoint belongs to the scan `(grid, mode)`.
    pub fn validate(&self, grid: &Grid, mode: ScanMode) -> Result<()> {
        if self.grid != *grid {
            return Err(Error::Checkpoint(format!(
                "grid bounds mismatch: checkpoint has {}, scan requested {}",
                self.grid, grid
            )));
        }
        if self.mode != mode {
            return Err(Error::Checkpoint(format!(
                "mode mismatch: checkpoint has {:?}, scan requested {:?}",
                self.mode, mode
            )));
        }
        if self.cursor > grid.len() || self.findings.len() != self.cursor {
            return Err(Error::Checkpoint(format!(
                "cursor {} with {} findings does not fit a grid of {} cells",
                self.cursor,
                self.findings.len(),
                grid.len()
            )));
        }
        for (i, rec) in self.findings.iter().enumerate() {
            if (rec.n, rec.r) != grid.cell(i) {
                return Err(Error::Checkpoint(format!(
                    "finding {i} is cell ({}, {}), expected {:?}",
                    rec.n,
                    rec.r,
                    grid.cell(i)
                )));
            }
        }
        Ok(())
    }
}

/// Scans every cell of `grid` for integer values.
pub fn scan_integers(grid: Grid, mode: ScanMode) -> ScanReport {
    scan_integers_with(grid, mode, &ScanOptions::default())
        .expect("scan without checkpoint cannot fail")
        .complete()
        .expect("scan without stop point completes")
}

/// [`scan_integers`] with threading, checkpointing and early stop. An
/// existing checkpoint at `options.checkpoint` is resumed.
pub fn scan_integers_with(grid: Grid, mode: ScanMode, options: &ScanOptions) -> Result<ScanOutcome> {
    let mut records = Vec::with_capacity(grid.len());
    if let Some(path) = &options.checkpoint {
        if let Some(cp) = Checkpoint::load(path)? {
            cp.validate(&grid, mode)?;
            records = cp.findings;
        }
    }
    let prefix = harmonic_prefix(grid.harmonic_reach());
    let pool = match options.threads {
        Some(t) if t > 1 => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidRange(format!("thread pool: {e}")))?,
        ),
        _ => None,
    };
    let width = (grid.r_max - grid.r_min + 1) as usize;
    let limit = options.stop_after.unwrap_or(usize::MAX).min(grid.len());

    while records.len() < limit {
        let start = records.len();
        // finish the current row of n, or stop early at the limit
        let end = ((start / width + 1) * width).min(limit);
        let eval = |i: usize| {
            let (n, r) = grid.cell(i);
            scan_cell(&prefix, n, r, mode)
        };
        let block: Vec<SearchRecord> = match &pool {
            Some(pool) => pool.install(|| (start..end).into_par_iter().map(eval).collect()),
            None => (start..end).map(eval).collect(),
        };
        records.extend(block);
        if let Some(path) = &options.checkpoint {
            Checkpoint {
                format_version: CHECKPOINT_VERSION,
                grid,
                mode,
                cursor: records.len(),
                findings: records.clone(),
            }
            .save(path)?;
        }
    }
    if records.len() < grid.len() {
        return Ok(ScanOutcome::Interrupted { done: records.len() });
    }
    let spot_check = (mode == ScanMode::Hybrid).then(|| spot_check_filter(&grid, &records, &prefix, SPOT_CHECK_CELLS));
    Ok(ScanOutcome::Complete(ScanReport {
        grid,
        mode,
        records,
        spot_check,
    }))
}

/// Re-derives up to `count` fast-filtered cells exactly and checks that the
/// denominator is even, as a norm above 1 requires. Cell choice is seeded by
/// the grid so reruns check the same cells.
pub fn spot_check_filter(grid: &Grid, records: &[SearchRecord], prefix: &[Rational], count: usize) -> SpotCheck {
    let filtered: Vec<&SearchRecord> = records
        .iter()
        .filter(|r| r.confirmation == Confirmation::FastFilter)
        .collect();
    let seed = grid.n_min ^ grid.n_max.rotate_left(16) ^ grid.r_min.rotate_left(32) ^ grid.r_max.rotate_left(48);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks = sample(&mut rng, filtered.len(), count.min(filtered.len())).into_vec();
    picks.sort_unstable();
    let mut failures = Vec::new();
    for &i in &picks {
        let rec = filtered[i];
        let value = hyperharmonic_from_prefix(prefix, rec.n, rec.r);
        if value.denom().bit(0) || nu2(&value) != Some(rec.nu2) {
            failures.push((rec.n, rec.r));
        }
    }
    SpotCheck {
        checked: picks.len(),
        failures,
    }
}

/// Findings of the `r = 2` and `r = 3` sweeps.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LowOrderReport {
    pub n_max: u64,
    /// `n` with `H_n^(2)` an integer.
    pub h2_integers: Vec<u64>,
    /// `n` with `H_n^(3)` an integer.
    pub h3_integers: Vec<u64>,
    /// `n` where `H_n^(2) ≠ H_1 + … + H_n`.
    pub identity_failures: Vec<u64>,
    /// `n` where `ν_2(H_n^(2)) = 0` disagrees with `n + 1` being a power of two.
    pub boundary_mismatches: Vec<u64>,
    /// `n` where the digit-sum norm disagrees with the exact one, for `r = 2` or `3`.
    pub fast_mismatches: Vec<(u64, u64)>,
    /// `n` with `|H_n^(2)|_2 = 1`.
    pub unit_norm: Vec<u64>,
}

impl LowOrderReport {
    pub fn passed(&self) -> bool {
        self.h2_integers.is_empty()
            && self.h3_integers.is_empty()
            && self.identity_failures.is_empty()
            && self.boundary_mismatches.is_empty()
            && self.fast_mismatches.is_empty()
    }
}

/// Checks `H_n^(2)` and `H_n^(3)` for `2 <= n <= n_max` exactly.
///
/// The sum identity is checked by telescoping: `H_1^(2) = H_1` and
/// `H_n^(2) = H_{n-1}^(2) + H_n`, each step compared by cross-multiplication.
pub fn scan_low_orders(n_max: u64) -> Result<LowOrderReport> {
    if n_max < 2 {
        return Err(Error::InvalidRange(format!(
            "low-order sweep needs n_max >= 2, got {n_max}"
        )));
    }
    let prefix = harmonic_prefix(n_max + 2);
    let mut report = LowOrderReport {
        n_max,
        ..Default::default()
    };
    let mut prev = hyperharmonic_from_prefix(&prefix, 1, 2);
    if prev != prefix[1] {
        report.identity_failures.push(1);
    }
    for n in 2..=n_max {
        let h2 = hyperharmonic_from_prefix(&prefix, n, 2);
        let h3 = hyperharmonic_from_prefix(&prefix, n, 3);
        if !h2.is_sum_of(&prev, &prefix[n as usize]) {
            report.identity_failures.push(n);
        }
        if h2.is_integer() {
            report.h2_integers.push(n);
        }
        if h3.is_integer() {
            report.h3_integers.push(n);
        }
        let nu_h2 = nu2(&h2).expect("nonzero");
        let nu_h3 = nu2(&h3).expect("nonzero");
        if nu_h2 == 0 {
            report.unit_norm.push(n);
        }
        if (nu_h2 == 0) != (n + 1).is_power_of_two() {
            report.boundary_mismatches.push(n);
        }
        if hyperharmonic_norm2(n, 2).nu2 != nu_h2 {
            report.fast_mismatches.push((n, 2));
        }
        if hyperharmonic_norm2(n, 3).nu2 != nu_h3 {
            report.fast_mismatches.push((n, 3));
        }
        prev = h2;
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Constraint {
    /// `n1 ≠ n2` and `r1 ≠ r2`.
    #[serde(rename = "both_differ")]
    BothDiffer,
    /// `(n1, r1) ≠ (n2, r2)`.
    #[serde(rename = "either_differs")]
    EitherDiffers,
}

impl Constraint {
    pub fn admits(self, (n1, r1): (u64, u64), (n2, r2): (u64, u64)) -> bool {
        match self {
            Constraint::BothDiffer => n1 != n2 && r1 != r2,
            Constraint::EitherDiffers => (n1, r1) != (n2, r2),
        }
    }
}

impl std::str::FromStr for Constraint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both" | "both_differ" => Ok(Constraint::BothDiffer),
            "either" | "either_differs" => Ok(Constraint::EitherDiffers),
            other => Err(Error::InvalidRange(format!("unknown constraint {other:?}"))),
        }
    }
}

/// Two cells with the same value. Serializes to the collision JSONL schema.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collision {
    pub cells: [(u64, u64); 2],
    pub value: Rational,
    pub mode: Constraint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionReport {
    pub grid: Grid,
    pub constraint: Constraint,
    pub collisions: Vec<Collision>,
}

impl CollisionReport {
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for c in &self.collisions {
            serde_json::to_writer(&mut out, c)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }
}

/// Groups the exact values of every cell by canonical fraction and lists each
/// pair of equal cells admitted by `constraint`, in scan order.
pub fn scan_collisions(grid: Grid, constraint: Constraint) -> CollisionReport {
    let prefix = harmonic_prefix(grid.harmonic_reach());
    let mut groups: HashMap<Rational, Vec<usize>> = HashMap::new();
    let mut values = Vec::with_capacity(grid.len());
    for (i, (n, r)) in grid.cells().enumerate() {
        let value = hyperharmonic_from_prefix(&prefix, n, r);
        groups.entry(value.clone()).or_default().push(i);
        values.push(value);
    }
    let mut pairs: Vec<(usize, usize)> = groups
        .values()
        .filter(|members| members.len() > 1)
        .flat_map(|members| {
            members
                .iter()
                .enumerate()
                .flat_map(move |(a, &i)| members[a + 1..].iter().map(move |&j| (i, j)))
        })
        .filter(|&(i, j)| constraint.admits(grid.cell(i), grid.cell(j)))
        .collect();
    pairs.sort_unstable();
    let collisions = pairs
        .into_iter()
        .map(|(i, j)| Collision {
            cells: [grid.cell(i), grid.cell(j)],
            value: values[i].clone(),
            mode: constraint,
        })
        .collect();
    CollisionReport {
        grid,
        constraint,
        collisions,
    }
}
