//! Command-line harness: single arrowing queries, m-value computation,
//! full table verification against the shipped claim set, witness file
//! management, CNF export and model checking.
//!
//! Exit codes: 0 everything decided and confirmed, 2 any
//! unknown/partial outcome, 3 any refuted claim, 1 usage or I/O error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::cnf;
use crate::engine::{
    compute_m, decide_arrowing, ArrowVerdict, RamseyValue, SearchOptions, Symmetry,
};
use crate::mpgraph::{make_shape, Coloring, ShapeSpec};
use crate::patterns::{PatternName, ALL_PATTERNS};
use crate::witnesses::{self, Provenance, WitnessError, WitnessRecord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_UNDECIDED: i32 = 2;
pub const EXIT_REFUTED: i32 = 3;

/// A claimed cell value: a finite part size or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Claimed {
    Finite(u32),
    Infinite,
}

impl Serialize for Claimed {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            Claimed::Finite(v) => ser.serialize_u32(*v),
            Claimed::Infinite => ser.serialize_str("infinity"),
        }
    }
}

impl<'de> Deserialize<'de> for Claimed {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Claimed, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u32),
            Word(String),
        }
        match Repr::deserialize(de)? {
            Repr::Num(v) => Ok(Claimed::Finite(v)),
            Repr::Word(w) if w == "infinity" => Ok(Claimed::Infinite),
            Repr::Word(w) => Err(serde::de::Error::custom(format!(
                "claimed must be an integer or \"infinity\", got {w:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Table,
    Theorem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tier {
    A,
    B,
    C,
}

/// One row of the shipped claim set. Table and theorem values ship as
/// separate claims so internal contradictions surface as data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableClaim {
    pub j: u32,
    pub target: String,
    pub claimed: Claimed,
    pub source: Source,
    pub tier: Tier,
}

/// The shipped claim set: every Table 1.1 cell plus the per-theorem
/// values, for rows j = 3..=9 (the last standing for "j >= 9").
pub fn builtin_claims() -> &'static [TableClaim] {
    static CLAIMS: OnceLock<Vec<TableClaim>> = OnceLock::new();
    CLAIMS.get_or_init(|| {
        serde_json::from_str(include_str!("../data/claims.json")).expect("shipped claims parse")
    })
}

/// Serialized form of an engine `RamseyValue`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ComputedValue {
    Finite { value: u32 },
    Infinite { family: String },
    Unknown { lower: u32, upper: Option<u32> },
}

impl From<&RamseyValue> for ComputedValue {
    fn from(v: &RamseyValue) -> ComputedValue {
        match v {
            RamseyValue::Finite(value) => ComputedValue::Finite { value: *value },
            RamseyValue::Infinite { family } => ComputedValue::Infinite {
                family: family.clone(),
            },
            RamseyValue::Unknown { lower, upper } => ComputedValue::Unknown {
                lower: *lower,
                upper: *upper,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Confirmed,
    Refuted,
    Partial,
    Unknown,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Confirmed => "CONFIRMED",
            Verdict::Refuted => "REFUTED",
            Verdict::Partial => "PARTIAL",
            Verdict::Unknown => "UNKNOWN",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepReport {
    pub s: u32,
    pub outcome: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Evidence {
    /// Shipped witness ids / family names relevant to the cell.
    pub witnesses: Vec<String>,
    pub nodes: u64,
    pub steps: Vec<StepReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClaimRef {
    pub value: Claimed,
    pub source: Source,
}

/// One line of the machine-readable report: a claim against what the
/// computation found.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellReport {
    pub j: u32,
    pub target: String,
    pub claimed: Option<ClaimRef>,
    pub computed: ComputedValue,
    pub verdict: Verdict,
    pub evidence: Evidence,
    pub seconds: f64,
}

/// Compares one claim with a computed value.
pub fn adjudicate(claimed: Claimed, computed: &RamseyValue) -> Verdict {
    match (claimed, computed) {
        (Claimed::Finite(c), RamseyValue::Finite(v)) => {
            if c == *v {
                Verdict::Confirmed
            } else {
                Verdict::Refuted
            }
        }
        (Claimed::Infinite, RamseyValue::Infinite { .. }) => Verdict::Confirmed,
        (Claimed::Finite(_), RamseyValue::Infinite { .. })
        | (Claimed::Infinite, RamseyValue::Finite(_)) => Verdict::Refuted,
        (Claimed::Finite(c), RamseyValue::Unknown { lower, upper }) => {
            if *lower > c || upper.is_some_and(|u| u < c) {
                Verdict::Refuted
            } else if *lower == c {
                // Lower bound (witness side) proven, upper side open.
                Verdict::Partial
            } else {
                Verdict::Unknown
            }
        }
        (Claimed::Infinite, RamseyValue::Unknown { .. }) => Verdict::Partial,
    }
}

/// Shipped witness ids relevant to a table cell, for evidence refs.
fn cell_witnesses(j: u32, target: PatternName) -> Vec<String> {
    use PatternName::*;
    let mut out: Vec<String> = Vec::new();
    match (j, target) {
        (3, P3) => out.push("matching_witness_3x2".into()),
        (3, K1_3) | (3, C4) => out.push("blue_c9_3x3".into()),
        (4, K1_3) => out.push("blue_2c4_4x2".into()),
        (4, C4) => out.push("c8_complement_4x2".into()),
        (6, C4) => out.push("k33_2k3_6x1".into()),
        _ => {}
    }
    if crate::engine::infinite_target(j, target) {
        out.push("pentagon_blowup".into());
    }
    out
}

#[derive(Parser, Debug)]
#[command(
    name = "bramsey",
    version,
    about = "Size multipartite Ramsey verification for the butterfly graph"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SearchFlags {
    /// Wall-clock budget in seconds; unbounded when absent.
    #[arg(long)]
    budget_secs: Option<u64>,
    /// Worker threads for the arrowing search.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Root symmetry mode: none, first-vertex, parts.
    #[arg(long, default_value = "parts")]
    symmetry: Symmetry,
}

impl SearchFlags {
    fn options(&self) -> SearchOptions {
        SearchOptions {
            budget: self.budget_secs.map(Duration::from_secs),
            symmetry: self.symmetry,
            threads: self.threads.max(1),
            ..SearchOptions::default()
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether K_{j×s} arrows (red, blue).
    Arrow {
        #[arg(long)]
        j: u32,
        #[arg(long)]
        s: u32,
        #[arg(long, default_value = "B")]
        red: PatternName,
        #[arg(long)]
        blue: PatternName,
        #[command(flatten)]
        flags: SearchFlags,
        /// Write the good coloring here on NotArrows.
        #[arg(long)]
        witness_out: Option<PathBuf>,
        /// Write a JSON run report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Compute m_j(red, blue) by scanning part sizes.
    ComputeM {
        #[arg(long)]
        j: u32,
        #[arg(long, default_value = "B")]
        red: PatternName,
        #[arg(long)]
        blue: PatternName,
        /// Largest part size to try.
        #[arg(long, default_value_t = 8)]
        s_cap: u32,
        /// Refuse to search instances above this edge count.
        #[arg(long, default_value_t = 64)]
        max_edges: usize,
        #[command(flatten)]
        flags: SearchFlags,
        #[arg(long)]
        witness_out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check every shipped claim against computation.
    VerifyTable {
        /// Comma-separated list of j values to include.
        #[arg(long)]
        rows: Option<String>,
        /// Comma-separated list of target patterns to include.
        #[arg(long)]
        targets: Option<String>,
        /// Total wall-clock budget in seconds.
        #[arg(long, default_value_t = 1800)]
        budget_secs: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, default_value = "parts")]
        symmetry: Symmetry,
        /// Write the JSON CellReport array here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Write a shipped or generated witness file.
    Witness {
        /// Shipped witness id.
        id: Option<String>,
        /// Generate a family member instead: currently "pentagon".
        #[arg(long)]
        generate: Option<String>,
        #[arg(long)]
        j: Option<u32>,
        #[arg(long)]
        s: Option<u32>,
        /// Output path; derived from the id when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the arrowing instance as a DIMACS CNF file plus a
    /// .meta.json sidecar for model checking.
    ExportCnf {
        #[arg(long)]
        j: u32,
        #[arg(long)]
        s: u32,
        #[arg(long, default_value = "B")]
        red: PatternName,
        #[arg(long)]
        blue: PatternName,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify a solver model against an exported instance and decode
    /// it into a witness file.
    CheckModel {
        /// The .meta.json sidecar written by export-cnf.
        #[arg(long)]
        meta: PathBuf,
        /// Solver output containing the model ("v" lines or raw
        /// literals).
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        witness_out: Option<PathBuf>,
    },
}

/// Parses argv and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            // Help/version are successful exits, everything else is
            // a usage error.
            let code = if err.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Arrow {
            j,
            s,
            red,
            blue,
            flags,
            witness_out,
            report,
        } => cmd_arrow(j, s, red, blue, &flags, witness_out, report),
        Command::ComputeM {
            j,
            red,
            blue,
            s_cap,
            max_edges,
            flags,
            witness_out,
            report,
        } => cmd_compute_m(j, red, blue, s_cap, max_edges, &flags, witness_out, report),
        Command::VerifyTable {
            rows,
            targets,
            budget_secs,
            threads,
            symmetry,
            report,
        } => cmd_verify_table(rows, targets, budget_secs, threads, symmetry, report),
        Command::Witness {
            id,
            generate,
            j,
            s,
            out,
        } => cmd_witness(id, generate, j, s, out),
        Command::ExportCnf { j, s, red, blue, out } => cmd_export_cnf(j, s, red, blue, &out),
        Command::CheckModel {
            meta,
            model,
            witness_out,
        } => cmd_check_model(&meta, &model, witness_out),
    }
}

fn search_record(
    shape: ShapeSpec,
    red: PatternName,
    blue: PatternName,
    witness: Coloring,
) -> Result<WitnessRecord, WitnessError> {
    let id = format!(
        "search_{}x{}_{}_{}",
        shape.parts(),
        shape.part_size(),
        red,
        blue
    );
    witnesses::build_record(id, witness, red, blue, Provenance::DerivedBySearch)
}

fn cmd_arrow(
    j: u32,
    s: u32,
    red: PatternName,
    blue: PatternName,
    flags: &SearchFlags,
    witness_out: Option<PathBuf>,
    report: Option<PathBuf>,
) -> Result<i32, String> {
    let shape = make_shape(j, s).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let verdict = decide_arrowing(shape, red, blue, &flags.options()).map_err(|e| e.to_string())?;
    let seconds = start.elapsed().as_secs_f64();
    let stats = verdict.stats();
    let (label, code) = match &verdict {
        ArrowVerdict::Arrows { .. } => ("ARROWS", EXIT_OK),
        ArrowVerdict::NotArrows { .. } => ("NOT-ARROWS", EXIT_OK),
        ArrowVerdict::Unknown { .. } => ("UNKNOWN", EXIT_UNDECIDED),
    };
    println!(
        "K_{{{j}x{s}}} -> (red {red}, blue {blue}): {label}  \
         [{} nodes, {:.3}s]",
        stats.nodes, seconds
    );
    let mut witness_path = None;
    if let ArrowVerdict::NotArrows { witness, .. } = &verdict {
        if let Some(path) = witness_out {
            let record =
                search_record(shape, red, blue, witness.clone()).map_err(|e| e.to_string())?;
            witnesses::store_witness(&record, &path).map_err(|e| e.to_string())?;
            println!("witness written to {}", path.display());
            witness_path = Some(path);
        }
    }
    if let Some(path) = report {
        let value = serde_json::json!({
            "command": "arrow",
            "j": j,
            "s": s,
            "red": red.to_string(),
            "blue": blue.to_string(),
            "verdict": label,
            "nodes": stats.nodes,
            "seconds": seconds,
            "witness": witness_path.map(|p| p.display().to_string()),
        });
        fs::write(&path, format!("{value:#}\n")).map_err(|e| e.to_string())?;
    }
    Ok(code)
}

fn describe_value(value: &RamseyValue) -> String {
    match value {
        RamseyValue::Finite(v) => v.to_string(),
        RamseyValue::Infinite { family } => format!("infinity (family {family})"),
        RamseyValue::Unknown { lower, upper } => match upper {
            Some(u) => format!("unknown in [{lower}, {u}]"),
            None => format!("unknown, >= {lower}"),
        },
    }
}

fn step_reports(steps: &[crate::engine::MStep]) -> (Vec<StepReport>, u64) {
    let mut nodes = 0;
    let reports = steps
        .iter()
        .map(|step| {
            nodes += step.verdict.stats().nodes;
            let outcome = match step.verdict {
                ArrowVerdict::Arrows { .. } => "arrows",
                ArrowVerdict::NotArrows { .. } => "not-arrows",
                ArrowVerdict::Unknown { .. } => "unknown",
            };
            StepReport {
                s: step.s,
                outcome: outcome.to_string(),
            }
        })
        .collect();
    (reports, nodes)
}

#[allow(clippy::too_many_arguments)]
fn cmd_compute_m(
    j: u32,
    red: PatternName,
    blue: PatternName,
    s_cap: u32,
    max_edges: usize,
    flags: &SearchFlags,
    witness_out: Option<PathBuf>,
    report_path: Option<PathBuf>,
) -> Result<i32, String> {
    let mut opts = flags.options();
    opts.max_edges = max_edges;
    let start = Instant::now();
    let report = compute_m(j, red, blue, s_cap, &opts).map_err(|e| e.to_string())?;
    let seconds = start.elapsed().as_secs_f64();
    println!(
        "m_{j}({red}, {blue}) = {}  [{:.3}s]",
        describe_value(&report.value),
        seconds
    );
    if let (Some(path), Some(witness)) = (&witness_out, &report.witness) {
        let shape = witness.shape();
        let record =
            search_record(shape, red, blue, witness.clone()).map_err(|e| e.to_string())?;
        witnesses::store_witness(&record, path).map_err(|e| e.to_string())?;
        println!("witness written to {}", path.display());
    }
    if let Some(path) = report_path {
        let (steps, nodes) = step_reports(&report.steps);
        let claims: Vec<&TableClaim> = builtin_claims()
            .iter()
            .filter(|c| c.j == j && c.target == blue.to_string() && red == PatternName::B)
            .collect();
        let mut cells = Vec::new();
        if claims.is_empty() {
            cells.push(CellReport {
                j,
                target: blue.to_string(),
                claimed: None,
                computed: (&report.value).into(),
                verdict: Verdict::Unknown,
                evidence: Evidence {
                    witnesses: cell_witnesses(j, blue),
                    nodes,
                    steps: steps.clone(),
                    note: Some("no shipped claim for this cell".to_string()),
                },
                seconds,
            });
        }
        for claim in claims {
            cells.push(CellReport {
                j,
                target: blue.to_string(),
                claimed: Some(ClaimRef {
                    value: claim.claimed,
                    source: claim.source,
                }),
                computed: (&report.value).into(),
                verdict: adjudicate(claim.claimed, &report.value),
                evidence: Evidence {
                    witnesses: cell_witnesses(j, blue),
                    nodes,
                    steps: steps.clone(),
                    note: None,
                },
                seconds,
            });
        }
        fs::write(&path, serde_json::to_string_pretty(&cells).unwrap() + "\n")
            .map_err(|e| e.to_string())?;
    }
    let code = match report.value {
        RamseyValue::Unknown { .. } => EXIT_UNDECIDED,
        _ => EXIT_OK,
    };
    Ok(code)
}

fn parse_filter_rows(rows: &Option<String>) -> Result<Option<Vec<u32>>, String> {
    rows.as_ref()
        .map(|text| {
            text.split(',')
                .map(|t| t.trim().parse::<u32>().map_err(|e| e.to_string()))
                .collect()
        })
        .transpose()
}

fn parse_filter_targets(targets: &Option<String>) -> Result<Option<Vec<PatternName>>, String> {
    targets
        .as_ref()
        .map(|text| {
            text.split(',')
                .map(|t| t.trim().parse::<PatternName>().map_err(|e| e.to_string()))
                .collect()
        })
        .transpose()
}

fn cmd_verify_table(
    rows: Option<String>,
    targets: Option<String>,
    budget_secs: u64,
    threads: usize,
    symmetry: Symmetry,
    report_path: Option<PathBuf>,
) -> Result<i32, String> {
    let rows = parse_filter_rows(&rows)?;
    let targets = parse_filter_targets(&targets)?;
    let deadline = Instant::now() + Duration::from_secs(budget_secs);

    // Group claims by cell so each (j, target) is computed once and
    // every claim (table and theorem) is judged against that result.
    let mut cells: BTreeMap<(u32, usize), Vec<&TableClaim>> = BTreeMap::new();
    for claim in builtin_claims() {
        let target: PatternName = claim
            .target
            .parse()
            .map_err(|e: crate::mpgraph::GraphError| e.to_string())?;
        if rows.as_ref().is_some_and(|r| !r.contains(&claim.j)) {
            continue;
        }
        if targets.as_ref().is_some_and(|t| !t.contains(&target)) {
            continue;
        }
        let idx = ALL_PATTERNS.iter().position(|&p| p == target).unwrap();
        cells.entry((claim.j, idx)).or_default().push(claim);
    }

    let mut reports: Vec<CellReport> = Vec::new();
    for ((j, idx), claims) in &cells {
        let target = ALL_PATTERNS[*idx];
        // Scan one size past the largest finite claim so a value that
        // exceeds every claim shows up as a refuting lower bound.
        let s_cap = claims
            .iter()
            .filter_map(|c| match c.claimed {
                Claimed::Finite(v) => Some(v),
                Claimed::Infinite => None,
            })
            .max()
            .map(|v| v + 1)
            .unwrap_or(1);
        let remaining = deadline.saturating_duration_since(Instant::now());
        let opts = SearchOptions {
            budget: Some(remaining.max(Duration::from_secs(1))),
            symmetry,
            threads: threads.max(1),
            ..SearchOptions::default()
        };
        let start = Instant::now();
        let result = compute_m(*j, PatternName::B, target, s_cap, &opts).map_err(|e| e.to_string())?;
        let seconds = start.elapsed().as_secs_f64();
        let (steps, nodes) = step_reports(&result.steps);
        let conflicted = {
            let mut values: Vec<Claimed> = claims.iter().map(|c| c.claimed).collect();
            values.dedup();
            values.len() > 1
        };
        for claim in claims {
            let verdict = adjudicate(claim.claimed, &result.value);
            let mut note = None;
            if conflicted {
                note = Some("table and theorem claims disagree for this cell".to_string());
            }
            if *j == 6 && target == PatternName::B2 {
                note = Some(
                    "claimed lower-bound witness on K_{6x2} does not exist: \
                     complete search shows K_{6x2} -> (B, B2)"
                        .to_string(),
                );
            }
            println!(
                "{verdict:<9} m_{j}(B, {target}) {:?}={} computed={}  [{:.3}s]",
                claim.source,
                match claim.claimed {
                    Claimed::Finite(v) => v.to_string(),
                    Claimed::Infinite => "infinity".to_string(),
                },
                describe_value(&result.value),
                seconds
            );
            reports.push(CellReport {
                j: *j,
                target: target.to_string(),
                claimed: Some(ClaimRef {
                    value: claim.claimed,
                    source: claim.source,
                }),
                computed: (&result.value).into(),
                verdict,
                evidence: Evidence {
                    witnesses: cell_witnesses(*j, target),
                    nodes,
                    steps: steps.clone(),
                    note,
                },
                seconds,
            });
        }
    }

    reports.sort_by_key(|r| {
        let idx = r
            .target
            .parse::<PatternName>()
            .ok()
            .and_then(|p| ALL_PATTERNS.iter().position(|&q| q == p))
            .unwrap_or(usize::MAX);
        (r.j, idx, r.claimed.as_ref().map(|c| c.source))
    });
    if let Some(path) = report_path {
        fs::write(&path, serde_json::to_string_pretty(&reports).unwrap() + "\n")
            .map_err(|e| e.to_string())?;
    }

    let code = if reports.iter().any(|r| r.verdict == Verdict::Refuted) {
        EXIT_REFUTED
    } else if reports
        .iter()
        .any(|r| matches!(r.verdict, Verdict::Partial | Verdict::Unknown))
    {
        EXIT_UNDECIDED
    } else {
        EXIT_OK
    };
    Ok(code)
}

fn cmd_witness(
    id: Option<String>,
    generate: Option<String>,
    j: Option<u32>,
    s: Option<u32>,
    out: Option<PathBuf>,
) -> Result<i32, String> {
    let records = match (&id, &generate) {
        (Some(id), None) => match witnesses::by_id(id) {
            Ok(records) => records,
            Err(WitnessError::RefutedBySearch) => {
                eprintln!("{}", WitnessError::RefutedBySearch);
                return Ok(EXIT_UNDECIDED);
            }
            Err(e) => return Err(e.to_string()),
        },
        (None, Some(family)) if family == "pentagon" => {
            let (j, s) = match (j, s) {
                (Some(j), Some(s)) => (j, s),
                _ => return Err("--generate pentagon requires --j and --s".to_string()),
            };
            vec![witnesses::pentagon_blowup(j, s).map_err(|e| e.to_string())?]
        }
        (None, Some(family)) => return Err(format!("unknown family {family:?}")),
        _ => return Err("give exactly one of a witness id or --generate".to_string()),
    };
    for record in &records {
        let path = match (&out, records.len()) {
            (Some(path), 1) => path.clone(),
            (Some(path), _) => {
                // Multiple records under one id: suffix by blue claim.
                let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("witness");
                let suffix = record.avoids_blue.to_string().to_lowercase();
                path.with_file_name(format!("{stem}_{suffix}.json"))
            }
            (None, 1) => PathBuf::from(format!("{}.json", record.id)),
            (None, _) => {
                let suffix = record.avoids_blue.to_string().to_lowercase();
                PathBuf::from(format!("{}_{suffix}.json", record.id))
            }
        };
        witnesses::store_witness(record, &path).map_err(|e| e.to_string())?;
        println!(
            "{} (avoids red {}, blue {}) -> {}",
            record.id,
            record.avoids_red,
            record.avoids_blue,
            path.display()
        );
    }
    Ok(EXIT_OK)
}

/// Sidecar written next to an exported CNF so models can be checked
/// without re-specifying the instance.
#[derive(Debug, Serialize, Deserialize)]
pub struct CnfMeta {
    pub j: u32,
    pub s: u32,
    pub red: String,
    pub blue: String,
    pub variables: usize,
    pub clauses: usize,
}

fn cmd_export_cnf(
    j: u32,
    s: u32,
    red: PatternName,
    blue: PatternName,
    out: &Path,
) -> Result<i32, String> {
    let shape = make_shape(j, s).map_err(|e| e.to_string())?;
    let mut file = fs::File::create(out).map_err(|e| e.to_string())?;
    let inst = cnf::export_cnf(shape, red, blue, &mut file).map_err(|e| e.to_string())?;
    let meta = CnfMeta {
        j,
        s,
        red: red.to_string(),
        blue: blue.to_string(),
        variables: inst.variables,
        clauses: inst.clause_count(),
    };
    let meta_path = meta_path_for(out);
    fs::write(&meta_path, serde_json::to_string_pretty(&meta).unwrap() + "\n")
        .map_err(|e| e.to_string())?;
    println!(
        "{} variables, {} clauses -> {} (meta {})",
        inst.variables,
        inst.clause_count(),
        out.display(),
        meta_path.display()
    );
    Ok(EXIT_OK)
}

fn meta_path_for(cnf_path: &Path) -> PathBuf {
    let mut name = cnf_path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    cnf_path.with_file_name(name)
}

fn cmd_check_model(
    meta: &Path,
    model: &Path,
    witness_out: Option<PathBuf>,
) -> Result<i32, String> {
    let meta: CnfMeta = serde_json::from_str(
        &fs::read_to_string(meta).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let shape = make_shape(meta.j, meta.s).map_err(|e| e.to_string())?;
    let red: PatternName = meta.red.parse().map_err(|e: crate::mpgraph::GraphError| e.to_string())?;
    let blue: PatternName = meta
        .blue
        .parse()
        .map_err(|e: crate::mpgraph::GraphError| e.to_string())?;
    let inst = cnf::instance(shape, red, blue);

    let text = fs::read_to_string(model).map_err(|e| e.to_string())?;
    // Keep literal payload lines; drop solver status/comment lines.
    let payload: String = text
        .lines()
        .filter(|line| {
            let t = line.trim_start();
            t.starts_with('v')
                || t.starts_with('-')
                || t.chars().next().is_some_and(|c| c.is_ascii_digit())
        })
        .collect::<Vec<_>>()
        .join(" ");
    let lits = cnf::parse_model(&payload).map_err(|e| e.to_string())?;
    let coloring = cnf::import_model(&inst, &lits).map_err(|e| e.to_string())?;
    println!(
        "model verifies: good coloring of K_{{{}x{}}} avoiding red {red}, blue {blue}",
        meta.j, meta.s
    );
    if let Some(path) = witness_out {
        let record = search_record(shape, red, blue, coloring).map_err(|e| e.to_string())?;
        witnesses::store_witness(&record, &path).map_err(|e| e.to_string())?;
        println!("witness written to {}", path.display());
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn claims_parse_and_cover_table() {
        let claims = builtin_claims();
        assert_eq!(claims.len(), 126);
        // Both sources over 7 rows and 9 targets.
        for source in [Source::Table, Source::Theorem] {
            assert_eq!(claims.iter().filter(|c| c.source == source).count(), 63);
        }
        for claim in claims {
            claim.target.parse::<PatternName>().unwrap();
        }
        // The internal contradiction ships as data.
        let p3: Vec<_> = claims
            .iter()
            .filter(|c| c.j == 3 && c.target == "P3")
            .collect();
        assert_eq!(p3.len(), 2);
        let values: Vec<_> = p3.iter().map(|c| c.claimed).collect();
        assert!(values.contains(&Claimed::Finite(2)));
        assert!(values.contains(&Claimed::Finite(3)));
    }

    #[test]
    fn tier_c_cells() {
        let cells: std::collections::BTreeSet<(u32, &str)> = builtin_claims()
            .iter()
            .filter(|c| matches!(c.tier, Tier::C))
            .map(|c| (c.j, c.target.as_str()))
            .collect();
        let expected: std::collections::BTreeSet<(u32, &str)> = [
            (6, "B2"),
            (7, "B2"),
            (8, "B2"),
            (7, "C3"),
            (8, "C3"),
            (7, "PAW"),
            (8, "PAW"),
        ]
        .into_iter()
        .collect();
        assert_eq!(cells, expected);
    }

    #[test]
    fn adjudication_rules() {
        use RamseyValue::*;
        let inf = Infinite {
            family: "pentagon-blowup".to_string(),
        };
        assert_eq!(adjudicate(Claimed::Finite(3), &Finite(3)), Verdict::Confirmed);
        assert_eq!(adjudicate(Claimed::Finite(2), &Finite(3)), Verdict::Refuted);
        assert_eq!(adjudicate(Claimed::Infinite, &inf), Verdict::Confirmed);
        assert_eq!(adjudicate(Claimed::Finite(2), &inf), Verdict::Refuted);
        // m >= 3 refutes a claim of 2, partially proves 3, says
        // nothing about 4.
        let lb = Unknown {
            lower: 3,
            upper: None,
        };
        assert_eq!(adjudicate(Claimed::Finite(2), &lb), Verdict::Refuted);
        assert_eq!(adjudicate(Claimed::Finite(3), &lb), Verdict::Partial);
        assert_eq!(adjudicate(Claimed::Finite(4), &lb), Verdict::Unknown);
    }

    #[test]
    fn claimed_serde_round_trip() {
        let json = serde_json::to_string(&Claimed::Infinite).unwrap();
        assert_eq!(json, "\"infinity\"");
        assert_eq!(
            serde_json::from_str::<Claimed>("\"infinity\"").unwrap(),
            Claimed::Infinite
        );
        assert_eq!(serde_json::from_str::<Claimed>("4").unwrap(), Claimed::Finite(4));
        assert!(serde_json::from_str::<Claimed>("\"lots\"").is_err());
    }

    #[test]
    fn report_round_trips() {
        let report = CellReport {
            j: 3,
            target: "P3".to_string(),
            claimed: Some(ClaimRef {
                value: Claimed::Finite(2),
                source: Source::Table,
            }),
            computed: ComputedValue::Finite { value: 3 },
            verdict: Verdict::Refuted,
            evidence: Evidence {
                witnesses: vec!["matching_witness_3x2".to_string()],
                nodes: 42,
                steps: vec![StepReport {
                    s: 2,
                    outcome: "not-arrows".to_string(),
                }],
                note: None,
            },
            seconds: 0.01,
        };
        let json = serde_json::to_string(&report).unwrap();
        let back: CellReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.verdict, Verdict::Refuted);
        assert_eq!(back.computed, ComputedValue::Finite { value: 3 });
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }
}
