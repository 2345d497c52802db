//! Command-line front end. Output goes to `out`, diagnostics to `err`, and
//! the return value is the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success / all checks pass |
//! | 1 | usage or input error |
//! | 2 | inexact result (time budget ran out) |
//! | 3 | verification failure: witness, counterexample or failed consistency line |

use std::ffi::OsString;
use std::io::Write;
use std::ops::RangeInclusive;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::host::{AnyHost, Host};
use crate::lemma_lab::suites::{run_statement, Statement, SuiteOptions};
use crate::lemma_lab::{CheckReport, DEFAULT_SEED};
use crate::resolvers::{verify_generator, GeneratorKind, LandmarkSet, WitnessRecord};
use crate::solvers::{
    default_workers, dimension_table, exact_dimension, greedy_upper_bound, CheckStatus,
    DimensionRecord, DimensionTable, SolveOptions, Strategy, TableOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INEXACT: i32 = 2;
pub const EXIT_FAILED: i32 = 3;

pub const TABLE_MAX_DIMENSION: u32 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
    Markdown,
}

#[derive(Debug, Parser)]
#[command(
    name = "metdim",
    version,
    about = "Metric, edge and mixed metric dimension of hypercubes and graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a dimension.
    Dim(DimArgs),
    /// Check whether a landmark set is a generator.
    Verify(VerifyArgs),
    /// Dimension table for a range of hypercubes, with consistency checks.
    Table(TableArgs),
    /// Run lemma and theorem checks.
    LemmaCheck(LemmaArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Worker threads (default: all cores).
    #[arg(long, env = "METDIM_WORKERS")]
    pub workers: Option<usize>,
    /// Time budget per exact search, in seconds.
    #[arg(long, default_value_t = 600)]
    pub budget: u64,
    /// Report elapsed_ms as 0 so output is reproducible byte for byte.
    #[arg(long)]
    pub no_timing: bool,
}

impl Common {
    fn workers(&self) -> usize {
        self.workers
            .filter(|&w| w > 0)
            .unwrap_or_else(default_workers)
    }

    fn budget(&self) -> Option<Duration> {
        Some(Duration::from_secs(self.budget))
    }

    fn record(&self, rec: DimensionRecord) -> DimensionRecord {
        if self.no_timing {
            rec.without_timing()
        } else {
            rec
        }
    }
}

#[derive(Debug, Args)]
pub struct DimArgs {
    #[arg(long)]
    pub kind: GeneratorKind,
    /// `Qd:<d>` or the path of an edge-list file.
    #[arg(long)]
    pub host: String,
    #[arg(long, default_value = "exact")]
    pub strategy: Strategy,
    /// Only search sets containing the all-zeros vertex (default on hypercubes).
    #[arg(long, overrides_with = "no_fix_zero")]
    pub fix_zero: bool,
    #[arg(long)]
    pub no_fix_zero: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub kind: GeneratorKind,
    #[arg(long)]
    pub host: String,
    /// Comma-separated vertices: bitstrings on hypercubes, labels on graphs.
    #[arg(long, value_delimiter = ',', required = true)]
    pub basis: Vec<String>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    pub d_min: u32,
    pub d_max: u32,
    #[arg(long, value_delimiter = ',', default_value = "metric,edge,mixed")]
    pub kinds: Vec<GeneratorKind>,
    #[arg(long, default_value = "exact")]
    pub strategy: Strategy,
    #[arg(long, value_enum, default_value = "markdown")]
    pub format: OutputFormat,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct LemmaArgs {
    /// lemma1..lemma5, theorem1, theorem2, conjecture or all.
    pub statement: String,
    /// A dimension (`4`) or an inclusive range (`3..6`).
    #[arg(long)]
    pub d: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Also check every minimum generator / basis (d <= 5).
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
    #[command(flatten)]
    pub common: Common,
}

/// Parses `"4"`, `"3..6"` or `"3..=6"` (inclusive).
pub fn parse_d_range(s: &str) -> Result<RangeInclusive<u32>> {
    let num = |t: &str| {
        t.trim()
            .parse::<u32>()
            .map_err(|_| Error::InvalidArgument(format!("bad dimension range {s:?}")))
    };
    let r = match s.split_once("..") {
        Some((a, b)) => num(a)?..=num(b.strip_prefix('=').unwrap_or(b))?,
        None => {
            let d = num(s)?;
            d..=d
        }
    };
    if r.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "empty dimension range {s:?}"
        )));
    }
    Ok(r)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn execute(cmd: &Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Dim(a) => cmd_dim(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Table(a) => cmd_table(a, out),
        Command::LemmaCheck(a) => cmd_lemma_check(a, out),
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

const RECORD_COLUMNS: [&str; 9] = [
    "host",
    "kind",
    "value",
    "exact",
    "lower_bound",
    "basis",
    "subsets_examined",
    "elapsed_ms",
    "note",
];

fn record_cells(r: &DimensionRecord) -> [String; 9] {
    [
        r.host.clone(),
        r.kind.to_string(),
        r.value.to_string(),
        r.exact.to_string(),
        r.lower_bound.map(|b| b.to_string()).unwrap_or_default(),
        r.basis.join(" "),
        r.subsets_examined.to_string(),
        r.elapsed_ms.to_string(),
        r.note.clone().unwrap_or_default(),
    ]
}

fn write_record(r: &DimensionRecord, format: OutputFormat, out: &mut dyn Write) -> Result<()> {
    match format {
        OutputFormat::Json => writeln!(out, "{}", json(r))?,
        OutputFormat::Csv => {
            writeln!(out, "{}", RECORD_COLUMNS.join(","))?;
            let cells: Vec<String> = record_cells(r).iter().map(|c| csv_field(c)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        OutputFormat::Markdown => {
            writeln!(out, "| {} |", RECORD_COLUMNS.join(" | "))?;
            writeln!(out, "|{}", "---|".repeat(RECORD_COLUMNS.len()))?;
            writeln!(out, "| {} |", record_cells(r).join(" | "))?;
        }
        OutputFormat::Text => {
            let exact = if r.exact {
                "exact".to_string()
            } else {
                format!("upper bound, lower bound {}", r.lower_bound.unwrap_or(1))
            };
            writeln!(
                out,
                "{} {} dimension = {} ({exact})",
                r.host, r.kind, r.value
            )?;
            writeln!(out, "basis: {}", r.basis.join(","))?;
            writeln!(
                out,
                "subsets examined: {}, elapsed: {} ms",
                r.subsets_examined, r.elapsed_ms
            )?;
            if let Some(n) = &r.note {
                writeln!(out, "note: {n}")?;
            }
        }
    }
    Ok(())
}

fn cmd_dim(a: &DimArgs, out: &mut dyn Write) -> Result<i32> {
    let host = AnyHost::from_spec(&a.host)?;
    let is_cube = host.as_hypercube().is_some();
    let fix_zero = if a.no_fix_zero {
        false
    } else {
        a.fix_zero || is_cube
    };
    let rec = match a.strategy {
        Strategy::Greedy => greedy_upper_bound(&host, a.kind)?,
        s => {
            let opts = SolveOptions::new(a.kind)
                .strategy(s)
                .fix_zero(fix_zero)
                .workers(a.common.workers())
                .time_budget(a.common.budget());
            exact_dimension(&host, &opts)?
        }
    };
    let rec = a.common.record(rec);
    write_record(&rec, a.format, out)?;
    Ok(if rec.exact || a.strategy == Strategy::Greedy {
        EXIT_OK
    } else {
        EXIT_INEXACT
    })
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    host: String,
    kind: GeneratorKind,
    basis: &'a [String],
    result: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<WitnessRecord>,
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let host = AnyHost::from_spec(&a.host)?;
    let labels: Vec<&str> = a.basis.iter().map(|s| s.trim()).collect();
    let set = LandmarkSet::parse(&host, &labels)?;
    let verdict = verify_generator(&host, &set, a.kind)?;
    let witness = verdict.witness().map(|w| w.record(&host));
    let result = if verdict.is_resolved() {
        "OK"
    } else {
        "UNRESOLVED"
    };
    let basis = set.labels(&host);
    match a.format {
        OutputFormat::Text => {
            writeln!(out, "{result}")?;
            if let Some(w) = &witness {
                writeln!(
                    out,
                    "witness: {} and {} share signature {:?}",
                    w.a, w.b, w.signature.0
                )?;
            }
        }
        OutputFormat::Json => writeln!(
            out,
            "{}",
            json(&VerifyOutput {
                host: host.id(),
                kind: a.kind,
                basis: &basis,
                result,
                witness: witness.clone(),
            })
        )?,
        OutputFormat::Csv | OutputFormat::Markdown => {
            let cols = [
                "host",
                "kind",
                "basis",
                "result",
                "witness_a",
                "witness_b",
                "signature",
            ];
            let (wa, wb, sig) = witness.as_ref().map_or(Default::default(), |w| {
                let sig: Vec<String> = w.signature.0.iter().map(|x| x.to_string()).collect();
                (w.a.clone(), w.b.clone(), sig.join(" "))
            });
            let cells = [
                host.id(),
                a.kind.to_string(),
                basis.join(" "),
                result.to_string(),
                wa,
                wb,
                sig,
            ];
            if a.format == OutputFormat::Csv {
                writeln!(out, "{}", cols.join(","))?;
                let cells: Vec<String> = cells.iter().map(|c| csv_field(c)).collect();
                writeln!(out, "{}", cells.join(","))?;
            } else {
                writeln!(out, "| {} |", cols.join(" | "))?;
                writeln!(out, "|{}", "---|".repeat(cols.len()))?;
                writeln!(out, "| {} |", cells.join(" | "))?;
            }
        }
    }
    Ok(if verdict.is_resolved() {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

fn cell(r: Option<&DimensionRecord>) -> String {
    match r {
        None => "-".into(),
        Some(r) if r.exact => r.value.to_string(),
        Some(r) => format!("{}..{}", r.lower_bound.unwrap_or(1), r.value),
    }
}

/// The table in corollary order: dim-1, edim, dim, mdim.
pub fn render_table(t: &DimensionTable, format: OutputFormat) -> String {
    let mut s = String::new();
    let cols = [
        "d",
        "dim-1",
        "edim",
        "dim",
        "mdim",
        "conjecture",
        "dim/(2d/log2 d)",
    ];
    let rows: Vec<[String; 7]> = t
        .rows
        .iter()
        .map(|r| {
            let dim = r.get(GeneratorKind::Metric);
            let dim_minus = match dim {
                Some(x) if x.exact => (x.value - 1).to_string(),
                Some(_) => "?".into(),
                None => "-".into(),
            };
            [
                r.d.to_string(),
                dim_minus,
                cell(r.get(GeneratorKind::Edge)),
                cell(dim),
                cell(r.get(GeneratorKind::Mixed)),
                r.conjecture_status().unwrap_or("-").to_string(),
                r.asymptotic_ratio(GeneratorKind::Metric)
                    .map_or("-".into(), |x| format!("{x:.3}")),
            ]
        })
        .collect();
    match format {
        OutputFormat::Json => {
            s.push_str(&json(t));
            s.push('\n');
            return s;
        }
        OutputFormat::Csv => {
            s.push_str(&cols.join(","));
            s.push('\n');
            for r in &rows {
                let cells: Vec<String> = r.iter().map(|c| csv_field(c)).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
        }
        OutputFormat::Markdown | OutputFormat::Text => {
            s.push_str(&format!("| {} |\n", cols.join(" | ")));
            s.push_str(&format!("|{}\n", "---:|".repeat(cols.len())));
            for r in &rows {
                s.push_str(&format!("| {} |\n", r.join(" | ")));
            }
        }
    }
    s.push('\n');
    for l in &t.consistency {
        let status = match l.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Info => "INFO",
            CheckStatus::Skip => "SKIP",
        };
        let prefix = if format == OutputFormat::Csv {
            "# "
        } else {
            ""
        };
        s.push_str(&format!(
            "{prefix}{status} {} d={}: {}\n",
            l.check, l.d, l.detail
        ));
    }
    s
}

fn cmd_table(a: &TableArgs, out: &mut dyn Write) -> Result<i32> {
    if a.d_min < 1 || a.d_min > a.d_max || a.d_max > TABLE_MAX_DIMENSION {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= d_min <= d_max <= {TABLE_MAX_DIMENSION}, got {}..{}",
            a.d_min, a.d_max
        )));
    }
    let opts = TableOptions {
        strategy: a.strategy,
        workers: a.common.workers(),
        time_budget: a.common.budget(),
        ..TableOptions::default()
    };
    let mut t = dimension_table(a.d_min..=a.d_max, &a.kinds, &opts)?;
    if a.common.no_timing {
        t = t.without_timing();
    }
    write!(out, "{}", render_table(&t, a.format))?;
    Ok(if !t.all_pass() {
        EXIT_FAILED
    } else if t.records().any(|r| !r.exact) {
        EXIT_INEXACT
    } else {
        EXIT_OK
    })
}

fn write_reports(reports: &[CheckReport], format: OutputFormat, out: &mut dyn Write) -> Result<()> {
    let cols = [
        "statement",
        "d",
        "trials",
        "exhaustive",
        "seed",
        "status",
        "counterexample",
    ];
    let cells = |r: &CheckReport| {
        [
            r.statement.clone(),
            r.d.map(|d| d.to_string()).unwrap_or_default(),
            r.trials.to_string(),
            r.exhaustive.to_string(),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
            if r.passed() { "PASS" } else { "FAIL" }.to_string(),
            r.counterexamples.first().cloned().unwrap_or_default(),
        ]
    };
    match format {
        OutputFormat::Json => {
            for r in reports {
                writeln!(out, "{}", json(r))?;
            }
        }
        OutputFormat::Csv => {
            writeln!(out, "{}", cols.join(","))?;
            for r in reports {
                let c: Vec<String> = cells(r).iter().map(|c| csv_field(c)).collect();
                writeln!(out, "{}", c.join(","))?;
            }
        }
        OutputFormat::Markdown => {
            writeln!(out, "| {} |", cols.join(" | "))?;
            writeln!(out, "|{}", "---|".repeat(cols.len()))?;
            for r in reports {
                writeln!(out, "| {} |", cells(r).join(" | "))?;
            }
        }
        OutputFormat::Text => {
            for r in reports {
                let d = r.d.map(|d| format!(" d={d}")).unwrap_or_default();
                let status = if r.passed() { "PASS" } else { "FAIL" };
                let mode = if r.exhaustive { ", exhaustive" } else { "" };
                writeln!(
                    out,
                    "{status} {}{d} ({} trials{mode})",
                    r.statement, r.trials
                )?;
                for c in &r.counterexamples {
                    writeln!(out, "  COUNTEREXAMPLE {c}")?;
                }
                for n in &r.notes {
                    writeln!(out, "  {n}")?;
                }
            }
        }
    }
    Ok(())
}

fn cmd_lemma_check(a: &LemmaArgs, out: &mut dyn Write) -> Result<i32> {
    let statement = match a.statement.as_str() {
        "all" => None,
        s => Some(s.parse::<Statement>()?),
    };
    let d_range = a.d.as_deref().map(parse_d_range).transpose()?;
    let opts = SuiteOptions {
        trials: a.trials,
        seed: a.seed,
        workers: a.common.workers(),
        exhaustive: a.exhaustive,
        time_budget: a.common.budget(),
    };
    let reports = run_statement(statement, d_range, &opts)?;
    write_reports(&reports, a.format, out)?;
    Ok(if reports.iter().all(CheckReport::passed) {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("metdim").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_d_range("4").unwrap(), 4..=4);
        assert_eq!(parse_d_range("3..6").unwrap(), 3..=6);
        assert_eq!(parse_d_range("3..=6").unwrap(), 3..=6);
        assert!(parse_d_range("6..3").is_err());
        assert!(parse_d_range("x").is_err());
    }

    #[test]
    fn dim_values() {
        for (kind, d, v) in [("metric", 4, 4), ("edge", 4, 3), ("mixed", 2, 3)] {
            let (code, out, _) = run_str(&[
                "dim",
                "--kind",
                kind,
                "--host",
                &format!("Qd:{d}"),
                "--workers",
                "2",
            ]);
            assert_eq!(code, 0);
            let rec: DimensionRecord = serde_json::from_str(out.trim()).unwrap();
            assert_eq!(rec.value, v);
            assert!(rec.exact);
        }
    }

    #[test]
    fn verify_exit_codes() {
        let (code, out, _) = run_str(&[
            "verify",
            "--kind",
            "mixed",
            "--host",
            "Qd:3",
            "--basis",
            "111,010,001",
        ]);
        assert_eq!((code, out.as_str()), (0, "OK\n"));
        let (code, out, _) = run_str(&[
            "verify", "--kind", "metric", "--host", "Qd:2", "--basis", "00",
        ]);
        assert_eq!(code, 3);
        assert_eq!(out, "UNRESOLVED\nwitness: 10 and 01 share signature [1]\n");
        let (code, _, err) = run_str(&[
            "verify", "--kind", "metric", "--host", "Qd:2", "--basis", "0x",
        ]);
        assert_eq!(code, 1);
        assert!(err.starts_with("error:"));
    }

    #[test]
    fn table_rows_and_lines() {
        let (code, out, _) = run_str(&["table", "1", "4", "--workers", "2"]);
        assert_eq!(code, 0, "{out}");
        assert!(
            out.contains("| 4 | 3 | 3 | 4 | 4 | edim = dim - 1 |"),
            "{out}"
        );
        assert!(out.contains("PASS theorem1 d=4"));
        assert!(!out.contains("FAIL"));
        let (code, _, _) = run_str(&["table", "0", "3"]);
        assert_eq!(code, 1);
        let (code, _, _) = run_str(&["table", "3", "8"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn lemma_check_exit_codes() {
        let (code, out, _) = run_str(&[
            "lemma-check",
            "lemma3",
            "--d",
            "4",
            "--trials",
            "100",
            "--seed",
            "7",
        ]);
        assert_eq!(code, 0, "{out}");
        assert!(out.starts_with("PASS lemma3 d=4 (100 trials)"), "{out}");
        let (code, _, _) = run_str(&["lemma-check", "lemma9"]);
        assert_eq!(code, 1);
        let (code, _, _) = run_str(&["lemma-check", "lemma2", "--d", "6", "--exhaustive"]);
        assert_eq!(code, 1);
        let (code, out, _) = run_str(&[
            "lemma-check",
            "conjecture",
            "--d",
            "3..4",
            "--format",
            "json",
        ]);
        assert_eq!(code, 0);
        let reports: Vec<CheckReport> = out
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(reports.len(), 2);
    }
}
