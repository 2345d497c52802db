//! Exact and greedy computation of metric, edge and mixed dimensions.

mod hitting;
mod search;
mod table;

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::AtomicBool;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::host::Host;
use crate::resolvers::{GeneratorKind, LandmarkSet};

pub use hitting::{distinguisher_sets, HittingFamily};
pub use search::MAX_TABLE_ENTRIES;
pub use table::{
    dimension_table, CheckStatus, ConsistencyLine, DimensionTable, TableOptions, TableRow,
};

use search::{search_k, DistanceTable, Level, Mode, Refiner, SearchControl, SearchOutcome};

pub const DEFAULT_TIME_BUDGET: Duration = Duration::from_secs(600);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Exact,
    Greedy,
    Hybrid,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Strategy::Exact),
            "greedy" => Ok(Strategy::Greedy),
            "hybrid" => Ok(Strategy::Hybrid),
            _ => Err(Error::InvalidArgument(format!("unknown strategy {s:?}"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Exact => "exact",
            Strategy::Greedy => "greedy",
            Strategy::Hybrid => "hybrid",
        })
    }
}

/// Previously computed dimensions of the same host, for cross-bounds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KnownDimensions {
    pub metric: Option<usize>,
    pub edge: Option<usize>,
    pub mixed: Option<usize>,
}

impl KnownDimensions {
    pub fn set(&mut self, kind: GeneratorKind, value: usize) {
        match kind {
            GeneratorKind::Metric => self.metric = Some(value),
            GeneratorKind::Edge => self.edge = Some(value),
            GeneratorKind::Mixed => self.mixed = Some(value),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub kind: GeneratorKind,
    pub strategy: Strategy,
    /// Force the all-zeros vertex into every candidate (hypercubes only).
    pub fix_zero: bool,
    pub workers: usize,
    pub time_budget: Option<Duration>,
    pub known: KnownDimensions,
}

impl SolveOptions {
    pub fn new(kind: GeneratorKind) -> Self {
        SolveOptions {
            kind,
            strategy: Strategy::Exact,
            fix_zero: false,
            workers: default_workers(),
            time_budget: Some(DEFAULT_TIME_BUDGET),
            known: KnownDimensions::default(),
        }
    }

    pub fn fix_zero(mut self, on: bool) -> Self {
        self.fix_zero = on;
        self
    }

    pub fn workers(mut self, n: usize) -> Self {
        self.workers = n.max(1);
        self
    }

    pub fn strategy(mut self, s: Strategy) -> Self {
        self.strategy = s;
        self
    }

    pub fn time_budget(mut self, t: Option<Duration>) -> Self {
        self.time_budget = t;
        self
    }

    pub fn known(mut self, k: KnownDimensions) -> Self {
        self.known = k;
        self
    }
}

/// Worker count from `METDIM_WORKERS`, else the available parallelism.
pub fn default_workers() -> usize {
    std::env::var("METDIM_WORKERS")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionRecord {
    pub host: String,
    pub kind: GeneratorKind,
    pub value: usize,
    pub basis: Vec<String>,
    pub exact: bool,
    pub subsets_examined: u64,
    pub elapsed_ms: u64,
    /// Proven lower bound, present only on inexact records.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip)]
    pub landmarks: LandmarkSet,
}

impl DimensionRecord {
    fn new<H: Host + ?Sized>(host: &H, kind: GeneratorKind, basis: LandmarkSet) -> Self {
        let note = (kind == GeneratorKind::Edge && host.edge_count() < 2)
            .then(|| "vacuous: fewer than two edges, any nonempty set resolves them".to_string());
        DimensionRecord {
            host: host.id(),
            kind,
            value: basis.len(),
            basis: basis.labels(host),
            exact: false,
            subsets_examined: 0,
            elapsed_ms: 0,
            lower_bound: None,
            note,
            landmarks: basis,
        }
    }

    /// Copy with the wall-clock field zeroed, for reproducible output.
    pub fn without_timing(&self) -> Self {
        DimensionRecord {
            elapsed_ms: 0,
            ..self.clone()
        }
    }
}

/// A sound starting point for the ascending exact search.
///
/// The generic floor is 1. Mixed generators are metric and edge generators,
/// so known `dim`/`edim` bound `mdim` on any graph. On bipartite hosts a
/// metric generator is an edge generator, so a known `edim` bounds `dim`;
/// on hypercubes a known `dim` bounds `edim` from below by `dim - 1`.
pub fn lower_bound<H: Host + ?Sized>(
    host: &H,
    kind: GeneratorKind,
    known: &KnownDimensions,
) -> usize {
    let mut lb = 1;
    match kind {
        GeneratorKind::Mixed => {
            lb = lb
                .max(known.metric.unwrap_or(0))
                .max(known.edge.unwrap_or(0));
        }
        GeneratorKind::Metric => {
            if host.is_bipartite() {
                lb = lb.max(known.edge.unwrap_or(0));
            }
        }
        GeneratorKind::Edge => {
            if host.as_hypercube().is_some() {
                lb = lb.max(known.metric.unwrap_or(0).saturating_sub(1));
            }
        }
    }
    lb
}

pub(crate) fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

fn check_fix_zero<H: Host + ?Sized>(host: &H, fix_zero: bool) -> Result<()> {
    if fix_zero && host.as_hypercube().is_none() {
        return Err(Error::InvalidArgument(
            "fix_zero is only valid on hypercube hosts".into(),
        ));
    }
    Ok(())
}

/// Adds, one at a time, the vertex that separates the most still-unresolved
/// pairs (ties to the smallest label) until every pair is separated.
pub fn greedy_upper_bound<H: Host + ?Sized>(
    host: &H,
    kind: GeneratorKind,
) -> Result<DimensionRecord> {
    let started = Instant::now();
    let table = DistanceTable::build(host, kind)?;
    let (basis, evaluated) = greedy_basis(&table)?;
    let mut rec = DimensionRecord::new(host, kind, basis);
    rec.subsets_examined = evaluated;
    rec.elapsed_ms = started.elapsed().as_millis() as u64;
    Ok(rec)
}

fn greedy_basis(table: &DistanceTable) -> Result<(LandmarkSet, u64)> {
    let n = table.vertex_count();
    let mut refiner = Refiner::new(table);
    let mut level = Level::root(table.element_count());
    let mut trial = level.clone();
    let mut best_level = level.clone();
    let mut chosen = Vec::new();
    let mut evaluated = 0u64;
    // at least one landmark, even when nothing needs separating
    while level.unresolved() > 0 || chosen.is_empty() {
        let mut best: Option<(u64, usize)> = None;
        for x in (0..n).filter(|x| !chosen.contains(x)) {
            refiner.refine(&level, x, &mut trial);
            evaluated += 1;
            let remaining = trial.unresolved();
            if best.is_none_or(|(r, _)| remaining < r) {
                best = Some((remaining, x));
                std::mem::swap(&mut best_level, &mut trial);
            }
        }
        let Some((remaining, x)) = best else {
            return Err(Error::Precondition("no vertex left to add".into()));
        };
        if remaining == level.unresolved() && !chosen.is_empty() {
            return Err(Error::Precondition(
                "no vertex separates the remaining pairs".into(),
            ));
        }
        chosen.push(x);
        std::mem::swap(&mut level, &mut best_level);
    }
    Ok((LandmarkSet::new(chosen)?, evaluated))
}

/// Smallest generator of `opts.kind`, by ascending exhaustive search.
///
/// At the minimal size the lexicographically smallest generator (by vertex
/// label) is returned, independent of the worker count. If the time budget
/// runs out the record is inexact: `value`/`basis` come from the greedy
/// bound and `lower_bound` holds the first size not fully searched.
pub fn exact_dimension<H: Host + ?Sized>(host: &H, opts: &SolveOptions) -> Result<DimensionRecord> {
    check_fix_zero(host, opts.fix_zero)?;
    if opts.strategy == Strategy::Greedy {
        return greedy_upper_bound(host, opts.kind);
    }
    let started = Instant::now();
    let deadline = opts.time_budget.map(|b| started + b);
    let table = DistanceTable::build(host, opts.kind)?;
    let pool = thread_pool(opts.workers)?;
    let n = table.vertex_count();
    let fixed: &[usize] = if opts.fix_zero { &[0] } else { &[] };

    let mut greedy: Option<(LandmarkSet, u64)> = None;
    let mut examined = 0u64;
    if opts.strategy == Strategy::Hybrid {
        let g = greedy_basis(&table)?;
        examined += g.1;
        greedy = Some(g);
    }
    let upper = greedy.as_ref().map_or(n, |g| g.0.len());

    let timed_out = AtomicBool::new(false);
    let ctl = SearchControl {
        deadline,
        timed_out: &timed_out,
    };
    let lb = lower_bound(host, opts.kind, &opts.known).min(n);
    for k in lb..=n {
        if opts.strategy == Strategy::Hybrid && k >= upper {
            let (basis, _) = greedy.take().expect("hybrid greedy");
            let mut rec = DimensionRecord::new(host, opts.kind, basis);
            rec.exact = true;
            rec.subsets_examined = examined;
            rec.elapsed_ms = started.elapsed().as_millis() as u64;
            return Ok(rec);
        }
        let outcome = pool.install(|| search_k(&table, k, fixed, Mode::First, &ctl));
        match outcome {
            SearchOutcome::Found { mut sets, nodes } => {
                examined += nodes;
                let basis = LandmarkSet::new(sets.swap_remove(0))?;
                let mut rec = DimensionRecord::new(host, opts.kind, basis);
                rec.exact = true;
                rec.subsets_examined = examined;
                rec.elapsed_ms = started.elapsed().as_millis() as u64;
                return Ok(rec);
            }
            SearchOutcome::Exhausted { nodes } => examined += nodes,
            SearchOutcome::TimedOut { nodes } => {
                examined += nodes;
                let (basis, g_nodes) = match greedy.take() {
                    Some(g) => g,
                    None => greedy_basis(&table)?,
                };
                let mut rec = DimensionRecord::new(host, opts.kind, basis);
                rec.subsets_examined = examined + g_nodes;
                rec.lower_bound = Some(k);
                rec.elapsed_ms = started.elapsed().as_millis() as u64;
                return Ok(rec);
            }
        }
    }
    Err(Error::Precondition(format!(
        "no {} generator exists for {}",
        opts.kind,
        host.id()
    )))
}

/// All generators of size `k`, in lexicographic order, optionally only
/// those containing the all-zeros vertex, truncated to `limit`.
pub fn enumerate_generators<H: Host + ?Sized>(
    host: &H,
    kind: GeneratorKind,
    k: usize,
    fix_zero: bool,
    limit: Option<usize>,
    workers: usize,
) -> Result<Vec<LandmarkSet>> {
    check_fix_zero(host, fix_zero)?;
    let table = DistanceTable::build(host, kind)?;
    let pool = thread_pool(workers)?;
    let timed_out = AtomicBool::new(false);
    let ctl = SearchControl {
        deadline: None,
        timed_out: &timed_out,
    };
    let fixed: &[usize] = if fix_zero { &[0] } else { &[] };
    match pool.install(|| search_k(&table, k, fixed, Mode::All { limit }, &ctl)) {
        SearchOutcome::Found { sets, .. } => sets.into_iter().map(LandmarkSet::new).collect(),
        SearchOutcome::Exhausted { .. } => Ok(Vec::new()),
        SearchOutcome::TimedOut { .. } => unreachable!("no deadline"),
    }
}
