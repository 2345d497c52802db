//! Drivers that run the checks over exhaustive and seeded random inputs.
//!
//! Trials run in parallel but the reported outcome never depends on
//! scheduling: every trial draws from its own RNG stream, and on failure
//! the counterexample with the smallest trial index is reported.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use rand::Rng;
use rayon::prelude::*;

use super::random::{random_bipartite_graph, random_superset_image, trial_rng, CubeAutomorphism};
use super::{
    antipodal_swap, check_lemma1, classify_unresolved, constant_column_audit, extend_to_metric,
    metric_to_mixed, CheckReport, DEFAULT_SEED,
};
use crate::error::{Error, Result};
use crate::host::{GenericHost, Host};
use crate::hypercube::Hypercube;
use crate::resolvers::{verify_generator, GeneratorKind, LandmarkSet};
use crate::solvers::{
    default_workers, dimension_table, enumerate_generators, exact_dimension, greedy_upper_bound,
    thread_pool, CheckStatus, SolveOptions, TableOptions, DEFAULT_TIME_BUDGET,
};

pub const MAX_CHECK_DIMENSION: u32 = 10;
pub const MAX_EXHAUSTIVE_DIMENSION: u32 = 5;
pub const DEFAULT_RANGE: RangeInclusive<u32> = 3..=5;
/// Vertex bound for the random bipartite graphs.
pub const RANDOM_GRAPH_MAX_VERTICES: usize = 40;
pub const RANDOM_GRAPH_COUNT: u64 = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Statement {
    Lemma1,
    Lemma2,
    Lemma3,
    Lemma4,
    Lemma5,
    Theorem1,
    Theorem2,
    Conjecture,
}

impl Statement {
    pub const ALL: [Statement; 8] = [
        Statement::Lemma1,
        Statement::Lemma2,
        Statement::Lemma3,
        Statement::Lemma4,
        Statement::Lemma5,
        Statement::Theorem1,
        Statement::Theorem2,
        Statement::Conjecture,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Statement::Lemma1 => "lemma1",
            Statement::Lemma2 => "lemma2",
            Statement::Lemma3 => "lemma3",
            Statement::Lemma4 => "lemma4",
            Statement::Lemma5 => "lemma5",
            Statement::Theorem1 => "theorem1",
            Statement::Theorem2 => "theorem2",
            Statement::Conjecture => "conjecture",
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Statement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Statement::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown statement {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    /// Also run the exhaustive part of each suite (only for small `d`).
    pub exhaustive: bool,
    /// Budget for each exact solve that supplies inputs.
    pub time_budget: Option<Duration>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            trials: 1000,
            seed: DEFAULT_SEED,
            workers: default_workers(),
            exhaustive: false,
            time_budget: Some(DEFAULT_TIME_BUDGET),
        }
    }
}

/// Runs `f` over `0..n` and keeps the results of the trials before the
/// first failure (by index). Counterexample errors count as failures.
fn run_trials<T, F>(n: usize, workers: usize, f: F) -> Result<(Vec<T>, Option<String>)>
where
    T: Send,
    F: Fn(usize) -> Result<std::result::Result<T, String>> + Sync,
{
    let pool = thread_pool(workers)?;
    let first_bad = AtomicUsize::new(usize::MAX);
    let results: Vec<Option<Result<std::result::Result<T, String>>>> = pool.install(|| {
        (0..n)
            .into_par_iter()
            .map(|i| {
                if i > first_bad.load(Ordering::Relaxed) {
                    return None;
                }
                let r = match f(i) {
                    Err(Error::Counterexample { statement, detail }) => {
                        Ok(Err(format!("{statement}: {detail}")))
                    }
                    other => other,
                };
                if !matches!(r, Ok(Ok(_))) {
                    first_bad.fetch_min(i, Ordering::Relaxed);
                }
                Some(r)
            })
            .collect()
    });
    let mut out = Vec::with_capacity(n);
    for r in results {
        match r.expect("trials before the first failure always run")? {
            Ok(t) => out.push(t),
            Err(msg) => return Ok((out, Some(msg))),
        }
    }
    Ok((out, None))
}

fn absorb<T>(report: &mut CheckReport, (done, bad): (Vec<T>, Option<String>)) -> Vec<T> {
    report.trials += done.len() as u64 + bad.is_some() as u64;
    report.counterexamples.extend(bad);
    done
}

fn checked_cube(d: u32) -> Result<Hypercube> {
    if d == 0 || d > MAX_CHECK_DIMENSION {
        return Err(Error::InvalidArgument(format!(
            "checks support 1 <= d <= {MAX_CHECK_DIMENSION}, got {d}"
        )));
    }
    Hypercube::new(d)
}

fn require_exhaustive(d: u32) -> Result<()> {
    if d > MAX_EXHAUSTIVE_DIMENSION {
        return Err(Error::InvalidArgument(format!(
            "exhaustive mode supports d <= {MAX_EXHAUSTIVE_DIMENSION}, got {d}"
        )));
    }
    Ok(())
}

fn fmt_set(q: &Hypercube, s: &LandmarkSet) -> String {
    format!("{{{}}}", s.labels(q).join(","))
}

/// A random verified generator: a uniform subset of a size near
/// `seed_set`, or failing that an automorphic image of `seed_set` with a
/// few extra vertices.
pub fn random_generator<R: Rng>(
    rng: &mut R,
    q: Hypercube,
    kind: GeneratorKind,
    seed_set: &LandmarkSet,
) -> Result<LandmarkSet> {
    let n = q.order() as usize;
    for _ in 0..16 {
        let k = (seed_set.len() + rng.gen_range(0..=2)).min(n);
        let picked = rand::seq::index::sample(rng, n, k).into_vec();
        let s = LandmarkSet::new(picked)?;
        if verify_generator(&q, &s, kind)?.is_resolved() {
            return Ok(s);
        }
    }
    let s = random_superset_image(rng, q, seed_set, 2);
    if !verify_generator(&q, &s, kind)?.is_resolved() {
        return Err(Error::Precondition(format!(
            "automorphic image {} of a {kind} generator does not verify",
            fmt_set(&q, &s)
        )));
    }
    Ok(s)
}

fn exact(
    q: Hypercube,
    kind: GeneratorKind,
    fix_zero: bool,
    opts: &SuiteOptions,
) -> Result<LandmarkSet> {
    let so = SolveOptions::new(kind)
        .fix_zero(fix_zero)
        .workers(opts.workers)
        .time_budget(opts.time_budget);
    let rec = exact_dimension(&q, &so)?;
    if !rec.exact {
        return Err(Error::Precondition(format!(
            "{kind} dimension of {q} not settled within the time budget"
        )));
    }
    Ok(rec.landmarks)
}

/// Every basis of `kind` for `Q_d`, `d <= 5`.
pub fn all_bases(
    d: u32,
    kind: GeneratorKind,
    fix_zero: bool,
    opts: &SuiteOptions,
) -> Result<Vec<LandmarkSet>> {
    require_exhaustive(d)?;
    let q = checked_cube(d)?;
    let k = exact(q, kind, true, opts)?.len();
    enumerate_generators(&q, kind, k, fix_zero, None, opts.workers)
}

/// Random connected bipartite graphs, each with a greedy metric generator
/// (sometimes padded with extra vertices); every one must be an edge
/// generator.
pub fn lemma1_random_graphs(count: u64, max_n: usize, opts: &SuiteOptions) -> Result<CheckReport> {
    let mut report = CheckReport::new("lemma1", None, Some(opts.seed), false);
    let res = run_trials(count as usize, opts.workers, |i| {
        let mut rng = trial_rng(opts.seed, i as u64);
        let host = GenericHost::new(random_bipartite_graph(&mut rng, max_n)?);
        let mut s = greedy_upper_bound(&host, GeneratorKind::Metric)?.landmarks;
        for _ in 0..rng.gen_range(0..=2) {
            s = s.with(rng.gen_range(0..host.vertex_count()));
        }
        let r = check_lemma1(&host, &s, rng.gen())?;
        Ok(match r.counterexamples.into_iter().next() {
            None => Ok(host.vertex_count()),
            Some(c) => Err(format!("graph {} (trial {i}): {c}", host.id())),
        })
    });
    let sizes = absorb(&mut report, res?);
    if let Some(max) = sizes.iter().max() {
        report.notes.push(format!(
            "{} graphs, largest with {max} vertices",
            sizes.len()
        ));
    }
    Ok(report)
}

/// Random metric generators of `Q_d`.
pub fn lemma1_cube(d: u32, opts: &SuiteOptions) -> Result<CheckReport> {
    let q = checked_cube(d)?;
    let seed_set = greedy_upper_bound(&q, GeneratorKind::Metric)?.landmarks;
    let mut report = CheckReport::new("lemma1", Some(d), Some(opts.seed), false);
    let res = run_trials(opts.trials as usize, opts.workers, |i| {
        let mut rng = trial_rng(opts.seed, i as u64);
        let s = random_generator(&mut rng, q, GeneratorKind::Metric, &seed_set)?;
        let r = check_lemma1(&q, &s, rng.gen())?;
        Ok(r.counterexamples.into_iter().next().map_or(Ok(()), Err))
    });
    absorb(&mut report, res?);
    Ok(report)
}

/// Inputs shared by the edge-generator suites: all minimum edge
/// generators (exhaustive mode) followed by `trials` random ones.
struct EdgeInputs {
    q: Hypercube,
    minimum: Vec<LandmarkSet>,
    seed_set: LandmarkSet,
}

impl EdgeInputs {
    fn new(d: u32, opts: &SuiteOptions) -> Result<Self> {
        let q = checked_cube(d)?;
        let minimum = if opts.exhaustive {
            all_bases(d, GeneratorKind::Edge, false, opts)?
        } else {
            Vec::new()
        };
        let seed_set = greedy_upper_bound(&q, GeneratorKind::Edge)?.landmarks;
        Ok(EdgeInputs {
            q,
            minimum,
            seed_set,
        })
    }

    fn count(&self, opts: &SuiteOptions) -> usize {
        self.minimum.len() + opts.trials as usize
    }

    fn get(&self, i: usize, opts: &SuiteOptions) -> Result<LandmarkSet> {
        match self.minimum.get(i) {
            Some(s) => Ok(s.clone()),
            None => {
                let j = (i - self.minimum.len()) as u64;
                random_generator(
                    &mut trial_rng(opts.seed, j),
                    self.q,
                    GeneratorKind::Edge,
                    &self.seed_set,
                )
            }
        }
    }

    fn note(&self, report: &mut CheckReport) {
        if let Some(first) = self.minimum.first() {
            report.notes.push(format!(
                "{} minimum edge generators of size {}",
                self.minimum.len(),
                first.len()
            ));
        }
    }
}

/// Unresolved vertex pairs of edge generators are antipodal, and appear
/// only for even `d`.
pub fn lemma2(d: u32, opts: &SuiteOptions) -> Result<CheckReport> {
    let inputs = EdgeInputs::new(d, opts)?;
    let mut report = CheckReport::new("lemma2", Some(d), Some(opts.seed), opts.exhaustive);
    let res = run_trials(inputs.count(opts), opts.workers, |i| {
        let s = inputs.get(i, opts)?;
        let r = classify_unresolved(d, &s)?;
        Ok(match r.counterexamples.into_iter().next() {
            None => Ok(r.notes.first().is_some_and(|n| !n.starts_with("0 "))),
            Some(c) => Err(c),
        })
    });
    let with_pairs = absorb(&mut report, res?);
    inputs.note(&mut report);
    report.notes.push(format!(
        "{} of {} generators leave vertex pairs unresolved",
        with_pairs.iter().filter(|&&b| b).count(),
        with_pairs.len()
    ));
    Ok(report)
}

/// Adding `s ⊕ α_1` for any member `s` turns an edge generator into a
/// metric generator.
pub fn lemma3(d: u32, opts: &SuiteOptions) -> Result<CheckReport> {
    let inputs = EdgeInputs::new(d, opts)?;
    let mut report = CheckReport::new("lemma3", Some(d), Some(opts.seed), opts.exhaustive);
    let res = run_trials(inputs.count(opts), opts.workers, |i| {
        let s = inputs.get(i, opts)?;
        for m in s.iter() {
            let out = extend_to_metric(d, &s, m)?;
            if out.len() > s.len() + 1 {
                return Ok(Err(format!(
                    "extension of {} grew by more than one",
                    fmt_set(&inputs.q, &s)
                )));
            }
        }
        Ok(Ok(()))
    });
    absorb(&mut report, res?);
    inputs.note(&mut report);
    Ok(report)
}

/// Metric bases to test: all of them for small `d` in exhaustive mode,
/// otherwise random automorphic images of one exact basis.
struct BasisInputs {
    q: Hypercube,
    all: Vec<LandmarkSet>,
    basis: LandmarkSet,
}

impl BasisInputs {
    fn new(d: u32, opts: &SuiteOptions) -> Result<Self> {
        let q = checked_cube(d)?;
        let all = if opts.exhaustive {
            all_bases(d, GeneratorKind::Metric, false, opts)?
        } else {
            Vec::new()
        };
        let basis = match all.first() {
            Some(b) => b.clone(),
            None => exact(q, GeneratorKind::Metric, true, opts)?,
        };
        Ok(BasisInputs { q, all, basis })
    }

    fn count(&self, opts: &SuiteOptions) -> usize {
        self.all.len() + opts.trials as usize
    }

    fn get(&self, i: usize, opts: &SuiteOptions) -> LandmarkSet {
        match self.all.get(i) {
            Some(s) => s.clone(),
            None => {
                let mut rng = trial_rng(opts.seed, (i - self.all.len()) as u64);
                CubeAutomorphism::random(&mut rng, self.q).apply_set(&self.basis)
            }
        }
    }
}

fn antipodal_pair(q: &Hypercube, s: &LandmarkSet) -> Option<(usize, usize)> {
    let full = q.order() as usize - 1;
    s.iter()
        .find(|&x| s.contains(x ^ full))
        .map(|x| (x, x ^ full))
}

/// Antipodal swaps preserve metric bases, and no basis holds an antipodal
/// pair.
pub fn lemma4(d: u32, opts: &SuiteOptions) -> Result<CheckReport> {
    let inputs = BasisInputs::new(d, opts)?;
    let q = inputs.q;
    let mut report = CheckReport::new("lemma4", Some(d), Some(opts.seed), opts.exhaustive);
    let res = run_trials(inputs.count(opts), opts.workers, |i| {
        let s = inputs.get(i, opts);
        if let Some((a, b)) = antipodal_pair(&q, &s) {
            return Ok(Err(format!(
                "basis {} contains antipodal vertices {} and {}",
                fmt_set(&q, &s),
                q.vertex_label(a),
                q.vertex_label(b)
            )));
        }
        for m in s.iter() {
            let out = antipodal_swap(d, &s, m)?;
            let far = m ^ (q.order() as usize - 1);
            if antipodal_swap(d, &out, far)? != s {
                return Ok(Err(format!(
                    "double swap of {} at {} is not the identity",
                    fmt_set(&q, &s),
                    q.vertex_label(m)
                )));
            }
        }
        Ok(Ok(()))
    });
    absorb(&mut report, res?);
    report
        .notes
        .push(format!("basis size {}", inputs.basis.len()));
    Ok(report)
}

/// Metric generators have at most one constant column. Exercised on
/// bases and on random generators.
pub fn lemma5(d: u32, opts: &SuiteOptions) -> Result<CheckReport> {
    let inputs = BasisInputs::new(d, opts)?;
    let q = inputs.q;
    let mut report = CheckReport::new("lemma5", Some(d), Some(opts.seed), opts.exhaustive);
    let n_bases = inputs.count(opts);
    let res = run_trials(n_bases + opts.trials as usize, opts.workers, |i| {
        let s = if i < n_bases {
            inputs.get(i, opts)
        } else {
            // separate streams from the basis images
            let mut rng = trial_rng(opts.seed ^ 0x5a5a, (i - n_bases) as u64);
            random_generator(&mut rng, q, GeneratorKind::Metric, &inputs.basis)?
        };
        Ok(Ok(constant_column_audit(d, &s)?.len()))
    });
    let cols = absorb(&mut report, res?);
    let with_col = cols.iter().filter(|&&c| c == 1).count();
    report.notes.push(format!(
        "{with_col} of {} sets have one constant column",
        cols.len()
    ));
    Ok(report)
}

/// The metric-to-mixed construction on bases containing the all-zeros
/// vertex: all of them in exhaustive mode, else the first `trials` found
/// by the solver.
pub fn theorem2(d: u32, opts: &SuiteOptions) -> Result<CheckReport> {
    let q = checked_cube(d)?;
    if d < 3 {
        return Err(Error::InvalidArgument(format!(
            "theorem2 needs d >= 3, got {d}"
        )));
    }
    let bases = if opts.exhaustive {
        all_bases(d, GeneratorKind::Metric, true, opts)?
    } else {
        let k = exact(q, GeneratorKind::Metric, true, opts)?.len();
        enumerate_generators(
            &q,
            GeneratorKind::Metric,
            k,
            true,
            Some(opts.trials as usize),
            opts.workers,
        )?
    };
    theorem2_on(d, &bases, opts)
}

/// [`theorem2`] on explicit bases.
pub fn theorem2_on(d: u32, bases: &[LandmarkSet], opts: &SuiteOptions) -> Result<CheckReport> {
    let q = checked_cube(d)?;
    let mut report = CheckReport::new("theorem2", Some(d), None, opts.exhaustive);
    let res = run_trials(bases.len(), opts.workers, |i| {
        let s = &bases[i];
        let out = metric_to_mixed(d, s)?;
        if out.set.len() != s.len() {
            return Ok(Err(format!(
                "construction on {} changed the size to {}",
                fmt_set(&q, s),
                out.set.len()
            )));
        }
        if let Some(w) = verify_generator(&q, &out.set, GeneratorKind::Mixed)?.witness() {
            let r = w.record(&q);
            return Ok(Err(format!(
                "construction on {} returned {} which leaves {} ~ {}",
                fmt_set(&q, s),
                fmt_set(&q, &out.set),
                r.a,
                r.b
            )));
        }
        Ok(Ok((
            out.path.to_string(),
            fmt_set(&q, s),
            fmt_set(&q, &out.set),
        )))
    });
    let outcomes = absorb(&mut report, res?);
    if let Some((path, from, to)) = outcomes.first() {
        report.notes.push(format!("{from} -> {to} via {path}"));
    }
    let mut paths: BTreeMap<&str, usize> = BTreeMap::new();
    for (p, _, _) in &outcomes {
        *paths.entry(p.as_str()).or_default() += 1;
    }
    for (p, c) in paths {
        report.notes.push(format!("{p}: {c} bases"));
    }
    Ok(report)
}

fn table_options(opts: &SuiteOptions) -> TableOptions {
    TableOptions {
        workers: opts.workers,
        time_budget: opts.time_budget,
        ..TableOptions::default()
    }
}

/// The sandwich bounds between edge and metric dimension, one report per
/// `d`, from exact values.
pub fn theorem1(d_range: RangeInclusive<u32>, opts: &SuiteOptions) -> Result<Vec<CheckReport>> {
    sweep_reports(d_range, opts, Statement::Theorem1)
}

/// Whether the edge and metric dimension agree, per `d`. Informational:
/// never reports counterexamples.
pub fn conjecture(d_range: RangeInclusive<u32>, opts: &SuiteOptions) -> Result<Vec<CheckReport>> {
    sweep_reports(d_range, opts, Statement::Conjecture)
}

fn sweep_reports(
    d_range: RangeInclusive<u32>,
    opts: &SuiteOptions,
    st: Statement,
) -> Result<Vec<CheckReport>> {
    for d in d_range.clone() {
        checked_cube(d)?;
    }
    let kinds = [GeneratorKind::Metric, GeneratorKind::Edge];
    let table = dimension_table(d_range, &kinds, &table_options(opts))?;
    let mut out = Vec::new();
    for row in &table.rows {
        let mut report = CheckReport::new(st.as_str(), Some(row.d), None, true);
        report.trials = 1;
        for line in table.consistency.iter().filter(|l| l.d == row.d) {
            match (st, line.check, line.status) {
                (Statement::Conjecture, "conjecture", _) => {
                    report.notes.push(format!("status: {}", line.detail))
                }
                (Statement::Conjecture, _, _) => {}
                (_, "conjecture", _) => {}
                (_, check, CheckStatus::Fail) => report
                    .counterexamples
                    .push(format!("{check}: {}", line.detail)),
                (_, check, status) => report
                    .notes
                    .push(format!("{check} {status:?}: {}", line.detail)),
            }
        }
        let v = |k| {
            row.get(k).map(|r| {
                if r.exact {
                    r.value.to_string()
                } else {
                    format!("<={}", r.value)
                }
            })
        };
        report.notes.push(format!(
            "dim={} edim={}",
            v(GeneratorKind::Metric).unwrap_or_default(),
            v(GeneratorKind::Edge).unwrap_or_default()
        ));
        out.push(report);
    }
    Ok(out)
}

/// Runs one statement (or all, for `None`) over `d_range`.
///
/// Without a range, `lemma1` runs on random bipartite graphs and the other
/// statements use `3..=5`. With `all`, statements that do not apply to
/// some `d` (the construction for `d < 3`) skip it.
pub fn run_statement(
    statement: Option<Statement>,
    d_range: Option<RangeInclusive<u32>>,
    opts: &SuiteOptions,
) -> Result<Vec<CheckReport>> {
    let selected: Vec<Statement> = match statement {
        Some(s) => vec![s],
        None => Statement::ALL.to_vec(),
    };
    if let Some(r) = &d_range {
        if r.is_empty() {
            return Err(Error::InvalidArgument("empty dimension range".into()));
        }
        for d in r.clone() {
            checked_cube(d)?;
            if opts.exhaustive {
                require_exhaustive(d)?;
            }
        }
    }
    let mut reports = Vec::new();
    for st in selected {
        let range = d_range.clone().unwrap_or(DEFAULT_RANGE);
        match st {
            Statement::Lemma1 => {
                if d_range.is_none() || statement.is_none() {
                    reports.push(lemma1_random_graphs(
                        RANDOM_GRAPH_COUNT,
                        RANDOM_GRAPH_MAX_VERTICES,
                        opts,
                    )?);
                }
                if d_range.is_some() {
                    for d in range {
                        reports.push(lemma1_cube(d, opts)?);
                    }
                }
            }
            Statement::Lemma2 | Statement::Lemma3 | Statement::Lemma4 | Statement::Lemma5 => {
                let f = match st {
                    Statement::Lemma2 => lemma2,
                    Statement::Lemma3 => lemma3,
                    Statement::Lemma4 => lemma4,
                    _ => lemma5,
                };
                for d in range {
                    reports.push(f(d, opts)?);
                }
            }
            Statement::Theorem2 => {
                if statement.is_some() && *range.start() < 3 {
                    return Err(Error::InvalidArgument(format!(
                        "theorem2 needs d >= 3, got {}",
                        range.start()
                    )));
                }
                for d in range.filter(|&d| d >= 3) {
                    reports.push(theorem2(d, opts)?);
                }
            }
            Statement::Theorem1 => reports.extend(theorem1(range, opts)?),
            Statement::Conjecture => reports.extend(conjecture(range, opts)?),
        }
        if reports.iter().any(|r| !r.passed()) {
            break;
        }
    }
    Ok(reports)
}
