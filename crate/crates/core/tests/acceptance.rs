//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Run with `cargo test --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use metdim::graph::{all_pairs_distances, edge_vertex_distance, GraphEdge};
use metdim::host::hypercube_graph;
use metdim::hypercube::{edge_distance_fast, enumerate_edges};
use metdim::lemma_lab::suites::{
    all_bases, lemma1_random_graphs, lemma2, lemma3, theorem2, theorem2_on, SuiteOptions,
};
use metdim::lemma_lab::{
    antipodal_swap, constant_column_audit, theorem_sweep, CheckReport, DEFAULT_SEED,
};
use metdim::resolvers::verify_generator;
use metdim::solvers::{
    dimension_table, exact_dimension, CheckStatus, DimensionRecord, SolveOptions, TableOptions,
};
use metdim::{BitVertex, GeneratorKind, Host, Hypercube, LandmarkSet};

use GeneratorKind::{Edge, Metric, Mixed};

struct Outcome {
    pass: bool,
    detail: String,
    /// Everything the criterion computed, timing removed, for the
    /// determinism comparison.
    json: Value,
}

type Criterion = fn(&mut Context) -> Outcome;

struct Context {
    workers: usize,
    /// Exact metric bases found by criteria 1 and 2, for criterion 6.
    bases: Vec<(u32, LandmarkSet)>,
}

fn cube(d: u32) -> Hypercube {
    Hypercube::new(d).unwrap()
}

fn solve(ctx: &Context, d: u32, kind: GeneratorKind, fix_zero: bool) -> DimensionRecord {
    let opts = SolveOptions::new(kind)
        .fix_zero(fix_zero)
        .workers(ctx.workers);
    exact_dimension(&cube(d), &opts).unwrap()
}

fn suite(ctx: &Context, trials: u64, exhaustive: bool) -> SuiteOptions {
    SuiteOptions {
        trials,
        seed: DEFAULT_SEED,
        workers: ctx.workers,
        exhaustive,
        ..SuiteOptions::default()
    }
}

fn reports_json(rs: &[CheckReport]) -> Value {
    serde_json::to_value(rs).unwrap()
}

fn summarize(rs: &[CheckReport]) -> (bool, String) {
    let pass = rs.iter().all(CheckReport::passed);
    let trials: u64 = rs.iter().map(|r| r.trials).sum();
    let first = rs.iter().flat_map(|r| &r.counterexamples).next();
    let detail = match first {
        None => format!("{trials} trials, 0 counterexamples"),
        Some(c) => format!("counterexample: {c}"),
    };
    (pass, detail)
}

fn reference_values(ctx: &mut Context) -> Outcome {
    let expected = [
        (3, Metric, 3),
        (4, Metric, 4),
        (4, Edge, 3),
        (1, Mixed, 2),
        (2, Mixed, 3),
        (3, Mixed, 3),
        (4, Mixed, 4),
    ];
    let started = Instant::now();
    let mut pass = true;
    let mut got = Vec::new();
    let mut records = Vec::new();
    for (d, kind, want) in expected {
        let rec = solve(ctx, d, kind, true);
        pass &= rec.exact && rec.value == want;
        got.push(format!("{}(Q{d})={}", short(kind), rec.value));
        if kind == Metric {
            ctx.bases.push((d, rec.landmarks.clone()));
        }
        records.push(rec.without_timing());
    }
    let elapsed = started.elapsed();
    pass &= elapsed < Duration::from_secs(10);
    Outcome {
        pass,
        detail: format!("{} in {:.2}s", got.join(" "), elapsed.as_secs_f64()),
        json: serde_json::to_value(records).unwrap(),
    }
}

fn short(kind: GeneratorKind) -> &'static str {
    match kind {
        Metric => "dim",
        Edge => "edim",
        Mixed => "mdim",
    }
}

fn derived_values(ctx: &mut Context) -> Outcome {
    let t = Instant::now();
    let q5_reduced = solve(ctx, 5, Metric, true);
    let t5 = t.elapsed();
    let q5_full = solve(ctx, 5, Metric, false);
    let t5_full = t.elapsed() - t5;
    let t = Instant::now();
    let q6 = solve(ctx, 6, Metric, true);
    let t6 = t.elapsed();
    for (d, rec) in [(5, &q5_reduced), (5, &q5_full), (6, &q6)] {
        ctx.bases.push((d, rec.landmarks.clone()));
    }

    let opts = TableOptions {
        workers: ctx.workers,
        ..TableOptions::default()
    };
    let table = dimension_table(3..=6, &GeneratorKind::ALL, &opts).unwrap();
    for row in &table.rows {
        ctx.bases
            .push((row.d, row.metric.as_ref().unwrap().landmarks.clone()));
    }
    let corollary_ok = (3..=6).all(|d| {
        table
            .consistency
            .iter()
            .any(|l| l.d == d && l.check == "corollary" && l.status == CheckStatus::Pass)
    });
    let odd_equal = table
        .rows
        .iter()
        .filter(|r| r.d == 3 || r.d == 5)
        .all(|r| r.metric.as_ref().unwrap().value == r.edge.as_ref().unwrap().value);
    let exact = q5_reduced.exact && q5_full.exact && q6.exact && table.records().all(|r| r.exact);
    let pass = exact
        && q5_reduced.value == q5_full.value
        && corollary_ok
        && odd_equal
        && table.all_pass()
        && t5 < Duration::from_secs(60)
        && t5_full < Duration::from_secs(60)
        && t6 < Duration::from_secs(600);
    let rows: Vec<String> = table
        .rows
        .iter()
        .map(|r| {
            format!(
                "Q{}=({},{},{})",
                r.d,
                r.metric.as_ref().unwrap().value,
                r.edge.as_ref().unwrap().value,
                r.mixed.as_ref().unwrap().value
            )
        })
        .collect();
    Outcome {
        pass,
        detail: format!(
            "dim(Q5)={} reduced / {} full ({:.2}s / {:.2}s), dim(Q6)={} ({:.2}s); (dim,edim,mdim): {}",
            q5_reduced.value,
            q5_full.value,
            t5.as_secs_f64(),
            t5_full.as_secs_f64(),
            q6.value,
            t6.as_secs_f64(),
            rows.join(" ")
        ),
        json: json!({
            "q5_reduced": q5_reduced.without_timing(),
            "q5_full": q5_full.without_timing(),
            "q6": q6.without_timing(),
            "table": table.without_timing(),
        }),
    }
}

fn lemma1_graphs(ctx: &mut Context) -> Outcome {
    let r = lemma1_random_graphs(500, 40, &suite(ctx, 0, false)).unwrap();
    let (pass, detail) = summarize(std::slice::from_ref(&r));
    Outcome {
        pass: pass && r.trials == 500,
        detail: format!("500 random bipartite graphs (n <= 40): {detail}"),
        json: reports_json(&[r]),
    }
}

fn lemma2_suite(ctx: &mut Context) -> Outcome {
    let exhaustive = lemma2(4, &suite(ctx, 0, true)).unwrap();
    let mut rs = vec![exhaustive];
    for d in [3, 5] {
        rs.push(lemma2(d, &suite(ctx, 1000, false)).unwrap());
    }
    let (pass, detail) = summarize(&rs);
    // odd d: no witnesses at all among the random generators
    let none_odd = rs[1..]
        .iter()
        .all(|r| r.notes.iter().any(|n| n.starts_with("0 of 1000 ")));
    Outcome {
        pass: pass && none_odd && rs[0].trials > 0,
        detail: format!(
            "Q4 all {} minimum edge generators + 1000 random for d=3,5: {detail}",
            rs[0].trials
        ),
        json: reports_json(&rs),
    }
}

fn lemma3_suite(ctx: &mut Context) -> Outcome {
    let mut rs = vec![lemma3(4, &suite(ctx, 0, true)).unwrap()];
    for d in [3, 5, 6, 7, 8] {
        rs.push(lemma3(d, &suite(ctx, 1000, false)).unwrap());
    }
    let (pass, detail) = summarize(&rs);
    Outcome {
        pass,
        detail: format!("criterion 4 inputs + 1000 random for d=6,7,8: {detail}"),
        json: reports_json(&rs),
    }
}

fn lemma4_lemma5(ctx: &mut Context) -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut cols = Vec::new();
    for (d, s) in &ctx.bases {
        let (d, q) = (*d, cube(*d));
        let full = q.order() as usize - 1;
        if s.iter().any(|x| s.contains(x ^ full)) {
            failures.push(format!(
                "Q{d} basis {:?} holds an antipodal pair",
                s.labels(&q)
            ));
        }
        for m in s.iter() {
            match antipodal_swap(d, s, m) {
                Ok(out)
                    if out.len() == s.len()
                        && verify_generator(&q, &out, Metric).unwrap().is_resolved() => {}
                other => failures.push(format!(
                    "Q{d} swap of {} in {:?}: {other:?}",
                    q.vertex_label(m),
                    s.labels(&q)
                )),
            }
        }
        match constant_column_audit(d, s) {
            Ok(c) => cols.push(c.len()),
            Err(e) => failures.push(e.to_string()),
        }
        checked += 1;
    }
    Outcome {
        pass: failures.is_empty() && checked > 0,
        detail: match failures.first() {
            None => format!(
                "{checked} exact bases: swaps preserve, <= 1 constant column, no antipodal pairs"
            ),
            Some(f) => f.clone(),
        },
        json: json!({ "bases": checked, "constant_columns": cols, "failures": failures }),
    }
}

fn theorem2_suite(ctx: &mut Context) -> Outcome {
    let q5 = all_bases(5, Metric, true, &suite(ctx, 0, true)).unwrap();
    let dim5 = q5[0].len();
    let r5 = theorem2_on(5, &q5, &suite(ctx, 0, true)).unwrap();
    let r6 = theorem2(6, &suite(ctx, 50, false)).unwrap();
    let rs = [r5, r6];
    let (pass, detail) = summarize(&rs);
    Outcome {
        pass: pass && dim5 == 4 && rs[0].trials == q5.len() as u64 && rs[1].trials == 50,
        detail: format!(
            "{} Q5 bases containing 0 (size {dim5}) + 50 Q6 bases: {detail}",
            q5.len()
        ),
        json: reports_json(&rs),
    }
}

fn oracle_equivalence(_: &mut Context) -> Outcome {
    let mut pairs = 0u64;
    let mut edge_pairs = 0u64;
    let mut bad = None;
    for d in 1..=8 {
        let g = hypercube_graph(d).unwrap();
        let dm = all_pairs_distances(&g);
        let q = cube(d);
        let n = q.order() as usize;
        for u in 0..n {
            for v in 0..n {
                pairs += 1;
                if dm.get(u, v) != (u ^ v).count_ones() {
                    bad.get_or_insert(format!("Q{d}: d({u},{v})"));
                }
            }
        }
        for e in enumerate_edges(d).unwrap() {
            let (a, b) = e.endpoints();
            let ge = GraphEdge::new(a.bits() as usize, b.bits() as usize);
            for x in 0..n {
                edge_pairs += 1;
                let fast = edge_distance_fast(e, BitVertex::new(x as u64, d).unwrap()).unwrap();
                if edge_vertex_distance(&dm, ge, x).unwrap() != fast {
                    bad.get_or_insert(format!("Q{d}: d({e},{x})"));
                }
            }
        }
    }
    Outcome {
        pass: bad.is_none(),
        detail: bad.unwrap_or_else(|| {
            format!("d <= 8: {pairs} vertex pairs, {edge_pairs} edge-vertex pairs agree")
        }),
        json: json!({ "pairs": pairs, "edge_pairs": edge_pairs }),
    }
}

fn asymptotic_ratio(ctx: &mut Context) -> Outcome {
    let opts = TableOptions {
        workers: ctx.workers,
        ..TableOptions::default()
    };
    let (report, table) = theorem_sweep(2..=6, &opts).unwrap();
    let ratios: Vec<String> = table
        .rows
        .iter()
        .map(|r| format!("d={}:{:.3}", r.d, r.asymptotic_ratio(Metric).unwrap()))
        .collect();
    Outcome {
        pass: true,
        detail: format!(
            "informational only, the limit is out of reach at desk scale; dim/(2d/log2 d): {}",
            ratios.join(" ")
        ),
        json: json!({ "report": report, "table": table.without_timing() }),
    }
}

const CRITERIA: [(&str, Criterion); 9] = [
    ("reference values", reference_values),
    ("derived values", derived_values),
    ("lemma1 suite", lemma1_graphs),
    ("lemma2 suite", lemma2_suite),
    ("lemma3 suite", lemma3_suite),
    ("lemma4 + lemma5 suites", lemma4_lemma5),
    ("metric-to-mixed construction", theorem2_suite),
    ("oracle equivalence", oracle_equivalence),
    ("asymptotic ratio", asymptotic_ratio),
];

/// Criteria 1-7 with the given worker count; their JSON, concatenated.
fn rerun(workers: usize) -> String {
    let mut ctx = Context {
        workers,
        bases: Vec::new(),
    };
    let values: Vec<Value> = CRITERIA[..7]
        .iter()
        .map(|(_, f)| f(&mut ctx).json)
        .collect();
    serde_json::to_string(&values).unwrap()
}

fn main() -> ExitCode {
    let mut ctx = Context {
        workers: 1,
        bases: Vec::new(),
    };
    let mut all = true;
    let mut first_json = Vec::new();
    for (i, (name, f)) in CRITERIA.iter().enumerate() {
        let started = Instant::now();
        let o = f(&mut ctx);
        if i < 7 {
            first_json.push(o.json.clone());
        }
        all &= o.pass;
        println!(
            "{} criterion {} ({name}): {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            started.elapsed().as_secs_f64()
        );
    }

    let started = Instant::now();
    let baseline = serde_json::to_string(&first_json).unwrap();
    let mismatched: Vec<usize> = [4, 8]
        .into_iter()
        .filter(|&w| rerun(w) != baseline)
        .collect();
    let pass = mismatched.is_empty();
    all &= pass;
    println!(
        "{} criterion 10 (determinism): criteria 1-7 JSON with 1, 4, 8 workers {} ({} bytes) [{:.1}s]",
        if pass { "PASS" } else { "FAIL" },
        if pass { "identical".to_string() } else { format!("differs for {mismatched:?} workers") },
        baseline.len(),
        started.elapsed().as_secs_f64()
    );

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
