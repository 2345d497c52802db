//! Executable forms of the structural results on `Q_d`: the set
//! transformations they describe, and checkers that must never find a
//! counterexample.
//!
//! Operations that produce a set return [`Error::Counterexample`] when the
//! statement they embody fails on the given input; checkers that produce a
//! [`CheckReport`] list the failure in `counterexamples` instead.

pub mod random;
pub mod suites;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::host::{Element, Host};
use crate::hypercube::{antipode, BitVertex, Hypercube};
use crate::resolvers::{all_witnesses, verify_generator, GeneratorKind, LandmarkSet, Verdict};
use crate::solvers::{dimension_table, CheckStatus, DimensionTable, TableOptions};

pub const DEFAULT_SEED: u64 = 0x6d65_7464_696d;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub statement: String,
    pub d: Option<u32>,
    pub trials: u64,
    pub exhaustive: bool,
    pub seed: Option<u64>,
    pub counterexamples: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(statement: &str, d: Option<u32>, seed: Option<u64>, exhaustive: bool) -> Self {
        CheckReport {
            statement: statement.to_string(),
            d,
            trials: 0,
            exhaustive,
            seed,
            counterexamples: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

fn cube(d: u32) -> Result<Hypercube> {
    Hypercube::new(d)
}

fn fmt_set(q: &Hypercube, s: &LandmarkSet) -> String {
    format!("{{{}}}", s.labels(q).join(","))
}

fn require(host: &impl Host, s: &LandmarkSet, kind: GeneratorKind) -> Result<()> {
    match verify_generator(host, s, kind)? {
        Verdict::Resolved => Ok(()),
        Verdict::Unresolved(w) => {
            let r = w.record(host);
            Err(Error::Precondition(format!(
                "not a {kind} generator: {} and {} share signature {:?}",
                r.a, r.b, r.signature.0
            )))
        }
    }
}

fn counterexample(statement: &str, detail: String) -> Error {
    Error::Counterexample {
        statement: statement.to_string(),
        detail,
    }
}

/// Endpoints `u ∈ e1`, `v ∈ e2`, distinct and at even distance, chosen as
/// in the bipartite edge argument.
pub fn even_distance_representatives<H: Host + ?Sized>(
    host: &H,
    e1: usize,
    e2: usize,
) -> (usize, usize) {
    let (x1, y1) = host.edge_endpoints(e1);
    let (x2, y2) = host.edge_endpoints(e2);
    let other = |e: (usize, usize), w: usize| if e.0 == w { e.1 } else { e.0 };
    for shared in [x1, y1] {
        if shared == x2 || shared == y2 {
            return (other((x1, y1), shared), other((x2, y2), shared));
        }
    }
    let v = if host.distance(x1, x2) % 2 == 0 {
        x2
    } else {
        y2
    };
    (x1, v)
}

/// Every metric generator of a bipartite graph is an edge generator.
///
/// Besides the edge verification, replays the distinguishing argument on
/// one random pair of edges: the landmark separating the even-distance
/// representatives must separate them by at least 2 and separate the edges.
pub fn check_lemma1<H: Host + ?Sized>(host: &H, s: &LandmarkSet, seed: u64) -> Result<CheckReport> {
    use rand::Rng;

    if !host.is_bipartite() {
        return Err(Error::NotBipartite);
    }
    match verify_generator(host, s, GeneratorKind::Metric)? {
        Verdict::Resolved => {}
        Verdict::Unresolved(_) => return Err(Error::Precondition("not a metric generator".into())),
    }
    let d = host.as_hypercube().map(|q| q.dimension());
    let mut report = CheckReport::new("lemma1", d, Some(seed), false);
    report.trials = 1;
    if let Verdict::Unresolved(w) = verify_generator(host, s, GeneratorKind::Edge)? {
        let r = w.record(host);
        report.counterexamples.push(format!(
            "metric generator {:?} of {} leaves edges {} and {} unresolved",
            s.labels(host),
            host.id(),
            r.a,
            r.b
        ));
        return Ok(report);
    }
    let m = host.edge_count();
    if m >= 2 {
        let mut rng = random::trial_rng(seed, 0);
        let e1 = rng.gen_range(0..m);
        let e2 = (e1 + rng.gen_range(1..m)) % m;
        let (u, v) = even_distance_representatives(host, e1, e2);
        let ok_rep = u != v && host.distance(u, v) % 2 == 0;
        let sep = s
            .iter()
            .find(|&x| host.distance(x, u) != host.distance(x, v));
        let detail = match sep {
            Some(x) if ok_rep => {
                let (du, dv) = (host.distance(x, u), host.distance(x, v));
                let (de1, de2) = (host.edge_distance(e1, x), host.edge_distance(e2, x));
                let ok = du.abs_diff(dv) >= 2 && if du < dv { de1 < de2 } else { de2 < de1 };
                let line = format!(
                    "replay e1={} e2={} u={} v={} s={} d(s,u)={du} d(s,v)={dv} d(e1,s)={de1} d(e2,s)={de2}",
                    host.edge_label(e1),
                    host.edge_label(e2),
                    host.vertex_label(u),
                    host.vertex_label(v),
                    host.vertex_label(x)
                );
                if ok {
                    report.notes.push(line);
                    None
                } else {
                    Some(line)
                }
            }
            _ => Some(format!(
                "representative selection failed for edges {} and {}",
                host.edge_label(e1),
                host.edge_label(e2)
            )),
        };
        if let Some(detail) = detail {
            report.counterexamples.push(detail);
        }
    }
    Ok(report)
}

/// Vertex pairs left unresolved by an edge generator of `Q_d` must be
/// antipodal, exist only for even `d`, and sit at distance `d/2` from every
/// landmark.
pub fn classify_unresolved(d: u32, s: &LandmarkSet) -> Result<CheckReport> {
    let q = cube(d)?;
    require(&q, s, GeneratorKind::Edge)?;
    let mut report = CheckReport::new("lemma2", Some(d), None, false);
    report.trials = 1;
    let witnesses = all_witnesses(&q, s, GeneratorKind::Metric)?;
    for w in &witnesses {
        let (Element::Vertex(u), Element::Vertex(v)) = (w.a, w.b) else {
            unreachable!("metric witnesses are vertex pairs")
        };
        let (lu, lv) = (q.vertex_label(u), q.vertex_label(v));
        if q.distance(u, v) != d {
            report.counterexamples.push(format!(
                "{}: unresolved pair {lu},{lv} at distance {} is not antipodal",
                fmt_set(&q, s),
                q.distance(u, v)
            ));
        }
        if d % 2 == 1 {
            report.counterexamples.push(format!(
                "{}: unresolved pair {lu},{lv} in odd dimension",
                fmt_set(&q, s)
            ));
        }
        for x in s.iter() {
            if q.distance(u, x) * 2 != d || q.distance(v, x) * 2 != d {
                report.counterexamples.push(format!(
                    "{}: landmark {} not at distance d/2 from {lu},{lv}",
                    fmt_set(&q, s),
                    q.vertex_label(x)
                ));
            }
        }
        if !report.counterexamples.is_empty() {
            break;
        }
    }
    report
        .notes
        .push(format!("{} unresolved vertex pairs", witnesses.len()));
    Ok(report)
}

/// `S ∪ {s ⊕ α_1}` for an edge generator `S` of `Q_d`, checked to be a
/// metric generator; each formerly unresolved pair must now differ by
/// exactly 2 at the new landmark.
pub fn extend_to_metric(d: u32, s: &LandmarkSet, member: usize) -> Result<LandmarkSet> {
    let q = cube(d)?;
    if !s.contains(member) {
        return Err(Error::NotAMember(q.vertex_label(member)));
    }
    require(&q, s, GeneratorKind::Edge)?;
    let added = member ^ 1;
    let before = all_witnesses(&q, s, GeneratorKind::Metric)?;
    let out = s.with(added);
    if let Verdict::Unresolved(w) = verify_generator(&q, &out, GeneratorKind::Metric)? {
        let r = w.record(&q);
        return Err(counterexample(
            "lemma3",
            format!(
                "{} is not a metric generator ({} ~ {})",
                fmt_set(&q, &out),
                r.a,
                r.b
            ),
        ));
    }
    for w in &before {
        let (Element::Vertex(u), Element::Vertex(v)) = (w.a, w.b) else {
            unreachable!()
        };
        let gap = q.distance(u, added).abs_diff(q.distance(v, added));
        if gap != 2 {
            return Err(counterexample(
                "lemma3",
                format!(
                    "new landmark {} separates former pair {},{} by {gap}, not 2",
                    q.vertex_label(added),
                    q.vertex_label(u),
                    q.vertex_label(v)
                ),
            ));
        }
    }
    Ok(out)
}

/// Replaces `member` by its antipode; a metric generator stays one.
pub fn antipodal_swap(d: u32, s: &LandmarkSet, member: usize) -> Result<LandmarkSet> {
    let q = cube(d)?;
    if !s.contains(member) {
        return Err(Error::NotAMember(q.vertex_label(member)));
    }
    require(&q, s, GeneratorKind::Metric)?;
    let far = antipode(q.vertex(member as u64)?).bits() as usize;
    if s.contains(far) {
        return Err(Error::Precondition(format!(
            "{} already contains the antipode of {}; swapping would shrink it",
            fmt_set(&q, s),
            q.vertex_label(member)
        )));
    }
    let out = LandmarkSet::new(
        s.iter()
            .map(|x| if x == member { far } else { x })
            .collect(),
    )?;
    if !verify_generator(&q, &out, GeneratorKind::Metric)?.is_resolved() || out.len() != s.len() {
        return Err(counterexample(
            "lemma4",
            format!(
                "swapping {} in {} gives {} which is not a metric generator",
                q.vertex_label(member),
                fmt_set(&q, s),
                fmt_set(&q, &out)
            ),
        ));
    }
    Ok(out)
}

/// Coordinates (0-based) on which all members of `s` agree.
pub fn constant_columns(d: u32, s: &LandmarkSet) -> Vec<u32> {
    let Some(first) = s.iter().next() else {
        return (0..d).collect();
    };
    let differ = s.iter().fold(0usize, |acc, x| acc | (x ^ first));
    (0..d).filter(|&i| differ >> i & 1 == 0).collect()
}

/// For constant columns `i` and `j` of `s`, the two vertices that differ
/// only there and that no member of `s` separates. With zero columns they
/// are the unit vectors at `i` and at `j`.
pub fn confounded_pair(d: u32, s: &LandmarkSet, i: u32, j: u32) -> Result<(BitVertex, BitVertex)> {
    let cols = constant_columns(d, s);
    if i == j || !cols.contains(&i) || !cols.contains(&j) {
        return Err(Error::Precondition(format!(
            "coordinates {} and {} are not two constant columns",
            i + 1,
            j + 1
        )));
    }
    let first = s.iter().next().ok_or(Error::EmptyLandmarks)?;
    let a = (first >> i & 1) as u64;
    let b = (first >> j & 1) as u64;
    let x = ((1 - a) << i) | (b << j);
    let y = (a << i) | ((1 - b) << j);
    Ok((BitVertex::new(x, d)?, BitVertex::new(y, d)?))
}

/// Constant columns of a metric generator; at most one may exist.
pub fn constant_column_audit(d: u32, s: &LandmarkSet) -> Result<Vec<u32>> {
    let q = cube(d)?;
    require(&q, s, GeneratorKind::Metric)?;
    let cols = constant_columns(d, s);
    if cols.len() >= 2 {
        let (x, y) = confounded_pair(d, s, cols[0], cols[1])?;
        return Err(counterexample(
            "lemma5",
            format!(
                "metric generator {} has constant columns {:?}; {x} and {y} are unresolved",
                fmt_set(&q, s),
                cols.iter().map(|c| c + 1).collect::<Vec<_>>()
            ),
        ));
    }
    Ok(cols)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstructionPath {
    /// The fixed mixed bases for `Q_3` and `Q_4`.
    ExplicitBasis,
    /// The normalized set had no constant column.
    AlreadyMixed,
    /// The `n`-th antipodal replacement set (1..=4).
    Replacement(u8),
}

impl std::fmt::Display for ConstructionPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConstructionPath::ExplicitBasis => f.write_str("explicit-basis"),
            ConstructionPath::AlreadyMixed => f.write_str("already-mixed"),
            ConstructionPath::Replacement(n) => write!(f, "replacement-{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedConstruction {
    pub set: LandmarkSet,
    pub path: ConstructionPath,
    /// The member XORed into every landmark to bring in the all-zeros vertex.
    pub translation: usize,
}

fn explicit_mixed_basis(q: &Hypercube) -> Option<LandmarkSet> {
    let labels: &[&str] = match q.dimension() {
        3 => &["111", "010", "001"],
        4 => &["1111", "0100", "0010", "0001"],
        _ => return None,
    };
    LandmarkSet::parse(q, labels).ok()
}

fn replace(s: &LandmarkSet, members: &[usize], mask: usize) -> LandmarkSet {
    LandmarkSet::new(
        s.iter()
            .map(|x| if members.contains(&x) { x ^ mask } else { x })
            .collect(),
    )
    .expect("no antipodal pairs in a set with a zero column")
    .sorted()
}

/// Turns a metric basis of `Q_d` (`d >= 3`) into a mixed generator of the
/// same size.
///
/// For `d >= 5` the basis is translated to contain the all-zeros vertex;
/// if it then has no constant column it is returned as is, otherwise the
/// first of four antipodal replacement sets that is a mixed generator is
/// returned.
pub fn metric_to_mixed(d: u32, s: &LandmarkSet) -> Result<MixedConstruction> {
    const STMT: &str = "theorem2";
    if d < 3 {
        return Err(Error::Precondition(format!(
            "Q_{d}: construction needs d >= 3"
        )));
    }
    let q = cube(d)?;
    require(&q, s, GeneratorKind::Metric)?;

    if let Some(basis) = explicit_mixed_basis(&q) {
        if s.len() != basis.len() {
            return Err(Error::Precondition(format!(
                "{} has {} members but dim(Q_{d}) = {}",
                fmt_set(&q, s),
                s.len(),
                basis.len()
            )));
        }
        if !verify_generator(&q, &basis, GeneratorKind::Mixed)?.is_resolved() {
            return Err(counterexample(
                STMT,
                format!("{} is not mixed", fmt_set(&q, &basis)),
            ));
        }
        return Ok(MixedConstruction {
            set: basis,
            path: ConstructionPath::ExplicitBasis,
            translation: 0,
        });
    }

    if s.len() < 4 {
        return Err(Error::Precondition(format!(
            "Q_{d} basis needs at least 4 members, got {}",
            s.len()
        )));
    }
    let shift = s.iter().min().expect("nonempty");
    let t = LandmarkSet::new(s.iter().map(|x| x ^ shift).collect())?.sorted();
    let not_mixed = |set: &LandmarkSet| -> Result<Option<String>> {
        Ok(verify_generator(&q, set, GeneratorKind::Mixed)?
            .witness()
            .map(|w| {
                let r = w.record(&q);
                format!("{} ~ {}", r.a, r.b)
            }))
    };

    let zero_cols = constant_columns(d, &t);
    match zero_cols.len() {
        0 => {
            return match not_mixed(&t)? {
                None => Ok(MixedConstruction {
                    set: t,
                    path: ConstructionPath::AlreadyMixed,
                    translation: shift,
                }),
                Some(w) => Err(counterexample(
                    STMT,
                    format!(
                        "{} has no constant column but is not mixed ({w})",
                        fmt_set(&q, &t)
                    ),
                )),
            };
        }
        1 => {}
        _ => {
            return Err(counterexample(
                "lemma5",
                format!(
                    "metric generator {} has several zero columns",
                    fmt_set(&q, &t)
                ),
            ))
        }
    }

    let full = (1usize << d) - 1;
    let nonzero: Vec<usize> = t.iter().filter(|&x| x != 0).collect();
    let (s1, s2, s3) = (0usize, nonzero[0], nonzero[1]);
    // (replaced members, expected constant value in a failing set)
    let plans: [(&[usize], usize); 4] = [(&[s1], 1), (&[s2, s3], 0), (&[s2], 0), (&[s1, s3], 1)];
    let mut failed_cols = Vec::new();
    for (n, (members, value)) in plans.iter().enumerate() {
        let cand = replace(&t, members, full);
        if !verify_generator(&q, &cand, GeneratorKind::Metric)?.is_resolved() {
            return Err(counterexample(
                "lemma4",
                format!(
                    "antipodal replacement {} lost the metric property",
                    fmt_set(&q, &cand)
                ),
            ));
        }
        match not_mixed(&cand)? {
            None => {
                return Ok(MixedConstruction {
                    set: cand,
                    path: ConstructionPath::Replacement(n as u8 + 1),
                    translation: shift,
                })
            }
            Some(w) => {
                let first = cand.iter().next().expect("nonempty");
                let col = constant_columns(d, &cand)
                    .into_iter()
                    .find(|&c| first >> c & 1 == *value);
                match col {
                    Some(c) => failed_cols.push(c),
                    None => {
                        return Err(counterexample(
                            STMT,
                            format!(
                                "replacement set {} is not mixed ({w}) yet has no constant column of {value}s",
                                fmt_set(&q, &cand)
                            ),
                        ))
                    }
                }
            }
        }
    }

    // All four failed: rebuild the pair the argument says must be confounded.
    let (i1, i2, i3, i4) = (
        failed_cols[0],
        failed_cols[1],
        failed_cols[2],
        failed_cols[3],
    );
    let v1 = (1usize << i1) | (1 << i3);
    let v2 = (1usize << i2) | (1 << i4);
    let confounded = t.iter().all(|x| q.distance(v1, x) == q.distance(v2, x));
    Err(counterexample(
        STMT,
        format!(
            "no replacement set of {} is mixed; columns i0={} i1={} i2={} i3={} i4={}; \
             v1={} v2={} confounded={confounded}",
            fmt_set(&q, &t),
            zero_cols[0] + 1,
            i1 + 1,
            i2 + 1,
            i3 + 1,
            i4 + 1,
            q.vertex_label(v1),
            q.vertex_label(v2)
        ),
    ))
}

/// Dimension table over `d_range` with both sandwich results checked on
/// every row, the conjecture status reported, and the ratio of each
/// dimension to `2d / log2 d` listed for information.
pub fn theorem_sweep(
    d_range: std::ops::RangeInclusive<u32>,
    opts: &TableOptions,
) -> Result<(CheckReport, DimensionTable)> {
    let table = dimension_table(d_range.clone(), &GeneratorKind::ALL, opts)?;
    let mut report = CheckReport::new("theorem_sweep", None, None, true);
    report.trials = table.rows.len() as u64;
    report
        .notes
        .push(format!("d range {}..={}", d_range.start(), d_range.end()));
    for line in &table.consistency {
        match line.status {
            CheckStatus::Fail => report
                .counterexamples
                .push(format!("{} d={}: {}", line.check, line.d, line.detail)),
            CheckStatus::Skip => report.notes.push(format!(
                "{} d={}: skipped ({})",
                line.check, line.d, line.detail
            )),
            _ => {}
        }
    }
    for row in &table.rows {
        let v = |k| {
            row.get(k).map_or("-".to_string(), |r| {
                if r.exact {
                    r.value.to_string()
                } else {
                    format!("<={}", r.value)
                }
            })
        };
        let ratio = |k| {
            row.asymptotic_ratio(k)
                .map_or("n/a".to_string(), |x| format!("{x:.3}"))
        };
        report.notes.push(format!(
            "d={} dim={} edim={} mdim={} conjecture={} ratio(dim)={} ratio(edim)={} ratio(mdim)={}",
            row.d,
            v(GeneratorKind::Metric),
            v(GeneratorKind::Edge),
            v(GeneratorKind::Mixed),
            row.conjecture_status().unwrap_or("unknown"),
            ratio(GeneratorKind::Metric),
            ratio(GeneratorKind::Edge),
            ratio(GeneratorKind::Mixed),
        ));
    }
    Ok((report, table))
}
