//! Dimension tables for `Q_d` over a range of `d`, with consistency checks
//! of the relations between the three dimensions.

use std::fmt;
use std::ops::RangeInclusive;
use std::time::Duration;

use serde::Serialize;

use super::{exact_dimension, DimensionRecord, KnownDimensions, SolveOptions, Strategy};
use crate::error::{Error, Result};
use crate::hypercube::Hypercube;
use crate::resolvers::GeneratorKind;

#[derive(Debug, Clone)]
pub struct TableOptions {
    pub strategy: Strategy,
    pub fix_zero: bool,
    pub workers: usize,
    pub time_budget: Option<Duration>,
    /// Start searches from cross-bounds implied by already computed kinds.
    /// Off by default so each value is established independently.
    pub cross_bounds: bool,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions {
            strategy: Strategy::Exact,
            fix_zero: true,
            workers: super::default_workers(),
            time_budget: Some(super::DEFAULT_TIME_BUDGET),
            cross_bounds: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Informational only.
    Info,
    /// Not decidable because an input value is inexact.
    Skip,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Info => "INFO",
            CheckStatus::Skip => "SKIP",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyLine {
    pub check: &'static str,
    pub d: u32,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub d: u32,
    pub metric: Option<DimensionRecord>,
    pub edge: Option<DimensionRecord>,
    pub mixed: Option<DimensionRecord>,
}

impl TableRow {
    pub fn get(&self, kind: GeneratorKind) -> Option<&DimensionRecord> {
        match kind {
            GeneratorKind::Metric => self.metric.as_ref(),
            GeneratorKind::Edge => self.edge.as_ref(),
            GeneratorKind::Mixed => self.mixed.as_ref(),
        }
    }

    fn exact_value(&self, kind: GeneratorKind) -> Option<Option<usize>> {
        self.get(kind).map(|r| r.exact.then_some(r.value))
    }

    /// `"equal"` or `"edim = dim - 1"` when both values are exact.
    pub fn conjecture_status(&self) -> Option<&'static str> {
        let dim = self.exact_value(GeneratorKind::Metric)??;
        let edim = self.exact_value(GeneratorKind::Edge)??;
        Some(if dim == edim {
            "equal"
        } else if edim + 1 == dim {
            "edim = dim - 1"
        } else {
            "other"
        })
    }

    /// Ratio of `dim` to `2d / log2 d`; undefined for `d = 1`.
    pub fn asymptotic_ratio(&self, kind: GeneratorKind) -> Option<f64> {
        let v = self.get(kind)?.value as f64;
        (self.d >= 2).then(|| {
            let d = self.d as f64;
            v / (2.0 * d / d.log2())
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionTable {
    pub rows: Vec<TableRow>,
    pub consistency: Vec<ConsistencyLine>,
}

impl DimensionTable {
    pub fn records(&self) -> impl Iterator<Item = &DimensionRecord> {
        self.rows
            .iter()
            .flat_map(|r| [r.metric.as_ref(), r.edge.as_ref(), r.mixed.as_ref()])
            .flatten()
    }

    pub fn all_pass(&self) -> bool {
        self.consistency
            .iter()
            .all(|l| l.status != CheckStatus::Fail)
    }

    pub fn without_timing(&self) -> Self {
        let strip = |r: &Option<DimensionRecord>| r.as_ref().map(DimensionRecord::without_timing);
        DimensionTable {
            rows: self
                .rows
                .iter()
                .map(|r| TableRow {
                    d: r.d,
                    metric: strip(&r.metric),
                    edge: strip(&r.edge),
                    mixed: strip(&r.mixed),
                })
                .collect(),
            consistency: self.consistency.clone(),
        }
    }
}

fn line(check: &'static str, d: u32, ok: bool, detail: String) -> ConsistencyLine {
    ConsistencyLine {
        check,
        d,
        status: if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        detail,
    }
}

fn skipped(check: &'static str, d: u32) -> ConsistencyLine {
    ConsistencyLine {
        check,
        d,
        status: CheckStatus::Skip,
        detail: "inexact input".into(),
    }
}

/// The checks a row supports, given which kinds it has.
pub fn row_consistency(row: &TableRow) -> Vec<ConsistencyLine> {
    use GeneratorKind::*;
    let d = row.d;
    let mut out = Vec::new();
    let dim = row.exact_value(Metric);
    let edim = row.exact_value(Edge);
    let mdim = row.exact_value(Mixed);

    if let (Some(dim), Some(edim)) = (dim, edim) {
        match (dim, edim) {
            (Some(t), Some(e)) => {
                let ok = e <= t && t <= e + 1 && (t == e || d.is_multiple_of(2));
                out.push(line(
                    "theorem1",
                    d,
                    ok,
                    format!(
                        "edim {e} <= dim {t} <= edim + 1 {}, tight only for even d",
                        e + 1
                    ),
                ));
                if d % 2 == 1 {
                    out.push(line(
                        "odd-equality",
                        d,
                        t == e,
                        format!("dim {t} == edim {e}"),
                    ));
                }
                out.push(ConsistencyLine {
                    check: "conjecture",
                    d,
                    status: CheckStatus::Info,
                    detail: row.conjecture_status().unwrap_or("other").to_string(),
                });
            }
            _ => {
                out.push(skipped("theorem1", d));
                if d % 2 == 1 {
                    out.push(skipped("odd-equality", d));
                }
            }
        }
    }
    if let (Some(dim), Some(mdim)) = (dim, mdim) {
        match (dim, mdim) {
            (Some(t), Some(x)) if d >= 3 => {
                out.push(line("theorem2", d, t == x, format!("dim {t} == mdim {x}")));
            }
            (Some(t), Some(x)) => {
                out.push(line(
                    "small-mixed",
                    d,
                    t < x,
                    format!("dim {t} < mdim {x} for d <= 2"),
                ));
            }
            _ => out.push(skipped(if d >= 3 { "theorem2" } else { "small-mixed" }, d)),
        }
    }
    if d >= 3 {
        if let (Some(dim), Some(edim), Some(mdim)) = (dim, edim, mdim) {
            match (dim, edim, mdim) {
                (Some(t), Some(e), Some(x)) => out.push(line(
                    "corollary",
                    d,
                    t <= e + 1 && e <= t && t == x,
                    format!("dim-1 {} <= edim {e} <= dim {t} == mdim {x}", t - 1),
                )),
                _ => out.push(skipped("corollary", d)),
            }
        }
    }
    out
}

/// Computes the requested dimensions of `Q_d` for each `d` in the range,
/// kinds in the order metric, edge, mixed.
pub fn dimension_table(
    d_range: RangeInclusive<u32>,
    kinds: &[GeneratorKind],
    opts: &TableOptions,
) -> Result<DimensionTable> {
    if d_range.is_empty() {
        return Err(Error::InvalidArgument("empty dimension range".into()));
    }
    let mut rows = Vec::new();
    let mut consistency = Vec::new();
    for d in d_range {
        let q = Hypercube::new(d)?;
        let mut known = KnownDimensions::default();
        let mut row = TableRow {
            d,
            metric: None,
            edge: None,
            mixed: None,
        };
        for kind in GeneratorKind::ALL.into_iter().filter(|k| kinds.contains(k)) {
            let so = SolveOptions {
                kind,
                strategy: opts.strategy,
                fix_zero: opts.fix_zero,
                workers: opts.workers,
                time_budget: opts.time_budget,
                known: if opts.cross_bounds {
                    known
                } else {
                    KnownDimensions::default()
                },
            };
            let rec = exact_dimension(&q, &so)?;
            if rec.exact {
                known.set(kind, rec.value);
            }
            match kind {
                GeneratorKind::Metric => row.metric = Some(rec),
                GeneratorKind::Edge => row.edge = Some(rec),
                GeneratorKind::Mixed => row.mixed = Some(rec),
            }
        }
        consistency.extend(row_consistency(&row));
        rows.push(row);
    }
    Ok(DimensionTable { rows, consistency })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_up_to_q4() {
        let opts = TableOptions {
            workers: 2,
            ..TableOptions::default()
        };
        let t = dimension_table(1..=4, &GeneratorKind::ALL, &opts).unwrap();
        let vals: Vec<(usize, usize, usize)> = t
            .rows
            .iter()
            .map(|r| {
                (
                    r.metric.as_ref().unwrap().value,
                    r.edge.as_ref().unwrap().value,
                    r.mixed.as_ref().unwrap().value,
                )
            })
            .collect();
        assert_eq!(vals, vec![(1, 1, 2), (2, 2, 3), (3, 3, 3), (4, 3, 4)]);
        assert!(t.all_pass(), "{:#?}", t.consistency);
        assert_eq!(t.rows[3].conjecture_status(), Some("edim = dim - 1"));
        assert_eq!(t.rows[2].conjecture_status(), Some("equal"));
        let checks: Vec<_> = t
            .consistency
            .iter()
            .filter(|l| l.d == 4)
            .map(|l| l.check)
            .collect();
        assert_eq!(checks, ["theorem1", "conjecture", "theorem2", "corollary"]);
        let small: Vec<_> = t
            .consistency
            .iter()
            .filter(|l| l.d == 2)
            .map(|l| l.check)
            .collect();
        assert_eq!(small, ["theorem1", "conjecture", "small-mixed"]);
    }

    #[test]
    fn cross_bounds_give_same_values() {
        let plain = TableOptions {
            workers: 2,
            ..TableOptions::default()
        };
        let cross = TableOptions {
            cross_bounds: true,
            ..plain.clone()
        };
        let a = dimension_table(2..=4, &GeneratorKind::ALL, &plain).unwrap();
        let b = dimension_table(2..=4, &GeneratorKind::ALL, &cross).unwrap();
        for (x, y) in a.records().zip(b.records()) {
            assert_eq!(x.value, y.value);
            assert_eq!(x.basis, y.basis);
        }
    }

    #[test]
    fn failing_row_is_reported() {
        let mk = |kind, value| {
            let mut r = DimensionRecord::new(&Hypercube::new(5).unwrap(), kind, Default::default());
            r.value = value;
            r.exact = true;
            r
        };
        let row = TableRow {
            d: 5,
            metric: Some(mk(GeneratorKind::Metric, 4)),
            edge: Some(mk(GeneratorKind::Edge, 3)),
            mixed: Some(mk(GeneratorKind::Mixed, 4)),
        };
        let lines = row_consistency(&row);
        let status = |c: &str| lines.iter().find(|l| l.check == c).unwrap().status;
        // dim = edim + 1 at odd d violates tightness and odd equality
        assert_eq!(status("theorem1"), CheckStatus::Fail);
        assert_eq!(status("odd-equality"), CheckStatus::Fail);
        assert_eq!(status("theorem2"), CheckStatus::Pass);
    }

    #[test]
    fn ratio_column() {
        let row = TableRow {
            d: 1,
            metric: None,
            edge: None,
            mixed: None,
        };
        assert_eq!(row.asymptotic_ratio(GeneratorKind::Metric), None);
        let t = dimension_table(
            4..=4,
            &[GeneratorKind::Metric],
            &TableOptions {
                workers: 1,
                ..Default::default()
            },
        )
        .unwrap();
        // dim(Q4) = 4, 2*4/log2(4) = 4
        assert!((t.rows[0].asymptotic_ratio(GeneratorKind::Metric).unwrap() - 1.0).abs() < 1e-12);
    }
}
