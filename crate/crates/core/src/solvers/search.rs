//! Pruned exhaustive k-subset search over landmark candidates.
//!
//! Each search node carries the partition of elements into signature
//! classes induced by the landmarks chosen so far; adding a landmark
//! refines it. A set is a generator iff every class is a singleton.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::host::Host;
use crate::resolvers::{elements, GeneratorKind};

/// Cap on `vertices × elements` for the precomputed distance table.
pub const MAX_TABLE_ENTRIES: usize = 1 << 26;

const DENSE_RELABEL_LIMIT: usize = 1 << 24;
const DEADLINE_POLL: u64 = 1 << 12;

/// Distances from every candidate landmark to every element.
pub(crate) struct DistanceTable {
    n: usize,
    m: usize,
    radix: usize,
    data: Vec<u16>,
    max_resolved: u64,
}

fn pairs(c: u64) -> u64 {
    c * c.saturating_sub(1) / 2
}

impl DistanceTable {
    pub fn build<H: Host + ?Sized>(host: &H, kind: GeneratorKind) -> Result<Self> {
        let elems = elements(host, kind)?;
        let n = host.vertex_count();
        let m = elems.len();
        if n.saturating_mul(m) > MAX_TABLE_ENTRIES {
            return Err(Error::TooLarge {
                what: "distance table entries",
                actual: n.saturating_mul(m),
                limit: MAX_TABLE_ENTRIES,
            });
        }
        let radix = host.diameter() as usize + 1;
        let mut data = Vec::with_capacity(n * m);
        let mut max_resolved = 0;
        let mut hist = vec![0u64; radix];
        for x in 0..n {
            hist.iter_mut().for_each(|h| *h = 0);
            for &el in &elems {
                let dist = host.element_distance(el, x);
                hist[dist as usize] += 1;
                data.push(dist as u16);
            }
            let same: u64 = hist.iter().map(|&c| pairs(c)).sum();
            max_resolved = max_resolved.max(pairs(m as u64) - same);
        }
        Ok(DistanceTable {
            n,
            m,
            radix,
            data,
            max_resolved,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn element_count(&self) -> usize {
        self.m
    }

    #[inline]
    fn row(&self, x: usize) -> &[u16] {
        &self.data[x * self.m..(x + 1) * self.m]
    }

    #[inline]
    fn get(&self, x: usize, e: usize) -> u16 {
        self.data[x * self.m + e]
    }
}

/// Signature classes of all elements.
#[derive(Clone)]
pub(crate) struct Level {
    class: Vec<u32>,
    classes: usize,
    unresolved: u64,
}

impl Level {
    pub fn root(m: usize) -> Self {
        Level {
            class: vec![0; m],
            classes: usize::from(m > 0),
            unresolved: pairs(m as u64),
        }
    }

    pub fn unresolved(&self) -> u64 {
        self.unresolved
    }
}

enum Relabel {
    Dense {
        stamp: Vec<u32>,
        id: Vec<u32>,
        epoch: u32,
    },
    Hashed(HashMap<u64, u32>),
}

/// Scratch space for refining partitions.
pub(crate) struct Refiner<'a> {
    table: &'a DistanceTable,
    relabel: Relabel,
    sizes: Vec<u32>,
}

impl<'a> Refiner<'a> {
    pub fn new(table: &'a DistanceTable) -> Self {
        let keys = table.m.max(1) * table.radix;
        let relabel = if keys <= DENSE_RELABEL_LIMIT {
            Relabel::Dense {
                stamp: vec![0; keys],
                id: vec![0; keys],
                epoch: 0,
            }
        } else {
            Relabel::Hashed(HashMap::new())
        };
        Refiner {
            table,
            relabel,
            sizes: vec![0; table.m.max(1)],
        }
    }

    fn next_epoch(stamp: &mut [u32], epoch: &mut u32) {
        *epoch = epoch.wrapping_add(1);
        if *epoch == 0 {
            stamp.iter_mut().for_each(|s| *s = 0);
            *epoch = 1;
        }
    }

    /// Splits every class of `parent` by distance to landmark `x`.
    pub fn refine(&mut self, parent: &Level, x: usize, out: &mut Level) {
        let row = self.table.row(x);
        let radix = self.table.radix;
        let mut next = 0u32;
        match &mut self.relabel {
            Relabel::Dense { stamp, id, epoch } => {
                Self::next_epoch(stamp, epoch);
                for (e, &c) in parent.class.iter().enumerate() {
                    let key = c as usize * radix + row[e] as usize;
                    if stamp[key] != *epoch {
                        stamp[key] = *epoch;
                        id[key] = next;
                        next += 1;
                    }
                    out.class[e] = id[key];
                }
            }
            Relabel::Hashed(map) => {
                map.clear();
                for (e, &c) in parent.class.iter().enumerate() {
                    let key = c as u64 * radix as u64 + row[e] as u64;
                    let v = *map.entry(key).or_insert_with(|| {
                        next += 1;
                        next - 1
                    });
                    out.class[e] = v;
                }
            }
        }
        let classes = next as usize;
        out.classes = classes;
        if classes == parent.class.len() {
            out.unresolved = 0;
            return;
        }
        let sizes = &mut self.sizes[..classes];
        sizes.iter_mut().for_each(|s| *s = 0);
        for &c in &out.class {
            sizes[c as usize] += 1;
        }
        out.unresolved = sizes.iter().map(|&s| pairs(s as u64)).sum();
    }

    /// Whether adding `x` to `parent` separates all elements.
    pub fn resolves(&mut self, parent: &Level, x: usize) -> bool {
        if parent.unresolved == 0 {
            return true;
        }
        let row = self.table.row(x);
        let radix = self.table.radix;
        match &mut self.relabel {
            Relabel::Dense { stamp, epoch, .. } => {
                Self::next_epoch(stamp, epoch);
                for (e, &c) in parent.class.iter().enumerate() {
                    let key = c as usize * radix + row[e] as usize;
                    if stamp[key] == *epoch {
                        return false;
                    }
                    stamp[key] = *epoch;
                }
                true
            }
            Relabel::Hashed(map) => {
                map.clear();
                for (e, &c) in parent.class.iter().enumerate() {
                    let key = c as u64 * radix as u64 + row[e] as u64;
                    if map.insert(key, 0).is_some() {
                        return false;
                    }
                }
                true
            }
        }
    }

    /// Some unresolved pair of `level` that no candidate `>= from` can split.
    fn has_dead_pair(&mut self, level: &Level, from: usize, reps: &mut [(u32, u32)]) -> bool {
        let reps = &mut reps[..level.classes];
        reps.iter_mut().for_each(|r| *r = (u32::MAX, u32::MAX));
        for (e, &c) in level.class.iter().enumerate() {
            let r = &mut reps[c as usize];
            if r.0 == u32::MAX {
                r.0 = e as u32;
            } else if r.1 == u32::MAX {
                r.1 = e as u32;
            }
        }
        let t = self.table;
        reps.iter().filter(|r| r.1 != u32::MAX).any(|&(a, b)| {
            !(from..t.n)
                .rev()
                .any(|x| t.get(x, a as usize) != t.get(x, b as usize))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mode {
    /// Stop at the first generator in lexicographic order.
    First,
    /// Collect generators in lexicographic order, up to a limit.
    All { limit: Option<usize> },
}

pub(crate) struct SearchControl<'c> {
    pub deadline: Option<Instant>,
    pub timed_out: &'c AtomicBool,
}

#[derive(Debug)]
pub(crate) enum SearchOutcome {
    Found { sets: Vec<Vec<usize>>, nodes: u64 },
    Exhausted { nodes: u64 },
    TimedOut { nodes: u64 },
}

struct PartitionResult {
    sets: Vec<Vec<usize>>,
    nodes: u64,
    complete: bool,
}

struct Worker<'a, 'c> {
    table: &'a DistanceTable,
    refiner: Refiner<'a>,
    levels: Vec<Level>,
    reps: Vec<(u32, u32)>,
    chosen: Vec<usize>,
    k: usize,
    mode: Mode,
    found: Vec<Vec<usize>>,
    nodes: u64,
    ctl: &'c SearchControl<'c>,
    /// Partition index and the best (lowest) winning partition so far.
    partition: usize,
    best: &'c AtomicUsize,
    stopped: bool,
}

impl<'a, 'c> Worker<'a, 'c> {
    fn record(&mut self) -> bool {
        self.found.push(self.chosen.clone());
        match self.mode {
            Mode::First => true,
            Mode::All { limit } => limit.is_some_and(|l| self.found.len() >= l),
        }
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes.is_multiple_of(DEADLINE_POLL) {
            if self.ctl.timed_out.load(Ordering::Relaxed) {
                return false;
            }
            if let Some(dl) = self.ctl.deadline {
                if Instant::now() >= dl {
                    self.ctl.timed_out.store(true, Ordering::Relaxed);
                    return false;
                }
            }
            if self.mode == Mode::First && self.best.load(Ordering::Relaxed) < self.partition {
                return false;
            }
        }
        true
    }

    /// Returns true to stop the whole partition.
    fn dfs(&mut self, depth: usize, from: usize) -> bool {
        let n = self.table.n;
        let r = self.k - depth;
        let unresolved = self.levels[depth].unresolved;
        if r == 0 {
            return unresolved == 0 && self.record();
        }
        if unresolved > r as u64 * self.table.max_resolved {
            return false;
        }
        if unresolved > 0
            && self
                .refiner
                .has_dead_pair(&self.levels[depth], from, &mut self.reps)
        {
            return false;
        }
        if from + r > n {
            return false;
        }
        if r == 1 {
            for x in from..n {
                if !self.tick() {
                    self.stopped = true;
                    return true;
                }
                if self.refiner.resolves(&self.levels[depth], x) {
                    self.chosen.push(x);
                    let stop = self.record();
                    self.chosen.pop();
                    if stop {
                        return true;
                    }
                }
            }
            return false;
        }
        for x in from..=n - r {
            if !self.tick() {
                self.stopped = true;
                return true;
            }
            let (head, tail) = self.levels.split_at_mut(depth + 1);
            self.refiner.refine(&head[depth], x, &mut tail[0]);
            self.chosen.push(x);
            let stop = self.dfs(depth + 1, x + 1);
            self.chosen.pop();
            if stop {
                return true;
            }
        }
        false
    }
}

/// Searches all `k`-subsets that start with `fixed` (a lexicographically
/// leading prefix), splitting work by the first free element.
pub(crate) fn search_k(
    table: &DistanceTable,
    k: usize,
    fixed: &[usize],
    mode: Mode,
    ctl: &SearchControl<'_>,
) -> SearchOutcome {
    let n = table.n;
    if k < fixed.len() || k > n {
        return SearchOutcome::Exhausted { nodes: 0 };
    }

    let mut refiner = Refiner::new(table);
    let mut base = Level::root(table.m);
    let mut scratch = base.clone();
    for &x in fixed {
        refiner.refine(&base, x, &mut scratch);
        std::mem::swap(&mut base, &mut scratch);
    }
    if k == fixed.len() {
        return if base.unresolved == 0 {
            SearchOutcome::Found {
                sets: vec![fixed.to_vec()],
                nodes: 1,
            }
        } else {
            SearchOutcome::Exhausted { nodes: 1 }
        };
    }

    let start = fixed.last().map_or(0, |&l| l + 1);
    let free = k - fixed.len();
    if start + free > n {
        return SearchOutcome::Exhausted { nodes: 0 };
    }
    let best = AtomicUsize::new(usize::MAX);

    let run = |p: usize| -> PartitionResult {
        if mode == Mode::First && best.load(Ordering::Relaxed) < p {
            return PartitionResult {
                sets: Vec::new(),
                nodes: 0,
                complete: false,
            };
        }
        let mut w = Worker {
            table,
            refiner: Refiner::new(table),
            levels: vec![base.clone(); k + 1],
            reps: vec![(0, 0); table.m.max(1)],
            chosen: fixed.to_vec(),
            k,
            mode,
            found: Vec::new(),
            nodes: 1,
            ctl,
            partition: p,
            best: &best,
            stopped: false,
        };
        let depth = fixed.len();
        {
            let (head, tail) = w.levels.split_at_mut(depth + 1);
            w.refiner.refine(&head[depth], p, &mut tail[0]);
        }
        w.chosen.push(p);
        w.dfs(depth + 1, p + 1);
        if mode == Mode::First && !w.found.is_empty() {
            best.fetch_min(p, Ordering::Relaxed);
        }
        PartitionResult {
            sets: w.found,
            nodes: w.nodes,
            complete: !w.stopped,
        }
    };

    let results: Vec<PartitionResult> = (start..=n - free).into_par_iter().map(run).collect();

    let mut nodes = 1;
    let mut sets = Vec::new();
    for r in results {
        // partitions before the winner always run to completion
        nodes += r.nodes;
        let had = !r.sets.is_empty();
        sets.extend(r.sets);
        match mode {
            Mode::First if had => {
                sets.truncate(1);
                return SearchOutcome::Found { sets, nodes };
            }
            Mode::All { limit: Some(l) } if sets.len() >= l => {
                sets.truncate(l);
                return SearchOutcome::Found { sets, nodes };
            }
            _ => {}
        }
        if !r.complete {
            return SearchOutcome::TimedOut { nodes };
        }
    }
    if ctl.timed_out.load(Ordering::Relaxed) {
        return SearchOutcome::TimedOut { nodes };
    }
    if sets.is_empty() {
        SearchOutcome::Exhausted { nodes }
    } else {
        SearchOutcome::Found { sets, nodes }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercube::Hypercube;
    use crate::resolvers::{verify_generator, LandmarkSet};

    fn no_deadline<F: FnOnce(&SearchControl<'_>) -> R, R>(f: F) -> R {
        let flag = AtomicBool::new(false);
        f(&SearchControl {
            deadline: None,
            timed_out: &flag,
        })
    }

    /// Plain lexicographic enumeration with full verification, no pruning.
    fn brute_force<H: Host>(host: &H, kind: GeneratorKind, k: usize) -> Vec<Vec<usize>> {
        fn rec<H: Host>(
            host: &H,
            kind: GeneratorKind,
            k: usize,
            from: usize,
            cur: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if cur.len() == k {
                let s = LandmarkSet::new(cur.clone()).unwrap();
                if verify_generator(host, &s, kind).unwrap().is_resolved() {
                    out.push(cur.clone());
                }
                return;
            }
            for x in from..host.vertex_count() {
                cur.push(x);
                rec(host, kind, k, x + 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(host, kind, k, 0, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn refine_matches_signature_classes() {
        let q = Hypercube::new(4).unwrap();
        for kind in GeneratorKind::ALL {
            let t = DistanceTable::build(&q, kind).unwrap();
            let mut r = Refiner::new(&t);
            let mut lvl = Level::root(t.m);
            let mut next = lvl.clone();
            for x in [0, 5, 9] {
                r.refine(&lvl, x, &mut next);
                std::mem::swap(&mut lvl, &mut next);
            }
            let s = LandmarkSet::new(vec![0, 5, 9]).unwrap();
            let w = crate::resolvers::all_witnesses(&q, &s, kind).unwrap();
            assert_eq!(lvl.unresolved, w.len() as u64, "{kind}");
        }
    }

    #[test]
    fn pruned_search_finds_every_generator() {
        for d in 2..=4u32 {
            let q = Hypercube::new(d).unwrap();
            for kind in GeneratorKind::ALL {
                let t = DistanceTable::build(&q, kind).unwrap();
                for k in 1..=4usize {
                    let expect = brute_force(&q, kind, k);
                    let got = no_deadline(|ctl| {
                        match search_k(&t, k, &[], Mode::All { limit: None }, ctl) {
                            SearchOutcome::Found { sets, .. } => sets,
                            SearchOutcome::Exhausted { .. } => Vec::new(),
                            SearchOutcome::TimedOut { .. } => panic!("timeout"),
                        }
                    });
                    assert_eq!(got, expect, "Q_{d} {kind} k={k}");
                    let first = no_deadline(|ctl| match search_k(&t, k, &[], Mode::First, ctl) {
                        SearchOutcome::Found { sets, .. } => sets,
                        _ => Vec::new(),
                    });
                    assert_eq!(first, expect.into_iter().take(1).collect::<Vec<_>>());
                }
            }
        }
    }

    #[test]
    fn fixed_prefix_restricts_search() {
        let q = Hypercube::new(4).unwrap();
        let t = DistanceTable::build(&q, GeneratorKind::Metric).unwrap();
        let all = brute_force(&q, GeneratorKind::Metric, 4);
        let with_zero: Vec<_> = all.into_iter().filter(|s| s[0] == 0).collect();
        let got = no_deadline(
            |ctl| match search_k(&t, 4, &[0], Mode::All { limit: None }, ctl) {
                SearchOutcome::Found { sets, .. } => sets,
                _ => Vec::new(),
            },
        );
        assert_eq!(got, with_zero);
        let limited =
            no_deadline(
                |ctl| match search_k(&t, 4, &[0], Mode::All { limit: Some(3) }, ctl) {
                    SearchOutcome::Found { sets, .. } => sets,
                    _ => Vec::new(),
                },
            );
        assert_eq!(limited, with_zero[..3].to_vec());
    }

    #[test]
    fn expired_deadline_times_out() {
        let q = Hypercube::new(7).unwrap();
        let t = DistanceTable::build(&q, GeneratorKind::Metric).unwrap();
        let flag = AtomicBool::new(false);
        let ctl = SearchControl {
            deadline: Some(Instant::now()),
            timed_out: &flag,
        };
        assert!(matches!(
            search_k(&t, 5, &[0], Mode::First, &ctl),
            SearchOutcome::TimedOut { .. }
        ));
    }
}
