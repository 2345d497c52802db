//! Generic undirected graphs: edge-list ingestion, BFS distances and
//! bipartiteness. Used for arbitrary inputs and as the slow oracle the
//! hypercube fast path is checked against.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::io::BufRead;

use crate::error::{Error, Result};

/// Largest vertex count accepted by [`Graph`].
pub const MAX_VERTICES: usize = 1 << 14;

/// An unordered edge, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GraphEdge {
    pub u: usize,
    pub v: usize,
}

impl GraphEdge {
    pub fn new(a: usize, b: usize) -> Self {
        if a <= b {
            GraphEdge { u: a, v: b }
        } else {
            GraphEdge { u: b, v: a }
        }
    }
}

impl fmt::Display for GraphEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.u, self.v)
    }
}

/// Connected simple undirected graph on dense labels `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    /// Original label of each dense vertex (identity unless the input was remapped).
    labels: Vec<u64>,
    remapped: bool,
}

impl Graph {
    /// Builds a graph on `0..n` from an edge list. Duplicate edges are merged.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::TooLarge {
                what: "vertices",
                actual: n,
                limit: MAX_VERTICES,
            });
        }
        let mut adj = vec![Vec::new(); n];
        let mut any = false;
        for (i, (a, b)) in edges.into_iter().enumerate() {
            if a >= n || b >= n {
                return Err(Error::InvalidVertex(format!("{} (n = {n})", a.max(b))));
            }
            if a == b {
                return Err(Error::SelfLoop {
                    line: i + 1,
                    vertex: a as u64,
                });
            }
            adj[a].push(b);
            adj[b].push(a);
            any = true;
        }
        if !any {
            return Err(Error::EmptyGraph);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        let g = Graph {
            adj,
            labels: (0..n as u64).collect(),
            remapped: false,
        };
        g.check_connected()?;
        Ok(g)
    }

    fn check_connected(&self) -> Result<()> {
        let dist = self.bfs(0);
        match dist.iter().position(|&d| d == u16::MAX) {
            Some(v) => Err(Error::Disconnected {
                from: self.labels[0],
                unreachable: self.labels[v],
            }),
            None => Ok(()),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.adj.len() && self.adj[a].binary_search(&b).is_ok()
    }

    /// Edges sorted by `(u, v)` with `u < v`.
    pub fn edges(&self) -> Vec<GraphEdge> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list.iter().filter(|&&v| v > u) {
                out.push(GraphEdge { u, v });
            }
        }
        out
    }

    /// Original label of a dense vertex.
    pub fn label(&self, v: usize) -> u64 {
        self.labels[v]
    }

    /// Dense index of an original label.
    pub fn index_of(&self, label: u64) -> Option<usize> {
        if self.remapped {
            self.labels.binary_search(&label).ok()
        } else {
            (label < self.labels.len() as u64).then_some(label as usize)
        }
    }

    /// True when the input labels were not `0..n` and had to be compacted.
    pub fn was_remapped(&self) -> bool {
        self.remapped
    }

    /// Original-label to dense-index pairs, only meaningful when remapped.
    pub fn label_map(&self) -> Vec<(u64, usize)> {
        self.labels.iter().copied().zip(0..).collect()
    }

    fn bfs(&self, src: usize) -> Vec<u16> {
        let mut dist = vec![u16::MAX; self.adj.len()];
        let mut queue = VecDeque::new();
        dist[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == u16::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

/// Parses a whitespace-separated edge list ("u v" per line).
///
/// Blank lines and `#` comments are skipped. If the labels in use are not
/// exactly `0..=max`, they are compacted in increasing order; see
/// [`Graph::was_remapped`].
pub fn load_graph<R: BufRead>(reader: R) -> Result<Graph> {
    let mut raw = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let body = match line.find('#') {
            Some(p) => &line[..p],
            None => &line[..],
        };
        let mut toks = body.split_whitespace();
        let Some(first) = toks.next() else { continue };
        let parse = |t: &str| {
            t.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("not a vertex label: {t:?}"),
            })
        };
        let a = parse(first)?;
        let b = match toks.next() {
            Some(t) => parse(t)?,
            None => {
                return Err(Error::Parse {
                    line: lineno,
                    message: "expected two vertex labels".into(),
                })
            }
        };
        if toks.next().is_some() {
            return Err(Error::Parse {
                line: lineno,
                message: "expected exactly two vertex labels".into(),
            });
        }
        if a == b {
            return Err(Error::SelfLoop {
                line: lineno,
                vertex: a,
            });
        }
        raw.push((a, b));
    }
    if raw.is_empty() {
        return Err(Error::EmptyGraph);
    }

    let mut used: BTreeMap<u64, usize> = BTreeMap::new();
    for &(a, b) in &raw {
        used.insert(a, 0);
        used.insert(b, 0);
    }
    if used.len() > MAX_VERTICES {
        return Err(Error::TooLarge {
            what: "vertices",
            actual: used.len(),
            limit: MAX_VERTICES,
        });
    }
    for (i, slot) in used.values_mut().enumerate() {
        *slot = i;
    }
    let max_label = *used.keys().next_back().expect("nonempty");
    let dense = max_label as usize + 1 == used.len();

    let n = used.len();
    let mut g =
        Graph::from_edges(n, raw.iter().map(|(a, b)| (used[a], used[b]))).map_err(|e| match e {
            Error::Disconnected { from, unreachable } => Error::Disconnected {
                from: *used.keys().nth(from as usize).unwrap_or(&from),
                unreachable: *used
                    .keys()
                    .nth(unreachable as usize)
                    .unwrap_or(&unreachable),
            },
            other => other,
        })?;
    if !dense {
        g.labels = used.keys().copied().collect();
        g.remapped = true;
    }
    Ok(g)
}

/// All-pairs hop distances, row-major `n × n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<u16>,
}

impl DistanceMatrix {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> u32 {
        self.dist[u * self.n + v] as u32
    }

    pub fn row(&self, u: usize) -> &[u16] {
        &self.dist[u * self.n..(u + 1) * self.n]
    }

    pub fn diameter(&self) -> u32 {
        self.dist.iter().copied().max().unwrap_or(0) as u32
    }
}

pub fn all_pairs_distances(g: &Graph) -> DistanceMatrix {
    let n = g.vertex_count();
    let mut dist = Vec::with_capacity(n * n);
    for src in 0..n {
        dist.extend(g.bfs(src));
    }
    DistanceMatrix { n, dist }
}

/// Two-colouring of a graph, or an odd cycle proving none exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bipartition {
    Bipartite {
        color: Vec<u8>,
    },
    /// Vertices of an odd closed walk, in order, without repeating the first.
    OddCycle(Vec<usize>),
}

impl Bipartition {
    pub fn is_bipartite(&self) -> bool {
        matches!(self, Bipartition::Bipartite { .. })
    }

    pub fn part_sizes(&self) -> Option<(usize, usize)> {
        match self {
            Bipartition::Bipartite { color } => {
                let ones = color.iter().filter(|&&c| c == 1).count();
                Some((color.len() - ones, ones))
            }
            Bipartition::OddCycle(_) => None,
        }
    }
}

pub fn bipartition(g: &Graph) -> Bipartition {
    let n = g.vertex_count();
    let mut color = vec![u8::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut queue = VecDeque::new();
    color[0] = 0;
    queue.push_back(0);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if color[w] == u8::MAX {
                color[w] = 1 - color[u];
                parent[w] = u;
                depth[w] = depth[u] + 1;
                queue.push_back(w);
            } else if color[w] == color[u] {
                return Bipartition::OddCycle(odd_cycle(&parent, &depth, u, w));
            }
        }
    }
    Bipartition::Bipartite { color }
}

/// Closes the BFS-tree paths from `a` and `b` up to their common ancestor.
fn odd_cycle(parent: &[usize], depth: &[usize], a: usize, b: usize) -> Vec<usize> {
    let (mut x, mut y) = (a, b);
    let mut left = vec![x];
    let mut right = vec![y];
    while depth[x] > depth[y] {
        x = parent[x];
        left.push(x);
    }
    while depth[y] > depth[x] {
        y = parent[y];
        right.push(y);
    }
    while x != y {
        x = parent[x];
        y = parent[y];
        left.push(x);
        right.push(y);
    }
    right.pop();
    right.reverse();
    left.extend(right);
    left
}

/// Distance from vertex `x` to edge `e`: the nearer endpoint's distance.
pub fn edge_vertex_distance(dm: &DistanceMatrix, e: GraphEdge, x: usize) -> Result<u32> {
    let n = dm.vertex_count();
    if e.u >= n || e.v >= n || dm.get(e.u, e.v) != 1 {
        return Err(Error::NotAnEdge(e.to_string()));
    }
    if x >= n {
        return Err(Error::InvalidVertex(x.to_string()));
    }
    Ok(dm.get(e.u, x).min(dm.get(e.v, x)))
}
