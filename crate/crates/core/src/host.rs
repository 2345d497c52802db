//! Host graphs seen through a common distance interface: vertices are
//! dense indices, edges are indices into a fixed enumeration order.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{self, DistanceMatrix, Graph, GraphEdge};
use crate::hypercube::{BitVertex, Hypercube};

/// A vertex or an edge of a host graph. Orders vertices (by label) before
/// edges (by enumeration index).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Element {
    Vertex(usize),
    Edge(usize),
}

pub trait Host: Sync {
    /// Stable identifier: `"Q_d"` for hypercubes, a content hash otherwise.
    fn id(&self) -> String;
    fn vertex_count(&self) -> usize;
    fn edge_count(&self) -> usize;
    fn edge_endpoints(&self, edge: usize) -> (usize, usize);
    fn distance(&self, u: usize, v: usize) -> u32;
    fn diameter(&self) -> u32;
    fn vertex_label(&self, v: usize) -> String;
    fn parse_vertex(&self, s: &str) -> Result<usize>;

    fn edge_label(&self, edge: usize) -> String {
        let (a, b) = self.edge_endpoints(edge);
        format!("{}-{}", self.vertex_label(a), self.vertex_label(b))
    }

    fn edge_distance(&self, edge: usize, x: usize) -> u32 {
        let (a, b) = self.edge_endpoints(edge);
        self.distance(a, x).min(self.distance(b, x))
    }

    fn element_distance(&self, el: Element, x: usize) -> u32 {
        match el {
            Element::Vertex(v) => self.distance(v, x),
            Element::Edge(e) => self.edge_distance(e, x),
        }
    }

    fn element_label(&self, el: Element) -> String {
        match el {
            Element::Vertex(v) => self.vertex_label(v),
            Element::Edge(e) => self.edge_label(e),
        }
    }

    fn as_hypercube(&self) -> Option<Hypercube> {
        None
    }

    fn is_bipartite(&self) -> bool;
}

/// Upper limit on hypercube dimension for anything that enumerates `V(Q_d)`.
pub const MAX_ENUMERABLE_DIMENSION: u32 = 20;

impl Host for Hypercube {
    fn id(&self) -> String {
        self.to_string()
    }

    fn vertex_count(&self) -> usize {
        self.order() as usize
    }

    fn edge_count(&self) -> usize {
        self.size() as usize
    }

    fn edge_endpoints(&self, edge: usize) -> (usize, usize) {
        let (a, b) = self.edge_at(edge as u64).endpoints();
        (a.bits() as usize, b.bits() as usize)
    }

    #[inline]
    fn distance(&self, u: usize, v: usize) -> u32 {
        (u ^ v).count_ones()
    }

    #[inline]
    fn edge_distance(&self, edge: usize, x: usize) -> u32 {
        let e = self.edge_at(edge as u64);
        let diff = e.base().bits() as usize ^ x;
        diff.count_ones() - ((diff >> e.coord()) & 1) as u32
    }

    fn diameter(&self) -> u32 {
        self.dimension()
    }

    fn vertex_label(&self, v: usize) -> String {
        BitVertex::new(v as u64, self.dimension())
            .map(|b| b.to_string())
            .unwrap_or_else(|_| v.to_string())
    }

    fn edge_label(&self, edge: usize) -> String {
        self.edge_at(edge as u64).to_string()
    }

    fn parse_vertex(&self, s: &str) -> Result<usize> {
        Ok(Hypercube::parse_vertex(self, s)?.bits() as usize)
    }

    fn as_hypercube(&self) -> Option<Hypercube> {
        Some(*self)
    }

    fn is_bipartite(&self) -> bool {
        true
    }
}

/// An arbitrary connected graph with its distance matrix precomputed.
#[derive(Debug, Clone)]
pub struct GenericHost {
    graph: Graph,
    dist: DistanceMatrix,
    edges: Vec<GraphEdge>,
    id: String,
    bipartite: bool,
}

impl GenericHost {
    pub fn new(graph: Graph) -> Self {
        let dist = graph::all_pairs_distances(&graph);
        let edges = graph.edges();
        let mut hasher = Sha256::new();
        hasher.update(graph.vertex_count().to_le_bytes());
        for e in &edges {
            hasher.update(format!("{} {}\n", graph.label(e.u), graph.label(e.v)).as_bytes());
        }
        let digest = hasher.finalize();
        let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
        let bipartite = graph::bipartition(&graph).is_bipartite();
        GenericHost {
            graph,
            dist,
            edges,
            id: format!("graph:{hex}"),
            bipartite,
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.dist
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    /// Index of an edge in this host's edge order.
    pub fn edge_index(&self, e: GraphEdge) -> Option<usize> {
        self.edges.binary_search(&e).ok()
    }
}

impl Host for GenericHost {
    fn id(&self) -> String {
        self.id.clone()
    }

    fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn edge_endpoints(&self, edge: usize) -> (usize, usize) {
        let e = self.edges[edge];
        (e.u, e.v)
    }

    #[inline]
    fn distance(&self, u: usize, v: usize) -> u32 {
        self.dist.get(u, v)
    }

    fn diameter(&self) -> u32 {
        self.dist.diameter()
    }

    fn vertex_label(&self, v: usize) -> String {
        self.graph.label(v).to_string()
    }

    fn parse_vertex(&self, s: &str) -> Result<usize> {
        let label: u64 = s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidVertex(format!("{s:?} is not a vertex label")))?;
        self.graph
            .index_of(label)
            .ok_or_else(|| Error::InvalidVertex(format!("{label} is not in the graph")))
    }

    fn is_bipartite(&self) -> bool {
        self.bipartite
    }
}

/// Either kind of host, as selected on the command line.
#[derive(Debug, Clone)]
pub enum AnyHost {
    Cube(Hypercube),
    Graph(Box<GenericHost>),
}

impl AnyHost {
    /// Parses `"Qd:<d>"` or reads an edge-list file.
    pub fn from_spec(spec: &str) -> Result<Self> {
        if let Some(d) = spec.strip_prefix("Qd:") {
            let d: u32 = d.parse().map_err(|_| {
                Error::InvalidArgument(format!("bad hypercube dimension in {spec:?}"))
            })?;
            return Ok(AnyHost::Cube(Hypercube::new(d)?));
        }
        Self::from_path(Path::new(spec))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let file =
            std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let g = graph::load_graph(std::io::BufReader::new(file))?;
        Ok(AnyHost::Graph(Box::new(GenericHost::new(g))))
    }

    fn inner(&self) -> &dyn Host {
        match self {
            AnyHost::Cube(q) => q,
            AnyHost::Graph(g) => g.as_ref(),
        }
    }
}

impl fmt::Display for AnyHost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl Host for AnyHost {
    fn id(&self) -> String {
        self.inner().id()
    }
    fn vertex_count(&self) -> usize {
        self.inner().vertex_count()
    }
    fn edge_count(&self) -> usize {
        self.inner().edge_count()
    }
    fn edge_endpoints(&self, edge: usize) -> (usize, usize) {
        self.inner().edge_endpoints(edge)
    }
    fn distance(&self, u: usize, v: usize) -> u32 {
        self.inner().distance(u, v)
    }
    fn edge_distance(&self, edge: usize, x: usize) -> u32 {
        self.inner().edge_distance(edge, x)
    }
    fn diameter(&self) -> u32 {
        self.inner().diameter()
    }
    fn vertex_label(&self, v: usize) -> String {
        self.inner().vertex_label(v)
    }
    fn edge_label(&self, edge: usize) -> String {
        self.inner().edge_label(edge)
    }
    fn parse_vertex(&self, s: &str) -> Result<usize> {
        self.inner().parse_vertex(s)
    }
    fn as_hypercube(&self) -> Option<Hypercube> {
        self.inner().as_hypercube()
    }
    fn is_bipartite(&self) -> bool {
        self.inner().is_bipartite()
    }
}

/// `Q_d` as an explicit edge list on labels `0..2^d`.
pub fn hypercube_graph(d: u32) -> Result<Graph> {
    let q = Hypercube::new(d)?;
    let edges = crate::hypercube::enumerate_edges(d)?.map(|e| {
        let (a, b) = e.endpoints();
        (a.bits() as usize, b.bits() as usize)
    });
    Graph::from_edges(q.order() as usize, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercube::{edge_distance_fast, enumerate_edges};

    #[test]
    fn q3_bfs_equals_popcount() {
        let g = hypercube_graph(3).unwrap();
        let dm = graph::all_pairs_distances(&g);
        let mut checked = 0;
        for u in 0..8usize {
            for v in 0..8usize {
                assert_eq!(dm.get(u, v), (u ^ v).count_ones());
                checked += 1;
            }
        }
        assert_eq!(checked, 64);
    }

    #[test]
    fn q3_edge_vertex_distance() {
        let g = hypercube_graph(3).unwrap();
        let dm = graph::all_pairs_distances(&g);
        // {000, 100} to 111: min(3, 2)
        assert_eq!(
            graph::edge_vertex_distance(&dm, GraphEdge::new(0, 1), 7).unwrap(),
            2
        );
    }

    #[test]
    fn q5_bipartition_by_parity() {
        let g = hypercube_graph(5).unwrap();
        match graph::bipartition(&g) {
            graph::Bipartition::Bipartite { color } => {
                for (v, &c) in color.iter().enumerate() {
                    assert_eq!(c as u32, v.count_ones() % 2);
                }
                assert_eq!(graph::bipartition(&g).part_sizes(), Some((16, 16)));
            }
            b => panic!("{b:?}"),
        }
    }

    #[test]
    fn generic_and_cube_hosts_agree() {
        for d in 1..=6u32 {
            let q = Hypercube::new(d).unwrap();
            let gh = GenericHost::new(hypercube_graph(d).unwrap());
            assert_eq!(gh.vertex_count(), q.vertex_count());
            assert_eq!(gh.edge_count(), q.edge_count());
            assert_eq!(gh.diameter(), d);
            assert!(gh.is_bipartite());
            for e in enumerate_edges(d).unwrap() {
                let (a, b) = e.endpoints();
                let gi = gh
                    .edge_index(GraphEdge::new(a.bits() as usize, b.bits() as usize))
                    .unwrap();
                let ci = q.edge_index(e) as usize;
                for x in 0..q.vertex_count() {
                    let fast = edge_distance_fast(e, q.vertex(x as u64).unwrap()).unwrap();
                    assert_eq!(Host::edge_distance(&q, ci, x), fast);
                    assert_eq!(gh.edge_distance(gi, x), fast);
                }
            }
        }
    }

    #[test]
    fn host_spec_parsing() {
        assert!(matches!(AnyHost::from_spec("Qd:4"), Ok(AnyHost::Cube(_))));
        assert!(AnyHost::from_spec("Qd:0").is_err());
        assert!(AnyHost::from_spec("Qd:x").is_err());
        assert!(matches!(
            AnyHost::from_spec("/nonexistent/file"),
            Err(Error::Io(_))
        ));
    }

    #[test]
    fn generic_ids_are_stable_and_distinct() {
        let a = GenericHost::new(graph::load_graph("0 1\n1 2".as_bytes()).unwrap());
        let b = GenericHost::new(graph::load_graph("1 2\n0 1\n".as_bytes()).unwrap());
        let c = GenericHost::new(graph::load_graph("0 1\n1 2\n2 0".as_bytes()).unwrap());
        assert_eq!(a.id(), b.id());
        assert_ne!(a.id(), c.id());
        assert!(a.id().starts_with("graph:"));
    }
}
