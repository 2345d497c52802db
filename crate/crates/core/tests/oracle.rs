//! The hypercube fast paths against BFS on an explicit edge list.

use metdim::graph::{all_pairs_distances, edge_vertex_distance, GraphEdge};
use metdim::host::{hypercube_graph, GenericHost};
use metdim::hypercube::{edge_distance_fast, enumerate_edges};
use metdim::resolvers::{elements, signature};
use metdim::{GeneratorKind, Host, Hypercube, LandmarkSet};

#[test]
fn bfs_matches_popcount_up_to_q10() {
    for d in 1..=10 {
        let g = hypercube_graph(d).unwrap();
        let dm = all_pairs_distances(&g);
        let n = 1usize << d;
        for u in 0..n {
            for v in 0..n {
                assert_eq!(dm.get(u, v), (u ^ v).count_ones(), "Q_{d} {u} {v}");
            }
        }
    }
}

#[test]
fn edge_distances_match_fast_path_up_to_q8() {
    for d in 1..=8 {
        let g = hypercube_graph(d).unwrap();
        let dm = all_pairs_distances(&g);
        let mut count = 0;
        for e in enumerate_edges(d).unwrap() {
            let (a, b) = e.endpoints();
            let ge = GraphEdge::new(a.bits() as usize, b.bits() as usize);
            for x in 0..1u64 << d {
                let fast = edge_distance_fast(e, metdim::BitVertex::new(x, d).unwrap()).unwrap();
                assert_eq!(edge_vertex_distance(&dm, ge, x as usize).unwrap(), fast);
            }
            count += 1;
        }
        assert_eq!(count, d as usize * (1 << (d - 1)));
    }
}

#[test]
fn cube_and_generic_hosts_give_equal_signatures() {
    for d in 2..=5 {
        let q = Hypercube::new(d).unwrap();
        let h = GenericHost::new(hypercube_graph(d).unwrap());
        assert_eq!(q.edge_count(), h.edge_count());
        let s = LandmarkSet::new(vec![0, 1, (1 << d) - 2]).unwrap();
        // the two hosts may enumerate edges differently, so compare by endpoint pair
        let key = |host: &dyn Host, e: usize| {
            let (a, b) = host.edge_endpoints(e);
            (a.min(b), a.max(b))
        };
        let mut from_cube: Vec<_> = elements(&q, GeneratorKind::Edge)
            .unwrap()
            .into_iter()
            .map(|el| match el {
                metdim::Element::Edge(e) => (key(&q, e), signature(&q, el, &s).unwrap()),
                _ => unreachable!(),
            })
            .collect();
        let mut from_graph: Vec<_> = elements(&h, GeneratorKind::Edge)
            .unwrap()
            .into_iter()
            .map(|el| match el {
                metdim::Element::Edge(e) => (key(&h, e), signature(&h, el, &s).unwrap()),
                _ => unreachable!(),
            })
            .collect();
        from_cube.sort();
        from_graph.sort();
        assert_eq!(from_cube, from_graph);
    }
}
