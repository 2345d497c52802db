//! Seeded instance generators for the randomized checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::Graph;
use crate::hypercube::Hypercube;
use crate::resolvers::LandmarkSet;

/// Independent stream for trial `index` under `seed`, so results do not
/// depend on how trials are scheduled.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A connected bipartite graph on `2..=max_n` vertices: a random tree plus
/// random chords between opposite colour classes (closing even cycles).
pub fn random_bipartite_graph<R: Rng>(rng: &mut R, max_n: usize) -> Result<Graph> {
    let n = rng.gen_range(2..=max_n.max(2));
    let mut color = vec![0u8; n];
    let mut edges = Vec::new();
    for v in 1..n {
        let p = rng.gen_range(0..v);
        color[v] = 1 - color[p];
        edges.push((p, v));
    }
    let chords = rng.gen_range(0..=n / 2);
    for _ in 0..chords {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if color[a] != color[b] {
            edges.push((a, b));
        }
    }
    Graph::from_edges(n, edges)
}

/// A uniformly random automorphism `x ↦ π(x) ⊕ t` of `Q_d`.
#[derive(Debug, Clone)]
pub struct CubeAutomorphism {
    perm: Vec<u32>,
    shift: usize,
}

impl CubeAutomorphism {
    pub fn random<R: Rng>(rng: &mut R, q: Hypercube) -> Self {
        let d = q.dimension();
        let mut perm: Vec<u32> = (0..d).collect();
        perm.shuffle(rng);
        let shift = rng.gen_range(0..q.order()) as usize;
        CubeAutomorphism { perm, shift }
    }

    pub fn apply(&self, x: usize) -> usize {
        let mut y = 0usize;
        for (i, &p) in self.perm.iter().enumerate() {
            y |= ((x >> i) & 1) << p;
        }
        y ^ self.shift
    }

    pub fn apply_set(&self, s: &LandmarkSet) -> LandmarkSet {
        LandmarkSet::new(s.iter().map(|x| self.apply(x)).collect()).expect("bijection")
    }
}

/// An automorphic image of `seed_set` with up to `max_extra` random extra
/// vertices. Generators of every kind stay generators under both steps.
pub fn random_superset_image<R: Rng>(
    rng: &mut R,
    q: Hypercube,
    seed_set: &LandmarkSet,
    max_extra: usize,
) -> LandmarkSet {
    let mut s = CubeAutomorphism::random(rng, q).apply_set(seed_set);
    let extra = rng.gen_range(0..=max_extra);
    for _ in 0..extra {
        s = s.with(rng.gen_range(0..q.order()) as usize);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::bipartition;
    use crate::host::Host;

    #[test]
    fn bipartite_graphs_are_bipartite_and_connected() {
        for i in 0..200 {
            let mut rng = trial_rng(1, i);
            let g = random_bipartite_graph(&mut rng, 40).unwrap();
            assert!(g.vertex_count() <= 40);
            assert!(bipartition(&g).is_bipartite());
        }
    }

    #[test]
    fn automorphisms_preserve_distance() {
        let q = Hypercube::new(6).unwrap();
        let mut rng = trial_rng(9, 0);
        for _ in 0..20 {
            let f = CubeAutomorphism::random(&mut rng, q);
            for x in (0..64).step_by(5) {
                for y in 0..64 {
                    assert_eq!(q.distance(x, y), q.distance(f.apply(x), f.apply(y)));
                }
            }
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let a: u64 = trial_rng(7, 3).gen();
        let b: u64 = trial_rng(7, 3).gen();
        let c: u64 = trial_rng(7, 4).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
