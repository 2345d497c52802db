//! The hitting-set view of generators: for each unresolved pair, the set of
//! vertices that distinguish it. A landmark set is a generator iff it hits
//! every member of the family.

use crate::error::{Error, Result};
use crate::host::{Element, Host};
use crate::resolvers::{elements, GeneratorKind, LandmarkSet};

pub const MAX_METRIC_VERTICES: usize = 1 << 10;
pub const MAX_EDGES: usize = 1 << 13;
/// Memory cap, in 64-bit words, for the packed family.
const MAX_WORDS: usize = 1 << 27;

/// Distinguisher sets, one bitset over vertices per element pair.
#[derive(Debug, Clone)]
pub struct HittingFamily {
    n: usize,
    words: usize,
    pairs: Vec<(Element, Element)>,
    bits: Vec<u64>,
}

impl HittingFamily {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pair(&self, i: usize) -> (Element, Element) {
        self.pairs[i]
    }

    pub fn contains(&self, i: usize, x: usize) -> bool {
        x < self.n && self.bits[i * self.words + x / 64] >> (x % 64) & 1 == 1
    }

    /// Members of the `i`-th distinguisher set, increasing.
    pub fn set(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&x| self.contains(i, x)).collect()
    }

    pub fn is_hit_by(&self, s: &LandmarkSet) -> bool {
        (0..self.len()).all(|i| s.iter().any(|x| self.contains(i, x)))
    }

    /// Pairs left unhit by `s`.
    pub fn unhit(&self, s: &LandmarkSet) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| !s.iter().any(|x| self.contains(i, x)))
            .collect()
    }
}

/// For every pair of elements relevant to `kind`, the vertices whose
/// distances to the two elements differ.
pub fn distinguisher_sets<H: Host + ?Sized>(
    host: &H,
    kind: GeneratorKind,
) -> Result<HittingFamily> {
    let n = host.vertex_count();
    if kind == GeneratorKind::Metric && n > MAX_METRIC_VERTICES {
        return Err(Error::TooLarge {
            what: "vertices",
            actual: n,
            limit: MAX_METRIC_VERTICES,
        });
    }
    if kind.includes_edges() && host.edge_count() > MAX_EDGES {
        return Err(Error::TooLarge {
            what: "edges",
            actual: host.edge_count(),
            limit: MAX_EDGES,
        });
    }
    let elems = elements(host, kind)?;
    let m = elems.len();
    let words = n.div_ceil(64);
    let npairs = m * m.saturating_sub(1) / 2;
    if npairs.saturating_mul(words) > MAX_WORDS {
        return Err(Error::TooLarge {
            what: "distinguisher set words",
            actual: npairs.saturating_mul(words),
            limit: MAX_WORDS,
        });
    }
    // dist[x][e]
    let mut dist = vec![0u32; n * m];
    for x in 0..n {
        for (e, &el) in elems.iter().enumerate() {
            dist[x * m + e] = host.element_distance(el, x);
        }
    }
    let mut pairs = Vec::with_capacity(npairs);
    let mut bits = vec![0u64; npairs * words];
    let mut i = 0;
    for a in 0..m {
        for b in a + 1..m {
            pairs.push((elems[a], elems[b]));
            let row = &mut bits[i * words..(i + 1) * words];
            for x in 0..n {
                if dist[x * m + a] != dist[x * m + b] {
                    row[x / 64] |= 1 << (x % 64);
                }
            }
            i += 1;
        }
    }
    Ok(HittingFamily {
        n,
        words,
        pairs,
        bits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::host::Host;
    use crate::hypercube::{antipode, BitVertex, Hypercube};
    use crate::resolvers::verify_generator;

    #[test]
    fn c4_pair_distinguishers() {
        let q = Hypercube::new(2).unwrap();
        let f = distinguisher_sets(&q, GeneratorKind::Metric).unwrap();
        let a = Host::parse_vertex(&q, "01").unwrap();
        let b = Host::parse_vertex(&q, "10").unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        let i = (0..f.len())
            .find(|&i| f.pair(i) == (Element::Vertex(lo), Element::Vertex(hi)))
            .unwrap();
        assert_eq!(f.set(i), vec![lo, hi]);
    }

    #[test]
    fn distinct_distance_means_membership() {
        let q = Hypercube::new(3).unwrap();
        for kind in GeneratorKind::ALL {
            let f = distinguisher_sets(&q, kind).unwrap();
            for i in 0..f.len() {
                let (a, b) = f.pair(i);
                for x in 0..8 {
                    let differs = q.element_distance(a, x) != q.element_distance(b, x);
                    assert_eq!(f.contains(i, x), differs);
                }
            }
        }
    }

    #[test]
    fn antipodal_pairs_exclude_equidistant_vertices() {
        let d = 4;
        let q = Hypercube::new(d).unwrap();
        let f = distinguisher_sets(&q, GeneratorKind::Metric).unwrap();
        for i in 0..f.len() {
            let (Element::Vertex(a), Element::Vertex(b)) = f.pair(i) else {
                unreachable!()
            };
            let u = BitVertex::new(a as u64, d).unwrap();
            if antipode(u).bits() as usize != b {
                continue;
            }
            for x in 0..16usize {
                let half = (a ^ x).count_ones() == d / 2;
                assert_eq!(f.contains(i, x), !half);
            }
        }
    }

    #[test]
    fn hitting_equals_resolving() {
        let q = Hypercube::new(3).unwrap();
        for kind in GeneratorKind::ALL {
            let f = distinguisher_sets(&q, kind).unwrap();
            for mask in 1u32..256 {
                let s = LandmarkSet::new((0..8).filter(|x| mask >> x & 1 == 1).collect()).unwrap();
                assert_eq!(
                    f.is_hit_by(&s),
                    verify_generator(&q, &s, kind).unwrap().is_resolved()
                );
            }
        }
    }

    #[test]
    fn size_limits() {
        let q = Hypercube::new(11).unwrap();
        assert!(matches!(
            distinguisher_sets(&q, GeneratorKind::Metric),
            Err(Error::TooLarge { .. })
        ));
    }
}
