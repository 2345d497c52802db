//! Distance signatures and generator verification for the metric, edge and
//! mixed kinds, with explicit witnesses on failure.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::host::{Element, Host};

/// Largest element count any enumeration over a host will attempt.
pub const MAX_ELEMENTS: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Metric,
    Edge,
    Mixed,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 3] = [Self::Metric, Self::Edge, Self::Mixed];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Metric => "metric",
            Self::Edge => "edge",
            Self::Mixed => "mixed",
        }
    }

    pub fn includes_vertices(self) -> bool {
        matches!(self, Self::Metric | Self::Mixed)
    }

    pub fn includes_edges(self) -> bool {
        matches!(self, Self::Edge | Self::Mixed)
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "metric" => Ok(Self::Metric),
            "edge" => Ok(Self::Edge),
            "mixed" => Ok(Self::Mixed),
            _ => Err(Error::InvalidArgument(format!(
                "unknown kind {s:?} (expected metric, edge or mixed)"
            ))),
        }
    }
}

/// An ordered set of distinct landmark vertices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LandmarkSet(Vec<usize>);

impl LandmarkSet {
    pub fn new(landmarks: Vec<usize>) -> Result<Self> {
        let mut seen = landmarks.clone();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateLandmark(w[0]));
        }
        Ok(LandmarkSet(landmarks))
    }

    /// Parses vertex labels in the host's notation.
    pub fn parse<H: Host + ?Sized>(host: &H, labels: &[&str]) -> Result<Self> {
        let vs = labels
            .iter()
            .map(|s| host.parse_vertex(s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(vs)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    /// Same members in increasing order.
    pub fn sorted(&self) -> Self {
        let mut v = self.0.clone();
        v.sort_unstable();
        LandmarkSet(v)
    }

    /// Appends `v` unless already present.
    pub fn with(&self, v: usize) -> Self {
        let mut out = self.0.clone();
        if !out.contains(&v) {
            out.push(v);
        }
        LandmarkSet(out)
    }

    pub fn without(&self, v: usize) -> Self {
        LandmarkSet(self.0.iter().copied().filter(|&x| x != v).collect())
    }

    pub fn labels<H: Host + ?Sized>(&self, host: &H) -> Vec<String> {
        self.0.iter().map(|&v| host.vertex_label(v)).collect()
    }

    fn validate<H: Host + ?Sized>(&self, host: &H) -> Result<()> {
        if self.0.is_empty() {
            return Err(Error::EmptyLandmarks);
        }
        let n = host.vertex_count();
        match self.0.iter().find(|&&v| v >= n) {
            Some(v) => Err(Error::InvalidVertex(format!("{v} (host has {n} vertices)"))),
            None => Ok(()),
        }
    }
}

impl From<LandmarkSet> for Vec<usize> {
    fn from(s: LandmarkSet) -> Self {
        s.0
    }
}

/// Distances from one element to each landmark, in landmark order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Signature(pub Vec<u32>);

/// An unresolved pair of elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub kind: GeneratorKind,
    pub a: Element,
    pub b: Element,
    pub signature: Signature,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct WitnessRecord {
    pub kind: GeneratorKind,
    pub a: String,
    pub b: String,
    pub signature: Signature,
}

impl Witness {
    pub fn record<H: Host + ?Sized>(&self, host: &H) -> WitnessRecord {
        WitnessRecord {
            kind: self.kind,
            a: host.element_label(self.a),
            b: host.element_label(self.b),
            signature: self.signature.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Resolved,
    Unresolved(Witness),
}

impl Verdict {
    pub fn is_resolved(&self) -> bool {
        matches!(self, Verdict::Resolved)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Resolved => None,
            Verdict::Unresolved(w) => Some(w),
        }
    }
}

/// The elements a generator of `kind` must separate, in canonical order.
pub fn elements<H: Host + ?Sized>(host: &H, kind: GeneratorKind) -> Result<Vec<Element>> {
    let nv = if kind.includes_vertices() {
        host.vertex_count()
    } else {
        0
    };
    let ne = if kind.includes_edges() {
        host.edge_count()
    } else {
        0
    };
    if nv + ne > MAX_ELEMENTS {
        return Err(Error::TooLarge {
            what: "elements",
            actual: nv + ne,
            limit: MAX_ELEMENTS,
        });
    }
    Ok((0..nv)
        .map(Element::Vertex)
        .chain((0..ne).map(Element::Edge))
        .collect())
}

fn check_element<H: Host + ?Sized>(host: &H, el: Element) -> Result<()> {
    let ok = match el {
        Element::Vertex(v) => v < host.vertex_count(),
        Element::Edge(e) => e < host.edge_count(),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidVertex(format!(
            "{el:?} is not in {}",
            host.id()
        )))
    }
}

pub fn signature<H: Host + ?Sized>(host: &H, el: Element, set: &LandmarkSet) -> Result<Signature> {
    set.validate(host)?;
    check_element(host, el)?;
    Ok(Signature(
        set.iter().map(|x| host.element_distance(el, x)).collect(),
    ))
}

/// Groups element indices by signature; each group lists members in order.
fn collision_groups<H: Host + ?Sized>(
    host: &H,
    set: &LandmarkSet,
    elems: &[Element],
) -> (Vec<u32>, Vec<Vec<usize>>) {
    let k = set.len();
    let mut sigs = Vec::with_capacity(elems.len() * k);
    for &el in elems {
        sigs.extend(set.iter().map(|x| host.element_distance(el, x)));
    }
    let mut buckets: HashMap<&[u32], usize> = HashMap::with_capacity(elems.len());
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..elems.len() {
        let key = &sigs[i * k..(i + 1) * k];
        match buckets.get(key) {
            Some(&g) => groups[g].push(i),
            None => {
                buckets.insert(key, groups.len());
                groups.push(vec![i]);
            }
        }
    }
    drop(buckets);
    groups.retain(|g| g.len() > 1);
    (sigs, groups)
}

/// Checks whether `set` separates every pair of elements of `kind`.
///
/// On failure the witness is the lexicographically first unresolved pair
/// in element order (vertices by label, then edges in enumeration order).
pub fn verify_generator<H: Host + ?Sized>(
    host: &H,
    set: &LandmarkSet,
    kind: GeneratorKind,
) -> Result<Verdict> {
    set.validate(host)?;
    let elems = elements(host, kind)?;
    let (sigs, groups) = collision_groups(host, set, &elems);
    // groups are created in order of their first member
    Ok(match groups.first() {
        None => Verdict::Resolved,
        Some(g) => {
            let k = set.len();
            Verdict::Unresolved(Witness {
                kind,
                a: elems[g[0]],
                b: elems[g[1]],
                signature: Signature(sigs[g[0] * k..(g[0] + 1) * k].to_vec()),
            })
        }
    })
}

/// Every unresolved pair, sorted lexicographically.
pub fn all_witnesses<H: Host + ?Sized>(
    host: &H,
    set: &LandmarkSet,
    kind: GeneratorKind,
) -> Result<Vec<Witness>> {
    set.validate(host)?;
    let elems = elements(host, kind)?;
    let (sigs, groups) = collision_groups(host, set, &elems);
    let k = set.len();
    let mut pairs = Vec::new();
    for g in &groups {
        for (i, &a) in g.iter().enumerate() {
            for &b in &g[i + 1..] {
                pairs.push((a, b));
            }
        }
    }
    pairs.sort_unstable();
    Ok(pairs
        .into_iter()
        .map(|(a, b)| Witness {
            kind,
            a: elems[a],
            b: elems[b],
            signature: Signature(sigs[a * k..(a + 1) * k].to_vec()),
        })
        .collect())
}

pub fn is_generator<H: Host + ?Sized>(
    host: &H,
    set: &LandmarkSet,
    kind: GeneratorKind,
) -> Result<bool> {
    Ok(verify_generator(host, set, kind)?.is_resolved())
}
