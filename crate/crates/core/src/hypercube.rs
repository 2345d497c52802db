//! The hypercube `Q_d` as bit vectors: Hamming distance by popcount,
//! coordinate flips, antipodes, canonical edges and half-cubes.
//!
//! Coordinate `i` (1-based in printed output) lives at bit `i - 1`, and a
//! vertex prints with coordinate 1 first: bits `0b001` in `Q_3` print as
//! `"100"`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const MAX_DIMENSION: u32 = 62;

fn check_dimension(d: u32) -> Result<()> {
    if (1..=MAX_DIMENSION).contains(&d) {
        Ok(())
    } else {
        Err(Error::InvalidDimension(d))
    }
}

#[inline]
fn mask(d: u32) -> u64 {
    (1u64 << d) - 1
}

/// A vertex of `Q_d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitVertex {
    bits: u64,
    d: u32,
}

impl BitVertex {
    pub fn new(bits: u64, d: u32) -> Result<Self> {
        check_dimension(d)?;
        if bits > mask(d) {
            return Err(Error::InvalidVertex(format!(
                "{bits:#b} has more than {d} bits"
            )));
        }
        Ok(BitVertex { bits, d })
    }

    pub fn zero(d: u32) -> Result<Self> {
        Self::new(0, d)
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn dimension(self) -> u32 {
        self.d
    }

    /// Value at 0-based coordinate `i`.
    #[inline]
    pub fn coordinate(self, i: u32) -> u8 {
        ((self.bits >> i) & 1) as u8
    }

    pub fn weight(self) -> u32 {
        self.bits.count_ones()
    }
}

impl fmt::Display for BitVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.d)
            .map(|i| if self.coordinate(i) == 1 { '1' } else { '0' })
            .collect();
        f.write_str(&s)
    }
}

impl FromStr for BitVertex {
    type Err = Error;

    /// Parses a bitstring; its length is the dimension.
    fn from_str(s: &str) -> Result<Self> {
        let d = u32::try_from(s.len()).map_err(|_| Error::InvalidVertex(s.into()))?;
        check_dimension(d).map_err(|_| Error::InvalidVertex(s.into()))?;
        let mut bits = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << i,
                _ => return Err(Error::InvalidVertex(format!("{s:?} is not a bitstring"))),
            }
        }
        Ok(BitVertex { bits, d })
    }
}

pub fn hamming_distance(u: BitVertex, v: BitVertex) -> Result<u32> {
    if u.d != v.d {
        return Err(Error::DimensionMismatch(u.d, v.d));
    }
    Ok((u.bits ^ v.bits).count_ones())
}

/// `u ⊕ α_i` for the 0-based coordinate `i`.
pub fn flip(u: BitVertex, i: u32) -> Result<BitVertex> {
    if i >= u.d {
        return Err(Error::CoordinateOutOfRange { coord: i, d: u.d });
    }
    Ok(BitVertex {
        bits: u.bits ^ (1 << i),
        d: u.d,
    })
}

pub fn antipode(u: BitVertex) -> BitVertex {
    BitVertex {
        bits: !u.bits & mask(u.d),
        d: u.d,
    }
}

/// An edge `{base, base ⊕ α_coord}` in canonical form: bit `coord` of
/// `base` is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CubeEdge {
    base: BitVertex,
    coord: u32,
}

impl CubeEdge {
    /// The edge along `coord` through `u`, in canonical form.
    pub fn through(u: BitVertex, coord: u32) -> Result<Self> {
        if coord >= u.d {
            return Err(Error::CoordinateOutOfRange { coord, d: u.d });
        }
        Ok(CubeEdge {
            base: BitVertex {
                bits: u.bits & !(1 << coord),
                d: u.d,
            },
            coord,
        })
    }

    pub fn between(a: BitVertex, b: BitVertex) -> Result<Self> {
        let diff = a.bits ^ b.bits;
        if hamming_distance(a, b)? != 1 {
            return Err(Error::NotAnEdge(format!("{a}-{b}")));
        }
        Self::through(a, diff.trailing_zeros())
    }

    pub fn base(self) -> BitVertex {
        self.base
    }

    pub fn coord(self) -> u32 {
        self.coord
    }

    pub fn endpoints(self) -> (BitVertex, BitVertex) {
        (
            self.base,
            BitVertex {
                bits: self.base.bits | (1 << self.coord),
                d: self.base.d,
            },
        )
    }
}

impl fmt::Display for CubeEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.base, self.coord + 1)
    }
}

impl FromStr for CubeEdge {
    type Err = Error;

    /// Parses `"bitstring@coord"` with a 1-based coordinate; the base need
    /// not be canonical.
    fn from_str(s: &str) -> Result<Self> {
        let (v, c) = s
            .split_once('@')
            .ok_or_else(|| Error::InvalidVertex(format!("{s:?} is not an edge")))?;
        let base: BitVertex = v.parse()?;
        let coord: u32 = c
            .parse()
            .map_err(|_| Error::InvalidVertex(format!("bad coordinate in {s:?}")))?;
        if coord == 0 {
            return Err(Error::CoordinateOutOfRange {
                coord: 0,
                d: base.d,
            });
        }
        Self::through(base, coord - 1)
    }
}

/// Distance from `x` to edge `e` by popcount: one less than the distance to
/// the base when `x` sits across coordinate `e.coord`.
pub fn edge_distance_fast(e: CubeEdge, x: BitVertex) -> Result<u32> {
    if e.base.d != x.d {
        return Err(Error::DimensionMismatch(e.base.d, x.d));
    }
    let diff = e.base.bits ^ x.bits;
    Ok(diff.count_ones() - ((diff >> e.coord) & 1) as u32)
}

/// All edges of `Q_d` ordered by coordinate, then by base.
pub fn enumerate_edges(d: u32) -> Result<impl Iterator<Item = CubeEdge>> {
    check_dimension(d)?;
    let half = 1u64 << (d - 1);
    Ok((0..d).flat_map(move |coord| {
        (0..half).map(move |j| CubeEdge {
            base: BitVertex {
                bits: insert_zero_bit(j, coord),
                d,
            },
            coord,
        })
    }))
}

/// Spreads `j` around a zero at bit position `pos`.
#[inline]
pub(crate) fn insert_zero_bit(j: u64, pos: u32) -> u64 {
    let low = j & ((1u64 << pos) - 1);
    ((j >> pos) << (pos + 1)) | low
}

/// The vertices with value `side` at coordinate `coord`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfCube {
    d: u32,
    coord: u32,
    side: u8,
}

impl HalfCube {
    pub fn coord(&self) -> u32 {
        self.coord
    }

    pub fn side(&self) -> u8 {
        self.side
    }

    pub fn contains(&self, v: BitVertex) -> bool {
        v.d == self.d && v.coordinate(self.coord) == self.side
    }

    pub fn len(&self) -> u64 {
        1 << (self.d - 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertices(&self) -> impl Iterator<Item = BitVertex> + '_ {
        let side_bit = (self.side as u64) << self.coord;
        (0..self.len()).map(move |j| BitVertex {
            bits: insert_zero_bit(j, self.coord) | side_bit,
            d: self.d,
        })
    }
}

pub fn half_cube_split(d: u32, coord: u32) -> Result<(HalfCube, HalfCube)> {
    check_dimension(d)?;
    if coord >= d {
        return Err(Error::CoordinateOutOfRange { coord, d });
    }
    Ok((
        HalfCube { d, coord, side: 0 },
        HalfCube { d, coord, side: 1 },
    ))
}

/// `Q_d` as a host graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Hypercube {
    d: u32,
}

impl Hypercube {
    pub fn new(d: u32) -> Result<Self> {
        check_dimension(d)?;
        Ok(Hypercube { d })
    }

    pub fn dimension(&self) -> u32 {
        self.d
    }

    pub fn order(&self) -> u64 {
        1 << self.d
    }

    pub fn size(&self) -> u64 {
        (self.d as u64) << (self.d - 1)
    }

    pub fn vertex(&self, bits: u64) -> Result<BitVertex> {
        BitVertex::new(bits, self.d)
    }

    pub fn parse_vertex(&self, s: &str) -> Result<BitVertex> {
        let v: BitVertex = s.parse()?;
        if v.d != self.d {
            return Err(Error::DimensionMismatch(v.d, self.d));
        }
        Ok(v)
    }

    /// The edge at position `index` of [`enumerate_edges`].
    pub fn edge_at(&self, index: u64) -> CubeEdge {
        let half_bits = self.d - 1;
        let coord = (index >> half_bits) as u32;
        let j = index & ((1u64 << half_bits) - 1);
        CubeEdge {
            base: BitVertex {
                bits: insert_zero_bit(j, coord),
                d: self.d,
            },
            coord,
        }
    }

    /// Inverse of [`Hypercube::edge_at`].
    pub fn edge_index(&self, e: CubeEdge) -> u64 {
        let b = e.base.bits;
        let low = b & ((1u64 << e.coord) - 1);
        let j = ((b >> (e.coord + 1)) << e.coord) | low;
        ((e.coord as u64) << (self.d - 1)) | j
    }
}

impl fmt::Display for Hypercube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q_{}", self.d)
    }
}
