//! Vertices, edges, cycles and subgraphs of `Q_n`.
//!
//! A vertex is stored as its numeric value with position 1 in the most
//! significant of the `n` low bits. An edge is keyed by its lighter endpoint
//! and the flipped position.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Largest dimension representable by [`Vertex`].
pub const MAX_DIM: u32 = 24;

/// Largest dimension for which a [`Subgraph`] (dense per-vertex masks) is built.
pub const MAX_SUBGRAPH_DIM: u32 = 20;

pub(crate) fn check_dim(n: u32) -> Result<()> {
    if (1..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::Dimension(n))
    }
}

/// A vertex of `Q_n`, i.e. an `n`-bit binary word.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Vertex {
    bits: u32,
    n: u8,
}

impl Vertex {
    pub fn new(bits: u32, n: u32) -> Result<Self> {
        check_dim(n)?;
        if n < 32 && bits >> n != 0 {
            return Err(Error::InvalidArgument(format!(
                "value {bits} does not fit in {n} bits"
            )));
        }
        Ok(Vertex { bits, n: n as u8 })
    }

    /// Caller guarantees `bits < 2^n` and `n` within range.
    pub(crate) fn from_raw(bits: u32, n: u32) -> Self {
        debug_assert!((1..=MAX_DIM).contains(&n) && bits >> n == 0);
        Vertex { bits, n: n as u8 }
    }

    /// Parses an `n`-character binary string, leftmost character = position 1.
    pub fn parse(s: &str, n: u32) -> Result<Self> {
        check_dim(n)?;
        let len = s.chars().count();
        if len != n as usize {
            return Err(Error::LengthMismatch {
                expected: n as usize,
                got: len,
            });
        }
        let mut bits = 0u32;
        for ch in s.chars() {
            bits <<= 1;
            match ch {
                '0' => {}
                '1' => bits |= 1,
                other => return Err(Error::IllegalChar(other)),
            }
        }
        Ok(Vertex { bits, n: n as u8 })
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn dim(self) -> u32 {
        self.n as u32
    }

    pub fn weight(self) -> u32 {
        self.bits.count_ones()
    }

    /// Bit at 1-indexed position `pos`.
    pub fn bit(self, pos: u32) -> Result<bool> {
        self.check_pos(pos)?;
        Ok(self.bits >> (self.dim() - pos) & 1 == 1)
    }

    pub fn flip(self, pos: u32) -> Result<Vertex> {
        self.check_pos(pos)?;
        Ok(Vertex {
            bits: self.bits ^ pos_mask(pos, self.dim()),
            n: self.n,
        })
    }

    pub fn hamming(self, other: Vertex) -> u32 {
        (self.bits ^ other.bits).count_ones()
    }

    /// The word read right to left.
    pub fn reverse(self) -> Vertex {
        let n = self.dim();
        Vertex {
            bits: self.bits.reverse_bits() >> (32 - n),
            n: self.n,
        }
    }

    /// The word formed by the bits at the given sorted positions.
    pub fn restrict(self, positions: &[u32]) -> Result<String> {
        let mut out = String::with_capacity(positions.len());
        let mut last = 0;
        for &p in positions {
            if p <= last {
                return Err(Error::InvalidArgument(
                    "restriction positions must be strictly ascending".into(),
                ));
            }
            last = p;
            out.push(if self.bit(p)? { '1' } else { '0' });
        }
        Ok(out)
    }

    /// All `n` neighbors in ascending numeric order.
    pub fn neighbors(self) -> impl Iterator<Item = Vertex> {
        let n = self.dim();
        let mut out: Vec<Vertex> = (0..n)
            .map(|b| Vertex {
                bits: self.bits ^ (1 << b),
                n: self.n,
            })
            .collect();
        out.sort();
        out.into_iter()
    }

    fn check_pos(self, pos: u32) -> Result<()> {
        if pos == 0 || pos > self.dim() {
            Err(Error::Position { pos, n: self.dim() })
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.bits, width = self.n as usize)
    }
}

impl serde::Serialize for Vertex {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[inline]
pub(crate) fn pos_mask(pos: u32, n: u32) -> u32 {
    1 << (n - pos)
}

/// Position (1-indexed from the left) of a single-bit mask.
#[inline]
pub(crate) fn mask_pos(mask: u32, n: u32) -> u32 {
    n - mask.trailing_zeros()
}

/// An edge of `Q_n`, stored as its 0-side endpoint and the flipped position.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Edge {
    low: Vertex,
    pos: u32,
}

impl Edge {
    pub fn new(low: Vertex, pos: u32) -> Result<Self> {
        if low.bit(pos)? {
            return Err(Error::InvalidArgument(format!(
                "{low} has a 1 at position {pos}; not the lower endpoint"
            )));
        }
        Ok(Edge { low, pos })
    }

    pub(crate) fn from_raw(low: u32, pos: u32, n: u32) -> Self {
        Edge {
            low: Vertex::from_raw(low, n),
            pos,
        }
    }

    /// Normalized edge joining two vertices at Hamming distance one.
    pub fn between(x: Vertex, y: Vertex) -> Result<Self> {
        if x.dim() != y.dim() {
            return Err(Error::DimensionMismatch(x.dim(), y.dim()));
        }
        let diff = x.bits ^ y.bits;
        if diff.count_ones() != 1 {
            return Err(Error::NotAdjacent(x.to_string(), y.to_string()));
        }
        let low = if x.bits & diff == 0 { x } else { y };
        Ok(Edge {
            low,
            pos: mask_pos(diff, x.dim()),
        })
    }

    pub fn low(self) -> Vertex {
        self.low
    }

    pub fn high(self) -> Vertex {
        Vertex {
            bits: self.low.bits | pos_mask(self.pos, self.low.dim()),
            n: self.low.n,
        }
    }

    pub fn pos(self) -> u32 {
        self.pos
    }

    pub fn dim(self) -> u32 {
        self.low.dim()
    }

    /// Edge layer: weight of the lower endpoint.
    pub fn layer(self) -> u32 {
        self.low.weight()
    }

    /// Number of 1s strictly before the flipped position.
    pub fn prefix_weight(self) -> u32 {
        let n = self.dim();
        (self.low.bits >> (n - self.pos + 1)).count_ones()
    }

    /// Number of 1s strictly after the flipped position.
    pub fn suffix_weight(self) -> u32 {
        let n = self.dim();
        (self.low.bits & (pos_mask(self.pos, n) - 1)).count_ones()
    }

    /// The edge between the reversed endpoints.
    pub fn reverse(self) -> Edge {
        Edge {
            low: self.low.reverse(),
            pos: self.dim() + 1 - self.pos,
        }
    }

    /// Dense index `low * n + (pos - 1)`.
    pub fn index(self) -> usize {
        self.low.bits as usize * self.dim() as usize + (self.pos - 1) as usize
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.low, self.high())
    }
}

/// All edges of `Q_n` in ascending `(low, pos)` order.
pub fn edges(n: u32) -> impl Iterator<Item = Edge> {
    (0..1u32 << n).flat_map(move |low| {
        (1..=n)
            .filter(move |&pos| low & pos_mask(pos, n) == 0)
            .map(move |pos| Edge::from_raw(low, pos, n))
    })
}

pub fn edge_count(n: u32) -> u64 {
    n as u64 * (1u64 << (n - 1))
}

/// A cycle of `Q_n` stored as its vertex sequence; the closing edge is implicit.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Cycle {
    vertices: Vec<Vertex>,
}

impl Cycle {
    pub fn new(vertices: Vec<Vertex>) -> Result<Self> {
        let len = vertices.len();
        if len < 4 || !len.is_multiple_of(2) {
            return Err(Error::CycleLength(len));
        }
        let n = vertices[0].dim();
        for (i, v) in vertices.iter().enumerate() {
            if v.dim() != n {
                return Err(Error::DimensionMismatch(n, v.dim()));
            }
            let next = vertices[(i + 1) % len];
            if v.hamming(next) != 1 {
                return Err(Error::InvalidCycle(format!(
                    "{v} and {next} are not adjacent"
                )));
            }
        }
        let distinct: BTreeSet<_> = vertices.iter().collect();
        if distinct.len() != len {
            return Err(Error::InvalidCycle("repeated vertex".into()));
        }
        Ok(Cycle { vertices })
    }

    pub fn parse(words: &[&str], n: u32) -> Result<Self> {
        let vs = words
            .iter()
            .map(|w| Vertex::parse(w, n))
            .collect::<Result<Vec<_>>>()?;
        Cycle::new(vs)
    }

    /// Raw numeric sequence, already validated by the search engine.
    pub(crate) fn from_bits_unchecked(bits: &[u32], n: u32) -> Self {
        Cycle {
            vertices: bits.iter().map(|&b| Vertex::from_raw(b, n)).collect(),
        }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn dim(&self) -> u32 {
        self.vertices[0].dim()
    }

    /// Cycle edges in traversal order, starting with `v_1 v_2`.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let len = self.vertices.len();
        (0..len).map(move |i| {
            Edge::between(self.vertices[i], self.vertices[(i + 1) % len])
                .expect("cycle vertices are adjacent")
        })
    }

    /// Lexicographic minimum over all rotations and both directions.
    pub fn canonical(&self) -> Cycle {
        let len = self.vertices.len();
        let mut best: Option<Vec<Vertex>> = None;
        for start in 0..len {
            for dir in [1isize, -1] {
                let seq: Vec<Vertex> = (0..len as isize)
                    .map(|k| self.vertices[(start as isize + dir * k).rem_euclid(len as isize) as usize])
                    .collect();
                if best.as_ref().is_none_or(|b| seq < *b) {
                    best = Some(seq);
                }
            }
        }
        Cycle {
            vertices: best.expect("non-empty cycle"),
        }
    }

    /// True iff no two non-consecutive vertices are adjacent in `Q_n`.
    pub fn is_induced(&self) -> bool {
        let len = self.vertices.len();
        for i in 0..len {
            for j in i + 2..len {
                if i == 0 && j == len - 1 {
                    continue;
                }
                if self.vertices[i].hamming(self.vertices[j]) == 1 {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.vertices.iter().map(|v| v.to_string()).collect()
    }
}

impl serde::Serialize for Cycle {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.vertices.iter().map(|v| v.to_string()))
    }
}

/// An edge subset of `Q_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgraph {
    n: u32,
    edges: BTreeSet<Edge>,
    masks: Vec<u32>,
}

impl Subgraph {
    pub fn empty(n: u32) -> Result<Self> {
        check_dim(n)?;
        if n > MAX_SUBGRAPH_DIM {
            return Err(Error::Guard(format!(
                "subgraphs are limited to n <= {MAX_SUBGRAPH_DIM}"
            )));
        }
        Ok(Subgraph {
            n,
            edges: BTreeSet::new(),
            masks: vec![0; 1 << n],
        })
    }

    pub fn full(n: u32) -> Result<Self> {
        Self::from_edges(n, edges(n))
    }

    pub fn from_edges(n: u32, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for e in edges {
            g.insert(e)?;
        }
        Ok(g)
    }

    /// Keeps each edge of `Q_n` independently with probability `p`, in
    /// ascending edge order, driven by a ChaCha8 stream seeded with `seed`.
    pub fn random(n: u32, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("probability {p} not in [0, 1]")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = Self::empty(n)?;
        for e in edges(n) {
            if rng.gen_bool(p) {
                g.insert(e)?;
            }
        }
        Ok(g)
    }

    /// Returns `true` if the edge was not already present.
    pub fn insert(&mut self, e: Edge) -> Result<bool> {
        if e.dim() != self.n {
            return Err(Error::DimensionMismatch(self.n, e.dim()));
        }
        let m = pos_mask(e.pos, self.n);
        self.masks[e.low.bits as usize] |= m;
        self.masks[e.high().bits as usize] |= m;
        Ok(self.edges.insert(e))
    }

    pub fn remove(&mut self, e: Edge) -> bool {
        if !self.edges.remove(&e) {
            return false;
        }
        let m = pos_mask(e.pos, self.n);
        self.masks[e.low.bits as usize] &= !m;
        self.masks[e.high().bits as usize] &= !m;
        true
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn contains(&self, e: Edge) -> bool {
        e.dim() == self.n && self.edges.contains(&e)
    }

    pub fn has_edge_between(&self, x: u32, y: u32) -> bool {
        let d = x ^ y;
        d.count_ones() == 1 && self.masks[x as usize] & d != 0
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn degree(&self, v: Vertex) -> u32 {
        self.masks[v.bits as usize].count_ones()
    }

    /// Neighbor mask of vertex `v`: bit `b` set iff `v ^ (1 << b)` is a neighbor in the subgraph.
    pub fn masks(&self) -> &[u32] {
        &self.masks
    }

    /// Text form: header `qcube-subgraph n=<n>`, then `<low> <high>` per edge in ascending order.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "qcube-subgraph n={}", self.n)?;
        for e in &self.edges {
            writeln!(w, "{} {}", e.low, e.high())?;
        }
        Ok(())
    }

    pub fn read_from(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let n = loop {
            let Some((i, line)) = lines.next() else {
                return Err(Error::malformed(1, "missing header"));
            };
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let rest = line
                .strip_prefix("qcube-subgraph n=")
                .ok_or_else(|| Error::malformed(i + 1, "expected header `qcube-subgraph n=<n>`"))?;
            break rest
                .trim()
                .parse::<u32>()
                .map_err(|_| Error::malformed(i + 1, "bad dimension in header"))?;
        };
        let mut g = Subgraph::empty(n)?;
        for (i, line) in lines {
            let line = line?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                [] => continue,
                [a, b] => {
                    let (x, y) = (Vertex::parse(a, n)?, Vertex::parse(b, n)?);
                    let e = Edge::between(x, y)?;
                    if e.low != x {
                        return Err(Error::malformed(i + 1, "lower endpoint must come first"));
                    }
                    if !g.insert(e)? {
                        return Err(Error::malformed(i + 1, format!("duplicate edge {e}")));
                    }
                }
                _ => return Err(Error::malformed(i + 1, "expected `<low> <high>`")),
            }
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Vertex {
        Vertex::parse(s, s.len() as u32).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(v("000").weight(), 0);
        let x = v("0010010110");
        assert_eq!(x.weight(), 4);
        let y = v("101");
        assert_eq!((y.weight(), y.bits()), (2, 5));
        assert_eq!(x.to_string(), "0010010110");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            Vertex::parse("0101", 3),
            Err(Error::LengthMismatch { expected: 3, got: 4 })
        ));
        assert!(matches!(Vertex::parse("01x", 3), Err(Error::IllegalChar('x'))));
        assert!(matches!(Vertex::parse("", 0), Err(Error::Dimension(0))));
        assert!(Vertex::new(8, 3).is_err());
    }

    #[test]
    fn restrict_examples() {
        let x = v("0010010110");
        assert_eq!(x.restrict(&[2, 3, 5, 6, 10]).unwrap(), "01010");
        assert_eq!(x.restrict(&[]).unwrap(), "");
        assert_eq!(v("110").restrict(&[1, 3]).unwrap(), "10");
        assert!(matches!(v("110").restrict(&[4]), Err(Error::Position { pos: 4, n: 3 })));
        assert!(v("110").restrict(&[3, 1]).is_err());
    }

    #[test]
    fn edge_between_examples() {
        let e = Edge::between(v("000"), v("001")).unwrap();
        assert_eq!((e.low(), e.pos(), e.layer()), (v("000"), 3, 0));
        assert_eq!((e.prefix_weight(), e.suffix_weight()), (0, 0));

        let e = Edge::between(v("111"), v("110")).unwrap();
        assert_eq!((e.low(), e.pos(), e.layer()), (v("110"), 3, 2));
        assert_eq!((e.prefix_weight(), e.suffix_weight()), (2, 0));

        let e = Edge::between(v("010"), v("110")).unwrap();
        assert_eq!((e.low(), e.pos(), e.layer()), (v("010"), 1, 1));
        assert_eq!((e.prefix_weight(), e.suffix_weight()), (0, 1));
        assert_eq!(e.high(), v("110"));

        assert!(matches!(
            Edge::between(v("000"), v("011")),
            Err(Error::NotAdjacent(..))
        ));
        assert!(Edge::between(v("000"), v("000")).is_err());
    }

    #[test]
    fn reverse_examples() {
        assert_eq!(v("000").reverse(), v("000"));
        assert_eq!(v("0010010110").reverse(), v("0110100100"));
        for b in 0..16 {
            let x = Vertex::new(b, 4).unwrap();
            assert_eq!(x.reverse().reverse(), x);
        }
    }

    #[test]
    fn prefix_suffix_split_layer_exhaustively() {
        for n in 1..=6 {
            for e in edges(n) {
                assert_eq!(e.prefix_weight() + e.suffix_weight(), e.layer());
                assert_eq!(e.high().weight(), e.layer() + 1);
            }
        }
    }

    #[test]
    fn same_layer_prefix_parity_matches_suffix_parity() {
        for n in 1..=6 {
            let all: Vec<Edge> = edges(n).collect();
            for a in &all {
                for b in all.iter().filter(|b| b.layer() == a.layer()) {
                    let p = (a.prefix_weight() + b.prefix_weight()) % 2 == 0;
                    let s = (a.suffix_weight() + b.suffix_weight()) % 2 == 0;
                    assert_eq!(p, s);
                }
            }
        }
    }

    #[test]
    fn edge_census() {
        for n in 1..=10 {
            let mut per_layer = vec![0u64; n as usize];
            let mut count = 0;
            let mut last = None;
            for e in edges(n) {
                per_layer[e.layer() as usize] += 1;
                count += 1;
                assert!(last < Some(e));
                last = Some(e);
            }
            assert_eq!(count, edge_count(n));
            assert_eq!(per_layer.iter().sum::<u64>(), edge_count(n));
        }
    }

    #[test]
    fn induced_examples() {
        let square = Cycle::parse(&["00", "01", "11", "10"], 2).unwrap();
        assert!(square.is_induced());
        let sq3 = Cycle::parse(&["000", "001", "011", "010"], 3).unwrap();
        assert!(sq3.is_induced());
        // avoids 000 and 111
        let hex = Cycle::parse(&["100", "110", "010", "011", "001", "101"], 3).unwrap();
        assert!(hex.is_induced());
        // avoids the adjacent pair 000, 001; 111-110 is a chord
        let hex2 = Cycle::parse(&["010", "011", "111", "101", "100", "110"], 3).unwrap();
        assert!(!hex2.is_induced());
    }

    #[test]
    fn cycle_validation() {
        assert!(Cycle::parse(&["000", "001", "011"], 3).is_err());
        assert!(Cycle::parse(&["000", "001", "011", "111"], 3).is_err());
        assert!(Cycle::parse(&["00", "01", "00", "01"], 2).is_err());
    }

    #[test]
    fn canonical_form() {
        let c = Cycle::parse(&["011", "010", "000", "001"], 3).unwrap();
        let canon = c.canonical();
        assert_eq!(canon.to_strings(), ["000", "001", "011", "010"]);
    }

    #[test]
    fn subgraph_file_round_trip() {
        let g = Subgraph::random(4, 0.5, 7).unwrap();
        let mut buf = Vec::new();
        g.write_to(&mut buf).unwrap();
        let back = Subgraph::read_from(buf.as_slice()).unwrap();
        assert_eq!(g, back);
        assert!(Subgraph::read_from("qcube-subgraph n=2\n01 00\n".as_bytes()).is_err());
        assert!(Subgraph::read_from("qcube-subgraph n=2\n00 01\n00 01\n".as_bytes()).is_err());
        assert!(Subgraph::read_from("nonsense\n".as_bytes()).is_err());
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn restrict_full_and_concatenation(n in 1u32..=12, raw in any::<u32>(), pick in any::<u32>(), cut in 0u32..=12) {
            let x = Vertex::new(raw & ((1u32 << n) - 1), n).unwrap();
            let all: Vec<u32> = (1..=n).collect();
            prop_assert_eq!(x.restrict(&all).unwrap(), x.to_string());
            let chosen: Vec<u32> = all.iter().copied().filter(|p| pick >> (p - 1) & 1 == 1).collect();
            let (a, b): (Vec<u32>, Vec<u32>) = chosen.iter().partition(|&&p| p <= cut);
            let joined = format!("{}{}", x.restrict(&a).unwrap(), x.restrict(&b).unwrap());
            prop_assert_eq!(x.restrict(&chosen).unwrap(), joined);
        }

        #[test]
        fn canonical_invariant_under_rotation_and_reversal(start in 0usize..8, rev in any::<bool>(), which in 0usize..6) {
            // the six squares and one hexagon family of Q_3 as seeds
            let seeds: [&[&str]; 6] = [
                &["000", "001", "011", "010"],
                &["100", "101", "111", "110"],
                &["000", "010", "110", "100"],
                &["100", "110", "010", "011", "001", "101"],
                &["000", "001", "101", "111", "110", "010"],
                &["001", "011", "111", "110", "100", "101"],
            ];
            let c = Cycle::parse(seeds[which], 3).unwrap();
            let len = c.len();
            let mut vs: Vec<Vertex> = (0..len).map(|i| c.vertices()[(i + start) % len]).collect();
            if rev {
                vs.reverse();
            }
            let moved = Cycle::new(vs).unwrap();
            prop_assert_eq!(moved.canonical(), c.canonical());
        }
    }
}
