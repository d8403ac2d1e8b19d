//! Row matrices of layer cycles and the exhaustive `5 x 5` case scan.
//!
//! For a cycle `x_1 y_1 ... x_r y_r` inside one edge layer, `I(C)` is the
//! set of positions where consecutive lower vertices `x_i, x_{i+1}` differ,
//! and `A(C)` is the `r x |I|` matrix whose `i`-th row is `x_i[I]`. Rows are
//! cyclically ordered; row `i` is consecutive to rows `i +- 1 mod r`.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::hypercube::{mask_pos, pos_mask, Cycle, Vertex};
use crate::{with_threads, Error, Result};

/// Sorted 1-indexed positions `i_1 < ... < i_m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct PositionSet(Vec<u32>);

impl PositionSet {
    pub fn new(mut positions: Vec<u32>) -> Self {
        positions.sort_unstable();
        positions.dedup();
        PositionSet(positions)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A 0/1 matrix with at most 32 columns; column 0 is the leftmost and the
/// most significant of the row's `cols` low bits.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinMatrix {
    rows: Vec<u32>,
    cols: usize,
}

impl BinMatrix {
    pub fn new(rows: Vec<u32>, cols: usize) -> Result<Self> {
        if cols > 32 || (cols < 32 && rows.iter().any(|&r| r >> cols != 0)) {
            return Err(Error::InvalidArgument(format!(
                "rows do not fit in {cols} columns"
            )));
        }
        Ok(BinMatrix { rows, cols })
    }

    /// Rows given as equal-length binary strings.
    pub fn parse(rows: &[&str]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let bits = rows
            .iter()
            .map(|r| {
                if r.len() != cols {
                    return Err(Error::LengthMismatch {
                        expected: cols,
                        got: r.len(),
                    });
                }
                r.chars().try_fold(0u32, |acc, ch| match ch {
                    '0' => Ok(acc << 1),
                    '1' => Ok(acc << 1 | 1),
                    other => Err(Error::IllegalChar(other)),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        BinMatrix::new(bits, cols)
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row] >> (self.cols - 1 - col) & 1 == 1
    }

    /// Each row read right to left.
    pub fn column_reversed(&self) -> BinMatrix {
        let rows = self
            .rows
            .iter()
            .map(|r| if self.cols == 0 { 0 } else { r.reverse_bits() >> (32 - self.cols) })
            .collect();
        BinMatrix {
            rows,
            cols: self.cols,
        }
    }

    /// Two pairs of cyclically consecutive rows `(i, i')`, `(j, j')` and
    /// columns `s < t` such that all four rows agree on the columns before
    /// `t` other than `s`, and the `(s, t)` bits read
    /// `i: 00, i': 01, j: 01, j': 10` or `i: 00, i': 01, j: 11, j': 10`.
    pub fn has_bad_prefixes(&self) -> bool {
        let r = self.rows.len();
        if r < 2 || self.cols < 2 {
            return false;
        }
        let pairs: Vec<(usize, usize)> = (0..r)
            .flat_map(|i| [(i, (i + 1) % r), (i, (i + r - 1) % r)])
            .collect();
        let bits = |row: u32, s: usize, t: usize| -> (u32, u32) {
            (
                row >> (self.cols - 1 - s) & 1,
                row >> (self.cols - 1 - t) & 1,
            )
        };
        for t in 1..self.cols {
            // columns 0..t
            let before_t = ((1u32 << t) - 1) << (self.cols - t);
            for s in 0..t {
                let mask = before_t & !(1 << (self.cols - 1 - s));
                for &(i, i2) in &pairs {
                    let (ri, ri2) = (self.rows[i], self.rows[i2]);
                    if bits(ri, s, t) != (0, 0) || bits(ri2, s, t) != (0, 1) {
                        continue;
                    }
                    let common = ri & mask;
                    if ri2 & mask != common {
                        continue;
                    }
                    for &(j, j2) in &pairs {
                        let (rj, rj2) = (self.rows[j], self.rows[j2]);
                        if rj & mask != common || rj2 & mask != common {
                            continue;
                        }
                        if bits(rj2, s, t) == (1, 0) && matches!(bits(rj, s, t), (0, 1) | (1, 1)) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    /// Bad prefixes in the matrix or in its column reversal.
    pub fn has_bad_prefixes_either_way(&self) -> bool {
        self.has_bad_prefixes() || self.column_reversed().has_bad_prefixes()
    }

    /// Three rows and two columns whose six entries are all zero.
    pub fn chord_pattern(&self) -> bool {
        for a in 0..self.cols {
            for b in a + 1..self.cols {
                let both = (1u32 << (self.cols - 1 - a)) | (1u32 << (self.cols - 1 - b));
                let zero_rows = self.rows.iter().filter(|&&r| r & both == 0).count();
                if zero_rows >= 3 {
                    return true;
                }
            }
        }
        false
    }

    /// In every column the rows holding a 1 form a cyclic interval.
    pub fn column_consecutive_ones(&self) -> bool {
        let r = self.rows.len();
        (0..self.cols).all(|c| {
            let starts = (0..r)
                .filter(|&i| self.get(i, c) && !self.get((i + r - 1) % r, c))
                .count();
            starts <= 1
        })
    }
}

impl fmt::Display for BinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{:0width$b}", r, width = self.cols)?;
        }
        Ok(())
    }
}

/// `A(C)` together with its column positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AMatrix {
    pub matrix: BinMatrix,
    pub positions: PositionSet,
    /// Edge layer of the cycle (weight of the lower vertices).
    pub layer: u32,
}

/// Lower vertices `x_1..x_r` in cycle order, starting at the first lower
/// vertex of the stored sequence.
pub fn lower_vertices(c: &Cycle) -> Result<Vec<Vertex>> {
    let vs = c.vertices();
    let k = vs.iter().map(|v| v.weight()).min().unwrap_or(0);
    if vs.iter().any(|v| v.weight() > k + 1) {
        return Err(Error::NotLayerAlternating);
    }
    let first = vs.iter().position(|v| v.weight() == k).unwrap_or(0);
    Ok(vs[first..]
        .iter()
        .chain(&vs[..first])
        .step_by(2)
        .copied()
        .collect())
}

/// `I(C)` for a cycle inside one edge layer.
pub fn positions_of_change(c: &Cycle) -> Result<PositionSet> {
    let xs = lower_vertices(c)?;
    Ok(change_positions(&xs))
}

/// Positions where cyclically consecutive even-indexed vertices
/// `v_1, v_3, ...` differ. Agrees with [`positions_of_change`] on layer
/// cycles and is also defined for cycles that cross layers.
pub fn alternate_change_positions(c: &Cycle) -> PositionSet {
    let xs: Vec<Vertex> = c.vertices().iter().step_by(2).copied().collect();
    change_positions(&xs)
}

fn change_positions(xs: &[Vertex]) -> PositionSet {
    let n = xs[0].dim();
    let r = xs.len();
    let diff = (0..r).fold(0u32, |acc, i| acc | (xs[i].bits() ^ xs[(i + 1) % r].bits()));
    let mut positions = Vec::new();
    let mut m = diff;
    while m != 0 {
        let bit = m & m.wrapping_neg();
        m ^= bit;
        positions.push(mask_pos(bit, n));
    }
    PositionSet::new(positions)
}

impl AMatrix {
    /// `A(C)` for a cycle of any even length inside one edge layer.
    pub fn from_cycle(c: &Cycle) -> Result<Self> {
        let xs = lower_vertices(c)?;
        let positions = change_positions(&xs);
        let n = c.dim();
        let cols = positions.len();
        let rows = xs
            .iter()
            .map(|x| {
                positions.as_slice().iter().fold(0u32, |acc, &p| {
                    acc << 1 | u32::from(x.bits() & pos_mask(p, n) != 0)
                })
            })
            .collect();
        Ok(AMatrix {
            matrix: BinMatrix { rows, cols },
            positions,
            layer: xs[0].weight(),
        })
    }

    /// Rows distinct, of equal weight, and cyclically consecutive rows at distance 2.
    pub fn satisfies_invariants(&self) -> bool {
        let rows = self.matrix.rows();
        let r = rows.len();
        let w = rows[0].count_ones();
        let distinct = (0..r).all(|i| (i + 1..r).all(|j| rows[i] != rows[j]));
        distinct
            && rows.iter().all(|x| x.count_ones() == w)
            && (0..r).all(|i| (rows[i] ^ rows[(i + 1) % r]).count_ones() == 2)
    }
}

/// `A(C)` for a layer-alternating ten-cycle.
pub fn build_matrix(c: &Cycle) -> Result<AMatrix> {
    if c.len() != 10 {
        return Err(Error::InvalidCycle(format!(
            "expected a ten-cycle, got length {}",
            c.len()
        )));
    }
    AMatrix::from_cycle(c)
}

/// Filters of the `5 x 5` scan, applied in order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Filter {
    /// Every row has exactly two 1s.
    RowWeightTwo,
    /// Rows pairwise distinct.
    DistinctRows,
    /// Cyclically consecutive rows at Hamming distance 2.
    ConsecutiveDistanceTwo,
    /// The OR of each consecutive row pair (the upper vertices) pairwise distinct.
    DistinctUpperRows,
    /// The 1s of every column are cyclically consecutive.
    ColumnIntervals,
    /// No 3 x 2 all-zero block.
    NoChordPattern,
    /// No bad prefixes in the matrix nor in its column reversal.
    NoBadPrefixes,
}

impl Filter {
    pub const ALL: [Filter; 7] = [
        Filter::RowWeightTwo,
        Filter::DistinctRows,
        Filter::ConsecutiveDistanceTwo,
        Filter::DistinctUpperRows,
        Filter::ColumnIntervals,
        Filter::NoChordPattern,
        Filter::NoBadPrefixes,
    ];

    pub fn letter(self) -> char {
        (b'a' + Filter::ALL.iter().position(|&f| f == self).unwrap() as u8) as char
    }

    pub fn from_letter(c: char) -> Result<Filter> {
        let idx = (c as u32).wrapping_sub('a' as u32) as usize;
        Filter::ALL
            .get(idx)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("unknown filter {c:?}; expected a-g")))
    }

    fn accepts(self, rows: &[u32; 5]) -> bool {
        match self {
            Filter::RowWeightTwo => rows.iter().all(|r| r.count_ones() == 2),
            Filter::DistinctRows => all_distinct(rows),
            Filter::ConsecutiveDistanceTwo => {
                (0..5).all(|i| (rows[i] ^ rows[(i + 1) % 5]).count_ones() == 2)
            }
            Filter::DistinctUpperRows => {
                let ys: [u32; 5] = std::array::from_fn(|i| rows[i] | rows[(i + 1) % 5]);
                all_distinct(&ys)
            }
            Filter::ColumnIntervals => matrix5(rows).column_consecutive_ones(),
            Filter::NoChordPattern => !matrix5(rows).chord_pattern(),
            Filter::NoBadPrefixes => !matrix5(rows).has_bad_prefixes_either_way(),
        }
    }
}

fn all_distinct(xs: &[u32; 5]) -> bool {
    (0..5).all(|i| (i + 1..5).all(|j| xs[i] != xs[j]))
}

fn matrix5(rows: &[u32; 5]) -> BinMatrix {
    BinMatrix {
        rows: rows.to_vec(),
        cols: 5,
    }
}

/// Survivor counts after each filter of the `5 x 5` scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanCensus {
    pub total: u64,
    pub dropped_filters: Vec<char>,
    pub after_a: u64,
    pub after_b: u64,
    pub after_c: u64,
    pub after_d: u64,
    pub after_e: u64,
    pub after_f: u64,
    pub after_g: u64,
    pub survivors: u64,
    /// Survivor with the smallest matrix index, as five row strings.
    pub first_survivor: Option<Vec<String>>,
}

/// Row `i` of matrix `index` is bits `5i..5i+5`.
pub fn matrix_rows(index: u32) -> [u32; 5] {
    std::array::from_fn(|i| index >> (5 * i) & 31)
}

#[derive(Clone, Copy, Default)]
struct Counts {
    after: [u64; 7],
    first: Option<u32>,
}

impl Counts {
    fn merge(self, other: Counts) -> Counts {
        let mut after = self.after;
        for (a, b) in after.iter_mut().zip(other.after) {
            *a += b;
        }
        let first = match (self.first, other.first) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Counts { after, first }
    }
}

/// Runs every `5 x 5` 0/1 matrix through the filters, skipping `dropped`.
/// A dropped filter passes everything, so its census equals the previous one.
pub fn exhaustive_case_scan(dropped: &[Filter], threads: Option<usize>) -> ScanCensus {
    let active: Vec<bool> = Filter::ALL.iter().map(|f| !dropped.contains(f)).collect();
    const CHUNK: u32 = 1 << 15;
    let counts = with_threads(threads, || {
        (0..(1u32 << 25) / CHUNK)
            .into_par_iter()
            .map(|chunk| {
                let mut c = Counts::default();
                for index in chunk * CHUNK..(chunk + 1) * CHUNK {
                    let rows = matrix_rows(index);
                    let mut alive = true;
                    for (k, f) in Filter::ALL.iter().enumerate() {
                        if active[k] && !f.accepts(&rows) {
                            alive = false;
                            break;
                        }
                        c.after[k] += 1;
                    }
                    if alive && c.first.is_none() {
                        c.first = Some(index);
                    }
                }
                c
            })
            .reduce(Counts::default, Counts::merge)
    });
    let mut dropped_filters: Vec<char> = dropped.iter().map(|f| f.letter()).collect();
    dropped_filters.sort_unstable();
    dropped_filters.dedup();
    let a = counts.after;
    ScanCensus {
        total: 1 << 25,
        dropped_filters,
        after_a: a[0],
        after_b: a[1],
        after_c: a[2],
        after_d: a[3],
        after_e: a[4],
        after_f: a[5],
        after_g: a[6],
        survivors: a[6],
        first_survivor: counts
            .first
            .map(|i| matrix_rows(i).iter().map(|r| format!("{r:05b}")).collect()),
    }
}
