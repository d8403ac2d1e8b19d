//! Exhaustive cycle enumeration in `Q_n` and its edge subsets.
//!
//! Cycles are found by depth-first search from every start vertex `s`,
//! visiting only vertices numerically above `s` and closing at exactly the
//! target length. Each undirected cycle is reported once, in the direction
//! whose second vertex is smaller than its last; that sequence is its
//! canonical form (minimum over rotations and reflections).

use rayon::prelude::*;
use serde::Serialize;

use crate::coloring::{ColorId, ColoringSpec};
use crate::hypercube::{self, check_dim, Cycle, Subgraph};
use crate::{with_threads, Error, Result};

/// Largest `n` allowed without `force` for a given cycle length.
pub fn guard_limit(length: usize) -> u32 {
    match length {
        0..=6 => 10,
        7..=8 => 9,
        _ => 8,
    }
}

pub fn check_guard(n: u32, length: usize, force: bool) -> Result<()> {
    check_dim(n)?;
    if length < 4 || !length.is_multiple_of(2) {
        return Err(Error::CycleLength(length));
    }
    let limit = guard_limit(length);
    if n > limit && !force {
        return Err(Error::Guard(format!(
            "n = {n} exceeds the limit {limit} for cycles of length {length}; pass --force to override"
        )));
    }
    Ok(())
}

/// Knobs shared by all searches.
#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Worker count; `None` uses rayon's global pool.
    pub threads: Option<usize>,
    pub force: bool,
    /// Reject chord-creating extensions during the search instead of
    /// filtering closed cycles.
    pub prune_chords: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            threads: None,
            force: false,
            prune_chords: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchQuery {
    pub n: u32,
    pub length: usize,
    pub induced: bool,
    /// Restrict to edge layer `k` (vertices of weight `k` and `k + 1`).
    pub layer: Option<u32>,
    /// Restrict to one color class.
    pub color: Option<(ColoringSpec, ColorId)>,
    pub subgraph: Option<Subgraph>,
    pub options: SearchOptions,
}

impl SearchQuery {
    pub fn new(n: u32, length: usize) -> Self {
        SearchQuery {
            n,
            length,
            induced: false,
            layer: None,
            color: None,
            subgraph: None,
            options: SearchOptions::default(),
        }
    }

    pub fn induced(mut self, induced: bool) -> Self {
        self.induced = induced;
        self
    }

    pub fn layer(mut self, k: u32) -> Self {
        self.layer = Some(k);
        self
    }

    pub fn color(mut self, spec: ColoringSpec, color: ColorId) -> Self {
        self.color = Some((spec, color));
        self
    }

    pub fn subgraph(mut self, g: Subgraph) -> Self {
        self.subgraph = Some(g);
        self
    }

    pub fn options(mut self, options: SearchOptions) -> Self {
        self.options = options;
        self
    }

    fn validate(&self) -> Result<()> {
        check_guard(self.n, self.length, self.options.force)?;
        if let Some((spec, c)) = &self.color {
            if spec.n != self.n {
                return Err(Error::DimensionMismatch(self.n, spec.n));
            }
            if c.0 >= spec.palette() {
                return Err(Error::InvalidArgument(format!(
                    "color {c} outside palette of size {}",
                    spec.palette()
                )));
            }
        }
        if let Some(g) = &self.subgraph {
            if g.dim() != self.n {
                return Err(Error::DimensionMismatch(self.n, g.dim()));
            }
        }
        if let Some(k) = self.layer {
            if k >= self.n {
                return Err(Error::InvalidArgument(format!(
                    "layer {k} out of range 0..{}",
                    self.n
                )));
            }
        }
        Ok(())
    }

    /// Per-vertex neighbor masks of the edges passing every filter.
    fn masks(&self) -> Vec<u32> {
        let mut masks = vec![0u32; 1 << self.n];
        for e in hypercube::edges(self.n) {
            if self.layer.is_some_and(|k| e.layer() != k) {
                continue;
            }
            if let Some((spec, c)) = &self.color {
                if spec.color(e) != *c {
                    continue;
                }
            }
            if let Some(g) = &self.subgraph {
                if !g.contains(e) {
                    continue;
                }
            }
            add_edge(&mut masks, e.low().bits(), e.high().bits());
        }
        masks
    }
}

fn add_edge(masks: &mut [u32], a: u32, b: u32) {
    let d = a ^ b;
    masks[a as usize] |= d;
    masks[b as usize] |= d;
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub n: u32,
    pub length: usize,
    pub induced: bool,
    pub layer: Option<u32>,
    pub coloring: Option<String>,
    pub color: Option<ColorId>,
    pub subgraph_edges: Option<usize>,
    pub guard_limit: u32,
    /// Number of distinct cycles (canonical forms).
    pub count: u64,
    /// Canonically smallest cycle found.
    pub witness: Option<Cycle>,
    /// Search tree nodes visited; independent of thread count.
    pub work_units: u64,
}

pub fn enumerate_cycles(q: &SearchQuery) -> Result<SearchReport> {
    q.validate()?;
    let masks = q.masks();
    let engine = Engine::new(q.n, &masks, q.length, q.induced, q.options.prune_chords);
    let tally = engine.run(q.options.threads);
    Ok(SearchReport {
        n: q.n,
        length: q.length,
        induced: q.induced,
        layer: q.layer,
        coloring: q.color.as_ref().map(|(s, _)| s.name()),
        color: q.color.as_ref().map(|(_, c)| *c),
        subgraph_edges: q.subgraph.as_ref().map(Subgraph::edge_count),
        guard_limit: guard_limit(q.length),
        count: tally.count,
        witness: tally.witness.map(|w| Cycle::from_bits_unchecked(&w, q.n)),
        work_units: tally.work,
    })
}

/// Every cycle matching the query, canonical and sorted.
pub fn collect_cycles(q: &SearchQuery) -> Result<Vec<Cycle>> {
    q.validate()?;
    let masks = q.masks();
    let engine = Engine::new(q.n, &masks, q.length, q.induced, q.options.prune_chords);
    let per_start: Vec<Vec<Cycle>> = with_threads(q.options.threads, || {
        (0..1u32 << q.n)
            .into_par_iter()
            .map(|s| {
                let mut out = Vec::new();
                engine.search_from(s, &mut |p| out.push(Cycle::from_bits_unchecked(p, q.n)));
                out
            })
            .collect()
    });
    let mut all: Vec<Cycle> = per_start.into_iter().flatten().collect();
    all.sort();
    Ok(all)
}

/// Outcome of a monochromatic cycle search over all color classes.
#[derive(Clone, Debug, Serialize)]
pub struct MonoReport {
    pub length: usize,
    pub induced: bool,
    pub count_searched_classes: u32,
    /// Whether each color class was split into single edge layers.
    pub layered: bool,
    pub mono_cycles: u64,
    pub witness: Option<Cycle>,
    pub work_units: u64,
}

/// Searches every color class for a cycle of the given length.
///
/// When the coloring never reuses a color on consecutive layers, each class
/// is searched one layer at a time; otherwise the whole class is searched.
pub fn find_mono_cycle(
    spec: &ColoringSpec,
    length: usize,
    induced: bool,
    options: SearchOptions,
) -> Result<MonoReport> {
    let layered = spec.is_layer_separated();
    find_mono_cycle_with(spec, length, induced, options, layered)
}

/// As [`find_mono_cycle`], with the layer split chosen by the caller.
/// `layered = true` is only sound for layer-separated colorings.
pub fn find_mono_cycle_with(
    spec: &ColoringSpec,
    length: usize,
    induced: bool,
    options: SearchOptions,
    layered: bool,
) -> Result<MonoReport> {
    let n = spec.n;
    check_guard(n, length, options.force)?;
    let palette = spec.palette();

    let mut class_masks: Vec<Vec<u32>> = Vec::new();
    if layered {
        // (color, layer) pieces in ascending order
        let mut pieces = vec![vec![0u32; 0]; palette as usize * n as usize];
        for e in hypercube::edges(n) {
            let slot = spec.color(e).0 as usize * n as usize + e.layer() as usize;
            if pieces[slot].is_empty() {
                pieces[slot] = vec![0; 1 << n];
            }
            add_edge(&mut pieces[slot], e.low().bits(), e.high().bits());
        }
        class_masks.extend(pieces.into_iter().filter(|p| !p.is_empty()));
    } else {
        let mut classes = vec![vec![0u32; 1 << n]; palette as usize];
        for e in hypercube::edges(n) {
            add_edge(
                &mut classes[spec.color(e).0 as usize],
                e.low().bits(),
                e.high().bits(),
            );
        }
        class_masks = classes;
    }

    let mut total = Tally::default();
    for masks in &class_masks {
        let engine = Engine::new(n, masks, length, induced, options.prune_chords);
        total = total.merge(engine.run(options.threads));
    }
    Ok(MonoReport {
        length,
        induced,
        count_searched_classes: palette as u32,
        layered,
        mono_cycles: total.count,
        witness: total.witness.map(|w| Cycle::from_bits_unchecked(&w, n)),
        work_units: total.work,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub n: u32,
    pub coloring: String,
    pub palette: u8,
    pub results: Vec<MonoReport>,
}

impl VerifyReport {
    /// True iff no length produced a witness.
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.witness.is_none())
    }
}

pub fn verify(
    spec: &ColoringSpec,
    lengths: &[usize],
    induced: bool,
    options: SearchOptions,
) -> Result<VerifyReport> {
    for &l in lengths {
        check_guard(spec.n, l, options.force)?;
    }
    let results = lengths
        .iter()
        .map(|&l| find_mono_cycle(spec, l, induced, options))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport {
        n: spec.n,
        coloring: spec.name(),
        palette: spec.palette(),
        results,
    })
}

/// Induced monochromatic `C_4`, `C_6` and `C_10` under the four-coloring.
pub fn verify_short_induced(n: u32, options: SearchOptions) -> Result<VerifyReport> {
    verify(&ColoringSpec::paper4(n)?, &[4, 6, 10], true, options)
}

#[derive(Clone, Debug, Default)]
struct Tally {
    count: u64,
    witness: Option<Vec<u32>>,
    work: u64,
}

impl Tally {
    fn merge(self, other: Tally) -> Tally {
        let witness = match (self.witness, other.witness) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Tally {
            count: self.count + other.count,
            witness,
            work: self.work + other.work,
        }
    }
}

pub(crate) struct Engine<'a> {
    n: u32,
    masks: &'a [u32],
    length: usize,
    induced: bool,
    prune: bool,
}

impl<'a> Engine<'a> {
    pub(crate) fn new(n: u32, masks: &'a [u32], length: usize, induced: bool, prune: bool) -> Self {
        Engine {
            n,
            masks,
            length,
            induced,
            prune,
        }
    }

    fn run(&self, threads: Option<usize>) -> Tally {
        with_threads(threads, || {
            (0..1u32 << self.n)
                .into_par_iter()
                .filter(|&s| self.masks[s as usize] != 0)
                .map(|s| {
                    let mut t = Tally::default();
                    t.work = self.search_from(s, &mut |p| {
                        t.count += 1;
                        if t.witness.as_deref().is_none_or(|w| p < w) {
                            t.witness = Some(p.to_vec());
                        }
                    });
                    t
                })
                .reduce(Tally::default, Tally::merge)
        })
    }

    /// Reports every canonical cycle whose minimum vertex is `start`.
    /// Returns the number of search nodes visited.
    pub(crate) fn search_from(&self, start: u32, visit: &mut dyn FnMut(&[u32])) -> u64 {
        if self.masks[start as usize] == 0 {
            return 0;
        }
        let mut path = Vec::with_capacity(self.length);
        path.push(start);
        let mut work = 0;
        self.extend(&mut path, visit, &mut work);
        work
    }

    fn extend(&self, path: &mut Vec<u32>, visit: &mut dyn FnMut(&[u32]), work: &mut u64) {
        *work += 1;
        let start = path[0];
        let last = path[path.len() - 1];
        let len = self.length;
        if path.len() == len {
            if self.masks[last as usize] & (last ^ start) != 0
                && (last ^ start).count_ones() == 1
                && path[1] < path[len - 1]
                && (!self.induced || self.prune || closed_path_is_induced(path))
            {
                visit(path);
            }
            return;
        }
        let mut m = self.masks[last as usize];
        while m != 0 {
            let bit = m & m.wrapping_neg();
            m ^= bit;
            let w = last ^ bit;
            if w <= start || path.contains(&w) {
                continue;
            }
            let k = path.len() + 1;
            // edges still needed to return to start after placing w
            if ((w ^ start).count_ones() as usize) > len - k + 1 {
                continue;
            }
            if self.induced && self.prune && self.creates_chord(path, w, k == len) {
                continue;
            }
            path.push(w);
            self.extend(path, visit, work);
            path.pop();
        }
    }

    /// Whether `w` is adjacent in `Q_n` to a path vertex other than its predecessor
    /// (and other than the start when `w` closes the cycle).
    fn creates_chord(&self, path: &[u32], w: u32, closes: bool) -> bool {
        let upto = path.len() - 1;
        let from = usize::from(closes);
        path[from..upto].iter().any(|&p| (p ^ w).count_ones() == 1)
    }
}

fn closed_path_is_induced(path: &[u32]) -> bool {
    let len = path.len();
    for i in 0..len {
        for j in i + 2..len {
            if i == 0 && j == len - 1 {
                continue;
            }
            if (path[i] ^ path[j]).count_ones() == 1 {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::ColoringKind;
    use std::collections::BTreeSet;

    /// Independent oracle: every closed walk of the given length that visits
    /// distinct vertices, normalized by rotation and reflection.
    fn naive_cycles(n: u32, length: usize, induced: bool) -> BTreeSet<Vec<u32>> {
        fn walk(n: u32, length: usize, seq: &mut Vec<u32>, out: &mut BTreeSet<Vec<u32>>) {
            if seq.len() == length {
                let (first, last) = (seq[0], seq[length - 1]);
                if (first ^ last).count_ones() == 1 {
                    let distinct: BTreeSet<_> = seq.iter().collect();
                    if distinct.len() == length {
                        let mut best: Option<Vec<u32>> = None;
                        for r in 0..length {
                            let rot: Vec<u32> = (0..length).map(|i| seq[(r + i) % length]).collect();
                            let mut rev = rot.clone();
                            rev.reverse();
                            for cand in [rot, rev] {
                                if best.as_ref().is_none_or(|b| cand < *b) {
                                    best = Some(cand);
                                }
                            }
                        }
                        out.insert(best.unwrap());
                    }
                }
                return;
            }
            let last = seq[seq.len() - 1];
            for b in 0..n {
                seq.push(last ^ (1 << b));
                walk(n, length, seq, out);
                seq.pop();
            }
        }
        let mut out = BTreeSet::new();
        for s in 0..1u32 << n {
            walk(n, length, &mut vec![s], &mut out);
        }
        if induced {
            out.retain(|c| closed_path_is_induced(c));
        }
        out
    }

    #[test]
    fn oracle_counts_on_small_cubes() {
        assert_eq!(naive_cycles(2, 4, false).len(), 1);
        assert_eq!(naive_cycles(3, 4, false).len(), 6);
        assert_eq!(naive_cycles(3, 6, false).len(), 16);
        assert_eq!(naive_cycles(3, 6, true).len(), 4);
    }

    #[test]
    fn q3_has_no_odd_closed_simple_walks() {
        for len in [3usize, 5, 7] {
            assert!(naive_cycles(3, len, false).is_empty());
        }
    }

    #[test]
    fn enumeration_examples() {
        let count = |n, l, induced| {
            enumerate_cycles(&SearchQuery::new(n, l).induced(induced))
                .unwrap()
                .count
        };
        assert_eq!(count(2, 4, false), 1);
        assert_eq!(count(3, 4, false), 6);
        assert_eq!(count(3, 6, false), 16);
        assert_eq!(count(3, 6, true), 4);
    }

    #[test]
    fn enumeration_matches_oracle_q3_q4() {
        for n in [3u32, 4] {
            for l in [4usize, 6, 8] {
                for induced in [false, true] {
                    let oracle = naive_cycles(n, l, induced);
                    for prune in [false, true] {
                        let q = SearchQuery::new(n, l).induced(induced).options(SearchOptions {
                            prune_chords: prune,
                            ..Default::default()
                        });
                        let found: BTreeSet<Vec<u32>> = collect_cycles(&q)
                            .unwrap()
                            .iter()
                            .map(|c| c.vertices().iter().map(|v| v.bits()).collect())
                            .collect();
                        assert_eq!(found, oracle, "n={n} L={l} induced={induced} prune={prune}");
                        let report = enumerate_cycles(&q).unwrap();
                        assert_eq!(report.count as usize, oracle.len());
                        let min = oracle.iter().next().cloned();
                        assert_eq!(
                            report.witness.map(|w| w.vertices().iter().map(|v| v.bits()).collect::<Vec<_>>()),
                            min
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn reported_cycles_are_canonical() {
        for c in collect_cycles(&SearchQuery::new(4, 8)).unwrap() {
            assert_eq!(c.canonical(), c);
            assert!(Cycle::new(c.vertices().to_vec()).is_ok());
        }
    }

    #[test]
    fn counts_independent_of_threads() {
        let base = enumerate_cycles(&SearchQuery::new(5, 8)).unwrap();
        for t in [1, 2, 3, 8] {
            let q = SearchQuery::new(5, 8).options(SearchOptions {
                threads: Some(t),
                ..Default::default()
            });
            let r = enumerate_cycles(&q).unwrap();
            assert_eq!(r.count, base.count);
            assert_eq!(r.witness, base.witness);
            assert_eq!(r.work_units, base.work_units);
        }
    }

    #[test]
    fn layer_filter_has_no_squares() {
        for k in 0..5 {
            let r = enumerate_cycles(&SearchQuery::new(5, 4).layer(k)).unwrap();
            assert_eq!(r.count, 0);
        }
        // the Q_3 middle-layer hexagon
        let r = enumerate_cycles(&SearchQuery::new(3, 6).layer(1)).unwrap();
        assert_eq!(r.count, 1);
        assert_eq!(
            r.witness.unwrap().to_strings(),
            ["001", "011", "010", "110", "100", "101"]
        );
    }

    #[test]
    fn guards_and_parity() {
        assert!(matches!(check_guard(5, 5, false), Err(Error::CycleLength(5))));
        assert!(matches!(check_guard(5, 2, false), Err(Error::CycleLength(2))));
        assert!(matches!(check_guard(9, 10, false), Err(Error::Guard(_))));
        assert!(check_guard(9, 10, true).is_ok());
        assert!(check_guard(10, 6, false).is_ok());
        assert!(matches!(check_guard(11, 4, false), Err(Error::Guard(_))));
        assert!(enumerate_cycles(&SearchQuery::new(3, 7)).is_err());
    }

    #[test]
    fn mono_examples() {
        let opts = SearchOptions::default();
        let r = find_mono_cycle(&ColoringSpec::paper4(5).unwrap(), 6, false, opts).unwrap();
        assert!(r.witness.is_none());
        assert!(r.layered);
        for induced in [false, true] {
            let r = find_mono_cycle(&ColoringSpec::layer2(5).unwrap(), 4, induced, opts).unwrap();
            assert!(r.witness.is_none());
        }
        let constant = ColoringSpec::new(2, ColoringKind::Constant).unwrap();
        let r = find_mono_cycle(&constant, 4, false, opts).unwrap();
        assert!(!r.layered);
        assert_eq!(r.witness.unwrap().to_strings(), ["00", "01", "11", "10"]);
    }

    #[test]
    fn layered_search_agrees_with_unrestricted() {
        let opts = SearchOptions::default();
        for n in 2..=5 {
            for spec in [ColoringSpec::paper4(n).unwrap(), ColoringSpec::layer2(n).unwrap()] {
                for l in [4usize, 6, 8, 10] {
                    for induced in [false, true] {
                        let a = find_mono_cycle_with(&spec, l, induced, opts, true).unwrap();
                        let b = find_mono_cycle_with(&spec, l, induced, opts, false).unwrap();
                        assert_eq!(a.mono_cycles, b.mono_cycles);
                        assert_eq!(a.witness, b.witness);
                    }
                }
            }
        }
    }

    #[test]
    fn witnesses_are_valid_mono_cycles() {
        let opts = SearchOptions::default();
        // layer2 has long monochromatic cycles inside single layers
        for (spec, l, induced) in [
            (ColoringSpec::layer2(4).unwrap(), 6, false),
            (ColoringSpec::layer2(4).unwrap(), 8, true),
            (ColoringSpec::paper4(5).unwrap(), 10, false),
            (ColoringSpec::paper4(5).unwrap(), 8, true),
        ] {
            let r = find_mono_cycle(&spec, l, induced, opts).unwrap();
            if let Some(w) = r.witness {
                assert_eq!(w.len(), l);
                let colors: BTreeSet<_> = w.edges().map(|e| spec.color(e)).collect();
                assert_eq!(colors.len(), 1);
                if induced {
                    assert!(w.is_induced());
                }
                assert_eq!(w.canonical(), w);
            }
        }
    }

    #[test]
    fn short_induced_small_n() {
        for n in 2..=5 {
            assert!(verify_short_induced(n, SearchOptions::default()).unwrap().passed());
        }
    }
}
