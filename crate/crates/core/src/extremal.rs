//! Two-path counting for subgraphs of `Q_n` and the resulting edge bound
//! for `C_{4k+2}`-free subgraphs.
//!
//! For a vertex `v`, `H_v` lives on the `n` neighbors of `v`; `{u, w}` is an
//! edge when `G` has a 2-path `u x w` with `x != v`. Two vertices at distance
//! 2 have exactly two common neighbors, so `x` is determined by `u, w, v`,
//! and every 2-path of `G` is counted by exactly one `H_v`:
//! `sum_v C(d_v, 2) = sum_v |E(H_v)|`.

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::hypercube::{self, check_dim, Cycle, Edge, Subgraph, Vertex};
use crate::search::{self, SearchOptions, SearchQuery};
use crate::{Error, Result};

/// Default dimension limit for odd-cycle lifting.
pub const LIFT_GUARD: u32 = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HvEdge {
    pub u: Vertex,
    pub w: Vertex,
    /// The common neighbor of `u` and `w` other than the center.
    pub midpoint: Vertex,
}

#[derive(Clone, Debug)]
pub struct HvGraph {
    pub center: Vertex,
    pub edges: Vec<HvEdge>,
    // adjacency over neighbor slots; slot b is center ^ (1 << b)
    adj: Vec<u32>,
}

impl HvGraph {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// The `n` neighbors of the center, in slot order.
    pub fn vertices(&self) -> Vec<Vertex> {
        let n = self.center.dim();
        (0..n)
            .map(|b| Vertex::from_raw(self.center.bits() ^ (1 << b), n))
            .collect()
    }

    pub fn has_edge(&self, u: Vertex, w: Vertex) -> bool {
        match (self.slot(u), self.slot(w)) {
            (Some(a), Some(b)) => self.adj[a] >> b & 1 == 1,
            _ => false,
        }
    }

    fn slot(&self, u: Vertex) -> Option<usize> {
        let d = u.bits() ^ self.center.bits();
        (d.count_ones() == 1).then(|| d.trailing_zeros() as usize)
    }

    fn vertex(&self, slot: usize) -> Vertex {
        Vertex::from_raw(self.center.bits() ^ (1 << slot), self.center.dim())
    }

    fn midpoint(&self, a: usize, b: usize) -> Vertex {
        Vertex::from_raw(
            self.center.bits() ^ (1 << a) ^ (1 << b),
            self.center.dim(),
        )
    }

    /// All cycles of the given length, each once: smallest slot first,
    /// then the smaller of its two cycle neighbors.
    pub fn cycles(&self, length: usize) -> Vec<Vec<Vertex>> {
        let mut out = Vec::new();
        if length < 3 {
            return out;
        }
        let n = self.adj.len();
        let mut path = Vec::with_capacity(length);
        for s in 0..n {
            path.clear();
            path.push(s);
            self.cycles_from(&mut path, length, &mut out);
        }
        out
    }

    fn cycles_from(&self, path: &mut Vec<usize>, length: usize, out: &mut Vec<Vec<Vertex>>) {
        let start = path[0];
        let last = path[path.len() - 1];
        if path.len() == length {
            if self.adj[last] >> start & 1 == 1 && path[1] < path[length - 1] {
                out.push(path.iter().map(|&s| self.vertex(s)).collect());
            }
            return;
        }
        let mut m = self.adj[last];
        while m != 0 {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            if b <= start || path.contains(&b) {
                continue;
            }
            path.push(b);
            self.cycles_from(path, length, out);
            path.pop();
        }
    }

    /// Replaces each edge `u_i u_{i+1}` of an `H_v` cycle by `u_i x_i u_{i+1}`.
    pub fn lift(&self, cycle: &[Vertex]) -> Result<Cycle> {
        let len = cycle.len();
        let mut seq = Vec::with_capacity(2 * len);
        for i in 0..len {
            let (a, b) = (cycle[i], cycle[(i + 1) % len]);
            let (Some(sa), Some(sb)) = (self.slot(a), self.slot(b)) else {
                return Err(Error::InvalidArgument(format!("{a} or {b} is not a neighbor of the center")));
            };
            seq.push(a);
            seq.push(self.midpoint(sa, sb));
        }
        Cycle::new(seq)
    }
}

/// Builds `H_v` for `G`.
pub fn build_hv(g: &Subgraph, v: Vertex) -> Result<HvGraph> {
    if v.dim() != g.dim() {
        return Err(Error::DimensionMismatch(g.dim(), v.dim()));
    }
    let n = g.dim();
    let c = v.bits();
    let mut adj = vec![0u32; n as usize];
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let u = c ^ (1 << a);
            let w = c ^ (1 << b);
            let x = c ^ (1 << a) ^ (1 << b);
            // common neighbors of u and w are u with one differing bit flipped
            let diff = u ^ w;
            let others = [u ^ (diff & diff.wrapping_neg()), u ^ (diff & (diff - 1))];
            assert!(
                others.contains(&c) && others.contains(&x) && others.iter().filter(|&&y| y != c).count() == 1,
                "midpoint of an H_v edge is not unique"
            );
            if g.has_edge_between(u, x) && g.has_edge_between(x, w) {
                adj[a as usize] |= 1 << b;
                adj[b as usize] |= 1 << a;
                edges.push(HvEdge {
                    u: Vertex::from_raw(u, n),
                    w: Vertex::from_raw(w, n),
                    midpoint: Vertex::from_raw(x, n),
                });
            }
        }
    }
    // order edges by (u, w) numerically
    edges.sort_by_key(|e| (e.u.min(e.w), e.u.max(e.w)));
    Ok(HvGraph {
        center: v,
        edges,
        adj,
    })
}

/// Number of 2-paths in `G`: `sum_v C(d_v, 2)`.
pub fn path2_count(g: &Subgraph) -> u64 {
    g.masks()
        .iter()
        .map(|m| {
            let d = m.count_ones() as u64;
            d * d.saturating_sub(1) / 2
        })
        .sum()
}

/// `sum_v |E(H_v)|`.
pub fn hv_edge_total(g: &Subgraph) -> u64 {
    let n = g.dim();
    (0..1u32 << n)
        .into_par_iter()
        .map(|v| {
            build_hv(g, Vertex::from_raw(v, n))
                .expect("dimensions agree")
                .edge_count() as u64
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub path2_count: u64,
    pub hv_edge_total: u64,
    pub holds: bool,
}

/// Both sides of `sum_v C(d_v, 2) = sum_v |E(H_v)|`.
pub fn verify_identity(g: &Subgraph) -> IdentityCheck {
    let lhs = path2_count(g);
    let rhs = hv_edge_total(g);
    IdentityCheck {
        path2_count: lhs,
        hv_edge_total: rhs,
        holds: lhs == rhs,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftWitness {
    pub center: Vertex,
    pub hv_cycle: Vec<String>,
    pub lifted: Cycle,
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftReport {
    pub n: u32,
    pub k: u32,
    /// Number of centers whose `H_v` contains a `C_{2k+1}`.
    pub centers_with_odd_cycle: u64,
    /// Total `C_{2k+1}` found over all `H_v`.
    pub odd_cycles: u64,
    /// Lifts that failed to be a `C_{4k+2}` of `G`; must be zero.
    pub invalid_lifts: u64,
    /// First lifts found, by center.
    pub witnesses: Vec<LiftWitness>,
}

impl LiftReport {
    pub fn holds(&self) -> bool {
        self.invalid_lifts == 0
    }
}

const MAX_LIFT_WITNESSES: usize = 8;

/// For every `v`, lifts each `C_{2k+1}` of `H_v` to a closed walk of length
/// `4k + 2` through the midpoints and checks that it is a cycle of `G`.
pub fn odd_cycle_lift_check(g: &Subgraph, k: u32, force: bool) -> Result<LiftReport> {
    let n = g.dim();
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if n > LIFT_GUARD && !force {
        return Err(Error::Guard(format!(
            "odd-cycle lifting is limited to n <= {LIFT_GUARD}; pass --force to override"
        )));
    }
    let length = 2 * k as usize + 1;
    let mut report = LiftReport {
        n,
        k,
        centers_with_odd_cycle: 0,
        odd_cycles: 0,
        invalid_lifts: 0,
        witnesses: Vec::new(),
    };
    for v in 0..1u32 << n {
        let hv = build_hv(g, Vertex::from_raw(v, n))?;
        let cycles = hv.cycles(length);
        if cycles.is_empty() {
            continue;
        }
        report.centers_with_odd_cycle += 1;
        for c in cycles {
            report.odd_cycles += 1;
            match hv.lift(&c) {
                Ok(lifted) if lifted.len() == 2 * length && lifted.edges().all(|e| g.contains(e)) => {
                    if report.witnesses.len() < MAX_LIFT_WITNESSES {
                        report.witnesses.push(LiftWitness {
                            center: hv.center,
                            hv_cycle: c.iter().map(|x| x.to_string()).collect(),
                            lifted,
                        });
                    }
                }
                _ => report.invalid_lifts += 1,
            }
        }
    }
    Ok(report)
}

/// Whether `G` contains a cycle of the given length, by exhaustive search.
pub fn has_cycle(g: &Subgraph, length: usize, options: SearchOptions) -> Result<bool> {
    let q = SearchQuery::new(g.dim(), length)
        .subgraph(g.clone())
        .options(options);
    Ok(search::enumerate_cycles(&q)?.count > 0)
}

#[derive(Clone, Debug, Serialize)]
pub struct CapCheck {
    pub k: u32,
    pub max_hv_edges: u64,
    /// `n^2 / 4`.
    pub cap: f64,
    pub holds: bool,
}

/// `|E(H_v)| <= n^2 / 4` for all `v`, for a `G` verified `C_{4k+2}`-free.
pub fn hv_edge_cap_check(g: &Subgraph, k: u32, options: SearchOptions) -> Result<CapCheck> {
    let length = 4 * k as usize + 2;
    if has_cycle(g, length, options)? {
        return Err(Error::Premise(format!("subgraph contains a C_{length}")));
    }
    let n = g.dim();
    let max = (0..1u32 << n)
        .map(|v| build_hv(g, Vertex::from_raw(v, n)).map(|h| h.edge_count() as u64))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    let cap = (n * n) as f64 / 4.0;
    Ok(CapCheck {
        k,
        max_hv_edges: max,
        cap,
        holds: max as f64 <= cap,
    })
}

/// Random subgraph drawn from an existing generator stream.
pub fn random_subgraph_with(n: u32, p: f64, rng: &mut impl Rng) -> Result<Subgraph> {
    let mut g = Subgraph::empty(n)?;
    for e in hypercube::edges(n) {
        if rng.gen_bool(p) {
            g.insert(e)?;
        }
    }
    Ok(g)
}

#[derive(Clone, Debug)]
pub struct CycleFreeSample {
    pub graph: Subgraph,
    /// Rejected draws before acceptance.
    pub rejections: u32,
    /// Edges removed by the greedy fallback.
    pub removed_edges: u32,
}

pub const MAX_REJECTIONS: u32 = 1000;

/// Rejection-samples a `C_length`-free subgraph with edge probability `p`.
/// After [`MAX_REJECTIONS`] rejections the last draw is repaired by
/// repeatedly deleting the largest edge of the smallest remaining cycle.
pub fn sample_cycle_free(n: u32, length: usize, p: f64, seed: u64) -> Result<CycleFreeSample> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("probability {p} not in [0, 1]")));
    }
    let options = SearchOptions {
        threads: Some(1),
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rejections = 0;
    loop {
        let mut g = random_subgraph_with(n, p, &mut rng)?;
        let witness = |g: &Subgraph| -> Result<Option<Cycle>> {
            let q = SearchQuery::new(n, length).subgraph(g.clone()).options(options);
            Ok(search::enumerate_cycles(&q)?.witness)
        };
        if witness(&g)?.is_none() {
            return Ok(CycleFreeSample {
                graph: g,
                rejections,
                removed_edges: 0,
            });
        }
        rejections += 1;
        if rejections >= MAX_REJECTIONS {
            let mut removed = 0;
            while let Some(c) = witness(&g)? {
                let e = c.edges().max().expect("cycle has edges");
                g.remove(e);
                removed += 1;
            }
            return Ok(CycleFreeSample {
                graph: g,
                rejections,
                removed_edges: removed,
            });
        }
    }
}

/// Positive root of `2^{-n-1} (2E)^2 - E = 2^n n^2 / 4`, i.e.
/// `E_max(n) = 2^{n-2} (1 + sqrt(1 + 2 n^2))`, with its ratio to `n 2^{n-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EdgeBound<F> {
    pub n: u32,
    /// `None` when `n > 40`; see `log2_e_max`.
    pub e_max: Option<F>,
    pub log2_e_max: F,
    /// `E_max / (n 2^{n-1})`.
    pub ratio: F,
    /// `1/(2n) + sqrt(2 + 1/n^2) / 2`, the same quantity written as a
    /// coefficient of `n 2^{n-1}`.
    pub coefficient_form: F,
}

/// Above this dimension `2^n` factors are only reported as base-2 logarithms.
pub const EXACT_POW_LIMIT: u32 = 40;

fn cast<F: Float>(x: f64) -> F {
    F::from(x).expect("finite constant")
}

pub fn upper_bound_edges<F: Float>(n: u32) -> Result<EdgeBound<F>> {
    if n == 0 {
        return Err(Error::Dimension(0));
    }
    let one = F::one();
    let two = cast::<F>(2.0);
    let nf = F::from(n).expect("dimension fits");
    let root = (one + two * nf * nf).sqrt();
    let ratio = (one + root) / (two * nf);
    let coefficient_form = one / (two * nf) + (two + one / (nf * nf)).sqrt() / two;
    let log2_e_max = F::from(n as f64 - 2.0).expect("dimension fits") + (one + root).log2();
    let e_max = (n <= EXACT_POW_LIMIT).then(|| (one + root) * two.powi(n as i32 - 2));
    Ok(EdgeBound {
        n,
        e_max,
        log2_e_max,
        ratio,
        coefficient_form,
    })
}

/// Relative residual of the bounding quadratic at `E = scaled * 2^n`,
/// i.e. `(2 s^2 - s - n^2/4) / (n^2/4)`; free of `2^n` overflow.
pub fn quadratic_residual_scaled<F: Float>(n: u32, scaled: F) -> F {
    let nf = F::from(n).expect("dimension fits");
    let quarter = nf * nf / cast(4.0);
    (cast::<F>(2.0) * scaled * scaled - scaled - quarter) / quarter
}

/// `E_max / 2^n = (1 + sqrt(1 + 2n^2)) / 4`.
pub fn scaled_e_max<F: Float>(n: u32) -> F {
    let nf = F::from(n).expect("dimension fits");
    (F::one() + (F::one() + cast::<F>(2.0) * nf * nf).sqrt()) / cast(4.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct SubgraphCounts {
    pub edges: u64,
    pub path2_count: u64,
    pub hv_edge_total: u64,
    pub identity_holds: bool,
    /// `2^{-n-1} (2|E|)^2 - |E|`, a lower bound for `path2_count`.
    pub cauchy_schwarz_lower: f64,
    pub cauchy_schwarz_holds: bool,
    pub max_hv_edges: u64,
}

pub fn subgraph_counts(g: &Subgraph) -> SubgraphCounts {
    let n = g.dim();
    let id = verify_identity(g);
    let e = g.edge_count() as f64;
    let lower = (2.0 * e) * (2.0 * e) / 2f64.powi(n as i32 + 1) - e;
    let max_hv_edges = (0..1u32 << n)
        .into_par_iter()
        .map(|v| build_hv(g, Vertex::from_raw(v, n)).expect("dimensions agree").edge_count() as u64)
        .max()
        .unwrap_or(0);
    SubgraphCounts {
        edges: g.edge_count() as u64,
        path2_count: id.path2_count,
        hv_edge_total: id.hv_edge_total,
        identity_holds: id.holds,
        cauchy_schwarz_lower: lower,
        cauchy_schwarz_holds: id.path2_count as f64 >= lower - 1e-9,
        max_hv_edges,
    }
}

/// `2^n n^2 / 4` exactly, when `n <= 40`.
pub fn hv_total_cap(n: u32) -> Option<u128> {
    (n <= EXACT_POW_LIMIT).then(|| (1u128 << n) * (n as u128 * n as u128) / 4)
}

/// Edge of `Q_n` between two vertices given as strings; convenience for tests and tools.
pub fn edge(a: &str, b: &str) -> Result<Edge> {
    let n = a.len() as u32;
    check_dim(n)?;
    Edge::between(Vertex::parse(a, n)?, Vertex::parse(b, n)?)
}
