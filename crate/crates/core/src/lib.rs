//! Combinatorics on the hypercube `Q_n`.
//!
//! Vertices are `n`-bit words, edges join words at Hamming distance one.
//! The crate provides
//!
//! * a four-coloring of `E(Q_n)` without induced monochromatic `C_4`, `C_6`
//!   or `C_10`, plus the layer-parity two-coloring and file-backed colorings
//!   ([`coloring`]);
//! * an exhaustive cycle search with canonical deduplication ([`search`]);
//! * the `5 x m` row matrix machinery used to rule out monochromatic
//!   induced ten-cycles, including a raw scan over all `5 x 5` 0/1 matrices
//!   ([`matrix`]);
//! * the two-path counting argument behind the `C_{4k+2}` edge bound
//!   ([`extremal`]).
//!
//! Positions are 1-indexed from the left, so position 1 is the most
//! significant bit and string order agrees with numeric order.

pub mod cli;
pub mod coloring;
mod error;
pub mod extremal;
pub mod hypercube;
pub mod matrix;
pub mod search;

pub use coloring::{ColorId, ColoringKind, ColoringSpec};
pub use error::{Error, Result};
pub use extremal::{EdgeBound, HvGraph};
pub use hypercube::{Cycle, Edge, Subgraph, Vertex, MAX_DIM};
pub use matrix::{AMatrix, BinMatrix, PositionSet};
pub use search::{SearchQuery, SearchReport};

/// Edge bound evaluated in double precision.
pub type EdgeBoundF64 = EdgeBound<f64>;
/// Edge bound evaluated in single precision.
pub type EdgeBoundF32 = EdgeBound<f32>;

/// Version string embedded in every JSON report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Runs `f` on a rayon pool with `threads` workers, or the global pool when `None`.
pub(crate) fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads {
        Some(t) if t > 0 => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}
