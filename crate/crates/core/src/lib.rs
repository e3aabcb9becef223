//! Deciding whether a graph has elimination distance at most `k` to the
//! class of graphs of maximum degree at most `d`.
//!
//! The crate has two independent routes to an answer:
//!
//! * [`oracle`]: exponential-time exact procedures that follow the recursive
//!   definitions directly. They are the ground truth.
//! * [`pipeline`]: the structural algorithm. Vertices are split into red,
//!   white and blue by degree; components of `G - R` are contracted; the
//!   quotient is pruned and then decided by a round-synchronous search that
//!   tracks, for every contracted component, how its red neighbors can still
//!   be connected. Graphs of maximum degree at most `k + d` go through the
//!   irrelevant-vertex loop on grid minor models instead.
//!
//! ```
//! use elimdist::graph::Graph;
//! use elimdist::pipeline::solve;
//!
//! let star = Graph::star(6);
//! assert!(solve(&star, 1, 0).unwrap().member);
//! assert!(!solve(&Graph::complete(4), 1, 1).unwrap().member);
//! ```

pub mod batch;
pub mod dsu;
pub mod enumerate;
pub mod error;
pub mod generator;
pub mod graph;
pub mod grid_minor;
pub mod io;
pub mod oracle;
pub mod orders;
pub mod pipeline;
pub mod reductions;
pub mod sequences;

pub use error::{Error, Result};
pub use graph::{Graph, VertexId};

/// `base^exp`, saturating at `u64::MAX`. `0^0 = 1`.
pub(crate) fn sat_pow(base: usize, exp: usize) -> u64 {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u64);
    }
    acc
}

/// Maximum number of vertices of degree at least `d + 1` that a connected
/// graph of maximum degree at most `k + d` in the class can have.
///
/// The printed bound `(k+d)^(2(k+d))` alone is too small for `k = 1, d = 0`
/// (a single edge has two such vertices), so it is combined with the direct
/// count `|Y ∪ N(Y)|` over the at most `sum_{i<k} (k+d)^i` deleted vertices.
pub fn high_degree_threshold(k: usize, d: usize) -> u64 {
    let delta = k + d;
    let printed = sat_pow(delta, 2 * delta);
    let deletions = (0..k).fold(0u64, |acc, i| acc.saturating_add(sat_pow(delta, i)));
    printed.max(deletions.saturating_mul(delta as u64 + 1))
}
