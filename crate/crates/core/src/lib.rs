//! Search for tight Hamiltonian cycles in 3-uniform hypergraphs.
//!
//! The crate has two halves. The `oracle` module holds independent exact
//! algorithms (decision by dynamic programming, counting by DFS, exact
//! matching) that serve as ground truth. The remaining modules implement a
//! structural search that mirrors the absorption method: extract robust
//! subgraphs from vertex links, connect short paths through them, set aside
//! a reservoir, build an absorbing path, cover the rest with long paths,
//! and close up a cycle that swallows the leftover vertices.
//!
//! Vertices are always dense integers `0..n`.

#![forbid(unsafe_code)]

pub mod absorb;
pub mod connect;
pub mod constructions;
pub mod hgraph;
pub mod io;
pub mod longpath;
pub mod oracle;
pub mod pipeline;
pub mod reservoir;
pub mod robust;

pub use hgraph::{validate_tight, Graph, Hypergraph3, TightPath, TightViolation};

/// Stable per-stage RNG seed derivation: FNV-1a over the label, mixed with
/// the master seed. Stages stay reproducible independently of each other.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h ^ master.rotate_left(17)
}
