//! Exact orbit counting for permutation group actions on k-tuples.
//!
//! The number of orbits of a group `G ≤ S_N` on `Z_N^k` is computed three
//! ways: as the Burnside average of `f(g)^k` over the group, by exhaustive
//! enumeration of tuple orbits, and as `Σ_j d_j(G)·S(k, j)` where the
//! division numbers `d_j` count orbits on injective j-tuples.

pub mod action;
pub mod catalog;
pub mod cli;

pub mod combinat;
pub mod divisions;
pub mod error;
pub mod group;
pub mod perm;

pub use error::{Error, Result};
pub use group::{GeneratedGroup, StabilizerChain};
pub use perm::Permutation;
