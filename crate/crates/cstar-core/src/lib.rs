//! Exact combinatorics for plane curves isomorphic to C* at infinity.

pub mod graph;
pub mod hn;
pub mod resolution;
pub mod bmy;
pub mod eliminator;
pub mod identities;
