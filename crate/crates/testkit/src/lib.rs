//! Exhaustive reference computations for small instances.
//!
//! Everything here works on plain matrices and edge lists and shares no code
//! with `corrnet-core`, so it can be used to check the real implementations.

#![allow(clippy::needless_range_loop)]

pub mod betweenness;
pub mod ergm;
pub mod spanning;
pub mod tmfg;

/// Canonical undirected edge `(min, max)`.
pub fn edge(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}
