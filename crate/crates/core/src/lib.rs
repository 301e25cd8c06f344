//! Weighted Max-Cut with QAOA and density-based parameter transfer.
//!
//! Seed graphs are optimized once and stored with their normalized density;
//! new target graphs reuse the parameters of seeds whose densities performed
//! best on similar targets. The crate also carries the pieces needed to check
//! that scheme: an exact Max-Cut oracle, a Goemans-Williamson baseline,
//! depolarizing-noise simulation, and AC power flow for grid-derived graphs.

pub mod campaign;
pub mod error;
pub mod graph;
pub mod gw;
pub mod io;
pub mod maxcut;
pub mod noise;
pub mod optimize;
pub mod powerflow;
pub mod simulator;
pub mod transfer;

pub use error::{Error, ErrorKind, Result};

/// Independent seed for sub-stream `index` of `base` (SplitMix64 finalizer).
pub fn sub_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
