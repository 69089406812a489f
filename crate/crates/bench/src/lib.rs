//! Shared fixtures for the benchmarks.

use utsw_core::{generate_utsw, TorusSize, UtswGraph};

/// Sizes swept by every benchmark group.
pub const SIZES: [u32; 3] = [25, 50, 100];

pub fn graph(n: u32, seed: u64) -> UtswGraph {
    generate_utsw(TorusSize::new(n).expect("valid size"), seed).expect("generation succeeds")
}
