//! Shared fixtures for the benchmarks.

use ruin_core::NormalizedParams;

/// Interior Brownian instance: `t* = 1`, `T = 3`.
pub fn interior_half() -> NormalizedParams {
    NormalizedParams::new((1.0, 2.0), (2.0, 1.0), 0.5, 3.0).expect("valid parameters")
}

/// Instance where company 2 dominates: `t2 = 2 < t* = 4 < T = 5`.
pub fn company2_dominates() -> NormalizedParams {
    NormalizedParams::new((1.0, 2.0), (1.25, 1.0), 0.5, 5.0).expect("valid parameters")
}
