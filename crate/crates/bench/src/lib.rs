//! Shared fixtures for the benchmarks.

use berryres::{LoopSpec, SampledLoop};

pub const GAMMA: [f64; 3] = [0.0, 0.0, 1.0];

/// Equatorial circle of radius 2 around the diabolical circle.
pub fn equator(n: usize) -> SampledLoop {
    berryres::sample_loop(&LoopSpec::circle([0.0; 3], 2.0, [0.0, 0.0, 1.0], GAMMA), n, 1e-3).unwrap()
}

/// Slow drive above the diabolical circle, used for the propagator.
pub fn drive() -> LoopSpec {
    LoopSpec::circle([0.0, 0.0, 0.5], 1.0, [0.0, 0.0, 1.0], [0.0, 0.0, 0.2])
}
