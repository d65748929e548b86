//! Shared fixtures for the criterion benchmarks.

use beamselect::{sample_channel, ChannelRealization, RngSeed};

/// A reproducible realization with `k` nodes.
pub fn fixture(k: usize) -> ChannelRealization {
    sample_channel(k, RngSeed::new(0xBEEF, k as u64)).expect("k >= 1")
}
