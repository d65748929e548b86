//! Opportunistic collaborative beamforming over Rayleigh fading channels.
//!
//! K single-antenna nodes share a common message with a distant receiver.
//! No node corrects its phase; instead the receiver picks the subset whose
//! raw channels add up best and feeds back one transmit/stay-silent bit per
//! node. Total transmit power is fixed, so a subset `s` delivers the
//! normalized power `|hᵀs|² / sᵀs`.
//!
//! Modules:
//! - [`channel`]: CN(0, 1) channel draws on reproducible substreams.
//! - [`selection`]: exhaustive, greedy, threshold, sector, and single-best rules.
//! - [`bounds`]: the large-K bound functions and their optimized constants.
//! - [`experiments`]: Monte Carlo sweeps over K.
//! - [`protocol`]: feedback accounting and the distributed timer variant.

pub mod bounds;
pub mod channel;
pub mod error;
pub mod experiments;
pub mod protocol;
pub mod selection;

pub use bounds::{bound_constants, BoundConstants};
pub use channel::{composite_gain, sample_channel, ChannelGain, ChannelRealization, RngSeed};
pub use error::{Error, Result};
pub use experiments::{
    harmonic_expectation, run_algorithm, run_sweep, scaling_fit, Algorithm, SweepCell,
    SweepConfig, SweepResult, Thresholds,
};
pub use protocol::{centralized_feedback, distributed_select, FeedbackBudget, TimerSchedule};
pub use selection::{
    amplitude_threshold_select, coherent_power, exhaustive_select, exhaustive_select_with,
    greedy_select, received_power, sector_select, single_best_select, two_node_rule,
    with_fallback, PowerMetric, SelectionOutcome, SelectionVector,
};
