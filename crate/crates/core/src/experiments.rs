//! Monte Carlo sweeps over the node count K.
//!
//! Trial `t` at node count `K` always draws its channel from substream
//! `(K << 32) | t` of the master seed, and every algorithm in the sweep sees
//! that same realization. Per-trial values are collected in trial order and
//! reduced by pairwise summation, so results do not depend on how many
//! worker threads ran the trials.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::bound_constants;
use crate::channel::{sample_channel, ChannelRealization, RngSeed};
use crate::error::{Error, Result};
use crate::protocol::distributed_select;
use crate::selection::{
    amplitude_threshold_select, exhaustive_select_with, greedy_select, sector_select,
    single_best_select, with_fallback, PowerMetric, SelectionOutcome,
};

/// Default exhaustive cap for sweeps.
pub const DEFAULT_SWEEP_EXHAUSTIVE_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Exhaustive,
    Greedy,
    Sector,
    UpperBound,
    SingleBest,
    Distributed,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Exhaustive,
        Algorithm::Greedy,
        Algorithm::Sector,
        Algorithm::UpperBound,
        Algorithm::SingleBest,
        Algorithm::Distributed,
    ];

    /// The five curves of the power and selected-fraction plots.
    pub const PLOTTED: [Algorithm; 5] = [
        Algorithm::Exhaustive,
        Algorithm::Greedy,
        Algorithm::Sector,
        Algorithm::UpperBound,
        Algorithm::SingleBest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Exhaustive => "exhaustive",
            Algorithm::Greedy => "greedy",
            Algorithm::Sector => "sector",
            Algorithm::UpperBound => "upper_bound",
            Algorithm::SingleBest => "single_best",
            Algorithm::Distributed => "distributed",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown algorithm '{s}'")))
    }
}

/// Amplitude threshold and sector half-angle used by the threshold rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub r: f64,
    pub alpha: f64,
}

impl Default for Thresholds {
    /// `(r*, α*)` from the bound optimization.
    fn default() -> Self {
        let c = bound_constants();
        Thresholds {
            r: c.r_star,
            alpha: c.alpha_star,
        }
    }
}

/// Runs one algorithm on one realization.
///
/// Threshold rules go through [`with_fallback`]; `UpperBound` is scored with
/// the coherent (phase-ignoring) power, everything else with the received power.
pub fn run_algorithm(
    algorithm: Algorithm,
    h: &ChannelRealization,
    thresholds: Thresholds,
    exhaustive_cap: usize,
) -> Result<SelectionOutcome> {
    match algorithm {
        Algorithm::Exhaustive => exhaustive_select_with(h, exhaustive_cap, PowerMetric::Received),
        Algorithm::Greedy => Ok(greedy_select(h)),
        Algorithm::Sector => with_fallback(
            sector_select(h, thresholds.r, thresholds.alpha)?,
            h,
            PowerMetric::Received,
        ),
        Algorithm::UpperBound => with_fallback(
            amplitude_threshold_select(h, thresholds.r),
            h,
            PowerMetric::Coherent,
        ),
        Algorithm::SingleBest => Ok(single_best_select(h)),
        Algorithm::Distributed => {
            let (selected, _) = distributed_select(h, thresholds.r, thresholds.alpha)?;
            SelectionOutcome::evaluate(h, selected, PowerMetric::Received)
        }
    }
}

/// Trial count used when none is given: 10⁴ up to K = 100, 10³ up to
/// K = 1000, 10² beyond.
pub fn default_trials(k: usize) -> usize {
    match k {
        0..=100 => 10_000,
        101..=1000 => 1_000,
        _ => 100,
    }
}

/// Substream for trial `trial` at node count `k`.
pub fn trial_seed(master_seed: u64, k: usize, trial: usize) -> RngSeed {
    RngSeed::new(master_seed, ((k as u64) << 32) | trial as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub k_values: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub exhaustive_k_cap: usize,
    pub thresholds: Thresholds,
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
}

impl SweepConfig {
    pub fn new(k_values: Vec<usize>, trials: usize, master_seed: u64) -> Self {
        SweepConfig {
            k_values,
            trials,
            master_seed,
            algorithms: Algorithm::PLOTTED.to_vec(),
            exhaustive_k_cap: DEFAULT_SWEEP_EXHAUSTIVE_CAP,
            thresholds: Thresholds::default(),
            threads: None,
        }
    }

    pub fn with_algorithms(mut self, algorithms: Vec<Algorithm>) -> Self {
        self.algorithms = algorithms;
        self
    }

    pub fn with_threads(mut self, threads: Option<usize>) -> Self {
        self.threads = threads;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_values.is_empty() {
            return Err(Error::invalid("k_values must not be empty"));
        }
        if self.k_values.contains(&0) {
            return Err(Error::invalid("every K must be at least 1"));
        }
        if !self.k_values.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("k_values must be strictly ascending"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        let limit = 1usize << 32;
        if self.trials >= limit || self.k_values.iter().any(|&k| k >= limit) {
            return Err(Error::invalid("K and trial counts must stay below 2^32"));
        }
        if self.algorithms.is_empty() {
            return Err(Error::invalid("at least one algorithm is required"));
        }
        if self.threads == Some(0) {
            return Err(Error::invalid("thread count must be at least 1"));
        }
        if !(self.thresholds.alpha > 0.0 && self.thresholds.alpha <= std::f64::consts::PI) {
            return Err(Error::invalid("sector half-angle must lie in (0, π]"));
        }
        Ok(())
    }
}

/// Aggregate for one (algorithm, K) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub algorithm: Algorithm,
    pub k: usize,
    pub mean_power: f64,
    pub mean_fraction: f64,
    pub std_err_power: f64,
    pub trials: usize,
}

impl SweepCell {
    pub fn mean_power_over_k(&self) -> f64 {
        self.mean_power / self.k as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Ordered by algorithm (as configured), then by K.
    pub cells: Vec<SweepCell>,
    /// Exhaustive cells skipped because K exceeded the cap.
    pub skipped: Vec<(Algorithm, usize)>,
    /// Trials where exhaustive < greedy or greedy < single_best.
    pub dominance_violations: u64,
}

impl SweepResult {
    pub fn get(&self, algorithm: Algorithm, k: usize) -> Option<&SweepCell> {
        self.cells
            .iter()
            .find(|c| c.algorithm == algorithm && c.k == k)
    }
}

struct TrialRecord {
    powers: Vec<f64>,
    fractions: Vec<f64>,
    violated: bool,
}

fn run_trial(
    config: &SweepConfig,
    active: &[Algorithm],
    k: usize,
    trial: usize,
) -> Result<TrialRecord> {
    let h = sample_channel(k, trial_seed(config.master_seed, k, trial))?;
    let mut powers = Vec::with_capacity(active.len());
    let mut fractions = Vec::with_capacity(active.len());
    for &algorithm in active {
        let outcome = run_algorithm(algorithm, &h, config.thresholds, config.exhaustive_k_cap)?;
        powers.push(outcome.power);
        fractions.push(outcome.selected.fraction());
    }
    let power_of = |a: Algorithm| active.iter().position(|&x| x == a).map(|i| powers[i]);
    let ordered = [Algorithm::Exhaustive, Algorithm::Greedy, Algorithm::SingleBest]
        .into_iter()
        .filter_map(power_of)
        .collect::<Vec<_>>();
    let violated = ordered.windows(2).any(|w| w[0] < w[1]);
    Ok(TrialRecord {
        powers,
        fractions,
        violated,
    })
}

/// Runs the configured sweep.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| sweep_in_pool(config))
}

fn sweep_in_pool(config: &SweepConfig) -> Result<SweepResult> {
    let mut per_k: Vec<(usize, Vec<Algorithm>, Vec<TrialRecord>)> = Vec::new();
    let mut skipped = Vec::new();
    let mut dominance_violations = 0u64;

    for &k in &config.k_values {
        let active: Vec<Algorithm> = config
            .algorithms
            .iter()
            .copied()
            .filter(|&a| {
                let skip = a == Algorithm::Exhaustive && k > config.exhaustive_k_cap;
                if skip {
                    skipped.push((a, k));
                }
                !skip
            })
            .collect();
        if active.is_empty() {
            continue;
        }
        let records = (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(config, &active, k, t))
            .collect::<Result<Vec<_>>>()?;
        dominance_violations += records.iter().filter(|r| r.violated).count() as u64;
        per_k.push((k, active, records));
    }

    let mut cells = Vec::new();
    for &algorithm in &config.algorithms {
        for (k, active, records) in &per_k {
            let Some(slot) = active.iter().position(|&a| a == algorithm) else {
                continue;
            };
            let powers: Vec<f64> = records.iter().map(|r| r.powers[slot]).collect();
            let fractions: Vec<f64> = records.iter().map(|r| r.fractions[slot]).collect();
            let n = records.len();
            let mean_power = pairwise_sum(&powers) / n as f64;
            let mean_fraction = pairwise_sum(&fractions) / n as f64;
            let std_err_power = if n > 1 {
                let sq: Vec<f64> = powers.iter().map(|p| (p - mean_power).powi(2)).collect();
                (pairwise_sum(&sq) / (n - 1) as f64 / n as f64).sqrt()
            } else {
                0.0
            };
            cells.push(SweepCell {
                algorithm,
                k: *k,
                mean_power,
                mean_fraction,
                std_err_power,
                trials: n,
            });
        }
    }
    Ok(SweepResult {
        cells,
        skipped,
        dominance_violations,
    })
}

/// Pairwise (cascade) summation in a fixed order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if values.len() <= BLOCK {
        values.iter().sum()
    } else {
        let (left, right) = values.split_at(values.len() / 2);
        pairwise_sum(left) + pairwise_sum(right)
    }
}

/// `H_K = Σ_{i=1..K} 1/i`, the expected maximum of K unit-mean exponential
/// powers, i.e. the mean single-best power.
pub fn harmonic_expectation(k: usize) -> f64 {
    (1..=k).rev().map(|i| 1.0 / i as f64).sum()
}

/// Least-squares slope of mean power against K for one algorithm, over the
/// cells whose K lies in `k_range`.
pub fn scaling_fit(
    result: &SweepResult,
    algorithm: Algorithm,
    k_range: RangeInclusive<usize>,
) -> Result<f64> {
    let points: Vec<(f64, f64)> = result
        .cells
        .iter()
        .filter(|c| c.algorithm == algorithm && k_range.contains(&c.k))
        .map(|c| (c.k as f64, c.mean_power))
        .collect();
    if points.len() < 3 {
        return Err(Error::invalid(format!(
            "need at least 3 K values for {algorithm} in {k_range:?}, found {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    Ok(sxy / sxx)
}
