//! Node-selection rules.
//!
//! Every rule reports its result as a [`SelectionOutcome`] whose power is
//! recomputed from the selected set by the same index-ordered summation, so
//! outcomes of different rules on the same realization compare exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{check_permutation, composite_gain, wrap_phase, ChannelRealization};
use crate::error::{Error, Result};

/// Default node-count cap for exhaustive search (about 1.7·10⁷ subsets).
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 24;

/// Largest cap the bitmask enumeration supports.
pub const MAX_EXHAUSTIVE_CAP: usize = 32;

/// Binary membership vector `s ∈ {0,1}^K`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SelectionVector {
    bits: Vec<bool>,
}

impl SelectionVector {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        SelectionVector { bits }
    }

    /// No node selected.
    pub fn none(k: usize) -> Self {
        SelectionVector {
            bits: vec![false; k],
        }
    }

    pub fn all(k: usize) -> Self {
        SelectionVector {
            bits: vec![true; k],
        }
    }

    pub fn single(k: usize, index: usize) -> Result<Self> {
        Self::from_indices(k, &[index])
    }

    /// Builds a selection from 0-based node indices.
    pub fn from_indices(k: usize, indices: &[usize]) -> Result<Self> {
        let mut bits = vec![false; k];
        for &i in indices {
            if i >= k {
                return Err(Error::invalid(format!("node index {i} out of range for K = {k}")));
            }
            bits[i] = true;
        }
        Ok(SelectionVector { bits })
    }

    /// Bit `i` of `mask` selects node `i`.
    pub fn from_mask(mask: u64, k: usize) -> Result<Self> {
        if k < 64 && mask >> k != 0 {
            return Err(Error::invalid(format!("mask {mask:#x} has bits beyond K = {k}")));
        }
        Ok(SelectionVector {
            bits: (0..k).map(|i| i < 64 && mask >> i & 1 == 1).collect(),
        })
    }

    /// Node count K.
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Number of selected nodes, `sᵀs`.
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.bits.get(index).copied().unwrap_or(false)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Selected node indices (0-based, ascending).
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    /// Fraction of the K nodes selected.
    pub fn fraction(&self) -> f64 {
        if self.bits.is_empty() {
            0.0
        } else {
            self.count() as f64 / self.bits.len() as f64
        }
    }

    /// Same reindexing as [`ChannelRealization::permuted`].
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        check_permutation(order, self.len())?;
        Ok(SelectionVector {
            bits: order.iter().map(|&i| self.bits[i]).collect(),
        })
    }
}

/// Which power functional scores a selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PowerMetric {
    /// Actual normalized received power `|hᵀs|² / sᵀs`.
    Received,
    /// Phase-ignoring power `(Σ a_k)² / sᵀs`, as if every channel arrived at zero phase.
    Coherent,
}

/// Result of running a selection rule on one realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionOutcome {
    pub selected: SelectionVector,
    /// Normalized received power, `|composite|²`.
    pub power: f64,
    pub composite: Complex64,
    /// Greedy steps taken (selected-set size); 0 for non-iterative rules.
    pub iterations: usize,
    /// Greedy power after each step; empty for other rules.
    pub trace: Vec<f64>,
}

impl SelectionOutcome {
    /// Scores `selected` on `h` under `metric`.
    pub fn evaluate(
        h: &ChannelRealization,
        selected: SelectionVector,
        metric: PowerMetric,
    ) -> Result<Self> {
        let composite = match metric {
            PowerMetric::Received => composite_gain(h, &selected)?,
            PowerMetric::Coherent => coherent_composite(h, &selected)?,
        };
        Ok(SelectionOutcome {
            selected,
            power: composite.norm_sqr(),
            composite,
            iterations: 0,
            trace: Vec::new(),
        })
    }

    /// Selected indices, 0-based.
    pub fn indices(&self) -> Vec<usize> {
        self.selected.indices().collect()
    }
}

/// `|hᵀs|² / sᵀs`.
pub fn received_power(h: &ChannelRealization, s: &SelectionVector) -> Result<f64> {
    Ok(composite_gain(h, s)?.norm_sqr())
}

fn coherent_composite(h: &ChannelRealization, s: &SelectionVector) -> Result<Complex64> {
    if s.len() != h.len() {
        return Err(Error::invalid(format!(
            "selection length {} does not match channel length {}",
            s.len(),
            h.len()
        )));
    }
    let count = s.count();
    if count == 0 {
        return Err(Error::invalid("selection is empty"));
    }
    let sum: f64 = s.indices().map(|i| h.gains()[i].amplitude()).sum();
    Ok(Complex64::new(sum / (count as f64).sqrt(), 0.0))
}

/// `(Σ_{s_k=1} a_k)² / sᵀs`; never below [`received_power`].
pub fn coherent_power(h: &ChannelRealization, s: &SelectionVector) -> Result<f64> {
    Ok(coherent_composite(h, s)?.norm_sqr())
}

/// Closed-form two-node decision: both nodes should transmit iff
/// `cos Δ ≥ (1 − ρ²) / (2ρ)` with `ρ = a2 / a1`.
pub fn two_node_rule(a1: f64, a2: f64, delta: f64) -> Result<bool> {
    if !(a2 > 0.0 && a2.is_finite()) {
        return Err(Error::invalid(format!("a2 must be positive, got {a2}")));
    }
    if !(a2 <= a1 && a1.is_finite()) {
        return Err(Error::invalid(format!(
            "expected a1 >= a2, got a1 = {a1}, a2 = {a2}"
        )));
    }
    let rho = a2 / a1;
    let threshold = (1.0 - rho * rho) / (2.0 * rho);
    // a few ulps of slack so the algebraic boundary stays inclusive
    let slack = 4.0 * f64::EPSILON * threshold.abs().max(1.0);
    Ok(delta.cos() >= threshold - slack)
}

/// Optimal selection by enumerating all `2^K − 1` nonempty subsets, with the
/// default cap of [`DEFAULT_EXHAUSTIVE_CAP`] nodes.
pub fn exhaustive_select(h: &ChannelRealization) -> Result<SelectionOutcome> {
    exhaustive_select_with(h, DEFAULT_EXHAUSTIVE_CAP, PowerMetric::Received)
}

/// Exhaustive search with an explicit cap and scoring functional.
///
/// Ties go to the smaller set, then to the lexicographically smallest list
/// of selected indices.
pub fn exhaustive_select_with(
    h: &ChannelRealization,
    cap: usize,
    metric: PowerMetric,
) -> Result<SelectionOutcome> {
    let k = h.len();
    let cap = cap.min(MAX_EXHAUSTIVE_CAP);
    if k > cap {
        return Err(Error::ComplexityGuard { k, cap });
    }
    let (re, im): (Vec<f64>, Vec<f64>) = match metric {
        PowerMetric::Received => h
            .iter()
            .map(|g| {
                let c = g.to_complex();
                (c.re, c.im)
            })
            .unzip(),
        PowerMetric::Coherent => h.iter().map(|g| (g.amplitude(), 0.0)).unzip(),
    };

    let mut best_mask: u64 = 1;
    let mut best_power = f64::NEG_INFINITY;
    let mut best_count = u32::MAX;
    for mask in 1u64..(1u64 << k) {
        let (mut sr, mut si) = (0.0, 0.0);
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            sr += re[i];
            si += im[i];
            bits &= bits - 1;
        }
        let count = mask.count_ones();
        let power = (sr * sr + si * si) / count as f64;
        let better = power > best_power
            || (power == best_power
                && (count < best_count
                    || (count == best_count && lex_smaller(mask, best_mask))));
        if better {
            best_mask = mask;
            best_power = power;
            best_count = count;
        }
    }
    SelectionOutcome::evaluate(h, SelectionVector::from_mask(best_mask, k)?, metric)
}

/// For equal-size sets: `a` precedes `b` when the smallest index in which
/// they differ belongs to `a`.
fn lex_smaller(a: u64, b: u64) -> bool {
    let diff = a ^ b;
    diff != 0 && a & (diff & diff.wrapping_neg()) != 0
}

/// Selects every node with `a_k ≥ r`, ignoring phase. May select nothing.
pub fn amplitude_threshold_select(h: &ChannelRealization, r: f64) -> SelectionVector {
    SelectionVector::from_bits(h.iter().map(|g| g.amplitude() >= r).collect())
}

/// Selects nodes with `a_k ≥ r` and `|φ_k| ≤ α`. May select nothing.
pub fn sector_select(h: &ChannelRealization, r: f64, alpha: f64) -> Result<SelectionVector> {
    sector_select_centered(h, r, alpha, 0.0)
}

/// Sector rule with the sector rotated to `center`: admits `a_k ≥ r` and
/// `|wrap(φ_k − center)| ≤ α`.
pub fn sector_select_centered(
    h: &ChannelRealization,
    r: f64,
    alpha: f64,
    center: f64,
) -> Result<SelectionVector> {
    if !(alpha > 0.0 && alpha <= std::f64::consts::PI) {
        return Err(Error::invalid(format!(
            "sector half-angle must lie in (0, π], got {alpha}"
        )));
    }
    Ok(SelectionVector::from_bits(
        h.iter()
            .map(|g| g.amplitude() >= r && wrap_phase(g.phase() - center).abs() <= alpha)
            .collect(),
    ))
}

/// Iterative greedy selection.
///
/// Starts from the strongest node and, at each step, scores every unselected
/// node by `cos Δ_i − (P − a_i²) / (2 a_i √(N P))`, where `Δ_i` is its phase
/// relative to the current composite gain. The best candidate joins only if
/// its score is strictly positive, i.e. it strictly raises the normalized
/// power.
pub fn greedy_select(h: &ChannelRealization) -> SelectionOutcome {
    let k = h.len();
    let gains: Vec<Complex64> = h.iter().map(|g| g.to_complex()).collect();
    let seed = h.strongest();

    let mut chosen = vec![false; k];
    chosen[seed] = true;
    // unnormalized sum, equal to √N · z
    let mut sum = gains[seed];
    let mut power = sum.norm_sqr();
    let mut count = 1usize;
    let mut trace = vec![power];

    while count < k && power > 0.0 {
        let sum_norm = sum.norm(); // √(N P)
        let mut pick: Option<(usize, f64)> = None;
        for (i, g) in h.iter().enumerate() {
            let a = g.amplitude();
            if chosen[i] || a == 0.0 {
                continue;
            }
            let cos_delta = (gains[i] * sum.conj()).re / (a * sum_norm);
            let needed = (power - a * a) / (2.0 * a * sum_norm);
            let score = cos_delta - needed;
            if pick.is_none_or(|(_, best)| score > best) {
                pick = Some((i, score));
            }
        }
        let Some((i, score)) = pick else { break };
        if score <= 0.0 {
            break;
        }
        let next_sum = sum + gains[i];
        let next_power = next_sum.norm_sqr() / (count + 1) as f64;
        if next_power <= power {
            break;
        }
        chosen[i] = true;
        sum = next_sum;
        power = next_power;
        count += 1;
        trace.push(power);
    }

    let selected = SelectionVector::from_bits(chosen);
    let mut outcome = SelectionOutcome::evaluate(h, selected, PowerMetric::Received)
        .expect("greedy selection is nonempty and matches K");
    outcome.iterations = count;
    outcome.trace = trace;
    outcome
}

/// Single strongest node (ties to the lowest index).
pub fn single_best_select(h: &ChannelRealization) -> SelectionOutcome {
    single_best_with(h, PowerMetric::Received)
}

fn single_best_with(h: &ChannelRealization, metric: PowerMetric) -> SelectionOutcome {
    let selected = SelectionVector::single(h.len(), h.strongest()).expect("strongest index in range");
    SelectionOutcome::evaluate(h, selected, metric).expect("singleton selection is valid")
}

/// Finite-K guard for the threshold rules: falls back to the single best
/// node when the rule selected nothing or scores below that node under
/// `metric`.
pub fn with_fallback(
    rule_output: SelectionVector,
    h: &ChannelRealization,
    metric: PowerMetric,
) -> Result<SelectionOutcome> {
    if rule_output.len() != h.len() {
        return Err(Error::invalid(format!(
            "selection length {} does not match channel length {}",
            rule_output.len(),
            h.len()
        )));
    }
    let single = single_best_with(h, metric);
    if rule_output.count() == 0 || single.power == 0.0 {
        return Ok(single);
    }
    let candidate = SelectionOutcome::evaluate(h, rule_output, metric)?;
    if candidate.power < single.power {
        Ok(single)
    } else {
        Ok(candidate)
    }
}
