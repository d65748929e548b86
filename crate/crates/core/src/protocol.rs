//! Feedback accounting for the centralized one-bit scheme and the
//! distributed timer-based variant.
//!
//! In the distributed variant each node starts a timer inversely
//! proportional to its amplitude. The first to expire (the strongest node)
//! broadcasts its channel, and in the next slot every other node joins if
//! its own amplitude clears `r` and its phase lies within `±α` of the
//! broadcast phase. Only the ordering of the timers matters here; no
//! continuous-time contention is modeled.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::error::Result;
use crate::selection::{sector_select_centered, SelectionVector};

/// Signalling cost of one selection round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FeedbackBudget {
    /// Feedback bits sent by the destination.
    pub bits_sent: u64,
    pub rounds: u64,
    /// Node-to-node channel broadcasts.
    pub broadcasts: u64,
}

/// One bit per node from the destination, in a single round.
pub fn centralized_feedback(s: &SelectionVector) -> FeedbackBudget {
    FeedbackBudget {
        bits_sent: s.len() as u64,
        rounds: 1,
        broadcasts: 0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimerSchedule {
    /// `scale / a_k`; infinite for a zero amplitude.
    pub timeouts: Vec<f64>,
    /// First node to expire (lowest index on ties).
    pub winner: usize,
}

/// Timers `scale / a_k` for every node.
pub fn timer_schedule(h: &ChannelRealization, scale: f64) -> TimerSchedule {
    let timeouts: Vec<f64> = h
        .iter()
        .map(|g| {
            if g.amplitude() > 0.0 {
                scale / g.amplitude()
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let mut winner = 0;
    for (i, &t) in timeouts.iter().enumerate().skip(1) {
        if t < timeouts[winner] {
            winner = i;
        }
    }
    // equal amplitudes yield equal timers only up to rounding; the amplitude
    // ordering is authoritative
    if h.gains()[winner].amplitude() < h.gains()[h.strongest()].amplitude()
        || timeouts[winner] == timeouts[h.strongest()]
    {
        winner = h.strongest();
    }
    TimerSchedule { timeouts, winner }
}

/// Distributed selection: the timer winner always transmits; every other
/// node self-selects against `(r, alpha)` relative to the winner's phase.
pub fn distributed_select(
    h: &ChannelRealization,
    r: f64,
    alpha: f64,
) -> Result<(SelectionVector, FeedbackBudget)> {
    let winner = timer_schedule(h, 1.0).winner;
    let reference = h.gains()[winner].phase();
    let mut bits = sector_select_centered(h, r, alpha, reference)?
        .bits()
        .to_vec();
    bits[winner] = true;
    let budget = FeedbackBudget {
        bits_sent: 0,
        rounds: 2,
        broadcasts: 1,
    };
    Ok((SelectionVector::from_bits(bits), budget))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::bound_constants;

    #[test]
    fn centralized_bits_equal_k() {
        for k in [1, 5, 12] {
            let budget = centralized_feedback(&SelectionVector::none(k));
            assert_eq!(budget.bits_sent, k as u64);
            assert_eq!(budget.rounds, 1);
            assert_eq!(budget.broadcasts, 0);
        }
        let budget = centralized_feedback(&SelectionVector::all(5));
        assert_eq!(budget.bits_sent, 5);
    }

    #[test]
    fn timer_winner_is_strongest() {
        let h = ChannelRealization::from_polar(&[(0.3, 0.0), (1.1, 0.0), (1.1, 2.0), (0.0, 1.0)])
            .unwrap();
        let schedule = timer_schedule(&h, 2.0);
        assert_eq!(schedule.winner, 1);
        assert!((schedule.timeouts[0] - 2.0 / 0.3).abs() < 1e-12);
        assert!(schedule.timeouts[3].is_infinite());
    }

    #[test]
    fn single_node() {
        let h = ChannelRealization::from_polar(&[(0.01, 3.0)]).unwrap();
        let (s, budget) = distributed_select(&h, 0.5, 0.2).unwrap();
        assert_eq!(s.indices().collect::<Vec<_>>(), vec![0]);
        assert_eq!(budget.broadcasts, 1);
        assert_eq!(budget.bits_sent, 0);
        assert_eq!(budget.rounds, 2);
    }

    #[test]
    fn identical_nodes_all_join() {
        let h = ChannelRealization::from_polar(&[(0.8, -2.5); 6]).unwrap();
        let (s, _) = distributed_select(&h, 0.5316, 1.1656).unwrap();
        assert_eq!(s.count(), 6);
    }

    #[test]
    fn three_node_instance() {
        // node 3 fails both 0.3 < r* and |2.8 − 0| > α*
        let c = bound_constants();
        let h = ChannelRealization::from_polar(&[(1.2, 0.0), (0.9, 0.4), (0.3, 2.8)]).unwrap();
        let (s, _) = distributed_select(&h, c.r_star, c.alpha_star).unwrap();
        assert_eq!(s.indices().collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn phase_offsets_wrap() {
        // winner at 3.0 rad, peer at −3.0 rad: offset wraps to 0.283
        let h = ChannelRealization::from_polar(&[(2.0, 3.0), (1.0, -3.0)]).unwrap();
        let (s, _) = distributed_select(&h, 0.5, 0.3).unwrap();
        assert_eq!(s.count(), 2);
    }

    #[test]
    fn rejects_bad_alpha() {
        let h = ChannelRealization::from_polar(&[(1.0, 0.0)]).unwrap();
        assert!(distributed_select(&h, 0.5, 0.0).is_err());
    }
}
