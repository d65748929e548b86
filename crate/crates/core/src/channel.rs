//! Channel model: i.i.d. CN(0, 1) node-to-destination gains kept in polar form.
//!
//! Each realization is drawn from its own ChaCha substream keyed by
//! `(seed, stream_id)`, so trials can be generated in any order or on any
//! thread and still reproduce bit-for-bit.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::selection::SelectionVector;

/// Maps any finite angle onto (-π, π].
pub fn wrap_phase(phase: f64) -> f64 {
    let mut p = phase % (2.0 * PI);
    if p <= -PI {
        p += 2.0 * PI;
    } else if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// One node's channel `a·e^{jφ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelGain {
    amplitude: f64,
    phase: f64,
}

impl ChannelGain {
    /// Builds a gain from amplitude and phase. The phase is wrapped onto
    /// (-π, π]; a negative or non-finite amplitude is rejected.
    pub fn new(amplitude: f64, phase: f64) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude >= 0.0) {
            return Err(Error::invalid(format!(
                "amplitude must be finite and nonnegative, got {amplitude}"
            )));
        }
        if !phase.is_finite() {
            return Err(Error::invalid(format!("phase must be finite, got {phase}")));
        }
        Ok(ChannelGain {
            amplitude,
            phase: wrap_phase(phase),
        })
    }

    pub fn from_complex(h: Complex64) -> Self {
        let (amplitude, phase) = h.to_polar();
        ChannelGain {
            amplitude,
            // atan2 returns -π for (negative, -0.0)
            phase: if phase <= -PI { PI } else { phase },
        }
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.phase)
    }

    /// Power of this node transmitting alone.
    pub fn power(&self) -> f64 {
        self.amplitude * self.amplitude
    }
}

/// The channel vector `h = [h_1, …, h_K]` for one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    gains: Vec<ChannelGain>,
}

impl ChannelRealization {
    pub fn new(gains: Vec<ChannelGain>) -> Result<Self> {
        if gains.is_empty() {
            return Err(Error::invalid("a realization needs at least one node"));
        }
        Ok(ChannelRealization { gains })
    }

    /// Convenience constructor from `(amplitude, phase)` pairs.
    pub fn from_polar(pairs: &[(f64, f64)]) -> Result<Self> {
        let gains = pairs
            .iter()
            .map(|&(a, p)| ChannelGain::new(a, p))
            .collect::<Result<Vec<_>>>()?;
        Self::new(gains)
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }

    pub fn gains(&self) -> &[ChannelGain] {
        &self.gains
    }

    pub fn get(&self, index: usize) -> Option<&ChannelGain> {
        self.gains.get(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ChannelGain> + '_ {
        self.gains.iter()
    }

    /// Index of the strongest node; ties go to the lowest index.
    pub fn strongest(&self) -> usize {
        let mut best = 0;
        for (i, g) in self.gains.iter().enumerate().skip(1) {
            if g.amplitude > self.gains[best].amplitude {
                best = i;
            }
        }
        best
    }

    /// Applies a common phase rotation to every node.
    pub fn rotated(&self, theta: f64) -> Self {
        let gains = self
            .gains
            .iter()
            .map(|g| ChannelGain {
                amplitude: g.amplitude,
                phase: wrap_phase(g.phase + theta),
            })
            .collect();
        ChannelRealization { gains }
    }

    /// Multiplies every amplitude by `factor` (must be positive).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::invalid(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        let gains = self
            .gains
            .iter()
            .map(|g| ChannelGain {
                amplitude: g.amplitude * factor,
                phase: g.phase,
            })
            .collect();
        Ok(ChannelRealization { gains })
    }

    /// Reorders nodes so that node `i` of the result is node `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        check_permutation(order, self.len())?;
        Ok(ChannelRealization {
            gains: order.iter().map(|&i| self.gains[i]).collect(),
        })
    }
}

pub(crate) fn check_permutation(order: &[usize], len: usize) -> Result<()> {
    if order.len() != len {
        return Err(Error::invalid(format!(
            "permutation has length {}, expected {len}",
            order.len()
        )));
    }
    let mut seen = vec![false; len];
    for &i in order {
        if i >= len || std::mem::replace(&mut seen[i], true) {
            return Err(Error::invalid("not a permutation"));
        }
    }
    Ok(())
}

/// Master seed plus substream id. Equal values always reproduce the same
/// realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngSeed { seed, stream_id }
    }

    /// A fresh generator positioned at the start of this substream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Draws one CN(0, 1) complex gain: real and imaginary parts are independent
/// N(0, 1/2).
pub fn sample_gain<R: Rng + ?Sized>(rng: &mut R) -> ChannelGain {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    ChannelGain::from_complex(Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2))
}

/// Samples `k` i.i.d. Rayleigh-fading gains from the given substream.
pub fn sample_channel(k: usize, seed: RngSeed) -> Result<ChannelRealization> {
    if k == 0 {
        return Err(Error::invalid("node count K must be at least 1"));
    }
    let mut rng = seed.rng();
    let gains = (0..k).map(|_| sample_gain(&mut rng)).collect();
    Ok(ChannelRealization { gains })
}

/// Normalized composite gain `z = (1/√|s|) Σ_{s_k = 1} h_k`, summed in index order.
pub fn composite_gain(h: &ChannelRealization, s: &SelectionVector) -> Result<Complex64> {
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
    let sum: Complex64 = s.indices().map(|i| h.gains[i].to_complex()).sum();
    Ok(sum / (count as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sel(bits: &[bool]) -> SelectionVector {
        SelectionVector::from_bits(bits.to_vec())
    }

    #[test]
    fn wrap_phase_maps_minus_pi_to_pi() {
        assert_eq!(wrap_phase(-PI), PI);
        assert_eq!(wrap_phase(PI), PI);
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(-0.5) + 0.5).abs() < 1e-15);
        assert!((wrap_phase(2.0 * PI + 0.25) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn gain_validation() {
        assert!(ChannelGain::new(-0.1, 0.0).is_err());
        assert!(ChannelGain::new(f64::NAN, 0.0).is_err());
        assert!(ChannelGain::new(1.0, f64::INFINITY).is_err());
        let g = ChannelGain::new(1.0, -PI).unwrap();
        assert_eq!(g.phase(), PI);
        let g = ChannelGain::from_complex(Complex64::new(-1.0, -0.0));
        assert_eq!(g.phase(), PI);
    }

    #[test]
    fn single_node_sample_respects_invariants() {
        for stream in 0..200 {
            let h = sample_channel(1, RngSeed::new(7, stream)).unwrap();
            assert_eq!(h.len(), 1);
            let g = h.gains()[0];
            assert!(g.amplitude() >= 0.0);
            assert!(g.phase() > -PI && g.phase() <= PI);
        }
    }

    #[test]
    fn zero_nodes_rejected() {
        assert!(matches!(
            sample_channel(0, RngSeed::new(0, 0)),
            Err(Error::InvalidArgument(_))
        ));
        assert!(ChannelRealization::new(vec![]).is_err());
    }

    #[test]
    fn substreams_reproduce_and_differ() {
        let a = sample_channel(16, RngSeed::new(42, 3)).unwrap();
        let b = sample_channel(16, RngSeed::new(42, 3)).unwrap();
        let c = sample_channel(16, RngSeed::new(42, 4)).unwrap();
        let d = sample_channel(16, RngSeed::new(43, 3)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn composite_single_node_identity() {
        let h = ChannelRealization::from_polar(&[(1.0, 0.0)]).unwrap();
        let z = composite_gain(&h, &sel(&[true])).unwrap();
        assert_eq!(z, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn composite_antiphase_cancels() {
        let h = ChannelRealization::from_polar(&[(1.0, 0.0), (1.0, PI)]).unwrap();
        let z = composite_gain(&h, &sel(&[true, true])).unwrap();
        assert!(z.norm() < 1e-15);
    }

    #[test]
    fn composite_three_node_instance() {
        // direct evaluation of (h1 + h2)/√2
        let h = ChannelRealization::from_polar(&[(1.2, 0.0), (0.9, 0.4), (0.3, 2.8)]).unwrap();
        let z = composite_gain(&h, &sel(&[true, true, false])).unwrap();
        assert!((z.re - 1.434_687_764_695_132_8).abs() < 1e-12);
        assert!((z.im - 0.247_824_315_508_383_88).abs() < 1e-12);
    }

    #[test]
    fn composite_errors() {
        let h = ChannelRealization::from_polar(&[(1.0, 0.0), (1.0, 0.0)]).unwrap();
        assert!(composite_gain(&h, &sel(&[false, false])).is_err());
        assert!(composite_gain(&h, &sel(&[true])).is_err());
    }

    #[test]
    fn strongest_ties_go_low() {
        let h = ChannelRealization::from_polar(&[(0.5, 0.0), (2.0, 1.0), (2.0, -1.0)]).unwrap();
        assert_eq!(h.strongest(), 1);
    }

    #[test]
    fn permutation_check() {
        let h = ChannelRealization::from_polar(&[(0.5, 0.0), (2.0, 1.0)]).unwrap();
        assert!(h.permuted(&[0, 0]).is_err());
        assert!(h.permuted(&[0]).is_err());
        assert_eq!(h.permuted(&[1, 0]).unwrap().gains()[0].amplitude(), 2.0);
    }
}
