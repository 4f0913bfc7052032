//! Closed-form delay computation: the genie-aided / zero-block-delayed
//! optimum and the one-block-delayed bracket.
//!
//! The secrecy rate is carried as the integer pair `(N, L)` with `L = N·R_s`
//! so no floating-point rate ever appears; everything downstream depends on
//! the rate only through the sub-message count `S = ⌈L/N⌉`.

use crate::channel::{BlockKind, StateSequence};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RateError {
    #[error("block length N must be at least 1")]
    ZeroBlockLength,
    #[error("message length L must be at least 1")]
    ZeroMessageBits,
}

/// Channel uses per block (`N`) and message length in bits (`L`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RateSpec {
    block_len: usize,
    message_bits: usize,
}

impl RateSpec {
    pub fn new(block_len: usize, message_bits: usize) -> Result<Self, RateError> {
        if block_len == 0 {
            return Err(RateError::ZeroBlockLength);
        }
        if message_bits == 0 {
            return Err(RateError::ZeroMessageBits);
        }
        Ok(RateSpec {
            block_len,
            message_bits,
        })
    }

    /// `N`: bits per block.
    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// `L`: message length in bits.
    pub fn message_bits(&self) -> usize {
        self.message_bits
    }

    /// `S = ⌈L/N⌉`: number of sub-messages; the last one is padded to `N`
    /// bits with fresh random bits.
    pub fn sub_message_count(&self) -> usize {
        self.message_bits.div_ceil(self.block_len)
    }

    /// Bits of padding appended to the final sub-message: `S·N − L`.
    pub fn padding_bits(&self) -> usize {
        self.sub_message_count() * self.block_len - self.message_bits
    }
}

/// Outcome of a delay computation. `Infeasible` carries the two prefix
/// counters at the horizon so sweeps can report how far short the sequence
/// fell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelayResult {
    Feasible { block: usize },
    Infeasible { on_off: usize, off_on: usize },
}

impl DelayResult {
    pub fn block(&self) -> Option<usize> {
        match self {
            DelayResult::Feasible { block } => Some(*block),
            DelayResult::Infeasible { .. } => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, DelayResult::Feasible { .. })
    }
}

/// Minimum `d` with at least `required` on-off blocks and at least
/// `required` off-on blocks among blocks `1..=d`. This is the optimal delay
/// shared by the genie-aided and zero-block-delayed set-ups when
/// `required = S`, and the per-sub-message progress point when
/// `required = i < S`.
pub fn min_block_with_counts(seq: &StateSequence, required: usize) -> DelayResult {
    let mut on_off = 0usize;
    let mut off_on = 0usize;
    for (idx, state) in seq.iter().enumerate() {
        match state.kind() {
            BlockKind::OnOff => on_off += 1,
            BlockKind::OffOn => off_on += 1,
            _ => {}
        }
        if on_off >= required && off_on >= required {
            return DelayResult::Feasible { block: idx + 1 };
        }
    }
    DelayResult::Infeasible { on_off, off_on }
}

/// Optimal delay for the genie-aided and zero-block-delayed set-ups: the two
/// are equal, so a single computation serves both.
pub fn optimal_delay_zero(rate: &RateSpec, seq: &StateSequence) -> DelayResult {
    min_block_with_counts(seq, rate.sub_message_count())
}

/// First on-block strictly after `d_star` (the upper bound `D'` on the
/// one-block-delayed optimum). `d_star` must be the feasible output of
/// [`optimal_delay_zero`] on the same sequence.
pub fn one_block_upper(d_star: usize, seq: &StateSequence) -> DelayResult {
    for t in (d_star + 1)..=seq.horizon() {
        if seq.state_at(t).is_on_block() {
            return DelayResult::Feasible { block: t };
        }
    }
    let on_off = seq
        .count_kind(seq.horizon(), BlockKind::OnOff)
        .expect("horizon is a valid prefix");
    let off_on = seq
        .count_kind(seq.horizon(), BlockKind::OffOn)
        .expect("horizon is a valid prefix");
    DelayResult::Infeasible { on_off, off_on }
}

/// Lower and upper bounds on the one-block-delayed optimal delay:
/// `D* ≤ D*_one-block ≤ D'`.
pub fn one_block_bounds(rate: &RateSpec, seq: &StateSequence) -> (DelayResult, DelayResult) {
    let lower = optimal_delay_zero(rate, seq);
    let upper = match lower {
        DelayResult::Feasible { block } => one_block_upper(block, seq),
        infeasible => infeasible,
    };
    (lower, upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{ChannelState, StateSequence};
    use proptest::prelude::*;

    fn seq(pairs: &[(u8, u8)]) -> StateSequence {
        StateSequence::new(
            pairs
                .iter()
                .map(|&(a, b)| ChannelState::new(a == 1, b == 1))
                .collect(),
        )
        .unwrap()
    }

    fn rate(n: usize, l: usize) -> RateSpec {
        RateSpec::new(n, l).unwrap()
    }

    /// Independent oracle: check the two counting constraints at every d by
    /// direct set-cardinality counting, without the running counters.
    fn brute_min_delay(seq: &StateSequence, required: usize) -> Option<usize> {
        (1..=seq.horizon()).find(|&d| {
            let on_off = seq.count_kind(d, BlockKind::OnOff).unwrap();
            let off_on = seq.count_kind(d, BlockKind::OffOn).unwrap();
            on_off >= required && off_on >= required
        })
    }

    #[test]
    fn rate_spec_derives_sub_message_count() {
        assert_eq!(rate(2, 4).sub_message_count(), 2);
        assert_eq!(rate(2, 3).sub_message_count(), 2);
        assert_eq!(rate(2, 3).padding_bits(), 1);
        assert_eq!(rate(1, 1).sub_message_count(), 1);
        assert!(RateSpec::new(0, 1).is_err());
        assert!(RateSpec::new(1, 0).is_err());
    }

    #[test]
    fn alternating_sequence_needs_all_four_blocks() {
        let s = seq(&[(1, 0), (0, 1), (1, 0), (0, 1)]);
        // Verified by scanning d = 1..4 against the two counting constraints.
        assert_eq!(brute_min_delay(&s, 2), Some(4));
        assert_eq!(
            optimal_delay_zero(&rate(1, 2), &s),
            DelayResult::Feasible { block: 4 }
        );
    }

    #[test]
    fn all_on_on_is_infeasible_with_zero_counts() {
        let s = StateSequence::from_kinds(&[BlockKind::OnOn; 50]).unwrap();
        assert_eq!(
            optimal_delay_zero(&rate(1, 1), &s),
            DelayResult::Infeasible { on_off: 0, off_on: 0 }
        );
    }

    #[test]
    fn off_on_then_on_off_completes_at_two() {
        let s = seq(&[(0, 1), (1, 0)]);
        // d = 1 fails the on-off constraint; d = 2 satisfies both.
        assert_eq!(brute_min_delay(&s, 1), Some(2));
        assert_eq!(
            optimal_delay_zero(&rate(1, 1), &s),
            DelayResult::Feasible { block: 2 }
        );
    }

    #[test]
    fn upper_bound_takes_first_on_block() {
        let s = seq(&[(1, 0), (0, 1), (1, 0), (0, 1), (1, 1)]);
        assert_eq!(one_block_upper(4, &s), DelayResult::Feasible { block: 5 });
    }

    #[test]
    fn upper_bound_skips_off_off_blocks() {
        let s = seq(&[(1, 0), (0, 1), (1, 0), (0, 1), (0, 0), (0, 0), (0, 1)]);
        assert_eq!(one_block_upper(4, &s), DelayResult::Feasible { block: 7 });
    }

    #[test]
    fn upper_bound_infeasible_without_on_block() {
        let s = seq(&[(1, 0), (0, 1), (1, 0), (0, 1), (0, 0), (0, 0)]);
        assert!(!one_block_upper(4, &s).is_feasible());
        assert!(!one_block_upper(6, &s).is_feasible());
    }

    #[test]
    fn bounds_on_three_block_sequence() {
        let s = seq(&[(1, 0), (0, 1), (1, 1)]);
        let (lower, upper) = one_block_bounds(&rate(1, 1), &s);
        assert_eq!(lower, DelayResult::Feasible { block: 2 });
        assert_eq!(upper, DelayResult::Feasible { block: 3 });
    }

    #[test]
    fn bounds_infeasible_lower_gives_infeasible_upper() {
        let s = StateSequence::from_kinds(&[BlockKind::OnOn; 4]).unwrap();
        let (lower, upper) = one_block_bounds(&rate(1, 1), &s);
        assert!(!lower.is_feasible());
        assert!(!upper.is_feasible());
    }

    #[test]
    fn bounds_with_off_off_gap() {
        let s = seq(&[(1, 0), (0, 1), (1, 0), (0, 1), (0, 0), (1, 0)]);
        let (lower, upper) = one_block_bounds(&rate(1, 2), &s);
        assert_eq!(lower, DelayResult::Feasible { block: 4 });
        assert_eq!(upper, DelayResult::Feasible { block: 6 });
    }

    fn arb_sequence(max_len: usize) -> impl Strategy<Value = StateSequence> {
        prop::collection::vec((any::<bool>(), any::<bool>()), 1..max_len).prop_map(|pairs| {
            StateSequence::new(
                pairs
                    .into_iter()
                    .map(|(a, b)| ChannelState::new(a, b))
                    .collect(),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn matches_brute_force_oracle(s in arb_sequence(48), required in 1usize..4) {
            let got = min_block_with_counts(&s, required).block();
            prop_assert_eq!(got, brute_min_delay(&s, required));
        }

        #[test]
        fn minimality(s in arb_sequence(48), sub_count in 1usize..4) {
            let r = rate(1, sub_count);
            if let DelayResult::Feasible { block } = optimal_delay_zero(&r, &s) {
                prop_assert!(s.count_kind(block, BlockKind::OnOff).unwrap() >= sub_count);
                prop_assert!(s.count_kind(block, BlockKind::OffOn).unwrap() >= sub_count);
                if block > 1 {
                    let d = block - 1;
                    let ok = s.count_kind(d, BlockKind::OnOff).unwrap() >= sub_count
                        && s.count_kind(d, BlockKind::OffOn).unwrap() >= sub_count;
                    prop_assert!(!ok, "constraints already held at d - 1");
                }
            }
        }

        #[test]
        fn extension_never_increases_delay(s in arb_sequence(32), extra in arb_sequence(8)) {
            let r = rate(1, 2);
            let base = optimal_delay_zero(&r, &s);
            let mut states = s.states().to_vec();
            states.extend_from_slice(extra.states());
            let extended = optimal_delay_zero(&r, &StateSequence::new(states).unwrap());
            if let DelayResult::Feasible { block } = base {
                prop_assert_eq!(extended.block(), Some(block));
            }
        }

        #[test]
        fn prepending_idle_block_shifts_delay_by_one(
            s in arb_sequence(32),
            idle_on_on in any::<bool>(),
        ) {
            let r = rate(1, 2);
            let idle = if idle_on_on { BlockKind::OnOn } else { BlockKind::OffOff };
            let mut states = vec![idle.state()];
            states.extend_from_slice(s.states());
            let shifted = optimal_delay_zero(&r, &StateSequence::new(states).unwrap());
            match optimal_delay_zero(&r, &s) {
                DelayResult::Feasible { block } => {
                    prop_assert_eq!(shifted.block(), Some(block + 1));
                }
                DelayResult::Infeasible { .. } => prop_assert!(!shifted.is_feasible()),
            }
        }

        #[test]
        fn upper_is_strictly_later_than_lower(s in arb_sequence(48), sub_count in 1usize..4) {
            let (lower, upper) = one_block_bounds(&rate(1, sub_count), &s);
            if let (Some(lo), Some(hi)) = (lower.block(), upper.block()) {
                prop_assert!(lo < hi);
            }
        }

        #[test]
        fn delay_depends_on_message_bits_only_through_sub_count(
            s in arb_sequence(48),
            n in 1usize..5,
            sub_count in 1usize..4,
        ) {
            // All L with the same ceiling ⌈L/N⌉ must agree.
            let low_l = (sub_count - 1) * n + 1;
            let high_l = sub_count * n;
            let a = optimal_delay_zero(&rate(n, low_l), &s);
            let b = optimal_delay_zero(&rate(n, high_l), &s);
            prop_assert_eq!(a, b);
        }
    }
}
