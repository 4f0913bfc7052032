//! Simulator and verifier for delay-optimal secure message delivery over a
//! two-relay block-erasure network.
//!
//! A source wants to deliver a finite L-bit message to a destination through
//! two relays without either relay learning anything about it. The
//! source-to-relay links are block erasure channels whose on/off states
//! change arbitrarily from block to block; the relay-to-destination links
//! are noiseless. This crate provides:
//!
//! - [`channel`]: state sequences, block classification, prefix counters,
//!   trace I/O, and deterministic sequence generators;
//! - [`delay`]: the closed-form optimal delay for the genie-aided and
//!   zero-block-delayed set-ups, and the bracket for the one-block-delayed
//!   set-up;
//! - [`codec_zero`]: the encoder/decoder achieving the optimum when the
//!   state is known at block start;
//! - [`codec_delayed`]: the key-queue encoder/decoder for state feedback
//!   that arrives one block late;
//! - [`secrecy`]: an exhaustive enumeration oracle that certifies perfect
//!   secrecy (equivocation = L bits at each relay) and zero-error decoding
//!   on small instances;
//! - [`sweep`]: reproducible multi-trial experiment runs checking the
//!   theorem-backed invariants on every trial;
//! - [`cli`]: the command-line surface gluing it all together.

pub mod bits;
pub mod channel;
pub mod cli;
pub mod codec_delayed;
pub mod codec_zero;
pub mod delay;
pub mod secrecy;
pub mod sweep;

pub use bits::{BitSource, Bits, SeededBitSource};
pub use channel::{
    classify_block, generate_sequence, parse_trace, BlockKind, BlockPayload, ChannelState,
    GeneratorMode, GeneratorSpec, KindProbabilities, StateSequence,
};
pub use delay::{one_block_bounds, one_block_upper, optimal_delay_zero, DelayResult, RateSpec};
