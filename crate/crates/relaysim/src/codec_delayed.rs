//! Encoder and decoder for the one-block-delayed CSI set-up.
//!
//! The source learns each block's state only at the end of that block, so it
//! cannot steer payloads by kind. Instead it alternates between a key
//! generation phase (send a fresh uniform packet; the end-of-block feedback
//! tells which relay missed it, and the packet is banked as a key against
//! that relay) and a data phase (send the next sub-message XORed with the
//! heads of both key queues). A data block that lands on an off-off block is
//! heard by nobody; the identical ciphertext is retransmitted until an
//! on-block delivers it, which keeps the error probability at zero and is
//! secrecy-neutral because no relay observed the erased attempt.
//!
//! The destination hears every block at least one relay hears, so it can
//! replay the whole phase/queue evolution from the state sequence and
//! recover each sub-message.

use crate::bits::{BitSource, Bits};
use crate::channel::{observe_block, BlockKind, BlockPayload, ChannelState, StateSequence};
use crate::codec_zero::MessagePayload;
use crate::delay::RateSpec;
use std::collections::VecDeque;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DelayedCodecError {
    #[error(
        "sequence exhausted after {horizon} blocks before completion \
         (delivered {delivered}/{total} sub-messages, queue lengths ({queue1}, {queue2}))"
    )]
    Incomplete {
        horizon: usize,
        delivered: usize,
        total: usize,
        queue1: usize,
        queue2: usize,
    },
    #[error("decode failed at block {block}: {reason}")]
    Decode { block: usize, reason: String },
}

/// FIFO of N-bit keys known to exactly one relay (and the destination).
/// `next_consume_index` is the 1-based index of the key at the head — the
/// paper-side `m` for the relay-1 queue and `n` for the relay-2 queue.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KeyQueue {
    entries: VecDeque<Bits>,
    next_consume_index: usize,
    banked: usize,
}

impl KeyQueue {
    pub fn new() -> Self {
        KeyQueue {
            entries: VecDeque::new(),
            next_consume_index: 1,
            banked: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn head(&self) -> Option<&Bits> {
        self.entries.front()
    }

    pub fn next_consume_index(&self) -> usize {
        self.next_consume_index
    }

    /// Banks a key at the tail; returns its 1-based bank index.
    pub fn bank(&mut self, key: Bits) -> usize {
        self.entries.push_back(key);
        self.banked += 1;
        self.banked
    }

    /// Removes the head key after its final use.
    fn consume(&mut self) -> Bits {
        let key = self
            .entries
            .pop_front()
            .expect("pop from empty key queue is unreachable in a valid schedule");
        self.next_consume_index += 1;
        key
    }
}

/// Phase of one block, decided from feedback through the previous block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelayedPhase {
    KeyGen,
    Data,
    Retransmit,
    Idle,
}

impl fmt::Display for DelayedPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            DelayedPhase::KeyGen => "keygen",
            DelayedPhase::Data => "data",
            DelayedPhase::Retransmit => "retransmit",
            DelayedPhase::Idle => "idle",
        };
        f.write_str(name)
    }
}

/// What the end-of-block feedback did to the encoder state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockEffect {
    /// Key-gen packet banked as a relay-1 key (sent on an on-off block).
    BankedQueue1 { index: usize },
    /// Key-gen packet banked as a relay-2 key (sent on an off-on block).
    BankedQueue2 { index: usize },
    /// Key-gen packet heard by both relays or by nobody; useless as a key.
    KeyDiscarded,
    /// Data block heard by the destination: sub-message delivered, the keys
    /// heard alongside it are retired.
    Delivered {
        sub: usize,
        popped_queue1: bool,
        popped_queue2: bool,
    },
    /// Data block landed on an off-off block; the ciphertext is held for
    /// retransmission and nothing is consumed.
    DataLost,
}

/// Effect of the revealed block kind given the phase the block was sent in.
/// Shared by the encoder and the destination's replay.
fn end_of_block_effect(phase: DelayedPhase, kind: BlockKind, sub: usize) -> BlockEffectKind {
    match phase {
        DelayedPhase::KeyGen => match kind {
            BlockKind::OnOff => BlockEffectKind::Bank1,
            BlockKind::OffOn => BlockEffectKind::Bank2,
            BlockKind::OnOn | BlockKind::OffOff => BlockEffectKind::Discard,
        },
        DelayedPhase::Data | DelayedPhase::Retransmit => match kind {
            BlockKind::OnOff => BlockEffectKind::Deliver {
                sub,
                pop1: false,
                pop2: true,
            },
            BlockKind::OffOn => BlockEffectKind::Deliver {
                sub,
                pop1: true,
                pop2: false,
            },
            BlockKind::OnOn => BlockEffectKind::Deliver {
                sub,
                pop1: true,
                pop2: true,
            },
            BlockKind::OffOff => BlockEffectKind::Lose,
        },
        DelayedPhase::Idle => unreachable!("idle blocks are never fed back"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BlockEffectKind {
    Bank1,
    Bank2,
    Discard,
    Deliver { sub: usize, pop1: bool, pop2: bool },
    Lose,
}

/// Mutable encoder state for the one-block-delayed strategy. Drive it with
/// [`DelayedEncoderState::encoder_step`] at each block start and
/// [`DelayedEncoderState::end_of_block_update`] once the block's state is
/// revealed.
#[derive(Debug, Clone)]
pub struct DelayedEncoderState {
    sub_messages: Vec<Bits>,
    block_len: usize,
    queue1: KeyQueue,
    queue2: KeyQueue,
    next_sub: usize,
    pending: Option<Bits>,
    in_flight: Option<(Bits, DelayedPhase)>,
}

impl DelayedEncoderState {
    pub fn new(msg: &MessagePayload, rate: &RateSpec) -> Self {
        DelayedEncoderState {
            sub_messages: msg.sub_messages().to_vec(),
            block_len: rate.block_len(),
            queue1: KeyQueue::new(),
            queue2: KeyQueue::new(),
            next_sub: 1,
            pending: None,
            in_flight: None,
        }
    }

    pub fn queue1(&self) -> &KeyQueue {
        &self.queue1
    }

    pub fn queue2(&self) -> &KeyQueue {
        &self.queue2
    }

    /// 1-based index of the next sub-message to deliver (`i`).
    pub fn next_sub(&self) -> usize {
        self.next_sub
    }

    pub fn delivered(&self) -> usize {
        self.next_sub - 1
    }

    pub fn finished(&self) -> bool {
        self.next_sub > self.sub_messages.len()
    }

    /// Phase the next block will be sent in, from feedback through the
    /// previous block.
    pub fn phase(&self) -> DelayedPhase {
        if self.pending.is_some() {
            DelayedPhase::Retransmit
        } else if !self.queue1.is_empty() && !self.queue2.is_empty() {
            DelayedPhase::Data
        } else {
            DelayedPhase::KeyGen
        }
    }

    /// Emits the block's payload: a held retransmission if one is pending,
    /// else the next sub-message XORed with both queue heads if both queues
    /// are non-empty, else a fresh uniform packet. Must not be called after
    /// the last sub-message is delivered.
    pub fn encoder_step(&mut self, rng: &mut dyn BitSource) -> BlockPayload {
        assert!(!self.finished(), "encoder_step called after completion");
        assert!(
            self.in_flight.is_none(),
            "encoder_step called twice without end_of_block_update"
        );
        let phase = self.phase();
        let payload = match phase {
            DelayedPhase::Retransmit => self.pending.clone().expect("pending retransmission"),
            DelayedPhase::Data => {
                let sub = &self.sub_messages[self.next_sub - 1];
                let k1 = self.queue1.head().expect("data phase requires a relay-1 key");
                let k2 = self.queue2.head().expect("data phase requires a relay-2 key");
                sub.xor(k1).xor(k2)
            }
            DelayedPhase::KeyGen => rng.draw_bits(self.block_len),
            DelayedPhase::Idle => unreachable!(),
        };
        self.in_flight = Some((payload.clone(), phase));
        BlockPayload::Data(payload)
    }

    /// Applies the revealed state of the block just sent: bank or discard a
    /// key-gen packet, retire the keys a delivered data block exposed, or
    /// hold a lost data block for retransmission.
    pub fn end_of_block_update(&mut self, revealed: ChannelState) -> BlockEffect {
        let (payload, phase) = self
            .in_flight
            .take()
            .expect("end_of_block_update without a preceding encoder_step");
        match end_of_block_effect(phase, revealed.kind(), self.next_sub) {
            BlockEffectKind::Bank1 => BlockEffect::BankedQueue1 {
                index: self.queue1.bank(payload),
            },
            BlockEffectKind::Bank2 => BlockEffect::BankedQueue2 {
                index: self.queue2.bank(payload),
            },
            BlockEffectKind::Discard => BlockEffect::KeyDiscarded,
            BlockEffectKind::Deliver { sub, pop1, pop2 } => {
                if pop1 {
                    self.queue1.consume();
                }
                if pop2 {
                    self.queue2.consume();
                }
                self.next_sub += 1;
                self.pending = None;
                BlockEffect::Delivered {
                    sub,
                    popped_queue1: pop1,
                    popped_queue2: pop2,
                }
            }
            BlockEffectKind::Lose => {
                self.pending = Some(payload);
                BlockEffect::DataLost
            }
        }
    }

    #[cfg(test)]
    pub(crate) fn preload_queues(&mut self, queue1: Vec<Bits>, queue2: Vec<Bits>) {
        for key in queue1 {
            self.queue1.bank(key);
        }
        for key in queue2 {
            self.queue2.bank(key);
        }
    }
}

/// What a block carried, written post-hoc once the feedback arrived.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelayedRole {
    /// Sub-message `sub` encrypted with relay-1 key `key1_index` and relay-2
    /// key `key2_index` (both 1-based bank indices).
    Data {
        sub: usize,
        key1_index: usize,
        key2_index: usize,
        delivered: bool,
    },
    /// Key-gen packet banked into a queue (1-based bank index) or discarded.
    KeyGen { banked: Option<(u8, usize)> },
}

impl fmt::Display for DelayedRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DelayedRole::Data { sub, .. } => write!(f, "data:{sub}"),
            DelayedRole::KeyGen {
                banked: Some((queue, index)),
            } => write!(f, "key:q{queue}:{index}"),
            DelayedRole::KeyGen { banked: None } => f.write_str("key:-"),
        }
    }
}

/// Per-block record of a one-block-delayed run: the zero-delay transcript
/// fields plus the phase and the post-update queue lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelayedTranscriptBlock {
    pub block: usize,
    pub state: ChannelState,
    pub kind: BlockKind,
    pub transmitted: BlockPayload,
    pub relay1: BlockPayload,
    pub relay2: BlockPayload,
    pub destination: BlockPayload,
    pub phase: DelayedPhase,
    pub role: DelayedRole,
    pub queue1_len: usize,
    pub queue2_len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelayedTranscript {
    blocks: Vec<DelayedTranscriptBlock>,
    completion_block: usize,
    ready_blocks: Vec<usize>,
}

impl DelayedTranscript {
    pub fn blocks(&self) -> &[DelayedTranscriptBlock] {
        &self.blocks
    }

    /// Block on which the last sub-message reached the destination.
    pub fn completion_block(&self) -> usize {
        self.completion_block
    }

    /// For each sub-message `i` (1-based), the block at whose end the
    /// encoder first became ready to send it: both queues non-empty with
    /// `i` next in line.
    pub fn ready_blocks(&self) -> &[usize] {
        &self.ready_blocks
    }

    pub fn ready_block(&self, i: usize) -> usize {
        self.ready_blocks[i - 1]
    }

    pub fn destination_payloads(&self) -> Vec<BlockPayload> {
        self.blocks.iter().map(|b| b.destination.clone()).collect()
    }

    pub fn relay_payloads(&self, relay: usize) -> Vec<BlockPayload> {
        assert!(relay == 1 || relay == 2, "relay must be 1 or 2");
        self.blocks
            .iter()
            .map(|b| {
                if relay == 1 {
                    b.relay1.clone()
                } else {
                    b.relay2.clone()
                }
            })
            .collect()
    }

    /// Line-oriented form: `block kind payload annotation phase q1 q2`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            out.push_str(&format!(
                "{} {} {} {} {} {} {}\n",
                b.block,
                b.kind,
                b.transmitted.to_field(),
                b.role,
                b.phase,
                b.queue1_len,
                b.queue2_len
            ));
        }
        out
    }
}

/// A run that may have stopped at the horizon with sub-messages undelivered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialDelayedRun {
    pub blocks: Vec<DelayedTranscriptBlock>,
    pub completion_block: Option<usize>,
    pub ready_blocks: Vec<usize>,
    pub delivered: usize,
    pub queue1_len: usize,
    pub queue2_len: usize,
}

/// Runs the one-block-delayed encoder to completion or to the horizon,
/// whichever comes first. The exhaustive oracle uses this to evaluate
/// truncated sequences; ordinary callers want [`run_encoder_delayed`].
pub fn run_encoder_delayed_partial(
    msg: &MessagePayload,
    seq: &StateSequence,
    rng: &mut dyn BitSource,
) -> PartialDelayedRun {
    let rate = RateSpec::new(
        msg.sub_message(1).len(),
        msg.bits().len(),
    )
    .expect("message payload implies a valid rate");
    let mut state = DelayedEncoderState::new(msg, &rate);
    let mut blocks = Vec::new();
    let mut ready_blocks = Vec::new();
    let mut completion_block = None;
    for t in 1..=seq.horizon() {
        if state.finished() {
            break;
        }
        let phase = state.phase();
        let key1_index = state.queue1().next_consume_index();
        let key2_index = state.queue2().next_consume_index();
        let transmitted = state.encoder_step(rng);
        let revealed = seq.state_at(t);
        let effect = state.end_of_block_update(revealed);
        let role = match effect {
            BlockEffect::BankedQueue1 { index } => DelayedRole::KeyGen {
                banked: Some((1, index)),
            },
            BlockEffect::BankedQueue2 { index } => DelayedRole::KeyGen {
                banked: Some((2, index)),
            },
            BlockEffect::KeyDiscarded => DelayedRole::KeyGen { banked: None },
            BlockEffect::Delivered { sub, .. } => DelayedRole::Data {
                sub,
                key1_index,
                key2_index,
                delivered: true,
            },
            BlockEffect::DataLost => DelayedRole::Data {
                sub: state.next_sub(),
                key1_index,
                key2_index,
                delivered: false,
            },
        };
        let obs = observe_block(&transmitted, revealed);
        blocks.push(DelayedTranscriptBlock {
            block: t,
            state: revealed,
            kind: revealed.kind(),
            transmitted,
            relay1: obs.relay1,
            relay2: obs.relay2,
            destination: obs.destination,
            phase,
            role,
            queue1_len: state.queue1().len(),
            queue2_len: state.queue2().len(),
        });
        // First time both queues are non-empty with sub-message i next in
        // line: the encoder is ready to send w_i from the next block on.
        if !state.finished()
            && !state.queue1().is_empty()
            && !state.queue2().is_empty()
            && ready_blocks.len() + 1 == state.next_sub()
        {
            ready_blocks.push(t);
        }
        if state.finished() {
            completion_block = Some(t);
            break;
        }
    }
    PartialDelayedRun {
        blocks,
        completion_block,
        ready_blocks,
        delivered: state.delivered(),
        queue1_len: state.queue1().len(),
        queue2_len: state.queue2().len(),
    }
}

/// Runs the one-block-delayed encoder over the sequence until the last
/// sub-message is delivered. Fresh randomness is drawn from `rng` for every
/// key-gen block, in block order.
pub fn run_encoder_delayed(
    msg: &MessagePayload,
    seq: &StateSequence,
    rng: &mut dyn BitSource,
) -> Result<DelayedTranscript, DelayedCodecError> {
    let run = run_encoder_delayed_partial(msg, seq, rng);
    match run.completion_block {
        Some(completion_block) => Ok(DelayedTranscript {
            blocks: run.blocks,
            completion_block,
            ready_blocks: run.ready_blocks,
        }),
        None => Err(DelayedCodecError::Incomplete {
            horizon: seq.horizon(),
            delivered: run.delivered,
            total: msg.sub_count(),
            queue1: run.queue1_len,
            queue2: run.queue2_len,
        }),
    }
}

/// Decodes the destination's observations. The destination hears every
/// packet either relay hears, so it can replay the full phase/queue
/// evolution from the state sequence, rebuild both key queues from the
/// received key-gen packets, and strip the pads off each delivered data
/// block. Returns exactly the first `L` bits.
pub fn decode_delayed(
    destination: &[BlockPayload],
    seq: &StateSequence,
    rate: &RateSpec,
) -> Result<Bits, DelayedCodecError> {
    let sub_count = rate.sub_message_count();
    let mut queue1: VecDeque<Bits> = VecDeque::new();
    let mut queue2: VecDeque<Bits> = VecDeque::new();
    let mut subs: Vec<Bits> = Vec::with_capacity(sub_count);
    let mut pending = false;
    let steps = destination.len().min(seq.horizon());
    for t in 1..=steps {
        if subs.len() == sub_count {
            break;
        }
        let phase = if pending {
            DelayedPhase::Retransmit
        } else if !queue1.is_empty() && !queue2.is_empty() {
            DelayedPhase::Data
        } else {
            DelayedPhase::KeyGen
        };
        let kind = seq.state_at(t).kind();
        let heard = destination[t - 1].data();
        let expect_data = |label: &str| -> Result<Bits, DelayedCodecError> {
            match heard {
                Some(bits) if bits.len() == rate.block_len() => Ok(bits.clone()),
                Some(bits) => Err(DelayedCodecError::Decode {
                    block: t,
                    reason: format!(
                        "{label} payload has {} bits, expected {}",
                        bits.len(),
                        rate.block_len()
                    ),
                }),
                None => Err(DelayedCodecError::Decode {
                    block: t,
                    reason: format!("replay expects a {label} but the block is silent"),
                }),
            }
        };
        match end_of_block_effect(phase, kind, subs.len() + 1) {
            BlockEffectKind::Bank1 => queue1.push_back(expect_data("key packet")?),
            BlockEffectKind::Bank2 => queue2.push_back(expect_data("key packet")?),
            BlockEffectKind::Discard => {}
            BlockEffectKind::Deliver { pop1, pop2, .. } => {
                let cipher = expect_data("data block")?;
                let k1 = queue1.front().ok_or_else(|| DelayedCodecError::Decode {
                    block: t,
                    reason: "replay reached a data block with an empty relay-1 queue".to_string(),
                })?;
                let k2 = queue2.front().ok_or_else(|| DelayedCodecError::Decode {
                    block: t,
                    reason: "replay reached a data block with an empty relay-2 queue".to_string(),
                })?;
                subs.push(cipher.xor(k1).xor(k2));
                if pop1 {
                    queue1.pop_front();
                }
                if pop2 {
                    queue2.pop_front();
                }
                pending = false;
            }
            BlockEffectKind::Lose => pending = true,
        }
    }
    if subs.len() < sub_count {
        return Err(DelayedCodecError::Decode {
            block: steps + 1,
            reason: format!(
                "observation ends with {}/{sub_count} sub-messages recovered",
                subs.len()
            ),
        });
    }
    let mut bits = Bits::new();
    for sub in &subs {
        bits.extend_from(sub);
    }
    Ok(bits.truncated(rate.message_bits()))
}
