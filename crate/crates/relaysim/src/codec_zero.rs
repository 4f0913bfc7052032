//! Encoder and decoder for the genie-aided / zero-block-delayed set-ups.
//!
//! The source splits the message into `S` sub-messages, encrypts each with
//! its own fresh one-time-pad key, sends ciphertexts on on-off blocks and
//! keys on off-on blocks, and stays silent otherwise. Because the block
//! decision at time `t` reads only the current state, the same code serves
//! both the genie-aided and the zero-block-delayed set-up; knowing the
//! future adds nothing.
//!
//! Relay 1 only ever hears ciphertexts, relay 2 only ever hears keys, and
//! the destination hears both, which is the whole secrecy argument.

use crate::bits::{BitSource, Bits};
use crate::channel::{observe_block, BlockKind, BlockPayload, ChannelState, StateSequence};
use crate::delay::RateSpec;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ZeroCodecError {
    #[error("message has {actual} bits, rate requires L = {expected}")]
    MessageLength { expected: usize, actual: usize },
    #[error("key set has wrong shape: expected {expected_count} keys of {expected_len} bits")]
    KeyShape {
        expected_count: usize,
        expected_len: usize,
    },
    #[error(
        "sequence exhausted after {horizon} blocks before completion \
         (sent {ciphers_sent}/{total} ciphertexts, {keys_sent}/{total} keys)"
    )]
    Incomplete {
        horizon: usize,
        ciphers_sent: usize,
        keys_sent: usize,
        total: usize,
    },
    #[error("decode failed at block {block}: {reason}")]
    Decode { block: usize, reason: String },
}

/// Message bits together with their padded N-bit sub-messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessagePayload {
    bits: Bits,
    sub_messages: Vec<Bits>,
}

impl MessagePayload {
    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn sub_messages(&self) -> &[Bits] {
        &self.sub_messages
    }

    /// Sub-message `i`, 1-based.
    pub fn sub_message(&self, i: usize) -> &Bits {
        &self.sub_messages[i - 1]
    }

    pub fn sub_count(&self) -> usize {
        self.sub_messages.len()
    }
}

/// Splits an L-bit message into `S` sub-messages of `N` bits each; the last
/// sub-message's missing bits are drawn fresh from `rng`, independent of the
/// message.
pub fn split_message(
    bits: Bits,
    rate: &RateSpec,
    rng: &mut dyn BitSource,
) -> Result<MessagePayload, ZeroCodecError> {
    if bits.len() != rate.message_bits() {
        return Err(ZeroCodecError::MessageLength {
            expected: rate.message_bits(),
            actual: bits.len(),
        });
    }
    let n = rate.block_len();
    let mut sub_messages = Vec::with_capacity(rate.sub_message_count());
    for chunk_start in (0..bits.len()).step_by(n) {
        let chunk_end = (chunk_start + n).min(bits.len());
        let mut sub = bits.slice(chunk_start, chunk_end);
        if sub.len() < n {
            sub.extend_from(&rng.draw_bits(n - sub.len()));
        }
        sub_messages.push(sub);
    }
    Ok(MessagePayload { bits, sub_messages })
}

/// The `S` one-time-pad keys, each `N` bits, drawn up-front before encoding
/// starts so the randomness the scheme consumes is a fixed-length string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeySet {
    keys: Vec<Bits>,
}

impl KeySet {
    pub fn generate(rate: &RateSpec, rng: &mut dyn BitSource) -> Self {
        let keys = (0..rate.sub_message_count())
            .map(|_| rng.draw_bits(rate.block_len()))
            .collect();
        KeySet { keys }
    }

    pub fn from_keys(keys: Vec<Bits>, rate: &RateSpec) -> Result<Self, ZeroCodecError> {
        let ok = keys.len() == rate.sub_message_count()
            && keys.iter().all(|k| k.len() == rate.block_len());
        if !ok {
            return Err(ZeroCodecError::KeyShape {
                expected_count: rate.sub_message_count(),
                expected_len: rate.block_len(),
            });
        }
        Ok(KeySet { keys })
    }

    /// Key `i`, 1-based.
    pub fn key(&self, i: usize) -> &Bits {
        &self.keys[i - 1]
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

/// What a block carried under the zero-delay schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockRole {
    /// Encrypted sub-message `i` (1-based), sent on an on-off block.
    Cipher(usize),
    /// Key `j` (1-based), sent on an off-on block.
    Key(usize),
    Silent,
}

impl fmt::Display for BlockRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockRole::Cipher(i) => write!(f, "cipher:{i}"),
            BlockRole::Key(j) => write!(f, "key:{j}"),
            BlockRole::Silent => f.write_str("-"),
        }
    }
}

/// Deterministic transmission schedule: which block carries which ciphertext
/// or key. Depends only on the state sequence and the sub-message count,
/// never on bit values — the property the exhaustive secrecy oracle rests on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroSchedule {
    roles: Vec<BlockRole>,
    completion_block: usize,
}

impl ZeroSchedule {
    pub fn roles(&self) -> &[BlockRole] {
        &self.roles
    }

    /// Block of the last transmission; equals the optimal delay.
    pub fn completion_block(&self) -> usize {
        self.completion_block
    }

    /// Block on which ciphertext `i` is sent (1-based).
    pub fn cipher_block(&self, i: usize) -> usize {
        self.block_with_role(BlockRole::Cipher(i))
    }

    /// Block on which key `j` is sent (1-based).
    pub fn key_block(&self, j: usize) -> usize {
        self.block_with_role(BlockRole::Key(j))
    }

    /// Block by the end of which both the ciphertext and the key for
    /// sub-message `i` have been sent — the delay-relevant progress point
    /// for sub-message `i`.
    pub fn progress_block(&self, i: usize) -> usize {
        self.cipher_block(i).max(self.key_block(i))
    }

    fn block_with_role(&self, role: BlockRole) -> usize {
        1 + self
            .roles
            .iter()
            .position(|r| *r == role)
            .expect("role present in a complete schedule")
    }
}

/// A schedule that may have run out of blocks before finishing. Blocks past
/// the completion point are not included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialZeroSchedule {
    pub roles: Vec<BlockRole>,
    pub completion_block: Option<usize>,
    pub ciphers_sent: usize,
    pub keys_sent: usize,
}

/// Runs Algorithm 1's control flow over the sequence: maintain indices
/// `i, j` from 1; an on-off block with `i ≤ S` carries ciphertext `i`, an
/// off-on block with `j ≤ S` carries key `j`, every other block is silent;
/// stop after both indices pass `S`. Keeps going to the horizon when the
/// sequence is insufficient, so truncated runs can still be inspected.
pub fn schedule_zero_partial(seq: &StateSequence, sub_count: usize) -> PartialZeroSchedule {
    let mut roles = Vec::new();
    let mut next_cipher = 1usize;
    let mut next_key = 1usize;
    for state in seq.iter() {
        let role = match state.kind() {
            BlockKind::OnOff if next_cipher <= sub_count => {
                next_cipher += 1;
                BlockRole::Cipher(next_cipher - 1)
            }
            BlockKind::OffOn if next_key <= sub_count => {
                next_key += 1;
                BlockRole::Key(next_key - 1)
            }
            _ => BlockRole::Silent,
        };
        roles.push(role);
        if next_cipher > sub_count && next_key > sub_count {
            let completion_block = roles.len();
            return PartialZeroSchedule {
                roles,
                completion_block: Some(completion_block),
                ciphers_sent: sub_count,
                keys_sent: sub_count,
            };
        }
    }
    PartialZeroSchedule {
        roles,
        completion_block: None,
        ciphers_sent: next_cipher - 1,
        keys_sent: next_key - 1,
    }
}

/// Complete schedule, or an incomplete error carrying the progress indices.
pub fn schedule_zero(seq: &StateSequence, sub_count: usize) -> Result<ZeroSchedule, ZeroCodecError> {
    let partial = schedule_zero_partial(seq, sub_count);
    match partial.completion_block {
        Some(completion_block) => Ok(ZeroSchedule {
            roles: partial.roles,
            completion_block,
        }),
        None => Err(ZeroCodecError::Incomplete {
            horizon: seq.horizon(),
            ciphers_sent: partial.ciphers_sent,
            keys_sent: partial.keys_sent,
            total: sub_count,
        }),
    }
}

/// One block of a completed run: the transmitted signal, the three
/// observations, and what the block carried.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptBlock {
    pub block: usize,
    pub state: ChannelState,
    pub kind: BlockKind,
    pub transmitted: BlockPayload,
    pub relay1: BlockPayload,
    pub relay2: BlockPayload,
    pub destination: BlockPayload,
    pub role: BlockRole,
}

impl TranscriptBlock {
    fn new(block: usize, state: ChannelState, transmitted: BlockPayload, role: BlockRole) -> Self {
        let obs = observe_block(&transmitted, state);
        TranscriptBlock {
            block,
            state,
            kind: state.kind(),
            transmitted,
            relay1: obs.relay1,
            relay2: obs.relay2,
            destination: obs.destination,
            role,
        }
    }
}

/// Complete per-block record of one zero-delay encoding run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    blocks: Vec<TranscriptBlock>,
    completion_block: usize,
}

impl Transcript {
    pub fn blocks(&self) -> &[TranscriptBlock] {
        &self.blocks
    }

    pub fn completion_block(&self) -> usize {
        self.completion_block
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

    /// Line-oriented form: `block kind payload annotation` per block, with
    /// payload in hex or `-` for silence.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            out.push_str(&format!(
                "{} {} {} {}\n",
                b.block,
                b.kind,
                b.transmitted.to_field(),
                b.role
            ));
        }
        out
    }
}

/// A run that may have stopped at the horizon with the message undelivered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialZeroRun {
    pub blocks: Vec<TranscriptBlock>,
    pub completion_block: Option<usize>,
    pub ciphers_sent: usize,
    pub keys_sent: usize,
}

/// Runs the zero-delay encoder to completion or to the horizon, whichever
/// comes first. The exhaustive oracle uses this to evaluate truncated
/// sequences; ordinary callers want [`run_encoder_zero`].
pub fn run_encoder_zero_partial(
    msg: &MessagePayload,
    keys: &KeySet,
    seq: &StateSequence,
) -> PartialZeroRun {
    assert_eq!(
        msg.sub_count(),
        keys.len(),
        "one key per sub-message is required"
    );
    let schedule = schedule_zero_partial(seq, msg.sub_count());
    let blocks = schedule
        .roles
        .iter()
        .enumerate()
        .map(|(idx, role)| {
            let t = idx + 1;
            let transmitted = match role {
                BlockRole::Cipher(i) => {
                    BlockPayload::Data(msg.sub_message(*i).xor(keys.key(*i)))
                }
                BlockRole::Key(j) => BlockPayload::Data(keys.key(*j).clone()),
                BlockRole::Silent => BlockPayload::Silence,
            };
            TranscriptBlock::new(t, seq.state_at(t), transmitted, *role)
        })
        .collect();
    PartialZeroRun {
        blocks,
        completion_block: schedule.completion_block,
        ciphers_sent: schedule.ciphers_sent,
        keys_sent: schedule.keys_sent,
    }
}

/// Runs the zero-delay encoder over the sequence. The keys must be fresh and
/// the sequence feasible; an exhausted sequence yields an incomplete error
/// carrying the progress indices.
pub fn run_encoder_zero(
    msg: &MessagePayload,
    keys: &KeySet,
    seq: &StateSequence,
) -> Result<Transcript, ZeroCodecError> {
    let run = run_encoder_zero_partial(msg, keys, seq);
    match run.completion_block {
        Some(completion_block) => Ok(Transcript {
            blocks: run.blocks,
            completion_block,
        }),
        None => Err(ZeroCodecError::Incomplete {
            horizon: seq.horizon(),
            ciphers_sent: run.ciphers_sent,
            keys_sent: run.keys_sent,
            total: msg.sub_count(),
        }),
    }
}

/// Decodes the destination's observations by replaying the deterministic
/// schedule from the state sequence, labelling each received block as
/// ciphertext or key, and XORing pairs back together. Returns exactly the
/// first `L` bits; padding is stripped.
pub fn decode_zero(
    destination: &[BlockPayload],
    seq: &StateSequence,
    rate: &RateSpec,
) -> Result<Bits, ZeroCodecError> {
    let sub_count = rate.sub_message_count();
    let schedule = schedule_zero(seq, sub_count)?;
    if destination.len() < schedule.completion_block() {
        return Err(ZeroCodecError::Decode {
            block: destination.len() + 1,
            reason: format!(
                "observation ends before the schedule completes at block {}",
                schedule.completion_block()
            ),
        });
    }
    let mut ciphers: Vec<Option<Bits>> = vec![None; sub_count];
    let mut keys: Vec<Option<Bits>> = vec![None; sub_count];
    for (idx, role) in schedule.roles().iter().enumerate() {
        let t = idx + 1;
        let slot = match role {
            BlockRole::Cipher(i) => Some((&mut ciphers[*i - 1], "ciphertext")),
            BlockRole::Key(j) => Some((&mut keys[*j - 1], "key")),
            BlockRole::Silent => None,
        };
        match slot {
            Some((slot, label)) => match destination[idx].data() {
                Some(bits) if bits.len() == rate.block_len() => *slot = Some(bits.clone()),
                Some(bits) => {
                    return Err(ZeroCodecError::Decode {
                        block: t,
                        reason: format!(
                            "{label} payload has {} bits, expected {}",
                            bits.len(),
                            rate.block_len()
                        ),
                    })
                }
                None => {
                    return Err(ZeroCodecError::Decode {
                        block: t,
                        reason: format!("schedule expects a {label} but the block is silent"),
                    })
                }
            },
            None => {
                if !destination[idx].is_silence() && seq.state_at(t).is_on_block() {
                    return Err(ZeroCodecError::Decode {
                        block: t,
                        reason: "schedule expects silence but the block carries data".to_string(),
                    });
                }
            }
        }
    }
    let mut bits = Bits::new();
    for i in 0..sub_count {
        let cipher = ciphers[i].as_ref().expect("complete schedule fills all slots");
        let key = keys[i].as_ref().expect("complete schedule fills all slots");
        bits.extend_from(&cipher.xor(key));
    }
    Ok(bits.truncated(rate.message_bits()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::SeededBitSource;
    use crate::channel::ChannelState;
    use crate::delay::optimal_delay_zero;
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

    struct FixedBits(Vec<bool>);

    impl BitSource for FixedBits {
        fn draw_bits(&mut self, n: usize) -> Bits {
            let rest = self.0.split_off(n);
            let taken = std::mem::replace(&mut self.0, rest);
            Bits::from_bools(taken)
        }
    }

    #[test]
    fn split_exact_no_padding() {
        let r = rate(2, 4);
        let mut rng = SeededBitSource::from_seed(0);
        let msg = split_message(Bits::parse_binary("1011").unwrap(), &r, &mut rng).unwrap();
        assert_eq!(msg.sub_messages().len(), 2);
        assert_eq!(msg.sub_message(1).to_binary_string(), "10");
        assert_eq!(msg.sub_message(2).to_binary_string(), "11");
    }

    #[test]
    fn split_pads_last_sub_message_from_rng() {
        let r = rate(2, 3);
        let mut rng = FixedBits(vec![true]);
        let msg = split_message(Bits::parse_binary("101").unwrap(), &r, &mut rng).unwrap();
        assert_eq!(msg.sub_message(1).to_binary_string(), "10");
        assert_eq!(msg.sub_message(2).to_binary_string(), "11");
        assert_eq!(msg.bits().to_binary_string(), "101");
    }

    #[test]
    fn split_single_bit_message() {
        let r = rate(1, 1);
        let mut rng = SeededBitSource::from_seed(0);
        let msg = split_message(Bits::parse_binary("1").unwrap(), &r, &mut rng).unwrap();
        assert_eq!(msg.sub_count(), 1);
    }

    #[test]
    fn split_rejects_length_mismatch() {
        let r = rate(2, 3);
        let mut rng = SeededBitSource::from_seed(0);
        assert!(matches!(
            split_message(Bits::parse_binary("10").unwrap(), &r, &mut rng),
            Err(ZeroCodecError::MessageLength { expected: 3, actual: 2 })
        ));
    }

    #[test]
    fn hand_executed_two_block_run() {
        // S = 1, w1 = 1, k1 = 0: block 1 carries w1 ⊕ k1 = 1, block 2
        // carries k1 = 0, completion at block 2.
        let r = rate(1, 1);
        let s = seq(&[(1, 0), (0, 1)]);
        let mut rng = SeededBitSource::from_seed(0);
        let msg = split_message(Bits::parse_binary("1").unwrap(), &r, &mut rng).unwrap();
        let keys = KeySet::from_keys(vec![Bits::parse_binary("0").unwrap()], &r).unwrap();
        let t = run_encoder_zero(&msg, &keys, &s).unwrap();
        assert_eq!(t.completion_block(), 2);
        assert_eq!(
            t.blocks()[0].transmitted,
            BlockPayload::Data(Bits::parse_binary("1").unwrap())
        );
        assert_eq!(
            t.blocks()[1].transmitted,
            BlockPayload::Data(Bits::parse_binary("0").unwrap())
        );
    }

    #[test]
    fn on_on_block_stays_silent() {
        let r = rate(1, 1);
        let s = seq(&[(1, 1), (1, 0), (0, 1)]);
        let mut rng = SeededBitSource::from_seed(3);
        let msg = split_message(Bits::parse_binary("1").unwrap(), &r, &mut rng).unwrap();
        let keys = KeySet::generate(&r, &mut rng);
        let t = run_encoder_zero(&msg, &keys, &s).unwrap();
        assert_eq!(t.blocks()[0].transmitted, BlockPayload::Silence);
        assert_eq!(t.completion_block(), 3);
    }

    #[test]
    fn too_few_on_off_blocks_reports_progress() {
        let r = rate(1, 2);
        let s = seq(&[(1, 0), (0, 1), (0, 1)]);
        let mut rng = SeededBitSource::from_seed(3);
        let msg = split_message(Bits::parse_binary("10").unwrap(), &r, &mut rng).unwrap();
        let keys = KeySet::generate(&r, &mut rng);
        match run_encoder_zero(&msg, &keys, &s) {
            Err(ZeroCodecError::Incomplete {
                ciphers_sent,
                keys_sent,
                total,
                ..
            }) => {
                assert_eq!((ciphers_sent, keys_sent, total), (1, 2, 2));
            }
            other => panic!("expected incomplete, got {other:?}"),
        }
    }

    #[test]
    fn decode_single_bit_example() {
        // y = [1, 0] over [(1,0),(0,1)]: w = 1 ⊕ 0 = 1.
        let r = rate(1, 1);
        let s = seq(&[(1, 0), (0, 1)]);
        let y = vec![
            BlockPayload::Data(Bits::parse_binary("1").unwrap()),
            BlockPayload::Data(Bits::parse_binary("0").unwrap()),
        ];
        assert_eq!(decode_zero(&y, &s, &r).unwrap().to_binary_string(), "1");
    }

    #[test]
    fn decode_rejects_missing_key_payload() {
        let r = rate(1, 1);
        let s = seq(&[(1, 0), (0, 1)]);
        let y = vec![
            BlockPayload::Data(Bits::parse_binary("1").unwrap()),
            BlockPayload::Silence,
        ];
        assert!(matches!(
            decode_zero(&y, &s, &r),
            Err(ZeroCodecError::Decode { block: 2, .. })
        ));
    }

    #[test]
    fn transcript_text_format() {
        let r = rate(2, 2);
        let s = seq(&[(1, 0), (0, 0), (0, 1)]);
        let mut rng = SeededBitSource::from_seed(1);
        let msg = split_message(Bits::parse_binary("10").unwrap(), &r, &mut rng).unwrap();
        let keys = KeySet::from_keys(vec![Bits::parse_binary("01").unwrap()], &r).unwrap();
        let t = run_encoder_zero(&msg, &keys, &s).unwrap();
        let text = t.to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "1 on-off 3 cipher:1"); // 10 ⊕ 01 = 11 = 0x3
        assert_eq!(lines[1], "2 off-off - -");
        assert_eq!(lines[2], "3 off-on 1 key:1"); // 01 = 0x1
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
        /// Completion equals the closed-form optimum (two independent code
        /// paths: schedule simulation vs prefix-counter scan).
        #[test]
        fn completion_achieves_optimal_delay(
            s in arb_sequence(40),
            n in 1usize..4,
            sub_count in 1usize..4,
            seed in any::<u64>(),
        ) {
            let l = sub_count * n;
            let r = rate(n, l);
            let mut rng = SeededBitSource::from_seed(seed);
            let msg = split_message(rng.draw_bits(l), &r, &mut rng).unwrap();
            let keys = KeySet::generate(&r, &mut rng);
            match run_encoder_zero(&msg, &keys, &s) {
                Ok(t) => {
                    prop_assert_eq!(
                        Some(t.completion_block()),
                        optimal_delay_zero(&r, &s).block()
                    );
                }
                Err(ZeroCodecError::Incomplete { .. }) => {
                    prop_assert!(optimal_delay_zero(&r, &s).block().is_none());
                }
                Err(other) => return Err(TestCaseError::fail(format!("{other}"))),
            }
        }

        /// Exactly S ciphertexts on on-off blocks, S keys on off-on blocks,
        /// silence everywhere else; relay 1 never observes a key payload and
        /// relay 2 never observes a ciphertext payload.
        #[test]
        fn schedule_and_observation_split(
            s in arb_sequence(40),
            sub_count in 1usize..4,
            seed in any::<u64>(),
        ) {
            let r = rate(2, sub_count * 2);
            let mut rng = SeededBitSource::from_seed(seed);
            let msg = split_message(rng.draw_bits(sub_count * 2), &r, &mut rng).unwrap();
            let keys = KeySet::generate(&r, &mut rng);
            let Ok(t) = run_encoder_zero(&msg, &keys, &s) else { return Ok(()) };
            let mut ciphers = 0;
            let mut key_count = 0;
            for b in t.blocks() {
                match b.role {
                    BlockRole::Cipher(_) => {
                        ciphers += 1;
                        prop_assert_eq!(b.kind, BlockKind::OnOff);
                        prop_assert!(b.relay2.is_silence());
                    }
                    BlockRole::Key(_) => {
                        key_count += 1;
                        prop_assert_eq!(b.kind, BlockKind::OffOn);
                        prop_assert!(b.relay1.is_silence());
                    }
                    BlockRole::Silent => prop_assert!(b.transmitted.is_silence()),
                }
            }
            prop_assert_eq!(ciphers, sub_count);
            prop_assert_eq!(key_count, sub_count);
        }

        /// decode ∘ encode is the identity on message bits for every key
        /// realization, including padded rates.
        #[test]
        fn round_trip_is_identity(
            s in arb_sequence(40),
            n in 1usize..4,
            l_offset in 0usize..3,
            seed in any::<u64>(),
        ) {
            let l = 1 + l_offset * n; // exercises both padded and exact splits
            let r = rate(n, l);
            let mut rng = SeededBitSource::from_seed(seed);
            let message = rng.draw_bits(l);
            let msg = split_message(message.clone(), &r, &mut rng).unwrap();
            let keys = KeySet::generate(&r, &mut rng);
            let Ok(t) = run_encoder_zero(&msg, &keys, &s) else { return Ok(()) };
            let decoded = decode_zero(&t.destination_payloads(), &s, &r).unwrap();
            prop_assert_eq!(decoded, message);
        }
    }
}
