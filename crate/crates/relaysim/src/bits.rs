//! Fixed-length bit vectors and deterministic bit sources.
//!
//! Payloads, keys, and messages are all short bit strings, so they are kept
//! as explicit `Vec<bool>` values rather than packed words. Randomness is
//! drawn through the [`BitSource`] trait so that the same encoder code can
//! run off a seeded RNG (simulation) or off an enumeration tape (the
//! exhaustive secrecy oracle, which must visit every realization exactly
//! once).

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::fmt;

/// A bit string of known length. Bit 0 is the first transmitted bit.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new() -> Self {
        Bits(Vec::new())
    }

    pub fn zeros(len: usize) -> Self {
        Bits(vec![false; len])
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        Bits(bits)
    }

    /// Builds a bit string of `width` bits from the low bits of `value`,
    /// least-significant bit first. Bit `k` of the result is `(value >> k) & 1`.
    pub fn from_u64(value: u64, width: usize) -> Self {
        assert!(width <= 64, "from_u64 supports at most 64 bits");
        Bits((0..width).map(|k| (value >> k) & 1 == 1).collect())
    }

    /// Parses a string of `0`/`1` characters, first character = bit 0.
    pub fn parse_binary(text: &str) -> Option<Self> {
        text.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<bool>>>()
            .map(Bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, index: usize) -> bool {
        self.0[index]
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extend_from(&mut self, other: &Bits) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn truncated(&self, len: usize) -> Bits {
        Bits(self.0[..len].to_vec())
    }

    pub fn slice(&self, start: usize, end: usize) -> Bits {
        Bits(self.0[start..end].to_vec())
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    /// Bitwise XOR; both operands must have the same length.
    pub fn xor(&self, other: &Bits) -> Bits {
        assert_eq!(self.len(), other.len(), "xor requires equal lengths");
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect())
    }

    /// Packs the bits into a compact byte form for use as a hash-map key:
    /// one length byte is not included, callers frame externally.
    pub fn pack_into(&self, out: &mut Vec<u8>) {
        let mut acc = 0u8;
        let mut filled = 0;
        for &bit in &self.0 {
            acc = (acc << 1) | u8::from(bit);
            filled += 1;
            if filled == 8 {
                out.push(acc);
                acc = 0;
                filled = 0;
            }
        }
        if filled > 0 {
            out.push(acc << (8 - filled));
        }
    }

    /// Hex rendering, bits packed most-significant first and left-padded to a
    /// whole number of nibbles. `""` stays `""`.
    pub fn to_hex(&self) -> String {
        let nibbles = self.len().div_ceil(4);
        let pad = nibbles * 4 - self.len();
        let mut out = String::with_capacity(nibbles);
        let mut acc = 0u8;
        let mut filled = pad;
        for &bit in &self.0 {
            acc = (acc << 1) | u8::from(bit);
            filled += 1;
            if filled == 4 {
                out.push(char::from_digit(u32::from(acc), 16).unwrap());
                acc = 0;
                filled = 0;
            }
        }
        out
    }

    pub fn to_binary_string(&self) -> String {
        self.0.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({})", self.to_binary_string())
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_binary_string())
    }
}

/// Supplier of fresh uniform bits. Implementations must be deterministic
/// given their construction parameters.
pub trait BitSource {
    fn draw_bits(&mut self, n: usize) -> Bits;

    fn draw_bit(&mut self) -> bool {
        self.draw_bits(1).get(0)
    }
}

/// Seeded bit source backed by ChaCha12. Bits are taken from successive
/// `next_u64` outputs, least-significant bit first; this layout is part of
/// the reproducibility contract and is fixed per release.
pub struct SeededBitSource {
    rng: ChaCha12Rng,
    buffer: u64,
    buffered: usize,
}

impl SeededBitSource {
    pub fn from_seed(seed: u64) -> Self {
        SeededBitSource {
            rng: ChaCha12Rng::seed_from_u64(seed),
            buffer: 0,
            buffered: 0,
        }
    }

    /// Independent stream under the same seed, for parallel-safe per-trial
    /// derivation.
    pub fn from_seed_and_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        SeededBitSource {
            rng,
            buffer: 0,
            buffered: 0,
        }
    }
}

impl BitSource for SeededBitSource {
    fn draw_bits(&mut self, n: usize) -> Bits {
        let mut bits = Vec::with_capacity(n);
        for _ in 0..n {
            if self.buffered == 0 {
                self.buffer = self.rng.next_u64();
                self.buffered = 64;
            }
            bits.push(self.buffer & 1 == 1);
            self.buffer >>= 1;
            self.buffered -= 1;
        }
        Bits(bits)
    }
}

/// Bit source that replays one enumeration realization: bit `k` of the tape
/// is bit `k` of `index`. Drawing past `len` is a caller bug.
pub struct TapeBitSource {
    index: u64,
    len: usize,
    consumed: usize,
}

impl TapeBitSource {
    pub fn new(index: u64, len: usize) -> Self {
        assert!(len <= 63, "enumeration tapes are limited to 63 bits");
        TapeBitSource {
            index,
            len,
            consumed: 0,
        }
    }

    pub fn consumed(&self) -> usize {
        self.consumed
    }

    pub fn fully_consumed(&self) -> bool {
        self.consumed == self.len
    }
}

impl BitSource for TapeBitSource {
    fn draw_bits(&mut self, n: usize) -> Bits {
        assert!(
            self.consumed + n <= self.len,
            "tape overrun: schedule drew more than the declared {} bits",
            self.len
        );
        let bits = (0..n)
            .map(|k| (self.index >> (self.consumed + k)) & 1 == 1)
            .collect();
        self.consumed += n;
        Bits(bits)
    }
}

/// Bit source that returns zeros and records how many bits were requested.
/// Used to measure a schedule's randomness demand without affecting it.
#[derive(Default)]
pub struct CountingBitSource {
    drawn: usize,
}

impl CountingBitSource {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn drawn(&self) -> usize {
        self.drawn
    }
}

impl BitSource for CountingBitSource {
    fn draw_bits(&mut self, n: usize) -> Bits {
        self.drawn += n;
        Bits::zeros(n)
    }
}
