//! Channel-state representation, block classification, prefix counting,
//! trace I/O, and sequence generators.
//!
//! Time is divided into blocks of `N` channel uses. Each block carries one
//! on/off state per source-to-relay channel; the pair never changes within a
//! block. Relay-to-destination links are noiseless, so the destination hears
//! a block whenever at least one relay does.

use crate::bits::{BitSource, Bits, SeededBitSource};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use thiserror::Error;

/// Errors from channel-state construction, trace parsing, and generation.
#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("trace line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("trace contains no state lines")]
    EmptyTrace,
    #[error("block index {index} out of range [1, {horizon}]")]
    BlockOutOfRange { index: usize, horizon: usize },
    #[error("iid probabilities must be nonnegative and sum to 1 (sum = {sum})")]
    InvalidProbabilities { sum: f64 },
    #[error("periodic pattern must not be empty")]
    EmptyPattern,
    #[error("trace file {path} holds {available} blocks, horizon {requested} requested")]
    TraceTooShort {
        path: PathBuf,
        available: usize,
        requested: usize,
    },
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Per-block on/off pair for the two source-to-relay channels.
/// `true` means on (no erasure).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChannelState {
    pub to_relay1: bool,
    pub to_relay2: bool,
}

impl ChannelState {
    pub const fn new(to_relay1: bool, to_relay2: bool) -> Self {
        ChannelState {
            to_relay1,
            to_relay2,
        }
    }

    /// At least one relay channel is on, so the destination hears the block.
    pub fn is_on_block(self) -> bool {
        self.to_relay1 || self.to_relay2
    }

    pub fn kind(self) -> BlockKind {
        classify_block(self)
    }
}

impl fmt::Display for ChannelState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}",
            u8::from(self.to_relay1),
            u8::from(self.to_relay2)
        )
    }
}

/// Four-way classification of a block by its state pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockKind {
    /// Relay-1 channel on, relay-2 channel off.
    OnOff,
    /// Relay-1 channel off, relay-2 channel on.
    OffOn,
    /// Both channels on.
    OnOn,
    /// Both channels off.
    OffOff,
}

impl BlockKind {
    pub const ALL: [BlockKind; 4] = [
        BlockKind::OnOff,
        BlockKind::OffOn,
        BlockKind::OnOn,
        BlockKind::OffOff,
    ];

    pub fn state(self) -> ChannelState {
        match self {
            BlockKind::OnOff => ChannelState::new(true, false),
            BlockKind::OffOn => ChannelState::new(false, true),
            BlockKind::OnOn => ChannelState::new(true, true),
            BlockKind::OffOff => ChannelState::new(false, false),
        }
    }
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            BlockKind::OnOff => "on-off",
            BlockKind::OffOn => "off-on",
            BlockKind::OnOn => "on-on",
            BlockKind::OffOff => "off-off",
        };
        f.write_str(name)
    }
}

impl FromStr for BlockKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "on-off" => Ok(BlockKind::OnOff),
            "off-on" => Ok(BlockKind::OffOn),
            "on-on" => Ok(BlockKind::OnOn),
            "off-off" => Ok(BlockKind::OffOff),
            other => Err(format!(
                "unknown block kind `{other}` (expected on-off, off-on, on-on, or off-off)"
            )),
        }
    }
}

/// Total partition of the four state pairs.
pub fn classify_block(state: ChannelState) -> BlockKind {
    match (state.to_relay1, state.to_relay2) {
        (true, false) => BlockKind::OnOff,
        (false, true) => BlockKind::OffOn,
        (true, true) => BlockKind::OnOn,
        (false, false) => BlockKind::OffOff,
    }
}

/// Finite state sequence, indexed from block 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSequence {
    states: Vec<ChannelState>,
}

impl StateSequence {
    pub fn new(states: Vec<ChannelState>) -> Result<Self, ChannelError> {
        if states.is_empty() {
            return Err(ChannelError::EmptyTrace);
        }
        Ok(StateSequence { states })
    }

    pub fn from_kinds(kinds: &[BlockKind]) -> Result<Self, ChannelError> {
        Self::new(kinds.iter().map(|k| k.state()).collect())
    }

    pub fn horizon(&self) -> usize {
        self.states.len()
    }

    /// State of block `t`, 1-based.
    pub fn state_at(&self, t: usize) -> ChannelState {
        self.states[t - 1]
    }

    pub fn states(&self) -> &[ChannelState] {
        &self.states
    }

    pub fn iter(&self) -> impl Iterator<Item = ChannelState> + '_ {
        self.states.iter().copied()
    }

    /// Number of blocks of the given kind among blocks `1..=d`.
    /// For `OnOff` and `OffOn` these are the two prefix counters the delay
    /// formulas are built on.
    pub fn count_kind(&self, d: usize, kind: BlockKind) -> Result<usize, ChannelError> {
        if d == 0 || d > self.horizon() {
            return Err(ChannelError::BlockOutOfRange {
                index: d,
                horizon: self.horizon(),
            });
        }
        Ok(self.states[..d]
            .iter()
            .filter(|s| classify_block(**s) == kind)
            .count())
    }

    /// Line-oriented trace form; `parse_trace` inverts it.
    pub fn to_trace_string(&self) -> String {
        let mut out = String::with_capacity(self.states.len() * 4);
        for state in &self.states {
            out.push_str(&state.to_string());
            out.push('\n');
        }
        out
    }
}

/// Parses the line-oriented trace format: one `<s1> <s2>` pair per line with
/// each symbol in `{0,1}`, `#` starting a comment line, blank lines ignored.
pub fn parse_trace(text: &str) -> Result<StateSequence, ChannelError> {
    let mut states = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut symbols = line.split_whitespace();
        let s1 = symbols.next();
        let s2 = symbols.next();
        let extra = symbols.next();
        let parsed = match (s1, s2, extra) {
            (Some(a), Some(b), None) => match (parse_state_symbol(a), parse_state_symbol(b)) {
                (Some(x), Some(y)) => Some(ChannelState::new(x, y)),
                _ => None,
            },
            _ => None,
        };
        match parsed {
            Some(state) => states.push(state),
            None => {
                return Err(ChannelError::Parse {
                    line: lineno + 1,
                    message: format!("expected `<s1> <s2>` with symbols in {{0,1}}, got `{line}`"),
                })
            }
        }
    }
    StateSequence::new(states)
}

fn parse_state_symbol(token: &str) -> Option<bool> {
    match token {
        "0" => Some(false),
        "1" => Some(true),
        _ => None,
    }
}

/// Per-kind probabilities for the iid generator, in the order
/// on-off, off-on, on-on, off-off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KindProbabilities {
    pub on_off: f64,
    pub off_on: f64,
    pub on_on: f64,
    pub off_off: f64,
}

impl KindProbabilities {
    pub const fn uniform() -> Self {
        KindProbabilities {
            on_off: 0.25,
            off_on: 0.25,
            on_on: 0.25,
            off_off: 0.25,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.on_off, self.off_on, self.on_on, self.off_off]
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        let values = self.as_array();
        let sum: f64 = values.iter().sum();
        if values.iter().any(|p| *p < 0.0) || (sum - 1.0).abs() > 1e-12 {
            return Err(ChannelError::InvalidProbabilities { sum });
        }
        Ok(())
    }
}

/// How to produce a state sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorMode {
    /// Each block's kind drawn independently from the given distribution.
    Iid(KindProbabilities),
    /// The pattern repeated until the horizon is filled.
    Periodic(Vec<BlockKind>),
    /// Every block has the same kind.
    Constant(BlockKind),
    /// States read from a trace file, truncated to the horizon.
    TraceFile(PathBuf),
}

/// Deterministic sequence generator. Given the same spec, seed, and horizon
/// the output is identical; randomness comes from ChaCha12 keyed by the
/// 64-bit seed (see [`SeededBitSource`]).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub mode: GeneratorMode,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn iid(probabilities: KindProbabilities, seed: u64) -> Self {
        GeneratorSpec {
            mode: GeneratorMode::Iid(probabilities),
            seed,
        }
    }

    pub fn constant(kind: BlockKind) -> Self {
        GeneratorSpec {
            mode: GeneratorMode::Constant(kind),
            seed: 0,
        }
    }

    pub fn periodic(pattern: Vec<BlockKind>) -> Self {
        GeneratorSpec {
            mode: GeneratorMode::Periodic(pattern),
            seed: 0,
        }
    }
}

/// Produces `horizon` blocks according to the spec.
pub fn generate_sequence(
    spec: &GeneratorSpec,
    horizon: usize,
) -> Result<StateSequence, ChannelError> {
    if horizon == 0 {
        return Err(ChannelError::ZeroHorizon);
    }
    match &spec.mode {
        GeneratorMode::Constant(kind) => {
            StateSequence::new(vec![kind.state(); horizon])
        }
        GeneratorMode::Periodic(pattern) => {
            if pattern.is_empty() {
                return Err(ChannelError::EmptyPattern);
            }
            StateSequence::new(
                (0..horizon)
                    .map(|i| pattern[i % pattern.len()].state())
                    .collect(),
            )
        }
        GeneratorMode::Iid(probabilities) => {
            probabilities.validate()?;
            let mut source = SeededBitSource::from_seed(spec.seed);
            let cumulative = {
                let p = probabilities.as_array();
                [p[0], p[0] + p[1], p[0] + p[1] + p[2]]
            };
            let states = (0..horizon)
                .map(|_| {
                    let u = unit_interval_draw(&mut source);
                    let kind = if u < cumulative[0] {
                        BlockKind::OnOff
                    } else if u < cumulative[1] {
                        BlockKind::OffOn
                    } else if u < cumulative[2] {
                        BlockKind::OnOn
                    } else {
                        BlockKind::OffOff
                    };
                    kind.state()
                })
                .collect();
            StateSequence::new(states)
        }
        GeneratorMode::TraceFile(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| ChannelError::Io {
                path: path.clone(),
                source,
            })?;
            let full = parse_trace(&text)?;
            if full.horizon() < horizon {
                return Err(ChannelError::TraceTooShort {
                    path: path.clone(),
                    available: full.horizon(),
                    requested: horizon,
                });
            }
            StateSequence::new(full.states()[..horizon].to_vec())
        }
    }
}

/// Uniform draw in [0, 1) from 53 tape bits, platform-independent.
fn unit_interval_draw(source: &mut impl BitSource) -> f64 {
    let bits = source.draw_bits(53);
    let mut value = 0u64;
    for (k, bit) in bits.iter().enumerate() {
        value |= u64::from(bit) << k;
    }
    value as f64 * (1.0 / (1u64 << 53) as f64)
}

/// What the source put on the air during one block: either an N-bit payload
/// or nothing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BlockPayload {
    Data(Bits),
    Silence,
}

impl BlockPayload {
    pub fn is_silence(&self) -> bool {
        matches!(self, BlockPayload::Silence)
    }

    pub fn data(&self) -> Option<&Bits> {
        match self {
            BlockPayload::Data(bits) => Some(bits),
            BlockPayload::Silence => None,
        }
    }

    /// Hex payload or `-` for silence, as used in transcript lines.
    pub fn to_field(&self) -> String {
        match self {
            BlockPayload::Data(bits) => bits.to_hex(),
            BlockPayload::Silence => "-".to_string(),
        }
    }
}

/// What each observer receives in one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockObservations {
    pub relay1: BlockPayload,
    pub relay2: BlockPayload,
    pub destination: BlockPayload,
}

/// Observation rule for one block: a relay hears the transmitted signal iff
/// its channel is on; the destination hears it iff at least one relay does.
pub fn observe_block(transmitted: &BlockPayload, state: ChannelState) -> BlockObservations {
    let hear = |on: bool| {
        if on {
            transmitted.clone()
        } else {
            BlockPayload::Silence
        }
    };
    BlockObservations {
        relay1: hear(state.to_relay1),
        relay2: hear(state.to_relay2),
        destination: hear(state.is_on_block()),
    }
}
