//! Block-level model: random-encoder codes, AVWC families, GAVWC instances
//! and state sequences.
//!
//! Words over product alphabets are integer ids in little-endian mixed radix:
//! letter `i` of a word over radix `r` contributes `digit_i * r^i`.

use crate::error::{ModelError, ProbError};
use crate::prob::{
    compose_channels, kl_slices, mutual_information_slice, output_slice, product_channel_capped, Channel,
    Divergence, DEFAULT_CELL_CAP,
};

/// Little-endian mixed-radix digits of `id` over a constant radix.
pub fn word_digits(id: usize, radix: usize, len: usize) -> Vec<usize> {
    let mut rest = id;
    (0..len)
        .map(|_| {
            let d = rest % radix;
            rest /= radix;
            d
        })
        .collect()
}

/// Inverse of [`word_digits`].
pub fn word_id(digits: &[usize], radix: usize) -> usize {
    digits.iter().rev().fold(0, |acc, &d| acc * radix + d)
}

/// Stochastic encoder from message ids to input words plus a total
/// deterministic decoder. `None` in the decoder is the error symbol.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RandomEncoderCode {
    encoder: Channel,
    decoder: Vec<Option<usize>>,
}

impl RandomEncoderCode {
    pub fn new(encoder: Channel, decoder: Vec<Option<usize>>) -> Result<Self, ModelError> {
        let count = encoder.input_size();
        if count == 0 {
            return Err(ModelError::NoMessages);
        }
        for (output, m) in decoder.iter().enumerate() {
            if let Some(message) = *m {
                if message >= count {
                    return Err(ModelError::DecoderRange { output, message, count });
                }
            }
        }
        Ok(Self { encoder, decoder })
    }

    /// Deterministic encoder sending message `u` to word `words[u]`.
    pub fn deterministic(words: &[usize], input_size: usize, decoder: Vec<Option<usize>>) -> Result<Self, ModelError> {
        if words.is_empty() {
            return Err(ModelError::NoMessages);
        }
        let mut data = vec![0.0; words.len() * input_size];
        for (u, &w) in words.iter().enumerate() {
            if w >= input_size {
                return Err(ProbError::OutOfRange {
                    index: w,
                    size: input_size,
                }
                .into());
            }
            data[u * input_size + w] = 1.0;
        }
        Self::new(Channel::from_computed(words.len(), input_size, data), decoder)
    }

    pub fn message_count(&self) -> usize {
        self.encoder.input_size()
    }

    pub fn input_size(&self) -> usize {
        self.encoder.output_size()
    }

    pub fn encoder(&self) -> &Channel {
        &self.encoder
    }

    pub fn decoder(&self) -> &[Option<usize>] {
        &self.decoder
    }

    fn check_decoder(&self, output_size: usize) -> Result<(), ModelError> {
        if self.decoder.len() != output_size {
            return Err(ModelError::DecoderLength {
                expected: output_size,
                found: self.decoder.len(),
            });
        }
        Ok(())
    }

    /// Message-to-output channel: encoder followed by `ch`.
    pub fn induced_message_channel(&self, ch: &Channel) -> Result<Channel, ModelError> {
        Ok(compose_channels(&self.encoder, ch)?)
    }

    /// Per-message divergence D_V(u) from the uniform-prior output marginal.
    pub fn leakage_profile(&self, wiretap: &Channel) -> Result<Vec<f64>, ModelError> {
        let induced = self.induced_message_channel(wiretap)?;
        leakage_profile_of(&induced)
    }

    /// Decoding-error probability of each message over `main`.
    pub fn message_errors(&self, main: &Channel) -> Result<Vec<f64>, ModelError> {
        self.check_decoder(main.output_size())?;
        let induced = self.induced_message_channel(main)?;
        Ok((0..self.message_count())
            .map(|u| {
                let ok: f64 = induced
                    .row(u)
                    .iter()
                    .zip(&self.decoder)
                    .filter(|(_, d)| **d == Some(u))
                    .map(|(p, _)| p)
                    .sum();
                (1.0 - ok).clamp(0.0, 1.0)
            })
            .collect())
    }

    pub fn average_error(&self, main: &Channel) -> Result<f64, ModelError> {
        let errs = self.message_errors(main)?;
        Ok(errs.iter().sum::<f64>() / errs.len() as f64)
    }

    pub fn max_error(&self, main: &Channel) -> Result<f64, ModelError> {
        Ok(self.message_errors(main)?.into_iter().fold(0.0, f64::max))
    }

    /// I(U;Z) for a uniform message over `wiretap`.
    pub fn uniform_leakage(&self, wiretap: &Channel) -> Result<f64, ModelError> {
        let induced = self.induced_message_channel(wiretap)?;
        let uniform = vec![1.0 / self.message_count() as f64; self.message_count()];
        Ok(mutual_information_slice(&uniform, &induced))
    }
}

/// D values for an already-induced message channel.
pub(crate) fn leakage_profile_of(induced: &Channel) -> Result<Vec<f64>, ModelError> {
    let j = induced.input_size();
    let marginal = output_slice(&vec![1.0 / j as f64; j], induced);
    induced
        .rows()
        .enumerate()
        .map(|(u, row)| match kl_slices(row, &marginal) {
            Divergence::Finite(v) => Ok(v),
            Divergence::Infinite => Err(ModelError::invalid(format!(
                "message {u} escapes the support of its own marginal"
            ))),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Main,
    Wiretap,
}

/// One jammer state: a (main, wiretap) channel pair over a common input.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePair {
    pub main: Channel,
    pub wiretap: Channel,
}

/// Per-letter family of (main, wiretap) pairs indexed by jammer state.
#[derive(Debug, Clone, PartialEq)]
pub struct AvwcFamily {
    states: Vec<StatePair>,
}

impl AvwcFamily {
    pub fn new(states: Vec<StatePair>) -> Result<Self, ModelError> {
        let first = states.first().ok_or(ModelError::NoStates)?;
        let main_dims = (first.main.input_size(), first.main.output_size());
        let tap_dims = (first.wiretap.input_size(), first.wiretap.output_size());
        if main_dims.0 != tap_dims.0 {
            return Err(ModelError::InconsistentState {
                state: 0,
                what: "wiretap input",
                expected: main_dims,
                found: tap_dims,
            });
        }
        for (state, s) in states.iter().enumerate().skip(1) {
            let m = (s.main.input_size(), s.main.output_size());
            if m != main_dims {
                return Err(ModelError::InconsistentState {
                    state,
                    what: "main",
                    expected: main_dims,
                    found: m,
                });
            }
            let w = (s.wiretap.input_size(), s.wiretap.output_size());
            if w != tap_dims {
                return Err(ModelError::InconsistentState {
                    state,
                    what: "wiretap",
                    expected: tap_dims,
                    found: w,
                });
            }
        }
        Ok(Self { states })
    }

    /// Family built from main channels only, with a single constant wiretap.
    pub fn from_mains(mains: Vec<Channel>) -> Result<Self, ModelError> {
        let input = mains.first().ok_or(ModelError::NoStates)?.input_size();
        let blind = Channel::constant(input, &crate::prob::Distribution::uniform(1)?)?;
        Self::new(
            mains
                .into_iter()
                .map(|main| StatePair {
                    main,
                    wiretap: blind.clone(),
                })
                .collect(),
        )
    }

    pub fn states(&self) -> &[StatePair] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn input_size(&self) -> usize {
        self.states[0].main.input_size()
    }

    pub fn main_output_size(&self) -> usize {
        self.states[0].main.output_size()
    }

    pub fn wiretap_output_size(&self) -> usize {
        self.states[0].wiretap.output_size()
    }

    pub fn letter(&self, state: usize, side: Side) -> &Channel {
        match side {
            Side::Main => &self.states[state].main,
            Side::Wiretap => &self.states[state].wiretap,
        }
    }

    pub fn mains(&self) -> Vec<&Channel> {
        self.states.iter().map(|s| &s.main).collect()
    }

    pub fn wiretaps(&self) -> Vec<&Channel> {
        self.states.iter().map(|s| &s.wiretap).collect()
    }

    /// Coordinate-wise product channel for the given state sequence.
    pub fn state_sequence_channel(&self, seq: &StateSequence, side: Side) -> Result<Channel, ModelError> {
        self.state_sequence_channel_capped(seq, side, DEFAULT_CELL_CAP)
    }

    pub fn state_sequence_channel_capped(
        &self,
        seq: &StateSequence,
        side: Side,
        cap: usize,
    ) -> Result<Channel, ModelError> {
        if let Some(&bad) = seq.states().iter().find(|&&s| s >= self.state_count()) {
            return Err(ModelError::StateOutOfRange {
                index: bad,
                count: self.state_count(),
            });
        }
        let factors: Vec<&Channel> = seq.states().iter().map(|&s| self.letter(s, side)).collect();
        Ok(product_channel_capped(&factors, cap)?)
    }

    /// Block-level instance listing every state sequence of length `n`.
    pub fn to_gavwc(&self, n: usize) -> Result<GavwcInstance, ModelError> {
        let seqs = StateSequence::enumerate(self.state_count(), n)?;
        let mut mains = Vec::with_capacity(seqs.len());
        let mut wiretaps = Vec::with_capacity(seqs.len());
        for seq in &seqs {
            mains.push(self.state_sequence_channel(seq, Side::Main)?);
            wiretaps.push(self.state_sequence_channel(seq, Side::Wiretap)?);
        }
        GavwcInstance::new(n, mains, wiretaps)
    }
}

/// Jammer state choice per letter of a block.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct StateSequence {
    states: Vec<usize>,
}

/// Largest number of sequences [`StateSequence::enumerate`] will produce.
pub const SEQUENCE_ENUMERATION_CAP: usize = 1 << 16;

impl StateSequence {
    pub fn new(states: Vec<usize>, state_count: usize) -> Result<Self, ModelError> {
        if states.is_empty() {
            return Err(ModelError::ZeroBlockLength);
        }
        if let Some(&bad) = states.iter().find(|&&s| s >= state_count) {
            return Err(ModelError::StateOutOfRange {
                index: bad,
                count: state_count,
            });
        }
        Ok(Self { states })
    }

    pub fn constant(state: usize, n: usize) -> Self {
        Self { states: vec![state; n] }
    }

    /// Sequence number `index` in little-endian order over `state_count` states.
    pub fn from_index(index: usize, state_count: usize, n: usize) -> Self {
        Self {
            states: word_digits(index, state_count, n),
        }
    }

    pub fn index(&self, state_count: usize) -> usize {
        word_id(&self.states, state_count)
    }

    /// Number of sequences of length `n`, or `None` on overflow.
    pub fn count(state_count: usize, n: usize) -> Option<usize> {
        state_count.checked_pow(u32::try_from(n).ok()?)
    }

    pub fn enumerate(state_count: usize, n: usize) -> Result<Vec<Self>, ModelError> {
        if n == 0 {
            return Err(ModelError::ZeroBlockLength);
        }
        let total = Self::count(state_count, n)
            .filter(|&t| t <= SEQUENCE_ENUMERATION_CAP)
            .ok_or_else(|| ModelError::invalid(format!("{state_count}^{n} state sequences exceed the enumeration cap")))?;
        Ok((0..total).map(|i| Self::from_index(i, state_count, n)).collect())
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Explicit per-block family of main and wiretap channels.
#[derive(Debug, Clone, PartialEq)]
pub struct GavwcInstance {
    block_length: usize,
    mains: Vec<Channel>,
    wiretaps: Vec<Channel>,
    min_positive_wiretap: f64,
}

impl GavwcInstance {
    pub fn new(block_length: usize, mains: Vec<Channel>, wiretaps: Vec<Channel>) -> Result<Self, ModelError> {
        if block_length == 0 {
            return Err(ModelError::ZeroBlockLength);
        }
        check_uniform_dims(&mains, "main")?;
        check_uniform_dims(&wiretaps, "wiretap")?;
        if mains[0].input_size() != wiretaps[0].input_size() {
            return Err(ModelError::invalid("main and wiretap channels disagree on the input alphabet"));
        }
        let min_positive_wiretap = wiretaps.iter().map(Channel::min_positive).fold(f64::INFINITY, f64::min);
        Ok(Self {
            block_length,
            mains,
            wiretaps,
            min_positive_wiretap,
        })
    }

    pub fn block_length(&self) -> usize {
        self.block_length
    }

    pub fn mains(&self) -> &[Channel] {
        &self.mains
    }

    pub fn wiretaps(&self) -> &[Channel] {
        &self.wiretaps
    }

    /// v_n: the smallest positive entry over all wiretap channels.
    pub fn min_positive_wiretap(&self) -> f64 {
        self.min_positive_wiretap
    }

    /// δ = log₂(1/v_n). Bounds every D_V(u) for every code when all wiretap
    /// entries are positive; a zero entry can break it (a noiseless
    /// wiretap has δ = 0 yet leaks), where only log₂ J holds.
    pub fn uniform_delta_bound(&self) -> f64 {
        (-self.min_positive_wiretap.log2()).max(0.0)
    }
}

fn check_uniform_dims(list: &[Channel], what: &'static str) -> Result<(), ModelError> {
    let first = list.first().ok_or(ModelError::EmptyChannelList)?;
    let dims = (first.input_size(), first.output_size());
    for (state, ch) in list.iter().enumerate() {
        let found = (ch.input_size(), ch.output_size());
        if found != dims {
            return Err(ModelError::InconsistentState {
                state,
                what,
                expected: dims,
                found,
            });
        }
    }
    Ok(())
}
