//! Adapts native generator output to the 32-bit words the battery reads.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prng::{GeneratorState, OutputKind};

/// Which 32 bits of each native draw reach the consumer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HalfPolicy {
    /// 32-bit generators: the native word as-is.
    Native32,
    /// Bits 0..32 of a fresh 64-bit draw; the rest is discarded.
    Low,
    /// Bits 32..64 of a fresh 64-bit draw; the rest is discarded.
    High,
    /// Low half of a fresh draw, then the high half of that same draw.
    Alternating,
}

impl HalfPolicy {
    pub fn name(self) -> &'static str {
        match self {
            Self::Native32 => "native32",
            Self::Low => "low",
            Self::High => "high",
            Self::Alternating => "alternating",
        }
    }

    pub fn compatible_with(self, kind: OutputKind) -> bool {
        match self {
            Self::Native32 => kind != OutputKind::Bits64,
            _ => kind == OutputKind::Bits64,
        }
    }
}

impl fmt::Display for HalfPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HalfPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "native32" | "native" => Ok(Self::Native32),
            "low" | "lsb" => Ok(Self::Low),
            "high" | "msb" => Ok(Self::High),
            "alternating" => Ok(Self::Alternating),
            _ => Err(Error::Argument(format!("unknown half policy '{s}'"))),
        }
    }
}

const TWO_POW_32: f64 = 4_294_967_296.0;

/// An owned generator read as a stream of 32-bit words.
#[derive(Debug, Clone)]
pub struct Word32Source {
    state: GeneratorState,
    policy: HalfPolicy,
    draws_consumed: u64,
    words_emitted: u64,
    pending_high: Option<u32>,
}

impl Word32Source {
    pub fn new(state: GeneratorState, policy: HalfPolicy) -> Result<Self> {
        let kind = state.output_kind();
        if !policy.compatible_with(kind) {
            return Err(Error::Config(format!(
                "half policy '{policy}' does not apply to {} output",
                state.kind_name()
            )));
        }
        Ok(Self { state, policy, draws_consumed: 0, words_emitted: 0, pending_high: None })
    }

    pub fn policy(&self) -> HalfPolicy {
        self.policy
    }

    pub fn state(&self) -> &GeneratorState {
        &self.state
    }

    /// Native draws taken from the generator so far.
    pub fn draws_consumed(&self) -> u64 {
        self.draws_consumed
    }

    /// 32-bit words handed out so far (unit values count as one each).
    pub fn words_emitted(&self) -> u64 {
        self.words_emitted
    }

    #[inline]
    pub fn next_word32(&mut self) -> u32 {
        self.words_emitted += 1;
        match self.policy {
            HalfPolicy::Native32 => {
                self.draws_consumed += 1;
                match self.state.output_kind() {
                    // floor(u * 2^32); u < 1 so this fits.
                    OutputKind::Unit => (self.state.next_u01() * TWO_POW_32) as u32,
                    _ => self.state.next_u32(),
                }
            }
            HalfPolicy::Low => {
                self.draws_consumed += 1;
                self.state.next_u64() as u32
            }
            HalfPolicy::High => {
                self.draws_consumed += 1;
                (self.state.next_u64() >> 32) as u32
            }
            HalfPolicy::Alternating => match self.pending_high.take() {
                Some(high) => high,
                None => {
                    self.draws_consumed += 1;
                    let v = self.state.next_u64();
                    self.pending_high = Some((v >> 32) as u32);
                    v as u32
                }
            },
        }
    }

    /// A value in [0, 1). MRG32k3a hands out its native output; everything
    /// else is `next_word32 / 2^32`.
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        if self.state.output_kind() == OutputKind::Unit {
            self.words_emitted += 1;
            self.draws_consumed += 1;
            self.state.next_u01()
        } else {
            word_to_unit(self.next_word32())
        }
    }

    pub fn fill(&mut self, out: &mut [u32]) {
        for w in out {
            *w = self.next_word32();
        }
    }
}

#[inline]
pub fn word_to_unit(w: u32) -> f64 {
    f64::from(w) / TWO_POW_32
}

/// Anything the battery can read words from.
pub trait WordSource {
    fn next_word32(&mut self) -> u32;

    fn next_unit(&mut self) -> f64 {
        word_to_unit(self.next_word32())
    }
}

impl WordSource for Word32Source {
    #[inline]
    fn next_word32(&mut self) -> u32 {
        Word32Source::next_word32(self)
    }

    #[inline]
    fn next_unit(&mut self) -> f64 {
        Word32Source::next_unit(self)
    }
}

/// Replays a fixed word sequence, cycling when exhausted.
#[derive(Debug, Clone)]
pub struct ReplaySource {
    words: Vec<u32>,
    pos: usize,
    pub emitted: u64,
}

impl ReplaySource {
    pub fn new(words: Vec<u32>) -> Self {
        assert!(!words.is_empty(), "replay source needs at least one word");
        Self { words, pos: 0, emitted: 0 }
    }
}

impl WordSource for ReplaySource {
    fn next_word32(&mut self) -> u32 {
        let w = self.words[self.pos];
        self.pos = (self.pos + 1) % self.words.len();
        self.emitted += 1;
        w
    }
}

/// Reads a word source bit by bit, most significant bit of each word first.
/// Leftover bits of a partially read word are dropped with the reader.
pub struct BitReader<'a, S: WordSource + ?Sized> {
    src: &'a mut S,
    word: u32,
    left: u32,
}

impl<'a, S: WordSource + ?Sized> BitReader<'a, S> {
    pub fn new(src: &'a mut S) -> Self {
        Self { src, word: 0, left: 0 }
    }

    #[inline]
    pub fn bit(&mut self) -> u32 {
        if self.left == 0 {
            self.word = self.src.next_word32();
            self.left = 32;
        }
        self.left -= 1;
        (self.word >> self.left) & 1
    }

    /// Next `n` bits (n <= 32) as an integer, first bit most significant.
    #[inline]
    pub fn bits(&mut self, n: u32) -> u32 {
        debug_assert!(n <= 32);
        if n == 32 && self.left == 0 {
            return self.src.next_word32();
        }
        let mut v = 0u64;
        for _ in 0..n {
            v = (v << 1) | u64::from(self.bit());
        }
        v as u32
    }
}
