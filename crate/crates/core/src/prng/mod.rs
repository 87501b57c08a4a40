//! Bit-exact generator implementations.
//!
//! Every generator here follows its designers' reference code and is gated
//! on known-answer vectors captured from that code (see [`crate::kat`]).

mod control;
mod mrg32k3a;
mod mt19937;
mod pcg;
mod philox;
mod splitmix;
mod xoshiro;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use control::ControlGenerator;
pub use mrg32k3a::{Mrg32k3a, M1 as MRG_M1, M2 as MRG_M2, NORM as MRG_NORM};
pub use mt19937::{res53, Mt19937};
pub use pcg::Pcg32;
pub use philox::{philox4x32_10, philox4x32_rounds, Philox4x32};
pub use splitmix::SplitMix64;
pub use xoshiro::{Xoshiro1024, Xoshiro256};

use crate::error::Error;

/// Native output resolution of a generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    Bits64,
    Bits32,
    /// A binary64 value in (0, 1) (MRG32k3a).
    Unit,
}

/// Generators known to the laboratory, addressed by their CLI names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum GeneratorId {
    Xoshiro256pp,
    Xoshiro256ss,
    Xoshiro1024ss,
    Mrg32k3a,
    Philox4x32,
    Pcg32,
    /// PCG32 seeded through the reference `srandom` protocol.
    Pcg32Srandom,
    SplitMix64,
    Mt19937,
    Randu,
    Xorshift64,
}

impl GeneratorId {
    pub const ALL: [GeneratorId; 11] = [
        Self::Xoshiro256pp,
        Self::Xoshiro256ss,
        Self::Xoshiro1024ss,
        Self::Mrg32k3a,
        Self::Philox4x32,
        Self::Pcg32,
        Self::Pcg32Srandom,
        Self::SplitMix64,
        Self::Mt19937,
        Self::Randu,
        Self::Xorshift64,
    ];

    /// The six generators under study.
    pub const STUDIED: [GeneratorId; 6] = [
        Self::Xoshiro256pp,
        Self::Xoshiro256ss,
        Self::Xoshiro1024ss,
        Self::Mrg32k3a,
        Self::Philox4x32,
        Self::Pcg32,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Xoshiro256pp => "xoshiro256pp",
            Self::Xoshiro256ss => "xoshiro256ss",
            Self::Xoshiro1024ss => "xoshiro1024ss",
            Self::Mrg32k3a => "mrg32k3a",
            Self::Philox4x32 => "philox4x32",
            Self::Pcg32 => "pcg32",
            Self::Pcg32Srandom => "pcg32-srandom",
            Self::SplitMix64 => "splitmix64",
            Self::Mt19937 => "mt19937",
            Self::Randu => "randu",
            Self::Xorshift64 => "xorshift64",
        }
    }

    pub fn output_kind(self) -> OutputKind {
        match self {
            Self::Xoshiro256pp | Self::Xoshiro256ss | Self::Xoshiro1024ss | Self::SplitMix64 => {
                OutputKind::Bits64
            }
            Self::Mrg32k3a => OutputKind::Unit,
            _ => OutputKind::Bits32,
        }
    }

    pub fn is_64bit(self) -> bool {
        self.output_kind() == OutputKind::Bits64
    }

    /// Default number of seed indices in a campaign: 1001 for 64-bit
    /// generators (tested on both halves) and 2002 otherwise.
    pub fn default_stream_count(self) -> u64 {
        if self.is_64bit() {
            1001
        } else {
            2002
        }
    }
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown generator '{s}'")))
    }
}

impl From<GeneratorId> for String {
    fn from(g: GeneratorId) -> Self {
        g.name().to_owned()
    }
}

impl TryFrom<String> for GeneratorId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// The exact mutable state of one generator instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorState {
    Xoshiro256pp(Xoshiro256),
    Xoshiro256ss(Xoshiro256),
    Xoshiro1024ss(Xoshiro1024),
    Mrg32k3a(Mrg32k3a),
    Philox4x32(Philox4x32),
    Pcg32(Pcg32),
    SplitMix64(SplitMix64),
    Mt19937(Box<Mt19937>),
    Control(ControlGenerator),
}

impl GeneratorState {
    /// Identifier of the state layout. Both PCG32 seedings share `pcg32`.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Xoshiro256pp(_) => "xoshiro256pp",
            Self::Xoshiro256ss(_) => "xoshiro256ss",
            Self::Xoshiro1024ss(_) => "xoshiro1024ss",
            Self::Mrg32k3a(_) => "mrg32k3a",
            Self::Philox4x32(_) => "philox4x32",
            Self::Pcg32(_) => "pcg32",
            Self::SplitMix64(_) => "splitmix64",
            Self::Mt19937(_) => "mt19937",
            Self::Control(ControlGenerator::Randu(_)) => "randu",
            Self::Control(ControlGenerator::RawXorshift64(_)) => "xorshift64",
        }
    }

    pub fn output_kind(&self) -> OutputKind {
        match self {
            Self::Xoshiro256pp(_) | Self::Xoshiro256ss(_) | Self::Xoshiro1024ss(_) | Self::SplitMix64(_) => {
                OutputKind::Bits64
            }
            Self::Mrg32k3a(_) => OutputKind::Unit,
            _ => OutputKind::Bits32,
        }
    }

    /// Next 64-bit output. Only valid for [`OutputKind::Bits64`].
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        match self {
            Self::Xoshiro256pp(g) => g.next_plusplus(),
            Self::Xoshiro256ss(g) => g.next_starstar(),
            Self::Xoshiro1024ss(g) => g.next_starstar(),
            Self::SplitMix64(g) => g.next_u64(),
            _ => unreachable!("{} has no 64-bit output", self.kind_name()),
        }
    }

    /// Next native 32-bit output. Only valid for [`OutputKind::Bits32`].
    #[inline]
    pub fn next_u32(&mut self) -> u32 {
        match self {
            Self::Philox4x32(g) => g.next_u32(),
            Self::Pcg32(g) => g.next_u32(),
            Self::Mt19937(g) => g.next_u32(),
            Self::Control(g) => g.next_u32(),
            _ => unreachable!("{} has no 32-bit output", self.kind_name()),
        }
    }

    /// Next native unit-interval output. Only valid for [`OutputKind::Unit`].
    #[inline]
    pub fn next_u01(&mut self) -> f64 {
        match self {
            Self::Mrg32k3a(g) => g.next_u01(),
            _ => unreachable!("{} has no unit-interval output", self.kind_name()),
        }
    }
}
