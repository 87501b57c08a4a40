//! Seed-index protocols: how a small user-facing integer becomes a full
//! generator state, and the canonical text rendering of that state.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prng::{
    ControlGenerator, GeneratorId, GeneratorState, Mrg32k3a, Mt19937, Pcg32, Philox4x32,
    SplitMix64, Xoshiro1024, Xoshiro256, MRG_M1, MRG_M2,
};

/// The integer a user calls a "seed": an index into a family of initial
/// states, not the state itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SeedIndex(pub u64);

impl fmt::Display for SeedIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Increment used by the `pcg32-srandom` comparison seeding (the stream
/// constant of the reference demo).
pub const PCG32_SRANDOM_SEQ: u64 = 54;

/// MT19937 seeded by index: `init_genrand` for 32-bit indices, and
/// `init_by_array([lo, hi])` beyond that.
pub fn mt19937_for_seed(seed: SeedIndex) -> Mt19937 {
    match u32::try_from(seed.0) {
        Ok(s) => Mt19937::new(s),
        Err(_) => Mt19937::by_array(&[seed.0 as u32, (seed.0 >> 32) as u32]),
    }
}

fn fill<const N: usize>(mut draw: impl FnMut() -> u64) -> [u64; N] {
    std::array::from_fn(|_| draw())
}

pub fn xoshiro256_from_source(draw: impl FnMut() -> u64) -> Result<Xoshiro256> {
    Xoshiro256::from_words(fill(draw))
}

pub fn xoshiro1024_from_source(draw: impl FnMut() -> u64) -> Result<Xoshiro1024> {
    Xoshiro1024::from_words(fill(draw), 0)
}

/// Four successive splitmix64 outputs.
pub fn derive_xoshiro256(seed: SeedIndex) -> Result<Xoshiro256> {
    let mut sm = SplitMix64::new(seed.0);
    xoshiro256_from_source(|| sm.next_u64())
}

/// Sixteen successive splitmix64 outputs, index 0.
pub fn derive_xoshiro1024(seed: SeedIndex) -> Result<Xoshiro1024> {
    let mut sm = SplitMix64::new(seed.0);
    xoshiro1024_from_source(|| sm.next_u64())
}

/// Maps six unit values to the two component triples with
/// `floor(u * m_i)`; an all-zero triple is redrawn from further values.
pub fn mrg32k3a_from_units(mut unit: impl FnMut() -> f64) -> Mrg32k3a {
    let mut triple = |m: i64| -> [u32; 3] { std::array::from_fn(|_| (unit() * m as f64).floor() as u32) };
    let mut x1 = triple(MRG_M1);
    let mut x2 = triple(MRG_M2);
    while x1 == [0; 3] {
        x1 = triple(MRG_M1);
    }
    while x2 == [0; 3] {
        x2 = triple(MRG_M2);
    }
    Mrg32k3a::new(x1, x2).expect("floor(u * m) with u < 1 stays below m")
}

/// Six 53-bit MT19937 doubles.
pub fn derive_mrg32k3a(seed: SeedIndex) -> Mrg32k3a {
    let mut mt = mt19937_for_seed(seed);
    mrg32k3a_from_units(|| mt.next_res53())
}

/// Key from two MT19937 words (first word into `key[0]`), counter zero.
pub fn derive_philox(seed: SeedIndex) -> Philox4x32 {
    let mut mt = mt19937_for_seed(seed);
    let key = [mt.next_u32(), mt.next_u32()];
    Philox4x32::new(key, [0; 4])
}

/// State = seed, increment 1, then one discarded draw.
pub fn derive_pcg32(seed: SeedIndex) -> Pcg32 {
    let mut g = Pcg32::from_parts(seed.0, 1).expect("1 is odd");
    g.next_u32();
    g
}

pub fn derive_pcg32_srandom(seed: SeedIndex) -> Pcg32 {
    Pcg32::srandom(seed.0, PCG32_SRANDOM_SEQ)
}

/// Odd RANDU state `2 (seed mod 2^30) + 1`.
pub fn derive_randu(seed: SeedIndex) -> ControlGenerator {
    ControlGenerator::randu(2 * (seed.0 % (1 << 30)) + 1).expect("odd value below 2^31")
}

/// First nonzero splitmix64 output.
pub fn derive_xorshift64(seed: SeedIndex) -> ControlGenerator {
    let mut sm = SplitMix64::new(seed.0);
    let x = std::iter::repeat_with(|| sm.next_u64()).find(|&x| x != 0).unwrap();
    ControlGenerator::xorshift64(x).expect("nonzero")
}

/// Initial state of `generator` for `seed` under its seeding protocol.
pub fn derive(generator: GeneratorId, seed: SeedIndex) -> Result<GeneratorState> {
    Ok(match generator {
        GeneratorId::Xoshiro256pp => GeneratorState::Xoshiro256pp(derive_xoshiro256(seed)?),
        GeneratorId::Xoshiro256ss => GeneratorState::Xoshiro256ss(derive_xoshiro256(seed)?),
        GeneratorId::Xoshiro1024ss => GeneratorState::Xoshiro1024ss(derive_xoshiro1024(seed)?),
        GeneratorId::Mrg32k3a => GeneratorState::Mrg32k3a(derive_mrg32k3a(seed)),
        GeneratorId::Philox4x32 => GeneratorState::Philox4x32(derive_philox(seed)),
        GeneratorId::Pcg32 => GeneratorState::Pcg32(derive_pcg32(seed)),
        GeneratorId::Pcg32Srandom => GeneratorState::Pcg32(derive_pcg32_srandom(seed)),
        GeneratorId::SplitMix64 => GeneratorState::SplitMix64(SplitMix64::new(seed.0)),
        GeneratorId::Mt19937 => GeneratorState::Mt19937(Box::new(mt19937_for_seed(seed))),
        GeneratorId::Randu => GeneratorState::Control(derive_randu(seed)),
        GeneratorId::Xorshift64 => GeneratorState::Control(derive_xorshift64(seed)),
    })
}

/// Canonical rendering of a generator state: the layout name followed by
/// every field as fixed-width lowercase hex, space separated, in
/// declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RenderedState(String);

impl RenderedState {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn parse(&self) -> Result<GeneratorState> {
        parse_state(&self.0)
    }
}

impl fmt::Display for RenderedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for RenderedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_state(s)?;
        Ok(Self(s.to_owned()))
    }
}

pub fn render_state(state: &GeneratorState) -> RenderedState {
    use std::fmt::Write;

    let mut out = String::from(state.kind_name());
    let w64 = |out: &mut String, v: u64| write!(out, " {v:016x}").unwrap();
    match state {
        GeneratorState::Xoshiro256pp(g) | GeneratorState::Xoshiro256ss(g) => {
            g.words().iter().for_each(|&w| w64(&mut out, w));
        }
        GeneratorState::Xoshiro1024ss(g) => {
            g.words().iter().for_each(|&w| w64(&mut out, w));
            write!(out, " {:x}", g.index()).unwrap();
        }
        GeneratorState::Mrg32k3a(g) => {
            for w in g.x1().iter().chain(g.x2().iter()) {
                write!(out, " {w:08x}").unwrap();
            }
        }
        GeneratorState::Philox4x32(g) => {
            let (key, ctr) = (g.key(), g.counter());
            for w in key.iter().chain(ctr.iter()).chain(g.buffer().iter()) {
                write!(out, " {w:08x}").unwrap();
            }
            write!(out, " {:x}", g.buffer_index()).unwrap();
        }
        GeneratorState::Pcg32(g) => {
            w64(&mut out, g.state());
            w64(&mut out, g.inc());
        }
        GeneratorState::SplitMix64(g) => w64(&mut out, g.x),
        GeneratorState::Mt19937(g) => {
            for w in g.words() {
                write!(out, " {w:08x}").unwrap();
            }
            write!(out, " {:03x}", g.index()).unwrap();
        }
        GeneratorState::Control(g) => w64(&mut out, g.state()),
    }
    RenderedState(out)
}

struct Fields<'a> {
    iter: std::str::SplitAsciiWhitespace<'a>,
    kind: &'a str,
}

impl Fields<'_> {
    fn hex(&mut self, width: usize) -> Result<u64> {
        let tok = self
            .iter
            .next()
            .ok_or_else(|| Error::Parse(format!("{}: missing field", self.kind)))?;
        if tok.len() != width || !tok.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
            return Err(Error::Parse(format!("{}: bad field '{tok}'", self.kind)));
        }
        u64::from_str_radix(tok, 16).map_err(|e| Error::Parse(format!("{}: {e}", self.kind)))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(self.hex(8)? as u32)
    }

    fn finish(mut self) -> Result<()> {
        match self.iter.next() {
            None => Ok(()),
            Some(extra) => Err(Error::Parse(format!("{}: trailing field '{extra}'", self.kind))),
        }
    }
}

/// Inverse of [`render_state`].
pub fn parse_state(text: &str) -> Result<GeneratorState> {
    let mut iter = text.split_ascii_whitespace();
    let kind = iter.next().ok_or_else(|| Error::Parse("empty state".into()))?;
    let mut f = Fields { iter, kind };
    let state = match kind {
        "xoshiro256pp" | "xoshiro256ss" => {
            let mut s = [0u64; 4];
            for w in &mut s {
                *w = f.hex(16)?;
            }
            let g = Xoshiro256::from_words(s)?;
            if kind == "xoshiro256pp" {
                GeneratorState::Xoshiro256pp(g)
            } else {
                GeneratorState::Xoshiro256ss(g)
            }
        }
        "xoshiro1024ss" => {
            let mut s = [0u64; 16];
            for w in &mut s {
                *w = f.hex(16)?;
            }
            let p = f.hex(1)? as usize;
            GeneratorState::Xoshiro1024ss(Xoshiro1024::from_words(s, p)?)
        }
        "mrg32k3a" => {
            let x1 = [f.u32()?, f.u32()?, f.u32()?];
            let x2 = [f.u32()?, f.u32()?, f.u32()?];
            GeneratorState::Mrg32k3a(Mrg32k3a::new(x1, x2)?)
        }
        "philox4x32" => {
            let key = [f.u32()?, f.u32()?];
            let ctr = [f.u32()?, f.u32()?, f.u32()?, f.u32()?];
            let buf = [f.u32()?, f.u32()?, f.u32()?, f.u32()?];
            let idx = f.hex(1)? as usize;
            GeneratorState::Philox4x32(Philox4x32::from_parts(key, ctr, buf, idx)?)
        }
        "pcg32" => {
            let state = f.hex(16)?;
            let inc = f.hex(16)?;
            GeneratorState::Pcg32(Pcg32::from_parts(state, inc)?)
        }
        "splitmix64" => GeneratorState::SplitMix64(SplitMix64::new(f.hex(16)?)),
        "mt19937" => {
            let mut mt = [0u32; 624];
            for w in &mut mt {
                *w = f.u32()?;
            }
            let idx = f.hex(3)? as usize;
            let g = Mt19937::from_parts(mt, idx)
                .ok_or_else(|| Error::Parse(format!("mt19937: index {idx} out of range")))?;
            GeneratorState::Mt19937(Box::new(g))
        }
        "randu" => GeneratorState::Control(ControlGenerator::randu(f.hex(16)?)?),
        "xorshift64" => GeneratorState::Control(ControlGenerator::xorshift64(f.hex(16)?)?),
        other => return Err(Error::Parse(format!("unknown state kind '{other}'"))),
    };
    f.finish()?;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xoshiro_seed_zero_is_splitmix_prefix() {
        let mut sm = SplitMix64::new(0);
        let expect = [sm.next_u64(), sm.next_u64(), sm.next_u64(), sm.next_u64()];
        assert_eq!(derive_xoshiro256(SeedIndex(0)).unwrap().words(), expect);
        assert_eq!(expect[0], 0xe220_a839_7b1d_cdaf);
        assert_ne!(derive_xoshiro256(SeedIndex(1)).unwrap(), derive_xoshiro256(SeedIndex(0)).unwrap());
    }

    #[test]
    fn all_zero_fill_is_an_error() {
        assert!(xoshiro256_from_source(|| 0).is_err());
        assert!(xoshiro1024_from_source(|| 0).is_err());
        let mut n = 0u64;
        let g = xoshiro1024_from_source(|| {
            n += 1;
            if n == 16 { 1 } else { 0 }
        })
        .unwrap();
        assert_eq!(g.index(), 0);
    }

    #[test]
    fn mrg_rejects_zero_triple() {
        let values = [0.0, 0.0, 0.0, 0.5, 0.5, 0.5, 0.25, 0.25, 0.25];
        let mut it = values.into_iter();
        let g = mrg32k3a_from_units(|| it.next().unwrap());
        let half_m2 = (MRG_M2 / 2) as u32;
        assert_eq!(g.x2(), [half_m2; 3]);
        assert_eq!(g.x1(), [(MRG_M1 as f64 * 0.25) as u32; 3]);
    }

    #[test]
    fn mrg_seed_zero_from_res53() {
        let mut mt = Mt19937::new(0);
        let u: Vec<f64> = (0..6).map(|_| mt.next_res53()).collect();
        let g = derive_mrg32k3a(SeedIndex(0));
        let x1: Vec<u32> = u[..3].iter().map(|u| (u * MRG_M1 as f64).floor() as u32).collect();
        let x2: Vec<u32> = u[3..].iter().map(|u| (u * MRG_M2 as f64).floor() as u32).collect();
        assert_eq!(g.x1().to_vec(), x1);
        assert_eq!(g.x2().to_vec(), x2);
    }

    #[test]
    fn philox_key_from_mt() {
        let mut mt = Mt19937::new(0);
        let g = derive_philox(SeedIndex(0));
        assert_eq!(g.key(), [mt.next_u32(), mt.next_u32()]);
        assert_eq!(g.counter(), [0; 4]);
        assert_eq!(derive_philox(SeedIndex(9)), derive_philox(SeedIndex(9)));
    }

    #[test]
    fn pcg_warm_up() {
        let g = derive_pcg32(SeedIndex(0));
        assert_eq!((g.state(), g.inc()), (1, 1));
        // First kept output from state 1: ((1 >> 18) ^ 1) >> 27 = 0, rot 0.
        let mut g = g;
        assert_eq!(g.next_u32(), 0);
        assert_eq!(g.state(), 6_364_136_223_846_793_006);
    }

    #[test]
    fn large_seed_uses_by_array() {
        let a = mt19937_for_seed(SeedIndex(1 << 32));
        let b = mt19937_for_seed(SeedIndex(0));
        assert_ne!(a.words(), b.words());
    }

    #[test]
    fn render_examples() {
        let g = GeneratorState::Pcg32(Pcg32::from_parts(1, 1).unwrap());
        assert_eq!(render_state(&g).as_str(), "pcg32 0000000000000001 0000000000000001");
        let x = GeneratorState::Xoshiro256pp(derive_xoshiro256(SeedIndex(0)).unwrap());
        let r = render_state(&x);
        let words: Vec<&str> = r.as_str().split(' ').collect();
        assert_eq!(words.len(), 5);
        assert!(words[1..].iter().all(|w| w.len() == 16));
        assert_eq!(words[1], "e220a8397b1dcdaf");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_state("").is_err());
        assert!(parse_state("pcg32 1 1").is_err());
        assert!(parse_state("pcg32 0000000000000001 0000000000000002").is_err());
        assert!(parse_state("pcg32 0000000000000001 0000000000000001 00").is_err());
        assert!(parse_state("nope 00").is_err());
    }
}
