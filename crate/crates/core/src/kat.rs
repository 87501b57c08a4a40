//! Known-answer vectors captured from the designers' reference code
//! (`tools/kat-oracle`), embedded so the CLI can re-verify a build.

use crate::error::{Error, Result};
use crate::prng::{GeneratorState, Mrg32k3a, Mt19937, Pcg32, SplitMix64, Xoshiro1024, Xoshiro256};
use crate::seeding::{self, SeedIndex};

const FILES: [(&str, &str); 9] = [
    ("splitmix64", include_str!("../kat/splitmix64.kat")),
    ("xoshiro256pp", include_str!("../kat/xoshiro256pp.kat")),
    ("xoshiro256ss", include_str!("../kat/xoshiro256ss.kat")),
    ("xoshiro1024ss", include_str!("../kat/xoshiro1024ss.kat")),
    ("mrg32k3a", include_str!("../kat/mrg32k3a.kat")),
    ("philox4x32", include_str!("../kat/philox4x32.kat")),
    ("pcg32", include_str!("../kat/pcg32.kat")),
    ("mt19937", include_str!("../kat/mt19937.kat")),
    ("mt19937_res53", include_str!("../kat/mt19937_res53.kat")),
];

/// One seeding and the reference outputs that follow it. Outputs are
/// widened to `u64`; unit-interval outputs are stored as their IEEE bits.
#[derive(Debug, Clone)]
pub struct KatSeeding {
    pub label: String,
    pub outputs: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct KatSet {
    pub name: &'static str,
    pub seedings: Vec<KatSeeding>,
}

pub fn names() -> impl Iterator<Item = &'static str> {
    FILES.iter().map(|(n, _)| *n)
}

pub fn load(name: &str) -> Result<KatSet> {
    let (name, text) = FILES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Argument(format!("no known-answer vectors for '{name}'")))?;
    parse(name, text)
}

pub fn load_all() -> Vec<KatSet> {
    FILES.iter().map(|(n, t)| parse(n, t).expect("embedded vectors parse")).collect()
}

fn parse(name: &'static str, text: &str) -> Result<KatSet> {
    let mut seedings: Vec<KatSeeding> = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        if let Some(label) = line.strip_prefix("seeding ") {
            seedings.push(KatSeeding { label: label.to_owned(), outputs: Vec::new() });
        } else {
            let v = u64::from_str_radix(line, 16).map_err(|e| Error::Parse(format!("{name}: {e}")))?;
            seedings
                .last_mut()
                .ok_or_else(|| Error::Parse(format!("{name}: output before seeding")))?
                .outputs
                .push(v);
        }
    }
    Ok(KatSet { name, seedings })
}

fn numbers(args: &str, radix: u32) -> Result<Vec<u64>> {
    args.split_whitespace()
        .map(|t| u64::from_str_radix(t, radix).map_err(|e| Error::Parse(format!("'{t}': {e}"))))
        .collect()
}

/// A generator positioned at the start of a seeding, plus how to read
/// its outputs in the vector file's representation.
pub struct KatStream {
    state: GeneratorState,
    res53: bool,
}

impl KatStream {
    pub fn next_value(&mut self) -> u64 {
        match &mut self.state {
            GeneratorState::Mt19937(g) if self.res53 => g.next_res53().to_bits(),
            s @ (GeneratorState::Xoshiro256pp(_)
            | GeneratorState::Xoshiro256ss(_)
            | GeneratorState::Xoshiro1024ss(_)
            | GeneratorState::SplitMix64(_)) => s.next_u64(),
            GeneratorState::Mrg32k3a(g) => g.next_u01().to_bits(),
            s => u64::from(s.next_u32()),
        }
    }
}

/// Builds the generator described by a seeding label.
pub fn stream_for(set: &str, label: &str) -> Result<KatStream> {
    let (how, args) = label.split_once(' ').unwrap_or((label, ""));
    let bad = || Error::Parse(format!("{set}: unsupported seeding '{label}'"));
    let index = || -> Result<SeedIndex> { Ok(SeedIndex(args.trim().parse().map_err(|_| bad())?)) };
    let state = match (set, how) {
        ("splitmix64", "state") => GeneratorState::SplitMix64(SplitMix64::new(numbers(args, 16)?[0])),
        ("xoshiro256pp" | "xoshiro256ss", "index") => {
            let g = seeding::derive_xoshiro256(index()?)?;
            if set == "xoshiro256pp" {
                GeneratorState::Xoshiro256pp(g)
            } else {
                GeneratorState::Xoshiro256ss(g)
            }
        }
        ("xoshiro256pp" | "xoshiro256ss", "state") => {
            let w: [u64; 4] = numbers(args, 10)?.try_into().map_err(|_| bad())?;
            let g = Xoshiro256::from_words(w)?;
            if set == "xoshiro256pp" {
                GeneratorState::Xoshiro256pp(g)
            } else {
                GeneratorState::Xoshiro256ss(g)
            }
        }
        ("xoshiro1024ss", "index") => GeneratorState::Xoshiro1024ss(seeding::derive_xoshiro1024(index()?)?),
        ("xoshiro1024ss", "state") => {
            let w: [u64; 16] = numbers(args, 10)?.try_into().map_err(|_| bad())?;
            GeneratorState::Xoshiro1024ss(Xoshiro1024::from_words(w, 0)?)
        }
        ("mrg32k3a", "state") => {
            let v = numbers(args, 10)?;
            if v.len() != 6 {
                return Err(bad());
            }
            let v: Vec<u32> = v.into_iter().map(|x| x as u32).collect();
            GeneratorState::Mrg32k3a(Mrg32k3a::new([v[0], v[1], v[2]], [v[3], v[4], v[5]])?)
        }
        ("mrg32k3a", "index") => GeneratorState::Mrg32k3a(seeding::derive_mrg32k3a(index()?)),
        ("philox4x32", "index") => GeneratorState::Philox4x32(seeding::derive_philox(index()?)),
        ("pcg32", "srandom") => {
            let v = numbers(args, 10)?;
            if v.len() != 2 {
                return Err(bad());
            }
            GeneratorState::Pcg32(Pcg32::srandom(v[0], v[1]))
        }
        ("pcg32", "index") => GeneratorState::Pcg32(seeding::derive_pcg32(index()?)),
        ("mt19937" | "mt19937_res53", "genrand") => {
            let s = u32::try_from(numbers(args, 10)?[0]).map_err(|_| bad())?;
            GeneratorState::Mt19937(Box::new(Mt19937::new(s)))
        }
        ("mt19937", "by_array") => {
            let key: Vec<u32> = numbers(args, 10)?.into_iter().map(|x| x as u32).collect();
            GeneratorState::Mt19937(Box::new(Mt19937::by_array(&key)))
        }
        _ => return Err(bad()),
    };
    Ok(KatStream { state, res53: set == "mt19937_res53" })
}

/// Result of replaying one seeding against its vectors.
#[derive(Debug, Clone)]
pub struct KatCheck {
    pub set: &'static str,
    pub label: String,
    pub compared: usize,
    /// Index of the first disagreeing output, if any.
    pub first_mismatch: Option<usize>,
}

impl KatCheck {
    pub fn passed(&self) -> bool {
        self.first_mismatch.is_none() && self.compared > 0
    }
}

pub fn verify(set: &KatSet) -> Result<Vec<KatCheck>> {
    set.seedings
        .iter()
        .map(|s| {
            let mut stream = stream_for(set.name, &s.label)?;
            let first_mismatch = s.outputs.iter().position(|&want| stream.next_value() != want);
            Ok(KatCheck { set: set.name, label: s.label.clone(), compared: s.outputs.len(), first_mismatch })
        })
        .collect()
}
