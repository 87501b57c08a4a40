//! Battery profiles: named, versioned parameter tables.
//!
//! Text format, one `key = value` per line, `#` starts a comment:
//!
//! ```text
//! name = desk
//! revision = 1
//! test.1 = serial_frequency bits=1 blocks=4194304
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use super::{
    BirthdayParams, ClosePairsParams, CollisionParams, GapParams, LinearComplexityParams, MatrixRankParams,
    RandomWalkParams, SerialParams, TestDefinition, TestKind,
};
use crate::error::{Error, Result};

pub const BUILTIN: [(&str, &str); 3] = [
    ("smoke", include_str!("../../profiles/smoke.profile")),
    ("desk", include_str!("../../profiles/desk.profile")),
    ("deep", include_str!("../../profiles/deep.profile")),
];

/// Per-stream word budget of the desk profile.
pub const DESK_WORD_LIMIT: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct BatteryProfile {
    pub name: String,
    pub revision: u32,
    /// Sorted by id.
    pub tests: Vec<TestDefinition>,
}

impl BatteryProfile {
    pub fn builtin(name: &str) -> Result<Self> {
        let (_, text) = BUILTIN
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::Config(format!("unknown profile `{name}` (expected smoke, desk or deep)")))?;
        Self::parse(text)
    }

    /// A builtin profile name or the path of a profile file.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        if BUILTIN.iter().any(|(n, _)| *n == name_or_path) {
            return Self::builtin(name_or_path);
        }
        Self::load(name_or_path)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut name = None;
        let mut revision = None;
        let mut tests = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Config(format!("profile line {}: {msg}", lineno + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "name" => name = Some(value.to_owned()),
                "revision" => revision = Some(value.parse().map_err(|_| err(format!("bad revision `{value}`")))?),
                _ => {
                    let id: u32 = key
                        .strip_prefix("test.")
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| err(format!("unknown key `{key}`")))?;
                    let kind = parse_test(value).map_err(|e| err(e.to_string()))?;
                    if tests.insert(id, kind).is_some() {
                        return Err(err(format!("duplicate test id {id}")));
                    }
                }
            }
        }
        let profile = Self {
            name: name.ok_or_else(|| Error::Config("profile has no `name`".into()))?,
            revision: revision.unwrap_or(1),
            tests: tests.into_iter().map(|(id, kind)| TestDefinition { id, kind }).collect(),
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(|c: char| !(c.is_ascii_alphanumeric() || c == '-')) {
            return Err(Error::Config(format!("profile name `{}` must be alphanumeric or '-'", self.name)));
        }
        if self.tests.is_empty() {
            return Err(Error::Config(format!("profile `{}` has no tests", self.name)));
        }
        for w in self.tests.windows(2) {
            if w[0].id >= w[1].id {
                return Err(Error::Config(format!("profile `{}`: test ids not unique and increasing", self.name)));
            }
        }
        for t in &self.tests {
            t.kind.validate().map_err(|e| Error::Config(format!("profile `{}` test {}: {e}", self.name, t.id)))?;
        }
        if self.name == "desk" && self.words() > DESK_WORD_LIMIT {
            return Err(Error::Config(format!("desk profile consumes {} words, above {DESK_WORD_LIMIT}", self.words())));
        }
        Ok(())
    }

    pub fn words(&self) -> u64 {
        self.tests.iter().map(|t| t.kind.words()).sum()
    }

    pub fn test(&self, id: u32) -> Option<&TestDefinition> {
        self.tests.iter().find(|t| t.id == id)
    }
}

impl fmt::Display for BatteryProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "name = {}", self.name)?;
        writeln!(f, "revision = {}", self.revision)?;
        for t in &self.tests {
            writeln!(f, "test.{} = {}", t.id, t.kind)?;
        }
        Ok(())
    }
}

/// Parses `kind key=value ...`.
pub fn parse_test(spec: &str) -> Result<TestKind> {
    let mut parts = spec.split_whitespace();
    let kind = parts.next().ok_or_else(|| Error::Config("empty test definition".into()))?;
    let mut args: HashMap<&str, &str> = HashMap::new();
    for part in parts {
        let (k, v) = part.split_once('=').ok_or_else(|| Error::Config(format!("expected key=value, got `{part}`")))?;
        if args.insert(k, v).is_some() {
            return Err(Error::Config(format!("{kind}: `{k}` given twice")));
        }
    }
    let mut args = Args { kind, args };
    let test = match kind {
        "serial_frequency" => TestKind::SerialFrequency(SerialParams { bits: args.get("bits")?, blocks: args.get("blocks")? }),
        "birthday_spacings" => TestKind::BirthdaySpacings(BirthdayParams {
            n: args.get("n")?,
            log2_cells: args.get("log2k")?,
            drop_bits: args.get_or("drop", 0)?,
            reps: args.get("reps")?,
        }),
        "collision" => TestKind::Collision(CollisionParams {
            n: args.get("n")?,
            log2_urns: args.get("log2k")?,
            drop_bits: args.get_or("drop", 0)?,
            reps: args.get("reps")?,
        }),
        "close_pairs" => {
            TestKind::ClosePairs(ClosePairsParams { n: args.get("n")?, dim: args.get("t")?, reps: args.get("reps")? })
        }
        "random_walk" => TestKind::RandomWalk(RandomWalkParams { len: args.get("L")?, reps: args.get("reps")? }),
        "matrix_rank" => TestKind::MatrixRank(MatrixRankParams { side: args.get("L")?, reps: args.get("reps")? }),
        "linear_complexity" => TestKind::LinearComplexity(LinearComplexityParams {
            block_len: args.get("M")?,
            blocks: args.get("N")?,
            bit: args.get_or("bit", 31)?,
        }),
        "gap" => TestKind::Gap(GapParams { lo: args.get("lo")?, hi: args.get("hi")?, n: args.get("n")? }),
        _ => return Err(Error::Config(format!("unknown test `{kind}`"))),
    };
    args.finish()?;
    test.validate()?;
    Ok(test)
}

struct Args<'a> {
    kind: &'a str,
    args: HashMap<&'a str, &'a str>,
}

impl Args<'_> {
    fn get<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self.args.remove(key).ok_or_else(|| Error::Config(format!("{}: missing `{key}`", self.kind)))?;
        v.parse().map_err(|_| Error::Config(format!("{}: bad value `{v}` for `{key}`", self.kind)))
    }

    fn get_or<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        if self.args.contains_key(key) {
            self.get(key)
        } else {
            Ok(default)
        }
    }

    fn finish(self) -> Result<()> {
        match self.args.keys().min() {
            Some(k) => Err(Error::Config(format!("{}: unknown parameter `{k}`", self.kind))),
            None => Ok(()),
        }
    }
}
