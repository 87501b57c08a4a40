//! Desk-scale statistical battery.
//!
//! Each test consumes 32-bit words from a [`WordSource`] and reports one or
//! more p-values. A [`Battery`] runs the tests of a [`BatteryProfile`] in
//! declared order over a single stream.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bitstream::WordSource;
use crate::error::{Error, Result};

pub mod birthday;
pub mod close_pairs;
pub mod collision;
pub mod gap;
pub mod gf2;
pub mod lincomp;
pub mod linear;
pub mod profile;
pub mod pvalue;
pub mod random_walk;
pub mod rank;
pub mod serial;

pub use birthday::{Birthday, BirthdayParams};
pub use close_pairs::ClosePairsParams;
pub use collision::{Collision, CollisionParams};
pub use gap::GapParams;
pub use gf2::{gf2_rank, BitMatrix};
pub use lincomp::LinearComplexityParams;
pub use linear::berlekamp_massey;
pub use profile::BatteryProfile;
pub use pvalue::{chisq_pvalue, ks_pvalue, poisson_tail, PValue};
pub use random_walk::{RandomWalk, RandomWalkParams};
pub use rank::MatrixRankParams;
pub use serial::SerialParams;

/// Smallest expected count per chi-square class after merging.
pub const MIN_EXPECTED: f64 = 5.0;

/// `bits` bits of `word` after skipping its `drop` most significant bits.
#[inline]
pub fn slice_bits(word: u32, drop: u32, bits: u32) -> u32 {
    debug_assert!(bits >= 1 && drop + bits <= 32);
    ((u64::from(word) << drop & 0xffff_ffff) >> (32 - bits)) as u32
}

/// Failure family a test belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cluster {
    Collision,
    ClosePairs,
    RandomWalk,
    MatrixRank,
    LinearComplexity,
    Classical,
}

impl Cluster {
    pub const ALL: [Cluster; 6] = [
        Cluster::Collision,
        Cluster::ClosePairs,
        Cluster::RandomWalk,
        Cluster::MatrixRank,
        Cluster::LinearComplexity,
        Cluster::Classical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Cluster::Collision => "collision",
            Cluster::ClosePairs => "close-pairs",
            Cluster::RandomWalk => "random-walk",
            Cluster::MatrixRank => "matrix-rank",
            Cluster::LinearComplexity => "linear-complexity",
            Cluster::Classical => "classical",
        }
    }
}

impl fmt::Display for Cluster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Cluster {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Cluster::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown cluster `{s}`")))
    }
}

/// Classification of a p-value; ordered from best to worst.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Suspicious,
    Decisive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Suspicious => "suspicious",
            Verdict::Decisive => "decisive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pass" => Ok(Verdict::Pass),
            "suspicious" => Ok(Verdict::Suspicious),
            "decisive" | "decisive-fail" => Ok(Verdict::Decisive),
            _ => Err(Error::Parse(format!("unknown verdict `{s}`"))),
        }
    }
}

/// Classification thresholds on `min(p, 1 - p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub suspicious: f64,
    pub decisive: f64,
}

impl Thresholds {
    pub const DEFAULT_SUSPICIOUS: f64 = 1e-3;
    pub const DEFAULT_DECISIVE: f64 = 1e-15;

    pub fn new(suspicious: f64, decisive: f64) -> Result<Self> {
        if !(0.0 < decisive && decisive < suspicious && suspicious < 0.5) {
            return Err(Error::Config(format!(
                "thresholds must satisfy 0 < decisive < suspicious < 0.5 (got decisive={decisive:e}, suspicious={suspicious:e})"
            )));
        }
        Ok(Self { suspicious, decisive })
    }

    pub fn classify(&self, p: PValue) -> Verdict {
        let pf = p.two_sided();
        if pf < self.decisive {
            Verdict::Decisive
        } else if pf < self.suspicious {
            Verdict::Suspicious
        } else {
            Verdict::Pass
        }
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { suspicious: Self::DEFAULT_SUSPICIOUS, decisive: Self::DEFAULT_DECISIVE }
    }
}

pub fn classify(p: PValue, suspicious_alpha: f64, decisive_eps: f64) -> Result<Verdict> {
    Ok(Thresholds::new(suspicious_alpha, decisive_eps)?.classify(p))
}

/// One named p-value of a test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statistic {
    pub name: String,
    pub p: PValue,
}

impl Statistic {
    pub fn new(name: &str, p: PValue) -> Self {
        Self { name: name.to_owned(), p }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub test_id: u32,
    pub name: String,
    pub cluster: Cluster,
    pub params: String,
    pub statistics: Vec<Statistic>,
    pub verdict: Verdict,
}

impl TestResult {
    fn new(def: &TestDefinition, statistics: Vec<Statistic>, thresholds: &Thresholds) -> Self {
        let verdict = statistics.iter().map(|s| thresholds.classify(s.p)).max().unwrap_or(Verdict::Pass);
        Self {
            test_id: def.id,
            name: def.kind.name().to_owned(),
            cluster: def.kind.cluster(),
            params: def.kind.params(),
            statistics,
            verdict,
        }
    }
}

/// A test together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestKind {
    SerialFrequency(SerialParams),
    BirthdaySpacings(BirthdayParams),
    Collision(CollisionParams),
    ClosePairs(ClosePairsParams),
    RandomWalk(RandomWalkParams),
    MatrixRank(MatrixRankParams),
    LinearComplexity(LinearComplexityParams),
    Gap(GapParams),
}

impl TestKind {
    pub fn name(&self) -> &'static str {
        match self {
            TestKind::SerialFrequency(_) => "serial_frequency",
            TestKind::BirthdaySpacings(_) => "birthday_spacings",
            TestKind::Collision(_) => "collision",
            TestKind::ClosePairs(_) => "close_pairs",
            TestKind::RandomWalk(_) => "random_walk",
            TestKind::MatrixRank(_) => "matrix_rank",
            TestKind::LinearComplexity(_) => "linear_complexity",
            TestKind::Gap(_) => "gap",
        }
    }

    pub fn cluster(&self) -> Cluster {
        Self::cluster_of(self.name()).expect("every test name has a cluster")
    }

    /// Cluster of the test called `name`.
    pub fn cluster_of(name: &str) -> Option<Cluster> {
        Some(match name {
            "serial_frequency" | "gap" => Cluster::Classical,
            "birthday_spacings" | "collision" => Cluster::Collision,
            "close_pairs" => Cluster::ClosePairs,
            "random_walk" => Cluster::RandomWalk,
            "matrix_rank" => Cluster::MatrixRank,
            "linear_complexity" => Cluster::LinearComplexity,
            _ => return None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TestKind::SerialFrequency(p) => p.validate(),
            TestKind::BirthdaySpacings(p) => p.validate(),
            TestKind::Collision(p) => p.validate(),
            TestKind::ClosePairs(p) => p.validate(),
            TestKind::RandomWalk(p) => p.validate(),
            TestKind::MatrixRank(p) => p.validate(),
            TestKind::LinearComplexity(p) => p.validate(),
            TestKind::Gap(p) => p.validate(),
        }
    }

    /// 32-bit words the test consumes.
    pub fn words(&self) -> u64 {
        match self {
            TestKind::SerialFrequency(p) => p.words(),
            TestKind::BirthdaySpacings(p) => p.words(),
            TestKind::Collision(p) => p.words(),
            TestKind::ClosePairs(p) => p.words(),
            TestKind::RandomWalk(p) => p.words(),
            TestKind::MatrixRank(p) => p.words(),
            TestKind::LinearComplexity(p) => p.words(),
            TestKind::Gap(p) => p.words(),
        }
    }

    /// Parameter summary in the profile file syntax, e.g. `L=32 reps=1000`.
    pub fn params(&self) -> String {
        match self {
            TestKind::SerialFrequency(p) => format!("bits={} blocks={}", p.bits, p.blocks),
            TestKind::BirthdaySpacings(p) => {
                format!("n={} log2k={} drop={} reps={}", p.n, p.log2_cells, p.drop_bits, p.reps)
            }
            TestKind::Collision(p) => format!("n={} log2k={} drop={} reps={}", p.n, p.log2_urns, p.drop_bits, p.reps),
            TestKind::ClosePairs(p) => format!("n={} t={} reps={}", p.n, p.dim, p.reps),
            TestKind::RandomWalk(p) => format!("L={} reps={}", p.len, p.reps),
            TestKind::MatrixRank(p) => format!("L={} reps={}", p.side, p.reps),
            TestKind::LinearComplexity(p) => format!("M={} N={} bit={}", p.block_len, p.blocks, p.bit),
            TestKind::Gap(p) => format!("lo={} hi={} n={}", p.lo, p.hi, p.n),
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.name(), self.params())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestDefinition {
    pub id: u32,
    pub kind: TestKind,
}

/// A test with its null tables computed once.
#[derive(Debug)]
enum Prepared {
    Plain,
    Birthday(Birthday),
    Collision(Collision),
    RandomWalk(RandomWalk),
}

/// A validated profile ready to run on any number of streams.
#[derive(Debug)]
pub struct Battery {
    profile: BatteryProfile,
    prepared: Vec<Prepared>,
}

impl Battery {
    pub fn new(profile: BatteryProfile) -> Result<Self> {
        profile.validate()?;
        let prepared = profile
            .tests
            .iter()
            .map(|t| {
                Ok(match t.kind {
                    TestKind::BirthdaySpacings(p) => Prepared::Birthday(Birthday::new(p)?),
                    TestKind::Collision(p) => Prepared::Collision(Collision::new(p)?),
                    TestKind::RandomWalk(p) => Prepared::RandomWalk(RandomWalk::new(p)?),
                    _ => Prepared::Plain,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { profile, prepared })
    }

    pub fn profile(&self) -> &BatteryProfile {
        &self.profile
    }

    /// Total words one run consumes.
    pub fn words(&self) -> u64 {
        self.profile.words()
    }

    pub fn run<S: WordSource + ?Sized>(&self, src: &mut S, thresholds: &Thresholds) -> Result<Vec<TestResult>> {
        self.profile
            .tests
            .iter()
            .zip(&self.prepared)
            .map(|(def, prep)| {
                let stats = run_prepared(&def.kind, prep, src)?;
                Ok(TestResult::new(def, stats, thresholds))
            })
            .collect()
    }
}

fn run_prepared<S: WordSource + ?Sized>(kind: &TestKind, prep: &Prepared, src: &mut S) -> Result<Vec<Statistic>> {
    match (kind, prep) {
        (TestKind::BirthdaySpacings(_), Prepared::Birthday(b)) => b.run(src),
        (TestKind::Collision(_), Prepared::Collision(c)) => c.run(src),
        (TestKind::RandomWalk(_), Prepared::RandomWalk(w)) => w.run(src),
        (TestKind::SerialFrequency(p), _) => serial::run(src, p),
        (TestKind::ClosePairs(p), _) => close_pairs::run(src, p),
        (TestKind::MatrixRank(p), _) => rank::run(src, p),
        (TestKind::LinearComplexity(p), _) => lincomp::run(src, p),
        (TestKind::Gap(p), _) => gap::run(src, p),
        _ => unreachable!("prepared state matches its test kind"),
    }
}

/// Runs `profile` over `src` with the default thresholds.
pub fn run_battery<S: WordSource + ?Sized>(src: &mut S, profile: &BatteryProfile) -> Result<Vec<TestResult>> {
    Battery::new(profile.clone())?.run(src, &Thresholds::default())
}

/// Runs a single test as test 0 with the default thresholds.
pub fn run_test<S: WordSource + ?Sized>(src: &mut S, kind: TestKind) -> Result<TestResult> {
    kind.validate()?;
    let def = TestDefinition { id: 0, kind };
    let prep = match kind {
        TestKind::BirthdaySpacings(p) => Prepared::Birthday(Birthday::new(p)?),
        TestKind::Collision(p) => Prepared::Collision(Collision::new(p)?),
        TestKind::RandomWalk(p) => Prepared::RandomWalk(RandomWalk::new(p)?),
        _ => Prepared::Plain,
    };
    let stats = run_prepared(&kind, &prep, src)?;
    Ok(TestResult::new(&def, stats, &Thresholds::default()))
}

pub fn test_birthday_spacings<S: WordSource + ?Sized>(src: &mut S, n: usize, log2_cells: u32, reps: usize) -> Result<TestResult> {
    run_test(src, TestKind::BirthdaySpacings(BirthdayParams { n, log2_cells, drop_bits: 0, reps }))
}

pub fn test_collision<S: WordSource + ?Sized>(src: &mut S, n: usize, log2_urns: u32, reps: usize) -> Result<TestResult> {
    run_test(src, TestKind::Collision(CollisionParams { n, log2_urns, drop_bits: 0, reps }))
}

pub fn test_close_pairs<S: WordSource + ?Sized>(src: &mut S, n: usize, dim: usize, reps: usize) -> Result<TestResult> {
    run_test(src, TestKind::ClosePairs(ClosePairsParams { n, dim, reps }))
}

pub fn test_random_walk<S: WordSource + ?Sized>(src: &mut S, len: usize, reps: usize) -> Result<TestResult> {
    run_test(src, TestKind::RandomWalk(RandomWalkParams { len, reps }))
}

pub fn test_matrix_rank<S: WordSource + ?Sized>(src: &mut S, side: usize, reps: usize) -> Result<TestResult> {
    run_test(src, TestKind::MatrixRank(MatrixRankParams { side, reps }))
}

pub fn test_linear_complexity<S: WordSource + ?Sized>(src: &mut S, block_len: usize, blocks: usize) -> Result<TestResult> {
    run_test(src, TestKind::LinearComplexity(LinearComplexityParams { block_len, blocks, bit: 31 }))
}

pub fn test_gap<S: WordSource + ?Sized>(src: &mut S, lo: f64, hi: f64, n: usize) -> Result<TestResult> {
    run_test(src, TestKind::Gap(GapParams { lo, hi, n }))
}

pub fn test_serial_frequency<S: WordSource + ?Sized>(src: &mut S, bits: u32, blocks: u64) -> Result<TestResult> {
    run_test(src, TestKind::SerialFrequency(SerialParams { bits, blocks }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64) -> PValue {
        PValue::new(x).unwrap()
    }

    #[test]
    fn classify_examples() {
        let t = Thresholds::default();
        assert_eq!(t.classify(p(0.5)), Verdict::Pass);
        assert_eq!(t.classify(p(0.0005)), Verdict::Suspicious);
        assert_eq!(t.classify(p(0.9995)), Verdict::Suspicious);
        assert_eq!(t.classify(p(3e-16)), Verdict::Decisive);
        assert_eq!(t.classify(p(1.0)), Verdict::Decisive);
        assert_eq!(t.classify(p(0.001)), Verdict::Pass);
    }

    #[test]
    fn threshold_order_enforced() {
        assert!(classify(p(0.5), 1e-15, 1e-3).is_err());
        assert!(classify(p(0.5), 0.6, 1e-3).is_err());
        assert!(classify(p(0.5), 1e-3, 0.0).is_err());
    }

    #[test]
    fn slices() {
        assert_eq!(slice_bits(0xabcd_1234, 0, 32), 0xabcd_1234);
        assert_eq!(slice_bits(0xabcd_1234, 0, 4), 0xa);
        assert_eq!(slice_bits(0xabcd_1234, 4, 8), 0xbc);
        assert_eq!(slice_bits(0xabcd_1234, 28, 4), 0x4);
    }

    #[test]
    fn cluster_names_round_trip() {
        for c in Cluster::ALL {
            assert_eq!(c.name().parse::<Cluster>().unwrap(), c);
        }
    }
}
