//! Aggregation of report-file sets into failure histograms and success
//! tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::battery::{Cluster, Thresholds};
use crate::bitstream::HalfPolicy;
use crate::campaign::{is_temporary, StreamReport};
use crate::error::{Error, Result};
use crate::prng::GeneratorId;

/// Per (generator, test) tallies over battery runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestTally {
    pub generator: GeneratorId,
    pub test_id: u32,
    pub test_name: String,
    pub cluster: Cluster,
    /// Runs with at least one statistic below the suspicious threshold
    /// (decisive ones included).
    pub suspicious: u64,
    /// Runs with at least one statistic below the decisive threshold.
    pub decisive: u64,
    /// Runs that include the test.
    pub streams: u64,
    /// Statistic lines seen, and how many of them were suspicious.
    pub statistics: u64,
    pub suspicious_statistics: u64,
}

/// One battery run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub generator: GeneratorId,
    pub seed_index: u64,
    pub half: HalfPolicy,
    /// Smallest `min(p, 1 - p)` over all statistics of the run.
    pub worst: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileError {
    pub file: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateSummary {
    pub thresholds: Thresholds,
    pub profiles: Vec<String>,
    /// Distinct seeds per generator.
    pub stream_counts: BTreeMap<GeneratorId, u64>,
    /// Battery runs per generator.
    pub run_counts: BTreeMap<GeneratorId, u64>,
    pub tests: Vec<TestTally>,
    pub runs: Vec<RunRecord>,
    pub errors: Vec<FileError>,
}

impl AggregateSummary {
    fn empty(thresholds: Thresholds) -> Self {
        Self {
            thresholds,
            profiles: Vec::new(),
            stream_counts: BTreeMap::new(),
            run_counts: BTreeMap::new(),
            tests: Vec::new(),
            runs: Vec::new(),
            errors: Vec::new(),
        }
    }

    /// Tallies already-parsed reports, reclassified under `thresholds`.
    pub fn from_reports(reports: &[StreamReport], thresholds: Thresholds) -> Self {
        let mut summary = Self::empty(thresholds);
        let mut tallies: BTreeMap<(GeneratorId, u32), TestTally> = BTreeMap::new();
        let mut seeds: BTreeMap<GeneratorId, BTreeSet<u64>> = BTreeMap::new();
        let mut profiles = BTreeSet::new();
        for r in reports {
            let h = &r.header;
            profiles.insert(h.profile.clone());
            seeds.entry(h.generator).or_default().insert(h.seed_index);
            *summary.run_counts.entry(h.generator).or_default() += 1;
            let mut worst = 0.5f64;
            for t in &r.results {
                let tally = tallies.entry((h.generator, t.test_id)).or_insert_with(|| TestTally {
                    generator: h.generator,
                    test_id: t.test_id,
                    test_name: t.name.clone(),
                    cluster: t.cluster,
                    suspicious: 0,
                    decisive: 0,
                    streams: 0,
                    statistics: 0,
                    suspicious_statistics: 0,
                });
                tally.streams += 1;
                let test_worst = t.statistics.iter().map(|s| s.p.two_sided()).fold(0.5, f64::min);
                tally.statistics += t.statistics.len() as u64;
                tally.suspicious_statistics +=
                    t.statistics.iter().filter(|s| s.p.two_sided() < thresholds.suspicious).count() as u64;
                tally.suspicious += u64::from(test_worst < thresholds.suspicious);
                tally.decisive += u64::from(test_worst < thresholds.decisive);
                worst = worst.min(test_worst);
            }
            summary.runs.push(RunRecord {
                generator: h.generator,
                seed_index: h.seed_index,
                half: h.half,
                worst,
                passed: worst >= thresholds.suspicious,
            });
        }
        summary.profiles = profiles.into_iter().collect();
        summary.stream_counts = seeds.into_iter().map(|(g, s)| (g, s.len() as u64)).collect();
        summary.tests = tallies.into_values().collect();
        summary.runs.sort_by(|a, b| {
            (a.generator, a.seed_index, a.half).cmp(&(b.generator, b.seed_index, b.half))
        });
        summary
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

/// Reads every `*.txt` report in `dir` (sorted by name) and tallies them.
/// Unreadable or malformed files are listed in `errors`. Reports from
/// several profiles are an error unless `allow_mixed`.
pub fn aggregate(dir: impl AsRef<Path>, thresholds: Thresholds, allow_mixed: bool) -> Result<AggregateSummary> {
    let dir = dir.as_ref();
    let thresholds = Thresholds::new(thresholds.suspicious, thresholds.decisive)?;
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::file(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            p.extension().is_some_and(|e| e == "txt") && !is_temporary(&name) && p.is_file()
        })
        .collect();
    files.sort();
    let mut reports = Vec::new();
    let mut errors = Vec::new();
    let mut seen = BTreeSet::new();
    for path in &files {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let parsed = fs::read_to_string(path)
            .map_err(|e| e.to_string())
            .and_then(|t| StreamReport::parse(&t).map_err(|e| e.to_string()));
        match parsed {
            Ok(r) => {
                let key = (r.header.generator, r.header.seed_index, r.header.half, r.header.profile.clone());
                if seen.insert(key) {
                    reports.push(r);
                } else {
                    errors.push(FileError { file: name, message: "duplicate battery run".into() });
                }
            }
            Err(message) => errors.push(FileError { file: name, message }),
        }
    }
    let mut summary = AggregateSummary::from_reports(&reports, thresholds);
    summary.errors = errors;
    if summary.profiles.len() > 1 && !allow_mixed {
        return Err(Error::Config(format!(
            "reports from several profiles ({}); pass --allow-mixed to combine them",
            summary.profiles.join(", ")
        )));
    }
    Ok(summary)
}

/// Percentage with a fixed number of decimals, e.g. `69.78%`.
pub fn percent(rate: f64, decimals: usize) -> String {
    format!("{:.*}%", decimals, rate * 100.0)
}

/// One row of the failure histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub generator: GeneratorId,
    pub test_id: u32,
    pub test_name: String,
    pub cluster: Cluster,
    pub suspicious_count: u64,
    pub decisive_count: u64,
    pub streams: u64,
    pub suspicious_rate: f64,
    pub decisive_rate: f64,
}

pub fn failure_histogram(summary: &AggregateSummary) -> Vec<HistogramRow> {
    summary
        .tests
        .iter()
        .map(|t| {
            let n = t.streams.max(1) as f64;
            HistogramRow {
                generator: t.generator,
                test_id: t.test_id,
                test_name: t.test_name.clone(),
                cluster: t.cluster,
                suspicious_count: t.suspicious,
                decisive_count: t.decisive,
                streams: t.streams,
                suspicious_rate: t.suspicious as f64 / n,
                decisive_rate: t.decisive as f64 / n,
            }
        })
        .collect()
}

pub fn histogram_csv(rows: &[HistogramRow]) -> String {
    let generators: BTreeSet<GeneratorId> = rows.iter().map(|r| r.generator).collect();
    let multi = generators.len() > 1;
    let mut out = String::new();
    if multi {
        out.push_str("generator,");
    }
    out.push_str("test_id,test_name,cluster,suspicious_count,decisive_count,streams,suspicious_rate,decisive_rate\n");
    for r in rows {
        if multi {
            let _ = write!(out, "{},", r.generator);
        }
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.test_id,
            r.test_name,
            r.cluster,
            r.suspicious_count,
            r.decisive_count,
            r.streams,
            percent(r.suspicious_rate, 1),
            percent(r.decisive_rate, 1)
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessRow {
    pub generator: GeneratorId,
    pub batteries: u64,
    pub failed_batteries: u64,
    pub streams: u64,
    /// Streams passing every tested half, over all streams.
    pub overall: f64,
    /// Pass rate of high-half runs; 64-bit generators only.
    pub msb: Option<f64>,
    /// Pass rate of low-half runs; 64-bit generators only.
    pub lsb: Option<f64>,
    pub resistant: u64,
    pub unusable: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessTable {
    /// A run fails when some statistic has `min(p, 1 - p)` below this.
    pub fail_below: f64,
    pub rows: Vec<SuccessRow>,
}

/// Success table where a run fails on any suspicious statistic.
pub fn success_table(summary: &AggregateSummary) -> SuccessTable {
    success_table_at(summary, summary.thresholds.suspicious)
}

fn success_table_at(summary: &AggregateSummary, fail_below: f64) -> SuccessTable {
    let mut per: BTreeMap<GeneratorId, BTreeMap<u64, Vec<(HalfPolicy, bool)>>> = BTreeMap::new();
    for r in &summary.runs {
        per.entry(r.generator).or_default().entry(r.seed_index).or_default().push((r.half, r.worst >= fail_below));
    }
    let rows = per
        .into_iter()
        .map(|(generator, streams)| {
            let runs: Vec<(HalfPolicy, bool)> = streams.values().flatten().copied().collect();
            let half_rate = |h: HalfPolicy| {
                let of: Vec<bool> = runs.iter().filter(|r| r.0 == h).map(|r| r.1).collect();
                (generator.is_64bit() && !of.is_empty())
                    .then(|| of.iter().filter(|&&p| p).count() as f64 / of.len() as f64)
            };
            let resistant = streams.values().filter(|v| v.iter().all(|r| r.1)).count() as u64;
            let unusable = streams.values().filter(|v| v.iter().all(|r| !r.1)).count() as u64;
            SuccessRow {
                generator,
                batteries: runs.len() as u64,
                failed_batteries: runs.iter().filter(|r| !r.1).count() as u64,
                streams: streams.len() as u64,
                overall: resistant as f64 / streams.len() as f64,
                msb: half_rate(HalfPolicy::High),
                lsb: half_rate(HalfPolicy::Low),
                resistant,
                unusable,
            }
        })
        .collect();
    SuccessTable { fail_below, rows }
}

impl SuccessTable {
    pub fn row(&self, generator: GeneratorId) -> Option<&SuccessRow> {
        self.rows.iter().find(|r| r.generator == generator)
    }

    /// Text rendering with one row per generator.
    pub fn render(&self) -> String {
        let rate = |r: Option<f64>| r.map_or_else(|| "-".to_owned(), |r| percent(r, 2));
        let mut out = format!(
            "{:<14} {:>8} {:>8} {:>9} {:>9} {:>9} {:>9} {:>9}\n",
            "generator", "runs", "failed", "overall", "MSB", "LSB", "resistant", "unusable"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<14} {:>8} {:>8} {:>9} {:>9} {:>9} {:>9} {:>9}",
                r.generator.name(),
                r.batteries,
                r.failed_batteries,
                percent(r.overall, 2),
                rate(r.msb),
                rate(r.lsb),
                r.resistant,
                r.unusable
            );
        }
        out
    }
}

/// Success tables before and after ignoring all but the most extreme
/// p-values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilteredReport {
    pub eps: f64,
    pub unfiltered: SuccessTable,
    pub filtered: SuccessTable,
}

impl FilteredReport {
    pub fn render(&self) -> String {
        let mut out = format!("Counting only p-values with min(p, 1-p) < {:e}:\n", self.eps);
        out.push_str(&self.filtered.render());
        out.push_str("Change in failed runs:\n");
        for (u, f) in self.unfiltered.rows.iter().zip(&self.filtered.rows) {
            let _ = writeln!(
                out,
                "{:<14} {} -> {} ({:+})",
                u.generator.name(),
                u.failed_batteries,
                f.failed_batteries,
                f.failed_batteries as i64 - u.failed_batteries as i64
            );
        }
        out
    }
}

pub fn extreme_filter_report(summary: &AggregateSummary, eps: f64) -> Result<FilteredReport> {
    if !(0.0..summary.thresholds.suspicious).contains(&eps) {
        return Err(Error::Argument(format!(
            "filter eps {eps:e} must be in [0, {:e})",
            summary.thresholds.suspicious
        )));
    }
    Ok(FilteredReport { eps, unfiltered: success_table(summary), filtered: success_table_at(summary, eps) })
}

/// Chance that at least one of `num_statistics` independent statistics
/// falls in a tail of mass `per_test_tail`.
pub fn multiple_testing_probability(num_statistics: u64, per_test_tail: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&per_test_tail) {
        return Err(Error::Argument(format!("tail probability {per_test_tail} outside [0, 1]")));
    }
    let n = i32::try_from(num_statistics).map_or(f64::from(i32::MAX), f64::from);
    Ok(-(n * (-per_test_tail).ln_1p()).exp_m1())
}

/// Minimum state bits a generator needs to pass each TestU01 battery.
pub const HEADROOM_TABLE: [(&str, u32); 3] = [("smallcrush", 32), ("crush", 35), ("bigcrush", 36)];

pub fn headroom(state_bits: u32, battery: &str) -> Result<i64> {
    let key = battery.to_ascii_lowercase();
    HEADROOM_TABLE
        .iter()
        .find(|(b, _)| *b == key)
        .map(|(_, need)| i64::from(state_bits) - i64::from(*need))
        .ok_or_else(|| Error::Argument(format!("unknown battery `{battery}` (smallcrush, crush or bigcrush)")))
}

/// How each cluster relates to the TestU01 BigCrush families named in
/// histograms. Informative only: no test here is claimed to equal a
/// BigCrush test.
pub const CLUSTER_MAP_VERSION: u32 = 1;
pub const CLUSTER_MAP: [(Cluster, &str, &str); 6] = [
    (
        Cluster::Collision,
        "BirthdaySpacings, CollisionOver",
        "collision counts non-overlapping cells, a simplification of CollisionOver's overlapping tuples",
    ),
    (Cluster::ClosePairs, "ClosePairs, ClosePairsBitMatch", "minimum torus distance only"),
    (Cluster::RandomWalk, "RandomWalk1", "statistics R (returns) and M (maximum)"),
    (Cluster::MatrixRank, "MatrixRank", "square matrices, 32 and 64"),
    (Cluster::LinearComplexity, "LinearComp", "one bit per word, NIST-style categories"),
    (Cluster::Classical, "SerialOver, Gap", "non-overlapping serial blocks"),
];

pub fn cluster_map_text() -> String {
    let mut out = format!("Cluster map (version {CLUSTER_MAP_VERSION}):\n");
    for (c, families, note) in CLUSTER_MAP {
        let _ = writeln!(out, "  {:<18} {:<32} {}", c.name(), families, note);
    }
    out
}

/// Human-readable report: success table, histogram, extreme filter and
/// file errors.
pub fn render_text(summary: &AggregateSummary) -> String {
    let mut out = String::new();
    let t = summary.thresholds;
    let _ = writeln!(
        out,
        "Profiles: {}\nThresholds: suspicious {:e}, decisive {:e}\n",
        if summary.profiles.is_empty() { "-".to_owned() } else { summary.profiles.join(", ") },
        t.suspicious,
        t.decisive
    );
    out.push_str(&success_table(summary).render());
    out.push('\n');
    if let Ok(f) = extreme_filter_report(summary, t.decisive) {
        out.push_str(&f.render());
        out.push('\n');
    }
    out.push_str("Failures per test (share of runs):\n");
    for r in failure_histogram(summary) {
        let _ = writeln!(
            out,
            "  {:<14} {:>3} {:<18} {:<18} suspicious {:>5} ({:>6})  decisive {:>5} ({:>6})",
            r.generator.name(),
            r.test_id,
            r.test_name,
            r.cluster.name(),
            r.suspicious_count,
            percent(r.suspicious_rate, 1),
            r.decisive_count,
            percent(r.decisive_rate, 1)
        );
    }
    out.push('\n');
    out.push_str(&cluster_map_text());
    if !summary.errors.is_empty() {
        out.push_str("\nUnreadable files (excluded):\n");
        for e in &summary.errors {
            let _ = writeln!(out, "  {}: {}", e.file, e.message);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(g: GeneratorId, seed: u64, half: HalfPolicy, worst: f64) -> RunRecord {
        RunRecord { generator: g, seed_index: seed, half, worst, passed: worst >= 1e-3 }
    }

    fn summary(runs: Vec<RunRecord>) -> AggregateSummary {
        let mut s = AggregateSummary::empty(Thresholds::default());
        s.runs = runs;
        s
    }

    #[test]
    fn half_rates_hand_count() {
        let g = GeneratorId::Xoshiro256pp;
        let (ok, bad) = (0.3, 1e-5);
        let s = summary(vec![
            run(g, 1, HalfPolicy::High, ok),
            run(g, 1, HalfPolicy::Low, bad),
            run(g, 2, HalfPolicy::High, ok),
            run(g, 2, HalfPolicy::Low, ok),
            run(g, 3, HalfPolicy::High, bad),
            run(g, 3, HalfPolicy::Low, ok),
        ]);
        let t = success_table(&s);
        let r = t.row(g).unwrap();
        assert_eq!(percent(r.msb.unwrap(), 1), "66.7%");
        assert_eq!(percent(r.lsb.unwrap(), 1), "66.7%");
        assert_eq!(percent(r.overall, 1), "33.3%");
        assert_eq!((r.resistant, r.unusable, r.failed_batteries), (1, 0, 2));
    }

    #[test]
    fn filter_examples() {
        let g = GeneratorId::Pcg32;
        let s = summary(vec![run(g, 0, HalfPolicy::Native32, 3e-16), run(g, 1, HalfPolicy::Native32, 0.0005)]);
        let f = extreme_filter_report(&s, 1e-15).unwrap();
        assert_eq!(f.unfiltered.rows[0].failed_batteries, 2);
        assert_eq!(f.filtered.rows[0].failed_batteries, 1);
        let f = extreme_filter_report(&s, 0.0).unwrap();
        assert_eq!(f.filtered.rows[0].failed_batteries, 0);
        assert!(extreme_filter_report(&s, 1e-3).is_err());
    }

    #[test]
    fn multiple_testing() {
        let p = multiple_testing_probability(160, 0.002).unwrap();
        assert!((p - (1.0 - 0.998f64.powi(160))).abs() < 1e-12);
        assert!((p - 0.274084).abs() < 1e-6);
        assert_eq!(percent(multiple_testing_probability(160, 0.002).unwrap(), 1), "27.4%");
        assert!((multiple_testing_probability(1, 0.002).unwrap() - 0.002).abs() < 1e-15);
        assert!((multiple_testing_probability(2, 0.5).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(multiple_testing_probability(0, 0.3).unwrap(), 0.0);
        assert!(multiple_testing_probability(3, 1.5).is_err());
    }

    #[test]
    fn headroom_examples() {
        assert_eq!(headroom(128, "bigcrush").unwrap(), 92);
        assert_eq!(headroom(36, "BigCrush").unwrap(), 0);
        assert_eq!(headroom(40, "bigcrush").unwrap(), 4);
        assert_eq!(headroom(32, "smallcrush").unwrap(), 0);
        assert!(headroom(64, "practrand").is_err());
    }

    #[test]
    fn rendering() {
        assert_eq!(percent(1397.0 / 2002.0, 2), "69.78%");
        assert_eq!(percent(43.0 / 2002.0, 1), "2.1%");
    }
}
