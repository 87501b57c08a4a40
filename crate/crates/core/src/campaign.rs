//! Multi-stream campaigns: one report file per (seed, half) battery run.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::battery::{Battery, BatteryProfile, PValue, Statistic, TestKind, TestResult, Thresholds, Verdict};
use crate::bitstream::{HalfPolicy, Word32Source};
use crate::error::{Error, Result};
use crate::prng::GeneratorId;
use crate::seeding::{derive, render_state, RenderedState, SeedIndex};
use crate::VERSION;

/// Name of the per-campaign log written next to the reports.
pub const LOG_FILE: &str = "campaign.log";
const TMP_SUFFIX: &str = ".tmp";

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub generator: GeneratorId,
    pub seeds: Range<u64>,
    pub halves: Vec<HalfPolicy>,
    /// Builtin profile name or profile file path.
    pub profile: String,
    pub out_dir: PathBuf,
    pub workers: usize,
    pub thresholds: Thresholds,
}

impl CampaignConfig {
    /// Defaults: the generator's default seed range (1001 or 2002 streams), both halves for
    /// 64-bit generators, the desk profile and one worker per core.
    pub fn new(generator: GeneratorId, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            generator,
            seeds: 0..generator.default_stream_count(),
            halves: default_halves(generator),
            profile: "desk".into(),
            out_dir: out_dir.into(),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            thresholds: Thresholds::default(),
        }
    }

    /// Reads a `key=value` file. `generator` and `out` are required.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        let pairs = parse_key_values(&text)?;
        let generator = pairs
            .iter()
            .find(|(k, _)| k == "generator")
            .ok_or_else(|| Error::Config(format!("{}: missing `generator`", path.display())))?
            .1
            .parse()?;
        let mut config = Self::new(generator, PathBuf::new());
        let mut saw_out = false;
        for (k, v) in &pairs {
            saw_out |= k == "out";
            config.set(k, v)?;
        }
        if !saw_out {
            return Err(Error::Config(format!("{}: missing `out`", path.display())));
        }
        Ok(config)
    }

    /// Sets one field from its flag/file spelling.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("{key}: invalid {what} `{value}`"));
        match key {
            "generator" => {
                let g: GeneratorId = value.parse()?;
                if g != self.generator {
                    self.generator = g;
                    self.halves = default_halves(g);
                }
            }
            "seeds" => self.seeds = parse_seed_range(value)?,
            "halves" => {
                self.halves = value.split(',').map(|h| h.trim().parse()).collect::<Result<_>>()?;
            }
            "profile" => self.profile = value.to_owned(),
            "out" => self.out_dir = value.into(),
            "workers" => self.workers = value.parse().map_err(|_| bad("worker count"))?,
            "suspicious" => self.thresholds.suspicious = value.parse().map_err(|_| bad("threshold"))?,
            "decisive" => self.thresholds.decisive = value.parse().map_err(|_| bad("threshold"))?,
            _ => return Err(Error::Config(format!("unknown configuration key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::Config(format!("seeds: empty range {}..{}", self.seeds.start, self.seeds.end)));
        }
        if self.halves.is_empty() {
            return Err(Error::Config("halves: no half policy given".into()));
        }
        for (i, h) in self.halves.iter().enumerate() {
            if !h.compatible_with(self.generator.output_kind()) {
                return Err(Error::Config(format!("halves: `{h}` does not apply to {}", self.generator)));
            }
            if self.halves[..i].contains(h) {
                return Err(Error::Config(format!("halves: `{h}` listed twice")));
            }
        }
        if self.workers == 0 {
            return Err(Error::Config("workers: must be at least 1".into()));
        }
        Thresholds::new(self.thresholds.suspicious, self.thresholds.decisive)?;
        Ok(())
    }
}

fn default_halves(g: GeneratorId) -> Vec<HalfPolicy> {
    if g.is_64bit() {
        vec![HalfPolicy::Low, HalfPolicy::High]
    } else {
        vec![HalfPolicy::Native32]
    }
}

/// `A..B`, half-open.
pub fn parse_seed_range(s: &str) -> Result<Range<u64>> {
    let bad = || Error::Config(format!("seeds: expected `A..B`, got `{s}`"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    Ok(a.trim().parse().map_err(|_| bad())?..b.trim().parse().map_err(|_| bad())?)
}

/// `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let (k, v) = l
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got `{l}`", i + 1)))?;
            Ok((k.trim().to_owned(), v.trim().to_owned()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamJob {
    pub generator: GeneratorId,
    pub seed: SeedIndex,
    pub half: HalfPolicy,
    pub profile: String,
}

/// Jobs in (seed, half) order.
pub fn plan(config: &CampaignConfig) -> Result<Vec<StreamJob>> {
    config.validate()?;
    let profile = profile_label(&config.profile);
    Ok(config
        .seeds
        .clone()
        .flat_map(|s| {
            let profile = profile.clone();
            config.halves.iter().map(move |&half| StreamJob {
                generator: config.generator,
                seed: SeedIndex(s),
                half,
                profile: profile.clone(),
            })
        })
        .collect())
}

/// The profile's name as used in file names: a path is reduced to its stem.
fn profile_label(profile: &str) -> String {
    Path::new(profile).file_stem().map_or_else(|| profile.to_owned(), |s| s.to_string_lossy().into_owned())
}

pub fn report_filename(job: &StreamJob) -> String {
    let mut name = format!("{}_{}_{:05}", job.profile, job.generator, job.seed.0);
    if job.generator.is_64bit() {
        name.push('_');
        name.push_str(job.half.name());
    }
    name.push_str(".txt");
    name
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportHeader {
    pub generator: GeneratorId,
    pub seed_index: u64,
    pub initial_state: RenderedState,
    pub half: HalfPolicy,
    pub profile: String,
    pub version: String,
    pub thresholds: Thresholds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReportSummary {
    pub total: usize,
    pub suspicious: usize,
    pub decisive: usize,
}

impl ReportSummary {
    pub fn passed(&self) -> bool {
        self.suspicious == 0 && self.decisive == 0
    }
}

/// Contents of one report file.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamReport {
    pub header: ReportHeader,
    pub results: Vec<TestResult>,
}

impl StreamReport {
    /// Tallies over result lines, one line per statistic.
    pub fn summary(&self) -> ReportSummary {
        let t = &self.header.thresholds;
        let mut s = ReportSummary { total: 0, suspicious: 0, decisive: 0 };
        for stat in self.results.iter().flat_map(|r| &r.statistics) {
            s.total += 1;
            match t.classify(stat.p) {
                Verdict::Pass => {}
                Verdict::Suspicious => s.suspicious += 1,
                Verdict::Decisive => s.decisive += 1,
            }
        }
        s
    }

    pub fn render(&self) -> String {
        let h = &self.header;
        let mut out = String::new();
        let _ = writeln!(out, "# generator: {}", h.generator);
        let _ = writeln!(out, "# seed_index: {}", h.seed_index);
        let _ = writeln!(out, "# initial_state: {}", h.initial_state);
        let _ = writeln!(out, "# half: {}", h.half);
        let _ = writeln!(out, "# profile: {}", h.profile);
        let _ = writeln!(out, "# version: {}", h.version);
        let _ = writeln!(out, "# suspicious: {:e}", h.thresholds.suspicious);
        let _ = writeln!(out, "# decisive: {:e}", h.thresholds.decisive);
        for r in &self.results {
            for s in &r.statistics {
                let v = h.thresholds.classify(s.p);
                let _ = writeln!(out, "{}\t{}/{}\t{}\t{}\t{}", r.test_id, r.name, s.name, r.params, s.p, v);
            }
        }
        let s = self.summary();
        let _ = writeln!(
            out,
            "# summary: total={} suspicious={} decisive={} verdict={}",
            s.total,
            s.suspicious,
            s.decisive,
            if s.passed() { "PASS" } else { "FAIL" }
        );
        out
    }

    /// Parses a complete report; files without a consistent summary line
    /// are rejected.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::Parse(msg);
        let mut fields: Vec<(&str, &str)> = Vec::new();
        let mut results: Vec<TestResult> = Vec::new();
        let mut summary = None;
        for (i, line) in text.lines().enumerate() {
            if let Some(rest) = line.strip_prefix("# ") {
                let (k, v) = rest.split_once(": ").ok_or_else(|| bad(format!("line {}: malformed header", i + 1)))?;
                if k == "summary" {
                    summary = Some(v);
                } else if summary.is_some() {
                    return Err(bad(format!("line {}: header after summary", i + 1)));
                } else {
                    fields.push((k, v));
                }
                continue;
            }
            if summary.is_some() {
                return Err(bad(format!("line {}: result after summary", i + 1)));
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 5 {
                return Err(bad(format!("line {}: expected 5 tab-separated columns", i + 1)));
            }
            let test_id: u32 = cols[0].parse().map_err(|_| bad(format!("line {}: bad test id", i + 1)))?;
            let (name, stat) =
                cols[1].split_once('/').ok_or_else(|| bad(format!("line {}: bad test name `{}`", i + 1, cols[1])))?;
            let p = cols[3]
                .parse::<f64>()
                .map_err(|_| bad(format!("line {}: bad p-value", i + 1)))
                .and_then(|p| PValue::new(p).map_err(|e| bad(format!("line {}: {e}", i + 1))))?;
            let verdict: Verdict = cols[4].parse()?;
            let cluster = TestKind::cluster_of(name).ok_or_else(|| bad(format!("line {}: unknown test `{name}`", i + 1)))?;
            let statistic = Statistic::new(stat, p);
            match results.last_mut() {
                Some(r) if r.test_id == test_id => {
                    r.statistics.push(statistic);
                    r.verdict = r.verdict.max(verdict);
                }
                _ => results.push(TestResult {
                    test_id,
                    name: name.to_owned(),
                    cluster,
                    params: cols[2].to_owned(),
                    statistics: vec![statistic],
                    verdict,
                }),
            }
        }
        let summary = summary.ok_or_else(|| bad("missing summary line".into()))?;
        let get = |key: &str| -> Result<&str> {
            fields
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| bad(format!("missing header `{key}`")))
        };
        let num = |key: &str| -> Result<f64> { get(key)?.parse().map_err(|_| bad(format!("bad `{key}`"))) };
        let header = ReportHeader {
            generator: get("generator")?.parse()?,
            seed_index: get("seed_index")?.parse().map_err(|_| bad("bad `seed_index`".into()))?,
            initial_state: get("initial_state")?.parse()?,
            half: get("half")?.parse()?,
            profile: get("profile")?.to_owned(),
            version: get("version")?.to_owned(),
            thresholds: Thresholds::new(num("suspicious")?, num("decisive")?)?,
        };
        let report = Self { header, results };
        let s = report.summary();
        let expected = format!(
            "total={} suspicious={} decisive={} verdict={}",
            s.total,
            s.suspicious,
            s.decisive,
            if s.passed() { "PASS" } else { "FAIL" }
        );
        if summary != expected {
            return Err(bad(format!("summary `{summary}` does not match results (`{expected}`)")));
        }
        Ok(report)
    }
}

/// True when `path` holds a report whose summary line parses.
pub fn is_complete(path: &Path) -> bool {
    fs::read_to_string(path).map(|t| StreamReport::parse(&t).is_ok()).unwrap_or(false)
}

/// Runs one job in memory.
pub fn run_job(job: &StreamJob, battery: &Battery, thresholds: &Thresholds) -> Result<StreamReport> {
    let state = derive(job.generator, job.seed)?;
    let initial_state = render_state(&state);
    let mut src = Word32Source::new(state, job.half)?;
    let results = battery.run(&mut src, thresholds)?;
    Ok(StreamReport {
        header: ReportHeader {
            generator: job.generator,
            seed_index: job.seed.0,
            initial_state,
            half: job.half,
            profile: job.profile.clone(),
            version: VERSION.to_owned(),
            thresholds: *thresholds,
        },
        results,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JobStatus {
    Written,
    Skipped,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobOutcome {
    pub file: PathBuf,
    pub status: JobStatus,
}

/// Per-job outcomes in plan order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CampaignOutcome {
    pub jobs: Vec<JobOutcome>,
}

impl CampaignOutcome {
    pub fn count(&self, f: impl Fn(&JobStatus) -> bool) -> usize {
        self.jobs.iter().filter(|j| f(&j.status)).count()
    }

    pub fn written(&self) -> usize {
        self.count(|s| *s == JobStatus::Written)
    }

    pub fn skipped(&self) -> usize {
        self.count(|s| *s == JobStatus::Skipped)
    }

    pub fn failed(&self) -> usize {
        self.count(|s| matches!(s, JobStatus::Failed(_)))
    }
}

/// Runs every planned job whose report is missing or incomplete.
///
/// Configuration problems are reported before anything is written. A job
/// that hits an I/O error is recorded in the campaign log and the others
/// carry on.
pub fn execute(config: &CampaignConfig) -> Result<CampaignOutcome> {
    let jobs = plan(config)?;
    let mut profile = BatteryProfile::resolve(&config.profile)?;
    profile.name = profile_label(&config.profile);
    let battery = Battery::new(profile)?;
    let thresholds = config.thresholds;
    fs::create_dir_all(&config.out_dir).map_err(|e| Error::file(&config.out_dir, e))?;

    let next = AtomicUsize::new(0);
    let outcomes: Mutex<Vec<Option<JobStatus>>> = Mutex::new(vec![None; jobs.len()]);
    std::thread::scope(|scope| {
        for _ in 0..config.workers.min(jobs.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = jobs.get(i) else { break };
                let path = config.out_dir.join(report_filename(job));
                let status = if is_complete(&path) {
                    JobStatus::Skipped
                } else {
                    match run_job(job, &battery, &thresholds).and_then(|r| write_atomic(&path, &r.render())) {
                        Ok(()) => JobStatus::Written,
                        Err(e) => JobStatus::Failed(e.to_string()),
                    }
                };
                outcomes.lock().unwrap_or_else(|e| e.into_inner())[i] = Some(status);
            });
        }
    });

    let outcome = CampaignOutcome {
        jobs: jobs
            .iter()
            .zip(outcomes.into_inner().unwrap_or_else(|e| e.into_inner()))
            .map(|(job, status)| JobOutcome {
                file: config.out_dir.join(report_filename(job)),
                status: status.expect("every job visited"),
            })
            .collect(),
    };
    write_log(&config.out_dir, &outcome)?;
    Ok(outcome)
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(TMP_SUFFIX);
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(|e| Error::file(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::file(path, e))
}

fn write_log(dir: &Path, outcome: &CampaignOutcome) -> Result<()> {
    let mut log = String::new();
    for j in &outcome.jobs {
        let name = j.file.file_name().map(|n| n.to_string_lossy()).unwrap_or_default();
        match &j.status {
            JobStatus::Written => log.push_str(&format!("written\t{name}\n")),
            JobStatus::Skipped => log.push_str(&format!("skipped\t{name}\n")),
            JobStatus::Failed(e) => log.push_str(&format!("failed\t{name}\t{e}\n")),
        }
    }
    let path = dir.join(LOG_FILE);
    let mut f = fs::OpenOptions::new().create(true).append(true).open(&path).map_err(|e| Error::file(&path, e))?;
    f.write_all(log.as_bytes()).map_err(|e| Error::file(&path, e))
}

/// True for names that `execute` may leave behind but are not reports.
pub fn is_temporary(name: &str) -> bool {
    name.ends_with(TMP_SUFFIX)
}

/// Writes `count` words (or forever when `None`) as little-endian bytes.
/// Returns the number of words written; a closed pipe ends the stream
/// without error.
pub fn emit_raw_stream(
    generator: GeneratorId,
    seed: SeedIndex,
    half: HalfPolicy,
    count: Option<u64>,
    out: &mut impl Write,
) -> Result<u64> {
    const CHUNK: usize = 1 << 14;
    let mut src = Word32Source::new(derive(generator, seed)?, half)?;
    let mut buf = vec![0u8; CHUNK * 4];
    let mut written = 0u64;
    loop {
        let n = match count {
            Some(c) => (c - written).min(CHUNK as u64) as usize,
            None => CHUNK,
        };
        if n == 0 {
            break;
        }
        for b in buf[..n * 4].chunks_exact_mut(4) {
            b.copy_from_slice(&src.next_word32().to_le_bytes());
        }
        match out.write_all(&buf[..n * 4]) {
            Ok(()) => written += n as u64,
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => return Ok(written),
            Err(e) => return Err(e.into()),
        }
    }
    match out.flush() {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(written),
        r => r.map(|()| written).map_err(Into::into),
    }
}

impl FromStr for StreamReport {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}
