//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::Read;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};
use streamlab_core::battery::pvalue::{ks_pvalue, ks_statistic_uniform};
use streamlab_core::battery::{birthday, collision, gf2, linear, random_walk, Cluster, PValue, Statistic};
use streamlab_core::campaign::{self, CampaignConfig, ReportHeader, StreamReport};
use streamlab_core::prng::SplitMix64;
use streamlab_core::report;
use streamlab_core::{
    derive, kat, Battery, BatteryProfile, GeneratorId, HalfPolicy, SeedIndex, TestResult, Thresholds,
    Verdict, Word32Source,
};

const BIN: &str = env!("CARGO_BIN_EXE_streamlab");

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(elapsed: Duration, budget: Duration) -> String {
    format!("{:.1}s of {}s budget", elapsed.as_secs_f64(), budget.as_secs())
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn read_reports(dir: &Path) -> Vec<StreamReport> {
    let mut names: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "txt"))
        .collect();
    names.sort();
    names.iter().map(|p| StreamReport::parse(&fs::read_to_string(p).unwrap()).unwrap()).collect()
}

fn file_set(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "txt"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect()
}

fn cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(BIN).args(args).output().expect("run streamlab");
    assert!(out.status.success(), "streamlab {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn known_answers() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut bad = Vec::new();
    for set in kat::load_all() {
        for c in kat::verify(&set).unwrap() {
            checked += 1;
            if !c.passed() || c.compared != 1000 {
                bad.push(format!("{} [{}]", c.set, c.label));
            }
        }
    }
    let generators = ["splitmix64", "xoshiro256pp", "xoshiro256ss", "xoshiro1024ss", "mrg32k3a", "philox4x32", "pcg32", "mt19937"];
    let all_present = generators.iter().all(|g| kat::load(g).is_ok_and(|s| s.seedings.len() == 3));
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(60);
    outcome(
        bad.is_empty() && all_present && elapsed < budget,
        format!("{checked} seedings x 1000 outputs, mismatches {bad:?}, {}", within(elapsed, budget)),
    )
}

fn determinism() -> Outcome {
    let start = Instant::now();
    let (one, eight) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for (dir, w) in [(&one, "1"), (&eight, "8")] {
        cli(&[
            "run", "--generator", "xoshiro256pp", "--seeds", "0..10", "--halves", "low,high", "--profile", "desk",
            "--out", dir.path().to_str().unwrap(), "--workers", w,
        ]);
    }
    let (a, b) = (file_set(one.path()), file_set(eight.path()));
    let files_equal = a == b && a.len() == 20;
    let mut reports_equal = true;
    for format in ["text", "csv", "json"] {
        let ra = cli(&["report", "--in", one.path().to_str().unwrap(), "--format", format]);
        let rb = cli(&["report", "--in", eight.path().to_str().unwrap(), "--format", format]);
        reports_equal &= ra == rb && !ra.is_empty();
    }
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(600);
    outcome(
        files_equal && reports_equal && elapsed < budget,
        format!(
            "{} files each, files identical: {files_equal}, text/csv/json reports identical: {reports_equal}, {}",
            a.len(),
            within(elapsed, budget)
        ),
    )
}

fn null_behaviour() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let mut config = CampaignConfig::new(GeneratorId::Philox4x32, dir.path());
    config.seeds = 0..500;
    config.workers = workers();
    let done = campaign::execute(&config).unwrap();
    assert_eq!(done.failed(), 0);
    let reports = read_reports(dir.path());
    let mut per_stat: BTreeMap<(u32, String), Vec<f64>> = BTreeMap::new();
    let (mut pairs, mut flagged) = (0u64, 0u64);
    for r in &reports {
        for t in &r.results {
            for s in &t.statistics {
                pairs += 1;
                flagged += u64::from(s.p.two_sided() < 1e-3);
                per_stat.entry((t.test_id, format!("{}/{}", t.name, s.name))).or_default().push(s.p.get());
            }
        }
    }
    let rate = flagged as f64 / pairs as f64;
    let sd = (0.002 * 0.998 / pairs as f64).sqrt();
    let rate_ok = (rate - 0.002).abs() <= 3.0 * sd;
    let mut ks_pass = 0;
    let mut ks_failed = Vec::new();
    for ((id, name), mut ps) in per_stat.clone() {
        let d = ks_statistic_uniform(&mut ps);
        let p = ks_pvalue(ps.len() as u64, d).unwrap().get();
        if p >= 0.001 {
            ks_pass += 1;
        } else {
            ks_failed.push(format!("{id} {name} (p={p:.2e})"));
        }
    }
    let share = ks_pass as f64 / per_stat.len() as f64;
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(3600);
    outcome(
        reports.len() == 500 && rate_ok && share >= 0.9 && elapsed < budget,
        format!(
            "{} streams, suspicious {flagged}/{pairs} = {rate:.5} (0.002 +- {:.5}), KS uniform for {ks_pass}/{} statistics {ks_failed:?}, {}",
            reports.len(),
            3.0 * sd,
            per_stat.len(),
            within(elapsed, budget)
        ),
    )
}

fn sensitivity() -> Outcome {
    let start = Instant::now();
    let battery = Battery::new(BatteryProfile::builtin("desk").unwrap()).unwrap();
    let thresholds = Thresholds::default();
    let count = |g: GeneratorId, hit: &(dyn Fn(&[TestResult]) -> bool + Sync)| -> usize {
        let next = std::sync::atomic::AtomicU64::new(0);
        let hits = std::sync::atomic::AtomicUsize::new(0);
        std::thread::scope(|s| {
            for _ in 0..workers() {
                s.spawn(|| loop {
                    let seed = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if seed >= 100 {
                        break;
                    }
                    let mut src = Word32Source::new(derive(g, SeedIndex(seed)).unwrap(), HalfPolicy::Native32).unwrap();
                    let results = battery.run(&mut src, &thresholds).unwrap();
                    if hit(&results) {
                        hits.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    }
                });
            }
        });
        hits.into_inner()
    };
    let xorshift = count(GeneratorId::Xorshift64, &|rs| {
        rs.iter().any(|r| {
            matches!(r.cluster, Cluster::MatrixRank | Cluster::LinearComplexity) && r.verdict == Verdict::Decisive
        })
    });
    let randu = count(GeneratorId::Randu, &|rs| rs.iter().any(|r| r.verdict == Verdict::Decisive));
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(600);
    outcome(
        xorshift >= 95 && randu >= 95 && elapsed < budget,
        format!(
            "xorshift64 (low 32 bits) decisive on rank/linear complexity in {xorshift}/100, randu decisive in {randu}/100, {}",
            within(elapsed, budget)
        ),
    )
}

/// Shortest LFSR found by trying every length and feedback polynomial.
fn minimal_lfsr(bits: &[u8]) -> usize {
    if bits.iter().all(|&b| b == 0) {
        return 0;
    }
    (1..=bits.len())
        .find(|&l| {
            (0..1u32 << l).any(|taps| {
                (l..bits.len()).all(|i| {
                    (1..=l).fold(0, |s, j| s ^ ((taps >> (j - 1)) as u8 & 1 & bits[i - j])) == bits[i]
                })
            })
        })
        .unwrap_or(bits.len())
}

fn enumeration() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    let close = |a: &[f64], b: &[f64]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-15);

    let mut scratch = Vec::new();
    let mut hist = vec![0.0; 3];
    for c in 0..64u32 {
        hist[collision::collisions(&[c % 4, c / 4 % 4, c / 16], &mut scratch)] += 1.0 / 64.0;
    }
    let ok_collision = close(&collision::exact_distribution(3, 4), &hist);
    notes.push(format!("collision(3,4) {ok_collision}"));

    let null = birthday::exact_distribution(3, 8);
    let mut hist = vec![0.0; null.len()];
    let mut ok_birthday = true;
    for c in 0..512u32 {
        let y = birthday::duplicated_spacings(&mut [c % 8, c / 8 % 8, c / 64]);
        match hist.get_mut(y) {
            Some(h) => *h += 1.0 / 512.0,
            None => ok_birthday = false,
        }
    }
    ok_birthday &= close(&null, &hist);
    notes.push(format!("birthday(3,8) {ok_birthday}"));

    let mut hist = vec![0.0; 3];
    for c in 0..16u32 {
        hist[random_walk::walk_statistics((0..4).map(|i| c >> i & 1)).0] += 1.0 / 16.0;
    }
    let ok_walk = close(&random_walk::returns_distribution(4), &hist);
    notes.push(format!("random walk L=4 {ok_walk}"));

    let mut full = 0;
    for c in 0..512u32 {
        let mut m = gf2::BitMatrix::zeros(3, 3);
        for i in 0..9 {
            m.set(i / 3, i % 3, c >> i & 1 == 1);
        }
        full += usize::from(gf2::gf2_rank(&m) == 3);
    }
    let ok_rank = full == 168 && gf2::rank_probability(3, 3, 3) == 168.0 / 512.0;
    notes.push(format!("rank L=3 {full}/512 {ok_rank}"));

    let mut ok_bm = true;
    let mut sequences = 0;
    for n in 1..=10usize {
        for c in 0..1u32 << n {
            let bits: Vec<u8> = (0..n).map(|i| (c >> i & 1) as u8).collect();
            ok_bm &= linear::berlekamp_massey(&bits) == minimal_lfsr(&bits);
            sequences += 1;
        }
    }
    notes.push(format!("Berlekamp-Massey {sequences} sequences {ok_bm}"));

    let elapsed = start.elapsed();
    let budget = Duration::from_secs(60);
    outcome(
        ok_collision && ok_birthday && ok_walk && ok_rank && ok_bm && elapsed < budget,
        format!("{}, {}", notes.join(", "), within(elapsed, budget)),
    )
}

fn synthetic_report(g: GeneratorId, seed: u64, p: f64) -> StreamReport {
    StreamReport {
        header: ReportHeader {
            generator: g,
            seed_index: seed,
            initial_state: streamlab_core::render_state(&derive(g, SeedIndex(seed)).unwrap()),
            half: HalfPolicy::Native32,
            profile: "synthetic".into(),
            version: streamlab_core::VERSION.into(),
            thresholds: Thresholds::default(),
        },
        results: vec![TestResult {
            test_id: 11,
            name: "collision".into(),
            cluster: Cluster::Collision,
            params: "n=4096 log2k=18 drop=0 reps=100".into(),
            statistics: vec![Statistic::new("chi2", PValue::new(p).unwrap())],
            verdict: Thresholds::default().classify(PValue::new(p).unwrap()),
        }],
    }
}

fn reference_arithmetic() -> Outcome {
    let mut checks = Vec::new();
    let p = report::multiple_testing_probability(160, 0.002).unwrap();
    let exact = 1.0 - 0.998f64.powi(160);
    checks.push(((p - exact).abs() < 1e-4 && report::percent(p, 1) == "27.4%", format!("1-(1-0.002)^160 = {p:.5} ({})", report::percent(p, 1))));
    checks.push((report::headroom(128, "bigcrush").unwrap() == 92, "headroom(128, bigcrush) = 92".to_owned()));

    // 2002 single-test streams: 43 decisive, the rest passing.
    let g = GeneratorId::Philox4x32;
    let reports: Vec<StreamReport> = (0..2002).map(|s| synthetic_report(g, s, if s < 43 { 1e-20 } else { 0.5 })).collect();
    let summary = report::AggregateSummary::from_reports(&reports, Thresholds::default());
    let row = report::failure_histogram(&summary).into_iter().find(|r| r.test_id == 11).unwrap();
    checks.push((
        row.decisive_count == 43 && report::percent(row.decisive_rate, 1) == "2.1%",
        format!("histogram[11] = {} -> {}", row.decisive_count, report::percent(row.decisive_rate, 1)),
    ));

    // 2002 streams of which 1397 pass.
    let reports: Vec<StreamReport> = (0..2002).map(|s| synthetic_report(g, s, if s < 1397 { 0.5 } else { 1e-4 })).collect();
    let summary = report::AggregateSummary::from_reports(&reports, Thresholds::default());
    let overall = report::success_table(&summary).rows[0].overall;
    checks.push((report::percent(overall, 2) == "69.78%", format!("success {}", report::percent(overall, 2))));

    let pass = checks.iter().all(|c| c.0);
    let detail: Vec<String> = checks.into_iter().map(|c| c.1).collect();
    outcome(
        pass,
        format!("{}; the pinned constant 0.27388 is 2.0e-4 from the formula and is not used", detail.join(", ")),
    )
}

fn gen_checksum(words: u64) -> (String, u64) {
    let mut child = Command::new(BIN)
        .args(["gen", "--generator", "philox4x32", "--seed", "7", "--count", &words.to_string()])
        .stdout(Stdio::piped())
        .spawn()
        .expect("spawn streamlab gen");
    let mut stdout = child.stdout.take().unwrap();
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 20];
    let mut total = 0u64;
    loop {
        let n = stdout.read(&mut buf).unwrap();
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
        total += n as u64;
    }
    assert!(child.wait().unwrap().success());
    let digest: String = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    (digest, total)
}

fn desk_scale_substitute() -> Outcome {
    let start = Instant::now();
    let words = 1u64 << 28;
    let (a, na) = gen_checksum(words);
    let (b, nb) = gen_checksum(words);
    // The first words must be what the library produces for the same stream.
    let mut src = Word32Source::new(derive(GeneratorId::Philox4x32, SeedIndex(7)).unwrap(), HalfPolicy::Native32).unwrap();
    let head: Vec<u8> = (0..4).flat_map(|_| src.next_word32().to_le_bytes()).collect();
    let piped = cli(&["gen", "--generator", "philox4x32", "--seed", "7", "--count", "4"]);
    let empty = cli(&["gen", "--generator", "pcg32", "--count", "0"]);
    let pass = a == b && na == 1 << 30 && nb == na && piped == head && empty.is_empty();
    outcome(
        pass,
        format!(
            "BigCrush-scale success rates are out of scope; gen piped 2^30 bytes twice, sha256 {}..., identical: {}; {:.1}s",
            &a[..16],
            a == b,
            start.elapsed().as_secs_f64()
        ),
    )
}

fn consumption() -> Outcome {
    let mut rng = SplitMix64::new(2024);
    let mut trials = 0;
    let mut bad = Vec::new();
    for _ in 0..200 {
        let k = rng.next_u64() % 10_000;
        let g = [GeneratorId::Xoshiro256pp, GeneratorId::Xoshiro256ss, GeneratorId::Xoshiro1024ss, GeneratorId::SplitMix64]
            [(rng.next_u64() % 4) as usize];
        for (policy, want) in [(HalfPolicy::Alternating, k.div_ceil(2)), (HalfPolicy::Low, k), (HalfPolicy::High, k)] {
            let mut src = Word32Source::new(derive(g, SeedIndex(k)).unwrap(), policy).unwrap();
            for _ in 0..k {
                src.next_word32();
            }
            trials += 1;
            if src.draws_consumed() != want || src.words_emitted() != k {
                bad.push(format!("{g} {policy} k={k}: {} draws", src.draws_consumed()));
            }
        }
    }
    // The battery's appetite depends on the profile only.
    let battery = Battery::new(BatteryProfile::builtin("smoke").unwrap()).unwrap();
    let mut used = HashMap::new();
    for (g, h) in [
        (GeneratorId::Philox4x32, HalfPolicy::Native32),
        (GeneratorId::Mrg32k3a, HalfPolicy::Native32),
        (GeneratorId::Xoshiro256pp, HalfPolicy::Alternating),
        (GeneratorId::Randu, HalfPolicy::Native32),
    ] {
        let mut src = Word32Source::new(derive(g, SeedIndex(1)).unwrap(), h).unwrap();
        battery.run(&mut src, &Thresholds::default()).unwrap();
        used.insert(g, src.words_emitted());
    }
    let uniform = used.values().all(|&w| w == battery.words());
    outcome(
        bad.is_empty() && uniform,
        format!(
            "{trials} randomized (generator, policy, k) trials, mismatches {bad:?}; smoke battery uses {} words on every generator: {uniform}",
            battery.words()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("known-answer equivalence", known_answers),
        ("end-to-end determinism", determinism),
        ("battery null behaviour", null_behaviour),
        ("battery sensitivity", sensitivity),
        ("brute-force oracle equivalence", enumeration),
        ("reference arithmetic", reference_arithmetic),
        ("desk-scale substitute and gen pipe", desk_scale_substitute),
        ("consumption contracts", consumption),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != i + 1) {
            continue;
        }
        let result = check();
        failed += usize::from(!result.pass);
        println!("criterion {} [{}] {name}: {}", i + 1, if result.pass { "PASS" } else { "FAIL" }, result.detail);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
