use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use streamlab_core::campaign::{self, CampaignConfig, StreamReport};
use streamlab_core::report::{self, aggregate};
use streamlab_core::{GeneratorId, HalfPolicy, Thresholds};

fn reports(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "txt"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect()
}

fn smoke(g: GeneratorId, dir: &Path, workers: usize) -> CampaignConfig {
    let mut c = CampaignConfig::new(g, dir);
    c.seeds = 0..3;
    c.profile = "smoke".into();
    c.workers = workers;
    c
}

#[test]
fn worker_count_does_not_change_files() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    campaign::execute(&smoke(GeneratorId::Xoshiro256pp, a.path(), 1)).unwrap();
    campaign::execute(&smoke(GeneratorId::Xoshiro256pp, b.path(), 4)).unwrap();
    let (ra, rb) = (reports(a.path()), reports(b.path()));
    assert_eq!(ra.len(), 6);
    assert_eq!(ra, rb);
    let t = Thresholds::default();
    assert_eq!(aggregate(a.path(), t, false).unwrap().to_json(), aggregate(b.path(), t, false).unwrap().to_json());
}

#[test]
fn resume_regenerates_only_missing_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = smoke(GeneratorId::Pcg32, dir.path(), 2);
    let first = campaign::execute(&config).unwrap();
    assert_eq!(first.written(), 3);
    let before = reports(dir.path());
    let victim = dir.path().join("smoke_pcg32_00001.txt");
    fs::remove_file(&victim).unwrap();
    // A truncated file is incomplete and must be redone too.
    let partial = dir.path().join("smoke_pcg32_00002.txt");
    let text = fs::read_to_string(&partial).unwrap();
    fs::write(&partial, &text[..text.len() / 2]).unwrap();
    let second = campaign::execute(&config).unwrap();
    assert_eq!((second.written(), second.skipped()), (2, 1));
    assert_eq!(reports(dir.path()), before);
}

#[test]
fn report_file_layout() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = smoke(GeneratorId::Xoshiro256ss, dir.path(), 1);
    config.seeds = 7..8;
    config.halves = vec![HalfPolicy::High];
    campaign::execute(&config).unwrap();
    let text = fs::read_to_string(dir.path().join("smoke_xoshiro256ss_00007_high.txt")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# generator: xoshiro256ss");
    assert_eq!(lines[1], "# seed_index: 7");
    assert!(lines[2].starts_with("# initial_state: xoshiro256ss "));
    assert_eq!(lines[3], "# half: high");
    assert_eq!(lines[4], "# profile: smoke");
    assert!(lines[5].starts_with("# version: "));
    assert_eq!(lines[6], "# suspicious: 1e-3");
    assert_eq!(lines[7], "# decisive: 1e-15");
    assert!(lines.last().unwrap().starts_with("# summary: total=9 "));
    let row: Vec<&str> = lines[8].split('\t').collect();
    assert_eq!(row.len(), 5);
    assert_eq!(row[1], "serial_frequency/chi2");
    assert!(row[3].contains('e'));
    let parsed = StreamReport::parse(&text).unwrap();
    assert_eq!(parsed.render(), text);
    assert_eq!(parsed.header.initial_state.parse().unwrap(), streamlab_core::derive(GeneratorId::Xoshiro256ss, streamlab_core::SeedIndex(7)).unwrap());
}

#[test]
fn aggregation_of_a_real_campaign() {
    let dir = tempfile::tempdir().unwrap();
    campaign::execute(&smoke(GeneratorId::Xorshift64, dir.path(), 2)).unwrap();
    fs::write(dir.path().join("junk.txt"), "not a report").unwrap();
    fs::write(dir.path().join("smoke_x.txt.tmp"), "ignored").unwrap();
    let s = aggregate(dir.path(), Thresholds::default(), false).unwrap();
    assert_eq!(s.errors.len(), 1);
    assert_eq!(s.stream_counts[&GeneratorId::Xorshift64], 3);
    let table = report::success_table(&s);
    let row = table.row(GeneratorId::Xorshift64).unwrap();
    assert_eq!(row.failed_batteries, 3);
    assert_eq!(row.unusable, 3);
    assert_eq!(row.msb, None);
    let hist = report::failure_histogram(&s);
    let lc = hist.iter().find(|r| r.test_name == "linear_complexity").unwrap();
    assert_eq!(lc.decisive_count, 3);
    assert!(report::histogram_csv(&hist).starts_with("test_id,test_name,cluster,"));
}

#[test]
fn mixed_profiles_need_permission() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = smoke(GeneratorId::Pcg32, dir.path(), 1);
    c.seeds = 0..1;
    campaign::execute(&c).unwrap();
    let custom = dir.path().join("tiny.profile");
    fs::write(&custom, "name = tiny\ntest.1 = gap lo=0 hi=0.5 n=1000\n").unwrap();
    c.profile = custom.to_string_lossy().into_owned();
    campaign::execute(&c).unwrap();
    assert!(dir.path().join("tiny_pcg32_00000.txt").exists());
    assert!(aggregate(dir.path(), Thresholds::default(), false).is_err());
    assert_eq!(aggregate(dir.path(), Thresholds::default(), true).unwrap().runs.len(), 2);
}

#[test]
fn empty_directory_aggregates_to_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let s = aggregate(dir.path(), Thresholds::default(), false).unwrap();
    assert!(s.runs.is_empty() && s.tests.is_empty());
    assert!(report::success_table(&s).rows.is_empty());
}

#[test]
fn stricter_decisive_threshold_never_increases_counts() {
    let dir = tempfile::tempdir().unwrap();
    campaign::execute(&smoke(GeneratorId::Randu, dir.path(), 2)).unwrap();
    let loose = aggregate(dir.path(), Thresholds::new(1e-2, 1e-3).unwrap(), false).unwrap();
    let strict = aggregate(dir.path(), Thresholds::default(), false).unwrap();
    for (a, b) in strict.tests.iter().zip(&loose.tests) {
        assert!(a.decisive <= b.decisive && a.suspicious <= b.suspicious);
    }
}

#[test]
fn bad_configuration_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let mut c = smoke(GeneratorId::Pcg32, &out, 1);
    c.profile = "nonexistent".into();
    assert!(campaign::execute(&c).is_err());
    assert!(!out.exists());
    c.profile = "smoke".into();
    c.thresholds = Thresholds { suspicious: 1e-15, decisive: 1e-3 };
    assert!(campaign::execute(&c).is_err());
    assert!(!out.exists());
}
