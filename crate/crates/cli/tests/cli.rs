use std::fs;
use std::process::{Command, Output};

fn streamlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_streamlab")).args(args).output().unwrap()
}

#[test]
fn gen_count_zero_writes_nothing() {
    let out = streamlab(&["gen", "--generator", "pcg32", "--count", "0"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
}

#[test]
fn gen_pcg32_first_word_of_seed_zero() {
    // state 0, increment 1: one discarded draw leaves state 1, whose output is 0.
    let out = streamlab(&["gen", "--generator", "pcg32", "--seed", "0", "--count", "1"]);
    assert!(out.status.success());
    assert_eq!(out.stdout, vec![0, 0, 0, 0]);
}

#[test]
fn gen_is_little_endian_and_prefix_stable() {
    let short = streamlab(&["gen", "--generator", "xoshiro256pp", "--seed", "3", "--count", "10"]).stdout;
    let long = streamlab(&["gen", "--generator", "xoshiro256pp", "--seed", "3", "--count", "1000"]).stdout;
    assert_eq!(short.len(), 40);
    assert_eq!(long.len(), 4000);
    assert_eq!(&long[..40], &short[..]);
}

#[test]
fn kat_succeeds() {
    let out = streamlab(&["kat"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains("MISMATCH"));
    assert!(text.lines().count() >= 25);
}

#[test]
fn report_on_empty_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = streamlab(&["report", "--in", dir.path().to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bad_thresholds_exit_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = streamlab(&[
        "run", "--generator", "pcg32", "--seeds", "0..2", "--profile", "smoke", "--out",
        out_dir.to_str().unwrap(), "--suspicious", "1e-20", "--decisive", "1e-3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_dir.exists() || fs::read_dir(&out_dir).unwrap().next().is_none());
}

#[test]
fn run_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    let run = streamlab(&["run", "--generator", "randu", "--seeds", "0..2", "--profile", "smoke", "--out", path]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let files: Vec<_> = fs::read_dir(path).unwrap().filter_map(|e| {
        let name = e.unwrap().file_name().into_string().unwrap();
        name.ends_with(".txt").then_some(name)
    }).collect();
    assert_eq!(files.len(), 2);
    let csv = String::from_utf8(streamlab(&["report", "--in", path, "--format", "csv"]).stdout).unwrap();
    assert!(csv.lines().count() > 1);
    let text = String::from_utf8(streamlab(&["report", "--in", path]).stdout).unwrap();
    assert!(text.contains("randu"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = dir.path().join("c.conf");
    fs::write(&cfg, format!("generator=mrg32k3a\nseeds=0..3\nprofile=smoke\nout={}\n", out.display())).unwrap();
    let r = streamlab(&["run", "--config", cfg.to_str().unwrap(), "--seeds", "0..1"]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let n = fs::read_dir(&out).unwrap().filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "txt")).count();
    assert_eq!(n, 1);
}

#[test]
fn arithmetic_helpers() {
    let m = String::from_utf8(streamlab(&["multitest"]).stdout).unwrap();
    assert!(m.contains("27.4%"));
    let h = String::from_utf8(streamlab(&["headroom", "--bits", "128"]).stdout).unwrap();
    assert_eq!(h.trim(), "92");
}
