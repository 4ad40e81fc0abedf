use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pw1_core::data_io::{parse_report, parse_series};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> String {
    root().join("fixtures").join(name).display().to_string()
}

fn pw1(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pw1")).args(args).env_remove("PW1_FIXTURES").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn search_args(format: &str) -> Vec<String> {
    [
        "search",
        "--field",
        "5",
        "--level",
        "14",
        "--char",
        &fixture("chi.pw1"),
        "--weight",
        "5,1",
        "--bounds",
        "5,5;6,6;7,7",
        "--hecke-prime",
        "5,1",
        "--fixtures",
        &fixture("synthetic"),
        "--format",
        format,
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

fn run(args: &[String]) -> Output {
    pw1(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

#[test]
fn no_arguments_is_a_usage_error() {
    let o = pw1(&[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn bad_flags_are_usage_errors() {
    let o = pw1(&["eisenstein", "--char", "x", "--bound", "seven"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--bound"), "{}", stderr(&o));
    let o = pw1(&["search", "--field", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = pw1(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn domain_errors_exit_one() {
    let o = pw1(&["eisenstein", "--char", "/nonexistent/chi.pw1", "--bound", "3,3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error:"));
    // χ² is even, so it has no weight one Eisenstein series.
    let dir = tempfile::tempdir().unwrap();
    let even = dir.path().join("even.pw1");
    let text = std::fs::read_to_string(fixture("chi.pw1")).unwrap().replace("order 6", "order 3").replace("1 -+ 1/2", "1 -+ 0");
    std::fs::write(&even, text).unwrap();
    let o = pw1(&["eisenstein", "--char", even.to_str().unwrap(), "--bound", "3,3"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn eisenstein_of_chi_cubed() {
    let o = pw1(&["eisenstein", "--char", &fixture("chi_cubed.pw1"), "--bound", "3,3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("c ")).count(), 4);
    assert_eq!(out.lines().filter(|l| l.starts_with("constant ")).count(), 1);
    let s = parse_series(&out).unwrap();
    assert_eq!(s[0].index().len(), 4);
}

#[test]
fn family_bounds_are_accepted() {
    let o = pw1(&["eisenstein", "--char", &fixture("chi_cubed.pw1"), "--bound", "bn:2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("bound 10,-2 10,2"), "{}", stdout(&o));
}

#[test]
fn search_on_shipped_fixtures() {
    let o = run(&search_args("structured"));
    assert!(o.status.success(), "{}", stderr(&o));
    let report = parse_report(&stdout(&o)).unwrap();
    assert_eq!(report.dim_v, 4);
    assert_eq!(report.dim_v2, 2);
    assert_eq!(report.cm_bound, 0);
    assert_eq!(report.candidates.len(), 2);
    assert!(report.stable());
    // Byte-identical reruns, sequential or parallel.
    let again = run(&search_args("structured"));
    assert_eq!(o.stdout, again.stdout);
    let mut seq = search_args("structured");
    seq.insert(0, "--sequential".into());
    assert_eq!(o.stdout, run(&seq).stdout);

    let table = stdout(&run(&search_args("table")));
    assert!(table.contains("dim V2       2"));
    assert!(table.contains("upper bound"));
}

#[test]
fn fixtures_directory_from_environment() {
    let mut args = search_args("table");
    let i = args.iter().position(|a| a == "--fixtures").unwrap();
    args.drain(i..i + 2);
    let o = Command::new(env!("CARGO_BIN_EXE_pw1")).args(&args).env("PW1_FIXTURES", fixture("synthetic")).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("dim V2       2"));
    assert_eq!(run(&args).status.code(), Some(2));
}

#[test]
fn verify_search_candidates() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.pw1");
    std::fs::write(&report, run(&search_args("structured")).stdout).unwrap();
    for index in ["0", "1"] {
        let o = pw1(&[
            "verify",
            "--candidate",
            report.to_str().unwrap(),
            "--index",
            index,
            "--power",
            "3",
            "--high-space",
            &fixture("synthetic/weight_18_6_level_14.pw1"),
            "--aux-space",
            &fixture("synthetic/weight_14_2_level_14.pw1"),
            "--hecke-prime",
            "5,1",
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).starts_with("certified"), "{}", stdout(&o));
    }
}

#[test]
fn cm_test_and_ramanujan_on_table1() {
    let o = pw1(&["cm-test", "--newform", &fixture("table1.pw1"), "--level", "14", "--prime-bound", "49"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("not CM: witness"));

    let o = pw1(&["check-ramanujan", "--newform", &fixture("table1.pw1"), "--norm-bound", "49"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("8 primes checked, 0 violations"), "{}", stdout(&o));
    let o = pw1(&["check-ramanujan", "--newform", &fixture("table1.pw1"), "--norm-bound", "49", "--format", "structured"]);
    let rows: Vec<String> = stdout(&o).lines().skip(1).map(str::to_string).collect();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r.split('\t').nth(7) == Some("true") && r.split('\t').nth(8) == Some("true")));
}

#[test]
fn reconstruct_emits_parseable_series() {
    let o = pw1(&["reconstruct", "--newform", &fixture("table1.pw1"), "--bound", "4,4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = parse_series(&stdout(&o)).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].index().len(), 7);
}
