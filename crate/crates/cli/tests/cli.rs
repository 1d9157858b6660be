use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command as Proc;

use actdiag_cli::{main_with, run_corpus, EXIT_DIVERGENT, EXIT_FAIL, EXIT_LIMIT, EXIT_OK, EXIT_USAGE};
use actdiag_core::check::CheckOptions;
use actdiag_core::TranslationConfig;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn file(rel: &str) -> String {
    root().join(rel).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["actdiag"];
    argv.extend_from_slice(args);
    let code = main_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn opts() -> CheckOptions {
    CheckOptions {
        state_limit: 1_000_000,
        jobs: 1,
    }
}

#[test]
fn exit_codes() {
    let fig = file("corpus/c3_motivating.json");
    assert_eq!(run(&["check-deadlock", &fig]).0, EXIT_FAIL);
    assert_eq!(run(&["check-deadlock", &file("fixtures/decision_disjoint.json")]).0, EXIT_OK);
    assert_eq!(run(&["check-determinism", &file("fixtures/decision_disjoint.json")]).0, EXIT_OK);
    assert_eq!(run(&["check-deadlock", &fig, "--state-limit", "5"]).0, EXIT_LIMIT);
    let (code, out, _) = run(&["check-determinism", &file("fixtures/loop.json"), "--hide", "ce,behavior"]);
    assert_eq!(code, EXIT_DIVERGENT, "{out}");
    assert!(out.contains("divergent"));
    assert_eq!(run(&["check-deadlock", "/nonexistent/x.json"]).0, EXIT_USAGE);
    assert_eq!(run(&["check-deadlock"]).0, EXIT_USAGE);
    assert_eq!(run(&["frobnicate", &fig]).0, EXIT_USAGE);
    assert_eq!(run(&["check-deadlock", &fig, "--hide", "nosuch"]).0, EXIT_USAGE);
    assert_eq!(run(&["check-deadlock", &fig, "--state-limit", "0"]).0, EXIT_USAGE);
    assert_eq!(run(&["--help"]).0, EXIT_OK);
}

#[test]
fn check_all_takes_most_severe_outcome() {
    let (code, out, _) = run(&["check-all", &file("corpus/c2_storage.json")]);
    assert_eq!(code, EXIT_FAIL);
    assert!(out.contains("deadlock: pass"));
    assert!(out.contains("determinism: fail"));
    let (code, _, _) = run(&["check-all", &file("fixtures/loop.json"), "--hide", "ce,behavior"]);
    assert_eq!(code, EXIT_DIVERGENT);
}

#[test]
fn validate_reports_structural_errors() {
    let (code, out, _) = run(&["validate", &file("corpus/c3_motivating.json")]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("10 nodes, 11 edges, 0 errors"));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let text = fs::read_to_string(file("fixtures/minimal.json")).unwrap();
    fs::write(&bad, text.replace("\"target\": \"fin\"", "\"target\": \"act1\"")).unwrap();
    let (code, out, _) = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE, "{out}");
    assert!(out.contains("error["));
    fs::write(&bad, "{ not json").unwrap();
    let (code, _, err) = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.starts_with("error:"));
}

#[test]
fn motivating_dot_marks_the_d_branch() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("fig.dot");
    let (code, _, _) = run(&["check-deadlock", &file("corpus/c3_motivating.json"), "--dot", dot.to_str().unwrap()]);
    assert_eq!(code, EXIT_FAIL);
    let text = fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph \"ad\" {"));
    let line = |needle: &str| text.lines().find(|l| l.contains(needle)).unwrap_or_else(|| panic!("{needle}"));
    assert!(line("\"ad/D\" [").contains("color=\"red\""));
    assert!(line("label=\"e5").contains("color=\"red\""));
    assert!(!line("\"ad/E\" [").contains("color=\"red\""));
}

#[test]
fn translate_matches_golden_file() {
    let golden = fs::read_to_string(file("fixtures/golden/minimal.csp")).unwrap();
    let (code, out, _) = run(&["translate", &file("fixtures/minimal.json")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, golden);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m.csp");
    let (code, out, _) = run(&["translate", &file("fixtures/minimal.json"), "--cspm", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    assert_eq!(fs::read_to_string(p).unwrap(), golden);
}

#[test]
fn report_file_is_report_v1() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    let (code, _, _) = run(&["check-determinism", &file("corpus/c1_cloud_network.json"), "--report", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_FAIL);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(v["schema"], "report-v1");
    assert_eq!(v["property"], "determinism");
    assert_eq!(v["result"], "fail");
    assert_eq!(v["exitCode"], 1);
    assert!(v["choice"].is_string());
    assert!(v.get("fullTrace").is_none());
    assert!(v["statistics"].get("wallTimeMs").is_none());
    let (_, _, _) = run(&[
        "check-determinism",
        &file("corpus/c1_cloud_network.json"),
        "--report",
        p.to_str().unwrap(),
        "--debug-trace",
        "--wall-time",
    ]);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap();
    assert!(v["fullTrace"].as_array().is_some_and(|a| !a.is_empty()));
    assert!(v["statistics"]["wallTimeMs"].is_number());
}

#[test]
fn output_paths_must_differ() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("x");
    let p = p.to_str().unwrap();
    let fig = file("corpus/c3_motivating.json");
    let (code, _, err) = run(&["check-deadlock", &fig, "--report", p, "--dot", p]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("given twice"));
    let (code, _, _) = run(&["check-deadlock", &fig, "--dot", &fig]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn corpus_counts() {
    let s = run_corpus(&root().join("corpus"), &TranslationConfig::default(), &opts()).unwrap();
    let counts: Vec<(&str, usize, usize)> = s.rows.iter().map(|r| (r.activity.as_str(), r.nodes, r.edges)).collect();
    assert_eq!(
        counts,
        vec![("cloud", 9, 12), ("storage", 17, 11), ("ad", 10, 11), ("hotel", 27, 32), ("ecommerce", 32, 37)]
    );
    assert!(s.rows.iter().all(|r| r.error.is_none()));
    let verdicts: Vec<&str> = s.rows.iter().map(|r| r.deadlock.as_str()).collect();
    assert_eq!(verdicts, ["fail", "pass", "fail", "pass", "fail"]);
    let csv = s.to_csv(false);
    assert_eq!(csv.lines().next(), Some("file,activity,nodes,edges,deadlock,determinism,states"));
    assert!(csv.contains("c1_cloud_network.json,cloud,9,12,fail,fail,"));
}

#[test]
fn corpus_keeps_going_past_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(file("fixtures/minimal.json"), dir.path().join("a.json")).unwrap();
    fs::write(dir.path().join("b.json"), "[]").unwrap();
    fs::write(dir.path().join("notes.txt"), "skip me").unwrap();
    let csv = dir.path().join("out.csv");
    let (code, out, _) = run(&["corpus", dir.path().to_str().unwrap(), "--csv", csv.to_str().unwrap(), "--no-times"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3, "{out}");
    assert!(lines[1].starts_with("a.json") && lines[1].contains("pass"));
    assert!(lines[2].starts_with("b.json") && lines[2].contains("error"));
    let csv = fs::read_to_string(csv).unwrap();
    assert!(csv.lines().nth(2).unwrap().starts_with("b.json,,0,0,error,error,-,"));

    let empty = tempfile::tempdir().unwrap();
    let (code, out, _) = run(&["corpus", empty.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 1);
    assert_eq!(run(&["corpus", "/nonexistent/dir"]).0, EXIT_USAGE);
}

fn check_all_into(dir: &Path, input: &str, jobs: &str) -> (i32, String) {
    let p = |n: &str| dir.join(n).to_string_lossy().into_owned();
    let (code, out, _) = run(&[
        "check-all",
        input,
        "--report",
        &p("r.json"),
        "--dot",
        &p("d.dot"),
        "--cspm",
        &p("m.csp"),
        "--jobs",
        jobs,
    ]);
    (code, out)
}

fn contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn check_all_is_byte_identical_across_runs() {
    for f in ["corpus/c1_cloud_network.json", "corpus/c3_motivating.json", "fixtures/call.json"] {
        let input = file(f);
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let c = tempfile::tempdir().unwrap();
        let ra = check_all_into(a.path(), &input, "1");
        let rb = check_all_into(b.path(), &input, "1");
        let rc = check_all_into(c.path(), &input, "4");
        assert_eq!(ra, rb);
        assert_eq!(ra, rc);
        let names: Vec<String> = contents(a.path()).into_iter().map(|(n, _)| n).collect();
        assert_eq!(names, ["d-deadlock.dot", "d-determinism.dot", "m.csp", "r-deadlock.json", "r-determinism.json"]);
        assert_eq!(contents(a.path()), contents(b.path()));
        assert_eq!(contents(a.path()), contents(c.path()));
    }
}

#[test]
fn binary_reads_state_limit_from_environment() {
    let bin = env!("CARGO_BIN_EXE_actdiag");
    let fig = file("corpus/c3_motivating.json");
    let st = Proc::new(bin).args(["check-deadlock", &fig]).env("ACTDIAG_STATE_LIMIT", "5").output().unwrap();
    assert_eq!(st.status.code(), Some(EXIT_LIMIT));
    assert!(String::from_utf8_lossy(&st.stdout).contains("state limit reached"));
    let st = Proc::new(bin).args(["check-deadlock", &fig]).env_remove("ACTDIAG_STATE_LIMIT").output().unwrap();
    assert_eq!(st.status.code(), Some(EXIT_FAIL));
    let st = Proc::new(bin).arg("check-deadlock").output().unwrap();
    assert_eq!(st.status.code(), Some(EXIT_USAGE));
}
