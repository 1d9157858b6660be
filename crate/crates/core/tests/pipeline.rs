use std::path::PathBuf;

use actdiag_core::check::VerdictResult;
use actdiag_core::*;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn load(rel: &str) -> ActivityDiagram {
    let text = std::fs::read_to_string(root().join(rel)).unwrap();
    parse_diagram(&text).unwrap()
}

fn model(rel: &str) -> CspModel {
    translate(&load(rel), &TranslationConfig::default()).unwrap()
}

fn opts() -> CheckOptions {
    CheckOptions {
        state_limit: 1_000_000,
        jobs: 1,
    }
}

#[test]
fn minimal_is_deadlock_free_and_deterministic() {
    let m = model("fixtures/minimal.json");
    let l = build_lts(&m, &opts()).unwrap();
    eprintln!("states {}", l.len());
    assert!(check_deadlock(&l).is_pass(), "{}", check_deadlock(&l));
    assert!(check_determinism(&l).is_pass(), "{}", check_determinism(&l));
    assert!(find_divergence(&l).is_none());
}

#[test]
fn minimal_visible_trace() {
    let m = model("fixtures/minimal.json");
    let l = build_lts(&m, &opts()).unwrap();
    let done = (0..l.len() as u32).find(|&s| l.is_terminated(s)).unwrap();
    let t: Vec<String> = shortest_trace(&l, done)
        .unwrap()
        .iter()
        .filter(|e| **e != Event::Tau)
        .map(|e| e.to_string())
        .collect();
    assert_eq!(
        t,
        [
            "startActivity_ad",
            "ce_ad.1",
            "behavior_act1_ad",
            "ce_ad.2",
            "endDiagram_ad",
            "endActivity_ad",
            "tick"
        ]
    );
}

#[test]
fn motivating_deadlocks_through_d() {
    let m = model("corpus/c3_motivating.json");
    let l = build_lts(&m, &opts()).unwrap();
    let v = check_deadlock(&l);
    eprintln!("{v} states={}", l.len());
    let VerdictResult::Fail { trace, .. } = &v.result else {
        panic!("{v}")
    };
    let names: Vec<String> = trace.iter().map(|e| e.to_string()).collect();
    assert!(names.contains(&"ce_ad.5".to_string()));
    assert!(names.contains(&"behavior_D_ad".to_string()));
}

fn names(trace: &[Event]) -> Vec<String> {
    trace.iter().map(|e| e.to_string()).collect()
}

#[test]
fn cloud_network_deadlocks_and_is_nondeterministic() {
    let m = model("corpus/c1_cloud_network.json");
    let l = build_lts(&m, &opts()).unwrap();
    let d = check_deadlock(&l);
    let n = check_determinism(&l);
    eprintln!("{d}\n{n}\nstates={}", l.len());
    assert!(d.is_fail());
    assert!(n.is_fail());
}

#[test]
fn storage_branches_overlap_above_two() {
    let m = model("corpus/c2_storage.json");
    let l = build_lts(&m, &opts()).unwrap();
    assert!(check_deadlock(&l).is_pass(), "{}", check_deadlock(&l));
    let v = check_determinism(&l);
    eprintln!("{v} states={}", l.len());
    let VerdictResult::Fail { trace, .. } = &v.result else {
        panic!("{v}")
    };
    assert_eq!(names(trace)[0], "startActivity_storage.3");
}

#[test]
fn hotel_is_deadlock_free() {
    let m = model("corpus/c4_hotel.json");
    let l = build_lts(&m, &opts()).unwrap();
    eprintln!("{} states={}", check_determinism(&l), l.len());
    assert!(check_deadlock(&l).is_pass(), "{}", check_deadlock(&l));
}

#[test]
fn ecommerce_deadlocks_on_reminder_cycle() {
    let m = model("corpus/c5_ecommerce.json");
    let l = build_lts(&m, &opts()).unwrap();
    let v = check_deadlock(&l);
    eprintln!("{v} states={}", l.len());
    let VerdictResult::Fail { trace, .. } = &v.result else {
        panic!("{v}")
    };
    let hits: Vec<_> = trace
        .iter()
        .flat_map(|e| m.trace_map.lookup(e))
        .map(|r| r.to_string())
        .collect();
    assert!(hits.iter().any(|h| h == "ecommerce/edge/e25"), "{hits:?}");
    assert!(hits.iter().any(|h| h == "ecommerce/edge/e26"), "{hits:?}");
}

#[test]
fn ecommerce_fix_removes_deadlock() {
    let m = model("corpus/variants/c5_ecommerce_fixed.json");
    let l = build_lts(&m, &opts()).unwrap();
    eprintln!("states={}", l.len());
    assert!(check_deadlock(&l).is_pass(), "{}", check_deadlock(&l));
}

#[test]
fn disjoint_guards_are_deterministic() {
    let l = build_lts(&model("fixtures/decision_disjoint.json"), &opts()).unwrap();
    assert!(check_determinism(&l).is_pass(), "{}", check_determinism(&l));
    assert!(check_deadlock(&l).is_pass());
}

#[test]
fn overlapping_guards_fail_at_two() {
    let l = build_lts(&model("fixtures/decision_overlap.json"), &opts()).unwrap();
    let v = check_determinism(&l);
    let VerdictResult::Fail { trace, .. } = &v.result else {
        panic!("{v}")
    };
    assert_eq!(names(trace)[0], "startActivity_ad.2");
}

#[test]
fn hidden_loop_diverges() {
    let cfg = TranslationConfig {
        hide: vec!["ce".into(), "behavior".into()],
        ..Default::default()
    };
    let m = translate(&load("fixtures/loop.json"), &cfg).unwrap();
    let l = build_lts(&m, &opts()).unwrap();
    let lasso = find_divergence(&l).expect("tau cycle");
    assert!(!lasso.cycle.is_empty());
    assert!(lasso.cycle.iter().all(|e| *e == Event::Tau));
    let v = check_determinism(&l);
    assert!(matches!(v.result, VerdictResult::Divergent { .. }), "{v}");
    assert!(find_divergence(&build_lts(&model("fixtures/loop.json"), &opts()).unwrap()).is_none());
}

#[test]
fn repeated_call_runs_callee_twice() {
    let m = model("fixtures/call.json");
    let l = build_lts(&m, &opts()).unwrap();
    assert!(check_deadlock(&l).is_pass(), "{}", check_deadlock(&l));
    let done = (0..l.len() as u32).find(|&s| l.is_terminated(s)).unwrap();
    let t = names(&shortest_trace(&l, done).unwrap());
    let starts: Vec<_> = t.iter().filter(|e| e.starts_with("startActivity_sub")).collect();
    assert_eq!(starts, ["startActivity_sub.main", "startActivity_sub.main"]);
    assert_eq!(t.iter().filter(|e| *e == "behavior_step_sub").count(), 2);
}

#[test]
fn signal_reaches_listener() {
    let m = model("fixtures/signal.json");
    let l = build_lts(&m, &opts()).unwrap();
    assert!(check_deadlock(&l).is_pass(), "{}", check_deadlock(&l));
    let done = (0..l.len() as u32).find(|&s| l.is_terminated(s)).unwrap();
    let t = names(&shortest_trace(&l, done).unwrap());
    assert!(t.contains(&"signal_Ping.main.listener".to_string()), "{t:?}");
    assert!(t.contains(&"behavior_react_listener".to_string()));
}
