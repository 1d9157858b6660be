use actdiag_bench::{fork_join, load};
use actdiag_core::{build_lts, check_deadlock, translate, validate, CheckOptions, TranslationConfig};

#[test]
fn fork_join_is_valid_and_deadlock_free() {
    for width in 2..=3 {
        let d = fork_join(width, 2);
        assert!(validate(&d).is_empty(), "{:?}", validate(&d));
        let m = translate(&d, &TranslationConfig::default()).unwrap();
        let l = build_lts(&m, &CheckOptions { state_limit: 100_000, jobs: 1 }).unwrap();
        assert!(check_deadlock(&l).is_pass());
    }
}

#[test]
fn corpus_loads() {
    assert_eq!(load("c3_motivating.json").node_count(), 10);
}
