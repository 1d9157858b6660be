use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use super::*;
use crate::csp::tests::{arb_term, ev, pre, set};
use crate::csp::{Environment, Proc, Stepper};

fn opts(limit: usize, jobs: usize) -> CheckOptions {
    CheckOptions {
        state_limit: limit,
        jobs,
    }
}

fn lts(p: &Proc) -> Lts {
    explore(p, &Environment::new(), &opts(10_000, 1)).unwrap()
}

/// Sets of terms, keyed by their printed form.
type Terms = BTreeMap<String, Proc>;

fn one(p: &Proc) -> Terms {
    [(p.to_string(), p.clone())].into()
}

/// Term-level tau closure, computed directly from the semantics.
fn closure(st: &mut Stepper, start: Terms) -> Terms {
    let mut seen = start.clone();
    let mut todo: Vec<Proc> = start.into_values().collect();
    while let Some(p) = todo.pop() {
        for (e, q) in st.transitions(&p).unwrap().iter() {
            if *e == Event::Tau && seen.insert(q.to_string(), q.clone()).is_none() {
                todo.push(q.clone());
            }
        }
    }
    seen
}

/// Every trace of length at most `k`, tau removed, read off the term.
fn term_traces(p: &Proc, k: usize) -> BTreeSet<Vec<Event>> {
    let env = Environment::new();
    let mut st = Stepper::new(&env);
    let mut out = BTreeSet::new();
    let mut layer = vec![(Vec::new(), closure(&mut st, one(p)))];
    for _ in 0..=k {
        let mut next = Vec::new();
        for (tr, states) in layer {
            out.insert(tr.clone());
            let mut by: BTreeMap<Event, Terms> = BTreeMap::new();
            for s in states.values() {
                for (e, q) in st.transitions(s).unwrap().iter() {
                    if *e != Event::Tau {
                        by.entry(e.clone()).or_default().insert(q.to_string(), q.clone());
                    }
                }
            }
            for (e, qs) in by {
                let mut t = tr.clone();
                t.push(e);
                next.push((t, closure(&mut st, qs)));
            }
        }
        layer = next.into_iter().filter(|(t, _)| t.len() <= k).collect();
    }
    out
}

fn normal_traces(n: &NormalizedLts, k: usize) -> BTreeSet<Vec<Event>> {
    let mut out = BTreeSet::new();
    let mut layer = vec![(Vec::new(), 0u32)];
    while let Some((tr, m)) = layer.pop() {
        if tr.len() < k {
            for (e, &to) in n.transitions(m) {
                let mut t = tr.clone();
                t.push(e.clone());
                layer.push((t, to));
            }
        }
        out.insert(tr);
    }
    out
}

/// Failures-model determinism decided on the term: after every trace, no stable state
/// refuses an event that the trace can be extended by.
fn term_deterministic(p: &Proc) -> bool {
    let env = Environment::new();
    let mut st = Stepper::new(&env);
    let mut todo = vec![closure(&mut st, one(p))];
    let mut seen = BTreeSet::new();
    while let Some(states) = todo.pop() {
        if !seen.insert(states.keys().cloned().collect::<Vec<_>>()) {
            continue;
        }
        let mut by: BTreeMap<Event, Terms> = BTreeMap::new();
        let mut stable_offers = Vec::new();
        for s in states.values() {
            let t = st.transitions(s).unwrap();
            if t.iter().all(|(e, _)| *e != Event::Tau) {
                stable_offers.push(t.iter().map(|(e, _)| e.clone()).collect::<BTreeSet<_>>());
            }
            for (e, q) in t.iter() {
                if *e != Event::Tau {
                    by.entry(e.clone()).or_default().insert(q.to_string(), q.clone());
                }
            }
        }
        for e in by.keys() {
            if stable_offers.iter().any(|o| !o.contains(e)) {
                return false;
            }
        }
        for qs in by.into_values() {
            todo.push(closure(&mut st, qs));
        }
    }
    true
}

#[test]
fn single_prefix_has_two_states() {
    let l = lts(&pre("a", Proc::stop()));
    assert_eq!(l.len(), 2);
    assert_eq!(l.transition_count(), 1);
    assert!(l.is_complete());
    let v = check_deadlock(&l);
    let VerdictResult::Fail { trace, witness, .. } = &v.result else {
        panic!("{v}")
    };
    assert_eq!(trace, &[ev("a")]);
    assert_eq!(*witness, 1);
}

#[test]
fn termination_is_not_deadlock() {
    let l = lts(&pre("a", Proc::skip()));
    assert!(check_deadlock(&l).is_pass());
    assert!(check_determinism(&l).is_pass());
}

#[test]
fn internal_choice_is_nondeterministic() {
    let p = Proc::int(pre("a", Proc::stop()), pre("b", Proc::stop()));
    let v = check_determinism(&lts(&p));
    let VerdictResult::Fail { trace, choice, .. } = &v.result else {
        panic!("{v}")
    };
    assert_eq!(trace, &[ev("a")]);
    assert_eq!(choice.as_ref(), Some(&ev("a")));
}

#[test]
fn hidden_choice_is_nondeterministic() {
    let p = Proc::hide(
        Proc::ext(pre("h", pre("a", Proc::stop())), pre("b", Proc::stop())),
        set(&["h"]),
    );
    assert!(check_determinism(&lts(&p)).is_fail());
}

#[test]
fn resource_limit_is_reported() {
    let p = pre("a", pre("b", pre("c", Proc::stop())));
    let l = explore(&p, &Environment::new(), &opts(2, 1)).unwrap();
    assert!(!l.is_complete());
    assert_eq!(l.len(), 2);
    assert_eq!(l.expanded(), 1);
    let expect = VerdictResult::ResourceLimit { states_explored: 2 };
    assert_eq!(check_deadlock(&l).result, expect);
    assert_eq!(check_determinism(&l).result, expect);
}

#[test]
fn deadlock_found_before_limit_is_still_reported() {
    let p = Proc::ext(pre("a", Proc::stop()), pre("b", pre("c", pre("d", Proc::stop()))));
    let l = explore(&p, &Environment::new(), &opts(3, 1)).unwrap();
    assert!(!l.is_complete());
    assert!(check_deadlock(&l).is_fail());
}

#[test]
fn divergence_shows_stem_and_cycle() {
    let mut env = Environment::new();
    env.define("L", vec![], pre("h", Proc::call("L", vec![]))).unwrap();
    let p = pre("a", Proc::hide(Proc::call("L", vec![]), set(&["h"])));
    let l = explore(&p, &env, &opts(100, 1)).unwrap();
    let lasso = find_divergence(&l).unwrap();
    assert_eq!(lasso.stem, [ev("a")]);
    assert_eq!(lasso.cycle, [Event::Tau]);
    assert!(matches!(
        check_determinism(&l).result,
        VerdictResult::Divergent { .. }
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normalisation_preserves_traces(p in arb_term()) {
        let l = lts(&p);
        prop_assume!(l.len() <= 200);
        let n = normalize(&l);
        prop_assert_eq!(normal_traces(&n, 5), term_traces(&p, 5));
    }

    #[test]
    fn determinism_agrees_with_term_oracle(p in arb_term()) {
        let l = lts(&p);
        prop_assume!(l.len() <= 200);
        let v = check_determinism(&l);
        prop_assert_eq!(v.is_pass(), term_deterministic(&p), "{}", v);
    }

    #[test]
    fn counterexamples_replay(p in arb_term()) {
        let l = lts(&p);
        for v in [check_deadlock(&l), check_determinism(&l)] {
            if let VerdictResult::Fail { trace, full_trace, witness, .. } = &v.result {
                prop_assert!(l.replay(full_trace).contains(witness));
                prop_assert!(trace.starts_with(&visible(full_trace)));
                prop_assert!(!l.replay_visible(trace).is_empty());
            }
        }
    }

    #[test]
    fn parallel_exploration_matches_sequential(p in arb_term()) {
        let env = Environment::new();
        let a = explore(&p, &env, &opts(10_000, 1)).unwrap();
        let b = explore(&p, &env, &opts(10_000, 4)).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for s in 0..a.len() as StateId {
            prop_assert_eq!(a.successors(s), b.successors(s));
            prop_assert_eq!(a.state(s), b.state(s));
        }
        prop_assert_eq!(check_deadlock(&a), check_deadlock(&b));
        prop_assert_eq!(check_determinism(&a), check_determinism(&b));
    }

    #[test]
    fn tau_free_functional_systems_are_deterministic(depth in 1usize..6, picks in prop::collection::vec(0usize..3, 1..6)) {
        let names = ["a", "b", "c"];
        let mut p = Proc::stop();
        for i in 0..depth {
            let k = picks[i % picks.len()];
            let others: Vec<Proc> = names.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, n)| pre(n, Proc::skip())).collect();
            p = Proc::ext(pre(names[k], p), Proc::fold_right(others, Proc::ext).unwrap());
        }
        let l = lts(&p);
        prop_assert!(check_determinism(&l).is_pass());
    }
}
