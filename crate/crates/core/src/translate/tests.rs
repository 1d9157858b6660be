use std::collections::BTreeSet;

use super::*;
use crate::{parse_diagram, Event};

fn load(rel: &str) -> ActivityDiagram {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../").to_string() + rel;
    parse_diagram(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn tr(d: &ActivityDiagram) -> CspModel {
    translate(d, &TranslationConfig::default()).unwrap()
}

fn body(m: &CspModel, name: &str) -> String {
    m.env.get(name).unwrap_or_else(|| panic!("no {name}")).body.to_string()
}

fn fan(k: usize) -> ActivityDiagram {
    let mut nodes = vec![
        r#"{"id":"init","kind":"Initial"}"#.to_string(),
        r#"{"id":"f","kind":"Fork"}"#.to_string(),
        r#"{"id":"j","kind":"Join"}"#.to_string(),
        r#"{"id":"fin","kind":"ActivityFinal"}"#.to_string(),
    ];
    let mut edges = vec![
        r#"{"id":"e0","source":"init","target":"f","kind":"control"}"#.to_string(),
        r#"{"id":"ez","source":"j","target":"fin","kind":"control"}"#.to_string(),
    ];
    for i in 0..k {
        nodes.push(format!(r#"{{"id":"a{i}","kind":"BasicAction"}}"#));
        edges.push(format!(r#"{{"id":"in{i}","source":"f","target":"a{i}","kind":"control"}}"#));
        edges.push(format!(r#"{{"id":"out{i}","source":"a{i}","target":"j","kind":"control"}}"#));
    }
    let text = format!(
        r#"{{"topLevel":"ad","activities":[{{"id":"ad","nodes":[{}],"edges":[{}]}}]}}"#,
        nodes.join(","),
        edges.join(",")
    );
    parse_diagram(&text).unwrap()
}

#[test]
fn minimal_definitions() {
    let m = tr(&load("fixtures/minimal.json"));
    let names: Vec<String> = m.env.iter().map(|d| d.name.to_string()).collect();
    assert_eq!(
        names,
        [
            "Action_act1_ad",
            "Action_act1_ad_t",
            "ActivityFinal_fin_ad",
            "ActivityFinal_fin_ad_t",
            "Init_init_ad",
            "Init_init_ad_t",
            "Token_Manager_ad"
        ]
    );
    assert_eq!(body(&m, "Init_init_ad"), "update_ad.1 -> ce_ad.1 -> SKIP");
    assert_eq!(
        body(&m, "Action_act1_ad"),
        "ce_ad.1 -> behavior_act1_ad -> ce_ad.2 -> Action_act1_ad"
    );
    assert_eq!(
        body(&m, "ActivityFinal_fin_ad"),
        "(ce_ad.2 -> SKIP ; clear_ad -> SKIP)"
    );
    assert_eq!(
        body(&m, "Action_act1_ad_t"),
        "(Action_act1_ad /\\ endDiagram_ad -> SKIP)"
    );
    assert_eq!(m.max_tokens[&Name::from("ad")], 5);
}

#[test]
fn token_manager_shape() {
    let (name, params, p) = token_manager("ad", 2, false);
    assert_eq!(name, "Token_Manager_ad");
    assert_eq!(params.len(), 2);
    assert_eq!(
        p.to_string(),
        "(update_ad?x:{(-2),(-1),0,1,2} -> Token_Manager_ad(max(0, min((n + x), 2)), true) \
         [] (clear_ad -> endDiagram_ad -> SKIP [] (((n == 0) and init) & endDiagram_ad -> SKIP)))"
    );
    let (_, _, strict) = token_manager("ad", 2, true);
    let s = strict.to_string();
    assert!(s.contains("((n + x) <= 2) & Token_Manager_ad((n + x), true)"), "{s}");
    assert!(s.contains("((n + x) > 2) & overflow_ad -> STOP"), "{s}");
}

#[test]
fn motivating_events() {
    let m = tr(&load("corpus/c3_motivating.json"));
    let ce = ChannelName::new(ChannelBase::Ce, None, Some("ad"));
    let dom: Vec<Value> = m.channels[&ce][0].to_vec();
    assert_eq!(dom, (1..=11).map(Value::Int).collect::<Vec<_>>());
    let behaviors = m
        .channels
        .keys()
        .filter(|c| c.base == ChannelBase::Behavior)
        .count();
    assert_eq!(behaviors, 7);
    assert!(m.hidden.iter().all(|c| DEFAULT_HIDDEN.contains(&c.base.as_str())));
    assert!(m.visible.contains(&ce));
}

#[test]
fn every_edge_is_sent_once_and_received_once() {
    for rel in [
        "corpus/c3_motivating.json",
        "corpus/c5_ecommerce.json",
        "corpus/c4_hotel.json",
    ] {
        let d = load(rel);
        let m = tr(&d);
        let act = &d.activities[0];
        for e in &act.edges {
            let ev = format!("ce_{}.{}", act.id, e.index);
            let holders: Vec<String> = m
                .env
                .iter()
                .filter(|def| !def.name.ends_with("_t"))
                .filter(|def| {
                    let b = def.body.to_string();
                    b.contains(&format!("{ev} ")) || b.contains(&format!("{ev})"))
                })
                .map(|def| def.name.to_string())
                .collect();
            assert_eq!(holders.len(), 2, "{rel} {ev}: {holders:?}");
            let src = holders.iter().any(|h| h.contains(&format!("_{}_", e.source)));
            let tgt = holders.iter().any(|h| h.contains(&format!("_{}_", e.target)));
            assert!(src && tgt, "{rel} {ev}: {holders:?}");
        }
    }
}

#[test]
fn edge_events_trace_to_their_edge() {
    let d = load("corpus/c5_ecommerce.json");
    let m = tr(&d);
    for e in &d.activities[0].edges {
        let ev = Event::new(
            ChannelName::new(ChannelBase::Ce, None, Some("ecommerce")),
            vec![Value::Int(e.index as i64)],
        );
        let hits: Vec<String> = m.trace_map.lookup(&ev).iter().map(|r| r.to_string()).collect();
        assert_eq!(hits, [format!("ecommerce/edge/{}", e.id)]);
    }
}

#[test]
fn fork_and_join_update_arithmetic() {
    for k in 1..=4i64 {
        let d = fan(k as usize);
        let m = if k == 1 {
            translate_unchecked(&d, &TranslationConfig::default()).unwrap()
        } else {
            tr(&d)
        };
        let fork = body(&m, "Fork_f_ad");
        let join = body(&m, "Join_j_ad");
        let num = |v: i64| if v < 0 { format!("({v})") } else { v.to_string() };
        assert!(fork.contains(&format!("update_ad.{} ->", num(k - 1))), "{fork}");
        assert!(join.contains(&format!("update_ad.{} ->", num(1 - k))), "{join}");
        assert!(body(&m, "Init_init_ad").starts_with("update_ad.1 -> "));
        let l = crate::build_lts(
            &m,
            &crate::CheckOptions {
                state_limit: 100_000,
                jobs: 1,
            },
        )
        .unwrap();
        assert!(crate::check_deadlock(&l).is_pass());
    }
}

#[test]
fn initial_counts_its_outgoing_edges() {
    let d = load("corpus/c1_cloud_network.json");
    let m = tr(&d);
    assert!(body(&m, "Init_init_cloud").starts_with("update_cloud.3 -> "));
}

#[test]
fn call_adds_callee_wrapper() {
    let m = tr(&load("fixtures/call.json"));
    let w = body(&m, "Activity_sub");
    assert!(w.starts_with("startActivity_sub?caller:{main} -> "), "{w}");
    assert!(w.contains("endActivity_sub.caller -> Activity_sub"), "{w}");
    assert!(m.env.get("Token_Manager_sub").is_some());
    assert!(m.main.to_string().contains("(Activity_sub /\\ sysdone -> SKIP)"));
}

#[test]
fn activity_alphabets_compose() {
    let m = tr(&load("fixtures/signal.json"));
    let text = m.main.to_string();
    assert!(text.contains("signal_Ping"), "{text}");
    let signal = ChannelName::new(ChannelBase::Signal, Some("Ping"), None);
    let doms = &m.channels[&signal];
    assert_eq!(doms.len(), 2);
    let bad = Event::new(signal.clone(), vec![Value::Sym("main".into()), Value::Sym("main".into())]);
    assert!(m.trace_map.lookup(&bad).iter().any(|r| r.to_string() == "main/node/ping"));
}

#[test]
fn unknown_hide_base_is_rejected() {
    let cfg = TranslationConfig {
        hide: vec!["nonsense".into()],
        ..Default::default()
    };
    assert!(matches!(
        translate(&load("fixtures/minimal.json"), &cfg),
        Err(TranslateError::UnknownChannel(_))
    ));
}

#[test]
fn visible_overrides_default_hiding() {
    let cfg = TranslationConfig {
        visible: vec!["update".into()],
        ..Default::default()
    };
    let m = translate(&load("fixtures/minimal.json"), &cfg).unwrap();
    let hidden: BTreeSet<&str> = m.hidden.iter().map(|c| c.base.as_str()).collect();
    assert!(!hidden.contains("update"));
    assert!(hidden.contains("clear"));
}

#[test]
fn cspm_export_is_stable() {
    let m = tr(&load("fixtures/minimal.json"));
    let a = cspm::export_cspm(&m);
    assert_eq!(a, cspm::export_cspm(&tr(&load("fixtures/minimal.json"))));
    let golden = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/golden/minimal.csp");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(golden, &a).unwrap();
    }
    assert_eq!(a, std::fs::read_to_string(golden).unwrap());
}

#[test]
fn initial_update_matches_outgoing_edges() {
    for k in 1..=4 {
        let nodes: Vec<String> = std::iter::once(r#"{"id":"init","kind":"Initial"}"#.to_string())
            .chain((0..k).map(|i| format!(r#"{{"id":"ff{i}","kind":"FlowFinal"}}"#)))
            .collect();
        let edges: Vec<String> = (0..k)
            .map(|i| format!(r#"{{"id":"e{i}","source":"init","target":"ff{i}","kind":"control"}}"#))
            .collect();
        let text = format!(
            r#"{{"topLevel":"ad","activities":[{{"id":"ad","nodes":[{}],"edges":[{}]}}]}}"#,
            nodes.join(","),
            edges.join(",")
        );
        let m = tr(&parse_diagram(&text).unwrap());
        assert!(body(&m, "Init_init_ad").starts_with(&format!("update_ad.{k} -> ")));
        for i in 0..k {
            assert_eq!(
                body(&m, &format!("FlowFinal_ff{i}_ad")),
                format!("(ce_ad.{} -> SKIP ; update_ad.(-1) -> FlowFinal_ff{i}_ad)", i + 1)
            );
        }
    }
}
