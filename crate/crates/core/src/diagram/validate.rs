//! Structural well-formedness checks. Violations are data: callers decide what to reject.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use super::{ActivityDiagram, DataType, EdgeKind, NodeKind, DEFAULT_INT_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    /// `activity` or `activity/element`.
    pub element: String,
    pub rule: &'static str,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}[{}] {}: {}", self.rule, self.element, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationConfig {
    pub int_cap: u64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            int_cap: DEFAULT_INT_CAP,
        }
    }
}

pub fn validate(d: &ActivityDiagram) -> Vec<Violation> {
    validate_with(d, &ValidationConfig::default())
}

pub fn validate_with(d: &ActivityDiagram, cfg: &ValidationConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |element: String, rule: &'static str, severity: Severity, message: String| {
        out.push(Violation {
            element,
            rule,
            severity,
            message,
        })
    };

    let top_count = d
        .activities
        .iter()
        .filter(|a| a.id == d.top_level)
        .count();
    if top_count != 1 {
        push(
            d.top_level.to_string(),
            "top-level-exists",
            Severity::Error,
            format!("top level must name exactly one activity, found {top_count}"),
        );
    }
    let mut act_ids = HashSet::new();
    for a in &d.activities {
        if !act_ids.insert(&a.id) {
            push(
                a.id.to_string(),
                "activity-id-unique",
                Severity::Error,
                "duplicate activity id".into(),
            );
        }
    }

    for a in &d.activities {
        let at = |el: &str| format!("{}/{}", a.id, el);
        let mut ids = HashSet::new();
        for n in &a.nodes {
            if !ids.insert(&n.id) {
                push(at(&n.id), "node-id-unique", Severity::Error, "duplicate node id".into());
            }
        }
        let mut edge_ids = HashSet::new();
        let mut indices = BTreeSet::new();
        for e in &a.edges {
            if !edge_ids.insert(&e.id) {
                push(at(&e.id), "edge-id-unique", Severity::Error, "duplicate edge id".into());
            }
            if e.index == 0 || e.index as usize > a.edges.len() || !indices.insert(e.index) {
                push(
                    at(&e.id),
                    "edge-index-range",
                    Severity::Error,
                    format!(
                        "edge index {} is not a distinct value in 1..={}",
                        e.index,
                        a.edges.len()
                    ),
                );
            }
            for ep in [&e.source, &e.target] {
                if a.node(ep).is_none() {
                    push(
                        at(&e.id),
                        "edge-endpoint-exists",
                        Severity::Error,
                        format!("endpoint `{ep}` does not exist"),
                    );
                }
            }
        }

        for n in &a.nodes {
            let inc: Vec<_> = a.incoming(&n.id).collect();
            let out_n = a.outgoing(&n.id).count();
            let main_in = inc.iter().filter(|e| !e.decision_input).count();
            let el = at(&n.id);
            let mut rule = |ok: bool, rule: &'static str, msg: &str| {
                if !ok {
                    push(el.clone(), rule, Severity::Error, msg.to_string());
                }
            };
            match n.kind {
                NodeKind::Initial => {
                    rule(inc.is_empty(), "initial-no-incoming", "initial node has incoming edges");
                    rule(out_n >= 1, "initial-has-outgoing", "initial node needs an outgoing edge");
                }
                NodeKind::ActivityFinal | NodeKind::FlowFinal => {
                    rule(!inc.is_empty(), "final-has-incoming", "final node needs an incoming edge");
                    rule(out_n == 0, "final-no-outgoing", "final node has outgoing edges");
                }
                NodeKind::Merge | NodeKind::Decision => {
                    rule(main_in >= 1, "branch-has-incoming", "needs at least one incoming edge");
                    rule(out_n >= 1, "branch-has-outgoing", "needs at least one outgoing edge");
                }
                NodeKind::Fork => {
                    rule(inc.len() == 1, "fork-single-incoming", "fork needs exactly one incoming edge");
                }
                NodeKind::Join => {
                    rule(inc.len() >= 2, "join-arity", "join needs at least two incoming edges");
                    rule(out_n == 1, "join-arity", "join needs exactly one outgoing edge");
                }
                NodeKind::InputParameter => rule(
                    inc.is_empty(),
                    "input-parameter-outgoing-only",
                    "input parameter has incoming edges",
                ),
                NodeKind::OutputParameter => rule(
                    out_n == 0,
                    "output-parameter-incoming-only",
                    "output parameter has outgoing edges",
                ),
                NodeKind::SendSignal | NodeKind::AcceptEvent => {
                    rule(n.signal.is_some(), "signal-declared", "signal action without a signal")
                }
                NodeKind::CallBehavior => match &n.callee {
                    None => rule(false, "callee-declared", "call behavior without a callee"),
                    Some(c) => rule(
                        d.activity(c).is_some(),
                        "callee-exists",
                        &format!("callee `{c}` is not a declared activity"),
                    ),
                },
                _ => {}
            }
            if n.kind.is_object_bearing() {
                match &n.value_type {
                    None => rule(false, "value-type-required", "object-bearing node without valueType"),
                    Some(t) => check_type(t, cfg, &mut rule),
                }
            } else if n.value_type.is_some() {
                rule(false, "value-type-misplaced", "valueType on a node that holds no objects");
            }
            if n.kind == NodeKind::Decision {
                check_decision(a, n, &mut push);
            } else if n.signal.is_some() && !matches!(n.kind, NodeKind::SendSignal | NodeKind::AcceptEvent) {
                push(at(&n.id), "signal-misplaced", Severity::Error, "signal on a non-signal node".into());
            }
        }

        for e in &a.edges {
            let (Some(src), Some(dst)) = (a.node(&e.source), a.node(&e.target)) else {
                continue;
            };
            if e.guard.is_some() && src.kind != NodeKind::Decision {
                push(
                    at(&e.id),
                    "guard-only-on-decision",
                    Severity::Error,
                    "guards are only allowed on decision outgoing edges".into(),
                );
            }
            if e.decision_input && dst.kind != NodeKind::Decision {
                push(
                    at(&e.id),
                    "decision-input-target",
                    Severity::Error,
                    "decisionInputFlow must target a decision node".into(),
                );
            }
            if e.kind == EdgeKind::Object {
                if !(src.kind.is_object_bearing() || dst.kind.is_object_bearing()) {
                    push(
                        at(&e.id),
                        "object-edge-endpoint",
                        Severity::Error,
                        "object edge needs an object-bearing endpoint".into(),
                    );
                } else if a.edge_type(e).is_none() {
                    push(
                        at(&e.id),
                        "object-edge-type",
                        Severity::Error,
                        "cannot determine the value type of the object edge".into(),
                    );
                }
            }
        }
    }

    check_call_graph(d, &mut push);
    out.sort();
    out
}

fn check_type(t: &DataType, cfg: &ValidationConfig, rule: &mut impl FnMut(bool, &'static str, &str)) {
    match t {
        DataType::BoundedInt { min, max } if min > max => {
            rule(false, "datatype-bounds", "int type with min > max")
        }
        DataType::Enum { labels } if labels.is_empty() => {
            rule(false, "datatype-bounds", "enum type without labels")
        }
        _ => {}
    }
    if t.size() > cfg.int_cap {
        rule(
            false,
            "datatype-cap",
            &format!("type {t} has {} values, cap is {}", t.size(), cfg.int_cap),
        );
    }
}

fn check_decision(
    a: &super::Activity,
    n: &super::Node,
    push: &mut impl FnMut(String, &'static str, Severity, String),
) {
    let el = format!("{}/{}", a.id, n.id);
    let inputs: Vec<_> = a.incoming(&n.id).filter(|e| e.decision_input).collect();
    if inputs.len() > 1 {
        push(
            el.clone(),
            "decision-single-input-flow",
            Severity::Error,
            format!("{} decisionInputFlow edges, at most one allowed", inputs.len()),
        );
    }
    let x_type = decision_input_type(a, n);
    let outs: Vec<_> = a.outgoing(&n.id).collect();
    let guarded = outs.iter().filter(|e| e.guard.is_some()).count();
    if guarded > 0 && guarded < outs.len() {
        push(
            el,
            "decision-guards-complete",
            Severity::Warning,
            "some outgoing edges have guards and others do not; unguarded edges are always enabled"
                .into(),
        );
    }
    for e in outs {
        if let Some(g) = &e.guard {
            if let Err(err) = g.typecheck(x_type.as_ref()) {
                push(
                    format!("{}/{}", a.id, e.id),
                    "guard-typecheck",
                    Severity::Error,
                    err.to_string(),
                );
            }
        }
    }
}

/// Type of the value guards of `n` observe: the decisionInputFlow value if present, otherwise
/// the value of an object incoming edge.
pub(crate) fn decision_input_type(a: &super::Activity, n: &super::Node) -> Option<DataType> {
    let inc: Vec<_> = a.incoming(&n.id).collect();
    if let Some(e) = inc.iter().find(|e| e.decision_input) {
        return a.edge_type(e);
    }
    inc.iter()
        .find(|e| e.kind == EdgeKind::Object)
        .and_then(|e| a.edge_type(e))
}

fn check_call_graph(
    d: &ActivityDiagram,
    push: &mut impl FnMut(String, &'static str, Severity, String),
) {
    let graph: BTreeMap<&str, Vec<&str>> = d
        .activities
        .iter()
        .map(|a| {
            (
                &*a.id,
                a.nodes.iter().filter_map(|n| n.callee.as_deref()).collect(),
            )
        })
        .collect();
    // iterative DFS from the top level with an explicit path for cycle detection
    let mut state: BTreeMap<&str, u8> = BTreeMap::new();
    let mut stack: Vec<(&str, usize)> = vec![(&d.top_level, 0)];
    state.insert(&d.top_level, 1);
    while let Some((node, i)) = stack.pop() {
        let succ = graph.get(node).map(Vec::as_slice).unwrap_or(&[]);
        if i < succ.len() {
            stack.push((node, i + 1));
            let next = succ[i];
            match state.get(next) {
                Some(1) => push(
                    node.to_string(),
                    "call-acyclic",
                    Severity::Error,
                    format!("call cycle through `{next}`"),
                ),
                Some(_) => {}
                None => {
                    state.insert(next, 1);
                    stack.push((next, 0));
                }
            }
        } else {
            state.insert(node, 2);
        }
    }
}
