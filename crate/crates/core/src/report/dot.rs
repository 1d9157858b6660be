use std::fmt::Write;

use super::TraceMapping;
use crate::diagram::{ActivityDiagram, EdgeKind, Node, NodeKind};
use crate::translate::ElementRef;

const PATH: &str = "red";
const CHOICE: &str = "orange";

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn shape(n: &Node) -> Vec<(&'static str, String)> {
    let s = |v: &str| v.to_string();
    match n.kind {
        NodeKind::Initial => vec![
            ("shape", s("circle")),
            ("style", s("filled")),
            ("fillcolor", s("black")),
            ("width", s("0.25")),
            ("label", s("")),
        ],
        NodeKind::ActivityFinal => vec![
            ("shape", s("doublecircle")),
            ("style", s("filled")),
            ("fillcolor", s("black")),
            ("width", s("0.2")),
            ("label", s("")),
        ],
        NodeKind::FlowFinal => vec![("shape", s("circle")), ("width", s("0.25")), ("label", s("X"))],
        NodeKind::Decision | NodeKind::Merge => vec![("shape", s("diamond")), ("label", s(""))],
        NodeKind::Fork | NodeKind::Join => vec![
            ("shape", s("box")),
            ("style", s("filled")),
            ("fillcolor", s("black")),
            ("height", s("0.06")),
            ("width", s("1.2")),
            ("label", s("")),
        ],
        NodeKind::SendSignal => vec![("shape", s("cds")), ("label", s(n.label()))],
        NodeKind::AcceptEvent => vec![("shape", s("invhouse")), ("label", s(n.label()))],
        NodeKind::BasicAction | NodeKind::CallBehavior => {
            let label = match (&n.callee, n.kind) {
                (Some(c), NodeKind::CallBehavior) => format!("{}\n<<call {c}>>", n.label()),
                _ => n.label().to_string(),
            };
            vec![("shape", s("box")), ("style", s("rounded")), ("label", label)]
        }
        NodeKind::ObjectNode
        | NodeKind::InputPin
        | NodeKind::OutputPin
        | NodeKind::InputParameter
        | NodeKind::OutputParameter => vec![("shape", s("rect")), ("label", s(n.label()))],
    }
}

fn mark(t: &TraceMapping, el: &ElementRef) -> Option<&'static str> {
    if t.choice_point.contains(el) {
        Some(CHOICE)
    } else if t.highlighted.contains(el) {
        Some(PATH)
    } else {
        None
    }
}

fn attrs(out: &mut String, list: &[(&str, String)]) {
    out.push_str(" [");
    for (i, (k, v)) in list.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{k}={}", quote(v));
    }
    out.push(']');
}

/// Graphviz rendering of every activity, one cluster each, with the mapped counterexample
/// drawn in red and a nondeterministic choice point in orange.
pub fn emit_dot(d: &ActivityDiagram, t: &TraceMapping) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(&d.top_level));
    out.push_str("  compound=true;\n  rankdir=TB;\n");
    out.push_str("  node [fontname=\"Helvetica\", fontsize=10];\n");
    out.push_str("  edge [fontname=\"Helvetica\", fontsize=9];\n");
    for act in &d.activities {
        let a: &str = &act.id;
        let _ = writeln!(out, "  subgraph {} {{", quote(&format!("cluster_{a}")));
        let _ = writeln!(out, "    label={};", quote(a));
        match mark(t, &ElementRef::activity(a)) {
            Some(c) => {
                let _ = writeln!(out, "    color={}; penwidth=2;", quote(c));
            }
            None => out.push_str("    color=\"gray40\";\n"),
        }
        for n in &act.nodes {
            let mut list = shape(n);
            if let Some(c) = mark(t, &ElementRef::node(a, &n.id)) {
                list.push(("color", c.to_string()));
                list.push(("fontcolor", c.to_string()));
                list.push(("penwidth", "2".to_string()));
                if let Some(f) = list.iter_mut().find(|(k, _)| *k == "fillcolor") {
                    f.1 = c.to_string();
                }
            }
            let _ = write!(out, "    {}", quote(&format!("{a}/{}", n.id)));
            attrs(&mut out, &list);
            out.push_str(";\n");
        }
        out.push_str("  }\n");
    }
    for act in &d.activities {
        let a: &str = &act.id;
        for e in &act.edges {
            let mut label = e.id.to_string();
            if let Some(g) = &e.guard {
                let _ = write!(label, " [{g}]");
            }
            if e.decision_input {
                label.push_str(" <<decisionInputFlow>>");
            }
            let mut list = vec![("label", label)];
            if e.kind == EdgeKind::Object {
                list.push(("style", "dashed".to_string()));
            }
            if let Some(c) = mark(t, &ElementRef::edge(a, &e.id)) {
                list.push(("color", c.to_string()));
                list.push(("fontcolor", c.to_string()));
                list.push(("penwidth", "2".to_string()));
            }
            let _ = write!(
                out,
                "  {} -> {}",
                quote(&format!("{a}/{}", e.source)),
                quote(&format!("{a}/{}", e.target))
            );
            attrs(&mut out, &list);
            out.push_str(";\n");
        }
    }
    out.push_str("}\n");
    out
}
