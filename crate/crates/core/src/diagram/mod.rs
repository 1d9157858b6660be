//! Activity diagram model: nodes, edges, guards and bounded data types.
//!
//! Diagrams are loaded from a JSON document (see [`parse_diagram`]) and checked
//! against the structural well-formedness rules in [`validate`].

mod guard;
mod json;
mod validate;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use guard::{eval_guard, parse_guard, BinOp, GuardError, GuardExpr};
pub use json::{parse_diagram, to_json};
pub use validate::{validate, validate_with, Severity, ValidationConfig, Violation};
pub(crate) use validate::decision_input_type;

use crate::{Name, Value};

/// Default cap on the number of values of a bounded data type.
pub const DEFAULT_INT_CAP: u64 = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate {what} id `{id}` in activity `{activity}`")]
    DuplicateId {
        activity: String,
        what: &'static str,
        id: String,
    },
    #[error("duplicate activity id `{0}`")]
    DuplicateActivity(String),
    #[error("edge `{edge}` in activity `{activity}` references missing node `{node}`")]
    DanglingEndpoint {
        activity: String,
        edge: String,
        node: String,
    },
    #[error("unknown node kind `{kind}` for node `{node}`")]
    UnknownNodeKind { node: String, kind: String },
    #[error("unknown edge kind `{kind}` for edge `{edge}`")]
    UnknownEdgeKind { edge: String, kind: String },
    #[error("unknown stereotype `{stereotype}` on edge `{edge}`")]
    UnknownStereotype { edge: String, stereotype: String },
    #[error("invalid identifier `{0}`: expected [A-Za-z][A-Za-z0-9_]*")]
    InvalidIdentifier(String),
    #[error("invalid guard on edge `{edge}`: {source}")]
    Guard {
        edge: String,
        #[source]
        source: GuardError,
    },
    #[error("invalid value type on node `{node}`: {message}")]
    ValueType { node: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    BasicAction,
    SendSignal,
    AcceptEvent,
    CallBehavior,
    Initial,
    ActivityFinal,
    FlowFinal,
    Merge,
    Decision,
    Fork,
    Join,
    ObjectNode,
    InputPin,
    OutputPin,
    InputParameter,
    OutputParameter,
}

impl NodeKind {
    pub const ALL: [NodeKind; 16] = [
        NodeKind::BasicAction,
        NodeKind::SendSignal,
        NodeKind::AcceptEvent,
        NodeKind::CallBehavior,
        NodeKind::Initial,
        NodeKind::ActivityFinal,
        NodeKind::FlowFinal,
        NodeKind::Merge,
        NodeKind::Decision,
        NodeKind::Fork,
        NodeKind::Join,
        NodeKind::ObjectNode,
        NodeKind::InputPin,
        NodeKind::OutputPin,
        NodeKind::InputParameter,
        NodeKind::OutputParameter,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::BasicAction => "BasicAction",
            NodeKind::SendSignal => "SendSignal",
            NodeKind::AcceptEvent => "AcceptEvent",
            NodeKind::CallBehavior => "CallBehavior",
            NodeKind::Initial => "Initial",
            NodeKind::ActivityFinal => "ActivityFinal",
            NodeKind::FlowFinal => "FlowFinal",
            NodeKind::Merge => "Merge",
            NodeKind::Decision => "Decision",
            NodeKind::Fork => "Fork",
            NodeKind::Join => "Join",
            NodeKind::ObjectNode => "ObjectNode",
            NodeKind::InputPin => "InputPin",
            NodeKind::OutputPin => "OutputPin",
            NodeKind::InputParameter => "InputParameter",
            NodeKind::OutputParameter => "OutputParameter",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }

    /// Nodes that hold object tokens and therefore carry a value type.
    pub fn is_object_bearing(self) -> bool {
        matches!(
            self,
            NodeKind::ObjectNode
                | NodeKind::InputPin
                | NodeKind::OutputPin
                | NodeKind::InputParameter
                | NodeKind::OutputParameter
        )
    }

    pub fn is_action(self) -> bool {
        matches!(
            self,
            NodeKind::BasicAction
                | NodeKind::SendSignal
                | NodeKind::AcceptEvent
                | NodeKind::CallBehavior
        )
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A bounded data type. Exploration enumerates every value, so all types are finite.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DataType {
    BoundedInt { min: i64, max: i64 },
    Enum { labels: Vec<Name> },
    Bool,
}

impl DataType {
    /// Every value of the type in ascending order.
    pub fn values(&self) -> Vec<Value> {
        match self {
            DataType::BoundedInt { min, max } => (*min..=*max).map(Value::Int).collect(),
            DataType::Enum { labels } => labels.iter().cloned().map(Value::Sym).collect(),
            DataType::Bool => vec![Value::Bool(false), Value::Bool(true)],
        }
    }

    pub fn size(&self) -> u64 {
        match self {
            DataType::BoundedInt { min, max } if min <= max => (max - min) as u64 + 1,
            DataType::BoundedInt { .. } => 0,
            DataType::Enum { labels } => labels.len() as u64,
            DataType::Bool => 2,
        }
    }

    pub fn contains(&self, v: &Value) -> bool {
        match (self, v) {
            (DataType::BoundedInt { min, max }, Value::Int(i)) => min <= i && i <= max,
            (DataType::Enum { labels }, Value::Sym(s)) => labels.contains(s),
            (DataType::Bool, Value::Bool(_)) => true,
            _ => false,
        }
    }
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataType::BoundedInt { min, max } => write!(f, "int[{min}..{max}]"),
            DataType::Enum { labels } => write!(f, "enum{{{}}}", labels.join(",")),
            DataType::Bool => f.write_str("bool"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: Name,
    pub kind: NodeKind,
    pub name: Option<String>,
    pub signal: Option<Name>,
    pub callee: Option<Name>,
    pub value_type: Option<DataType>,
}

impl Node {
    pub fn new(id: &str, kind: NodeKind) -> Self {
        Node {
            id: id.into(),
            kind,
            name: None,
            signal: None,
            callee: None,
            value_type: None,
        }
    }

    /// Display label: the name if present, otherwise the id.
    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or(&self.id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Control,
    Object,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: Name,
    /// Stable channel index, distinct within the activity.
    pub index: u32,
    pub source: Name,
    pub target: Name,
    pub kind: EdgeKind,
    pub guard: Option<GuardExpr>,
    pub decision_input: bool,
}

impl Edge {
    pub fn control(id: &str, index: u32, source: &str, target: &str) -> Self {
        Edge {
            id: id.into(),
            index,
            source: source.into(),
            target: target.into(),
            kind: EdgeKind::Control,
            guard: None,
            decision_input: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Activity {
    pub id: Name,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

impl Activity {
    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| &*n.id == id)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| &*e.id == id)
    }

    /// Incoming edges of `node` in edge order.
    pub fn incoming<'a>(&'a self, node: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| &*e.target == node)
    }

    pub fn outgoing<'a>(&'a self, node: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| &*e.source == node)
    }

    /// Input parameter nodes in declaration order.
    pub fn parameters(&self) -> impl Iterator<Item = &Node> {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::InputParameter)
    }

    /// Value type carried by an object edge: the source's type if declared, else the target's,
    /// else (for edges leaving a decision or fork) the type flowing into that node.
    pub fn edge_type(&self, edge: &Edge) -> Option<DataType> {
        self.edge_type_depth(edge, 0)
    }

    fn edge_type_depth(&self, edge: &Edge, depth: usize) -> Option<DataType> {
        if depth > self.edges.len() {
            return None;
        }
        let src = self.node(&edge.source)?;
        let dst = self.node(&edge.target)?;
        if let Some(t) = &src.value_type {
            return Some(t.clone());
        }
        if let Some(t) = &dst.value_type {
            return Some(t.clone());
        }
        if matches!(
            src.kind,
            NodeKind::Decision | NodeKind::Fork | NodeKind::Merge
        ) {
            return self
                .incoming(&src.id)
                .filter(|e| e.kind == EdgeKind::Object && !e.decision_input)
                .find_map(|e| self.edge_type_depth(e, depth + 1));
        }
        if matches!(dst.kind, NodeKind::Decision | NodeKind::Fork | NodeKind::Merge) {
            return self
                .outgoing(&dst.id)
                .filter(|e| e.kind == EdgeKind::Object)
                .find_map(|e| {
                    let t = self.node(&e.target)?;
                    t.value_type.clone()
                });
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivityDiagram {
    pub activities: Vec<Activity>,
    pub top_level: Name,
}

impl ActivityDiagram {
    pub fn activity(&self, id: &str) -> Option<&Activity> {
        self.activities.iter().find(|a| &*a.id == id)
    }

    pub fn top(&self) -> Option<&Activity> {
        self.activity(&self.top_level)
    }

    pub fn node_count(&self) -> usize {
        self.activities.iter().map(|a| a.nodes.len()).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.activities.iter().map(|a| a.edges.len()).sum()
    }

    /// Activities reachable from the top level through call-behavior nodes, top level first,
    /// then in discovery order. Unresolved callees are skipped.
    pub fn reachable_activities(&self) -> Vec<&Activity> {
        let mut seen = BTreeSet::new();
        let mut order = Vec::new();
        let mut stack: Vec<&str> = vec![&self.top_level];
        while let Some(id) = stack.pop() {
            if !seen.insert(id.to_string()) {
                continue;
            }
            let Some(act) = self.activity(id) else { continue };
            order.push(act);
            let callees: Vec<&str> = act.nodes.iter().filter_map(|n| n.callee.as_deref()).collect();
            for c in callees.into_iter().rev() {
                stack.push(c);
            }
        }
        order
    }
}

/// Identifier syntax shared by activities, nodes, edges and signals.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn data_type_enumeration_sizes() {
        let t = DataType::BoundedInt { min: -2, max: 3 };
        assert_eq!(t.values().len(), 6);
        assert_eq!(t.size(), 6);
        let e = DataType::Enum {
            labels: vec!["red".into(), "green".into()],
        };
        assert_eq!(e.values(), vec![Value::sym("red"), Value::sym("green")]);
        assert_eq!(DataType::Bool.values().len(), 2);
    }

    #[test]
    fn identifiers() {
        assert!(is_identifier("act1"));
        assert!(is_identifier("Send_bill"));
        assert!(!is_identifier("1act"));
        assert!(!is_identifier("a-b"));
        assert!(!is_identifier(""));
    }
}
