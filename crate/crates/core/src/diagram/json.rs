//! JSON encoding of activity diagrams.
//!
//! ```json
//! {
//!   "topLevel": "ad",
//!   "activities": [{
//!     "id": "ad",
//!     "nodes": [{"id": "init", "kind": "Initial"},
//!               {"id": "act1", "kind": "BasicAction", "name": "Act 1"},
//!               {"id": "fin", "kind": "ActivityFinal"}],
//!     "edges": [{"id": "e1", "source": "init", "target": "act1", "kind": "control"},
//!               {"id": "e2", "source": "act1", "target": "fin", "kind": "control"}]
//!   }]
//! }
//! ```
//!
//! Optional node keys: `name`, `signal`, `callee`, `valueType` (one of
//! `{"kind":"int","min":0,"max":3}`, `{"kind":"enum","labels":[..]}`, `{"kind":"bool"}`).
//! Optional edge keys: `index` (assigned in file order when absent), `guard` (prefix
//! notation, e.g. `(>= x 1)`), `stereotype` (`decisionInputFlow`).

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::{
    is_identifier, parse_guard, Activity, ActivityDiagram, DataType, DiagramError, Edge, EdgeKind,
    Node, NodeKind,
};

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawDiagram {
    top_level: String,
    activities: Vec<RawActivity>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawActivity {
    id: String,
    #[serde(default)]
    nodes: Vec<RawNode>,
    #[serde(default)]
    edges: Vec<RawEdge>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawNode {
    id: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    signal: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    callee: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value_type: Option<RawType>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawType {
    Int { min: i64, max: i64 },
    Enum { labels: Vec<String> },
    Bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    index: Option<u32>,
    source: String,
    target: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    guard: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stereotype: Option<String>,
}

fn ident(s: &str) -> Result<crate::Name, DiagramError> {
    if is_identifier(s) {
        Ok(s.into())
    } else {
        Err(DiagramError::InvalidIdentifier(s.to_string()))
    }
}

/// Parses a diagram document. Structural faithfulness only: arity and typing rules are
/// reported by [`super::validate`].
pub fn parse_diagram(text: &str) -> Result<ActivityDiagram, DiagramError> {
    let raw: RawDiagram = serde_json::from_str(text).map_err(|e| DiagramError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut seen_acts = HashSet::new();
    let mut activities = Vec::with_capacity(raw.activities.len());
    for ra in raw.activities {
        if !seen_acts.insert(ra.id.clone()) {
            return Err(DiagramError::DuplicateActivity(ra.id));
        }
        activities.push(convert_activity(ra)?);
    }
    Ok(ActivityDiagram {
        activities,
        top_level: ident(&raw.top_level)?,
    })
}

fn convert_activity(ra: RawActivity) -> Result<Activity, DiagramError> {
    let act_id = ident(&ra.id)?;
    let mut node_ids = HashSet::new();
    let mut nodes = Vec::with_capacity(ra.nodes.len());
    for rn in ra.nodes {
        if !node_ids.insert(rn.id.clone()) {
            return Err(DiagramError::DuplicateId {
                activity: ra.id.clone(),
                what: "node",
                id: rn.id,
            });
        }
        let kind = NodeKind::parse(&rn.kind).ok_or_else(|| DiagramError::UnknownNodeKind {
            node: rn.id.clone(),
            kind: rn.kind.clone(),
        })?;
        let value_type = match rn.value_type {
            None => None,
            Some(RawType::Int { min, max }) => Some(DataType::BoundedInt { min, max }),
            Some(RawType::Bool) => Some(DataType::Bool),
            Some(RawType::Enum { labels }) => {
                let mut uniq = BTreeSet::new();
                let mut out = Vec::new();
                for l in labels {
                    if !uniq.insert(l.clone()) {
                        return Err(DiagramError::ValueType {
                            node: rn.id.clone(),
                            message: format!("duplicate label `{l}`"),
                        });
                    }
                    out.push(ident(&l)?);
                }
                Some(DataType::Enum { labels: out })
            }
        };
        nodes.push(Node {
            id: ident(&rn.id)?,
            kind,
            name: rn.name,
            signal: rn.signal.as_deref().map(ident).transpose()?,
            callee: rn.callee.as_deref().map(ident).transpose()?,
            value_type,
        });
    }

    let mut edge_ids = HashSet::new();
    let mut edges = Vec::with_capacity(ra.edges.len());
    let mut used_indices: BTreeSet<u32> = ra.edges.iter().filter_map(|e| e.index).collect();
    let mut next_index = 1;
    for re in ra.edges {
        if !edge_ids.insert(re.id.clone()) {
            return Err(DiagramError::DuplicateId {
                activity: ra.id.clone(),
                what: "edge",
                id: re.id,
            });
        }
        for endpoint in [&re.source, &re.target] {
            if !node_ids.contains(endpoint) {
                return Err(DiagramError::DanglingEndpoint {
                    activity: ra.id.clone(),
                    edge: re.id.clone(),
                    node: endpoint.clone(),
                });
            }
        }
        let kind = match re.kind.as_str() {
            "control" => EdgeKind::Control,
            "object" => EdgeKind::Object,
            _ => {
                return Err(DiagramError::UnknownEdgeKind {
                    edge: re.id,
                    kind: re.kind,
                })
            }
        };
        let decision_input = match re.stereotype.as_deref() {
            None => false,
            Some("decisionInputFlow") => true,
            Some(other) => {
                return Err(DiagramError::UnknownStereotype {
                    edge: re.id.clone(),
                    stereotype: other.to_string(),
                })
            }
        };
        let guard = re
            .guard
            .as_deref()
            .map(parse_guard)
            .transpose()
            .map_err(|source| DiagramError::Guard {
                edge: re.id.clone(),
                source,
            })?;
        let index = match re.index {
            Some(i) => i,
            None => {
                while used_indices.contains(&next_index) {
                    next_index += 1;
                }
                used_indices.insert(next_index);
                next_index
            }
        };
        edges.push(Edge {
            id: ident(&re.id)?,
            index,
            source: re.source.as_str().into(),
            target: re.target.as_str().into(),
            kind,
            guard,
            decision_input,
        });
    }
    Ok(Activity {
        id: act_id,
        nodes,
        edges,
    })
}

/// Serializes a diagram back to the JSON document format (pretty-printed, indices explicit).
pub fn to_json(d: &ActivityDiagram) -> String {
    let raw = RawDiagram {
        top_level: d.top_level.to_string(),
        activities: d
            .activities
            .iter()
            .map(|a| RawActivity {
                id: a.id.to_string(),
                nodes: a
                    .nodes
                    .iter()
                    .map(|n| RawNode {
                        id: n.id.to_string(),
                        kind: n.kind.as_str().to_string(),
                        name: n.name.clone(),
                        signal: n.signal.as_deref().map(str::to_string),
                        callee: n.callee.as_deref().map(str::to_string),
                        value_type: n.value_type.as_ref().map(|t| match t {
                            DataType::BoundedInt { min, max } => RawType::Int {
                                min: *min,
                                max: *max,
                            },
                            DataType::Enum { labels } => RawType::Enum {
                                labels: labels.iter().map(|l| l.to_string()).collect(),
                            },
                            DataType::Bool => RawType::Bool,
                        }),
                    })
                    .collect(),
                edges: a
                    .edges
                    .iter()
                    .map(|e| RawEdge {
                        id: e.id.to_string(),
                        index: Some(e.index),
                        source: e.source.to_string(),
                        target: e.target.to_string(),
                        kind: match e.kind {
                            EdgeKind::Control => "control",
                            EdgeKind::Object => "object",
                        }
                        .to_string(),
                        guard: e.guard.as_ref().map(|g| g.to_string()),
                        stereotype: e.decision_input.then(|| "decisionInputFlow".to_string()),
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("diagram serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "topLevel": "ad",
        "activities": [{
            "id": "ad",
            "nodes": [
                {"id": "init", "kind": "Initial"},
                {"id": "act1", "kind": "BasicAction"},
                {"id": "fin", "kind": "ActivityFinal"}
            ],
            "edges": [
                {"id": "e1", "source": "init", "target": "act1", "kind": "control"},
                {"id": "e2", "source": "act1", "target": "fin", "kind": "control"}
            ]
        }]
    }"#;

    #[test]
    fn minimal_diagram() {
        let d = parse_diagram(MINIMAL).unwrap();
        let a = d.top().unwrap();
        assert_eq!(a.nodes.len(), 3);
        assert_eq!(a.edges.len(), 2);
        assert_eq!(
            a.edges.iter().map(|e| e.index).collect::<Vec<_>>(),
            vec![1, 2]
        );
    }

    #[test]
    fn dangling_endpoint_names_the_node() {
        let text = MINIMAL.replace(r#""target": "fin""#, r#""target": "Z""#);
        match parse_diagram(&text).unwrap_err() {
            DiagramError::DanglingEndpoint { node, .. } => assert_eq!(node, "Z"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn duplicate_and_unknown() {
        let dup = MINIMAL.replace(r#""id": "fin""#, r#""id": "act1""#);
        assert!(matches!(
            parse_diagram(&dup),
            Err(DiagramError::DuplicateId { what: "node", .. })
        ));
        let unk = MINIMAL.replace("ActivityFinal", "Swimlane");
        assert!(matches!(
            parse_diagram(&unk),
            Err(DiagramError::UnknownNodeKind { .. })
        ));
    }

    #[test]
    fn syntax_error_has_position() {
        match parse_diagram("{\n  \"topLevel\": ").unwrap_err() {
            DiagramError::Syntax { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn explicit_indices_are_respected_and_gaps_filled() {
        let text = MINIMAL.replace(r#""id": "e1","#, r#""id": "e1", "index": 2,"#);
        let d = parse_diagram(&text).unwrap();
        let idx: Vec<u32> = d.top().unwrap().edges.iter().map(|e| e.index).collect();
        assert_eq!(idx, vec![2, 1]);
    }

    #[test]
    fn round_trip_through_serializer() {
        let d = parse_diagram(MINIMAL).unwrap();
        assert_eq!(parse_diagram(&to_json(&d)).unwrap(), d);
    }
}
