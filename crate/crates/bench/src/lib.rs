//! Workloads shared by the benchmarks.

use std::path::{Path, PathBuf};

use actdiag_core::diagram::{Activity, Edge, Node, NodeKind};
use actdiag_core::{parse_diagram, ActivityDiagram};

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn load(name: &str) -> ActivityDiagram {
    let path = corpus_dir().join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_diagram(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Initial, fork into `width` branches of `depth` actions each, join, final.
/// The interleavings grow as `(width * depth)! / (depth!)^width`.
pub fn fork_join(width: usize, depth: usize) -> ActivityDiagram {
    let mut nodes = vec![
        Node::new("init", NodeKind::Initial),
        Node::new("fork", NodeKind::Fork),
        Node::new("join", NodeKind::Join),
        Node::new("fin", NodeKind::ActivityFinal),
    ];
    let mut edges = Vec::new();
    let mut edge = |src: &str, dst: &str| {
        let i = edges.len() as u32 + 1;
        edges.push(Edge::control(&format!("e{i}"), i, src, dst));
    };
    edge("init", "fork");
    for b in 0..width {
        let mut prev = "fork".to_string();
        for s in 0..depth {
            let id = format!("a{b}_{s}");
            nodes.push(Node::new(&id, NodeKind::BasicAction));
            edge(&prev, &id);
            prev = id;
        }
        edge(&prev, "join");
    }
    edge("join", "fin");
    ActivityDiagram {
        activities: vec![Activity {
            id: "par".into(),
            nodes,
            edges,
        }],
        top_level: "par".into(),
    }
}
