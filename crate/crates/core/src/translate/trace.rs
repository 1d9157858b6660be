use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::csp::{ChannelName, Event};
use crate::{Name, Value};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElementKind {
    Activity,
    Node(Name),
    Edge(Name),
}

/// A diagram element: an activity, or a node or edge inside one.
/// Renders as `act`, `act/node/X` or `act/edge/e`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementRef {
    pub activity: Name,
    pub kind: ElementKind,
}

impl ElementRef {
    pub fn activity(a: &str) -> Self {
        ElementRef {
            activity: a.into(),
            kind: ElementKind::Activity,
        }
    }

    pub fn node(a: &str, n: &str) -> Self {
        ElementRef {
            activity: a.into(),
            kind: ElementKind::Node(n.into()),
        }
    }

    pub fn edge(a: &str, e: &str) -> Self {
        ElementRef {
            activity: a.into(),
            kind: ElementKind::Edge(e.into()),
        }
    }
}

impl fmt::Display for ElementRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ElementKind::Activity => write!(f, "{}", self.activity),
            ElementKind::Node(n) => write!(f, "{}/node/{n}", self.activity),
            ElementKind::Edge(e) => write!(f, "{}/edge/{e}", self.activity),
        }
    }
}

impl FromStr for ElementRef {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split('/').collect();
        match parts.as_slice() {
            [a] => Ok(ElementRef::activity(a)),
            [a, "node", n] => Ok(ElementRef::node(a, n)),
            [a, "edge", e] => Ok(ElementRef::edge(a, e)),
            _ => Err(format!("malformed element reference `{s}`")),
        }
    }
}

impl Serialize for ElementRef {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ElementRef {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Maps events to the diagram elements they stand for. Entries are keyed by channel and a
/// value prefix; an event collects every entry whose prefix it extends.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceMap {
    entries: BTreeMap<(ChannelName, Vec<Value>), BTreeSet<ElementRef>>,
}

impl TraceMap {
    pub fn insert(&mut self, chan: ChannelName, prefix: Vec<Value>, el: ElementRef) {
        self.entries.entry((chan, prefix)).or_default().insert(el);
    }

    pub fn lookup(&self, e: &Event) -> BTreeSet<ElementRef> {
        let mut out = BTreeSet::new();
        let Some(v) = e.visible() else { return out };
        for k in 0..=v.values.len() {
            if let Some(els) = self.entries.get(&(v.channel.clone(), v.values[..k].to_vec())) {
                out.extend(els.iter().cloned());
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
