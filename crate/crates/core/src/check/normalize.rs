use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::lts::{Lts, StateId};
use crate::csp::Event;

/// Subset construction over tau closures. Each macro-state records the events some member
/// can perform and the acceptance set of every stable member.
#[derive(Debug, Clone)]
pub struct NormalizedLts {
    members: Vec<Vec<StateId>>,
    edges: Vec<BTreeMap<Event, u32>>,
    parent: Vec<Option<(u32, Event)>>,
    enabled: Vec<BTreeSet<Event>>,
    stable: Vec<Vec<(StateId, BTreeSet<Event>)>>,
}

impl NormalizedLts {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self, m: u32) -> &[StateId] {
        &self.members[m as usize]
    }

    pub fn enabled(&self, m: u32) -> &BTreeSet<Event> {
        &self.enabled[m as usize]
    }

    pub fn acceptances(&self, m: u32) -> &[(StateId, BTreeSet<Event>)] {
        &self.stable[m as usize]
    }

    pub fn after(&self, m: u32, e: &Event) -> Option<u32> {
        self.edges[m as usize].get(e).copied()
    }

    pub fn transitions(&self, m: u32) -> &BTreeMap<Event, u32> {
        &self.edges[m as usize]
    }

    pub fn trace_to(&self, mut m: u32) -> Vec<Event> {
        let mut out = Vec::new();
        while let Some((p, e)) = &self.parent[m as usize] {
            out.push(e.clone());
            m = *p;
        }
        out.reverse();
        out
    }

    /// The first macro-state (breadth first), least event and least stable member such that
    /// the member refuses an event the macro-state can perform.
    pub fn first_violation(&self) -> Option<(u32, Event, StateId)> {
        for m in 0..self.len() as u32 {
            for a in self.enabled(m) {
                for (q, acc) in self.acceptances(m) {
                    if !acc.contains(a) {
                        return Some((m, a.clone(), *q));
                    }
                }
            }
        }
        None
    }
}

pub fn normalize(l: &Lts) -> NormalizedLts {
    let mut n = NormalizedLts {
        members: Vec::new(),
        edges: Vec::new(),
        parent: Vec::new(),
        enabled: Vec::new(),
        stable: Vec::new(),
    };
    let mut index: HashMap<Vec<StateId>, u32> = HashMap::new();
    let root: Vec<StateId> = l.tau_closure([Lts::ROOT]).into_iter().collect();
    index.insert(root.clone(), 0);
    n.members.push(root);
    n.parent.push(None);
    let mut i = 0;
    while i < n.members.len() {
        let mut by_event: BTreeMap<Event, BTreeSet<StateId>> = BTreeMap::new();
        let mut enabled = BTreeSet::new();
        let mut stable = Vec::new();
        for &s in &n.members[i] {
            let succ = l.successors(s);
            let mut acc = BTreeSet::new();
            let mut is_stable = true;
            for (e, t) in succ {
                if *e == Event::Tau {
                    is_stable = false;
                    continue;
                }
                acc.insert(e.clone());
                by_event.entry(e.clone()).or_default().insert(*t);
            }
            enabled.extend(acc.iter().cloned());
            if is_stable {
                stable.push((s, acc));
            }
        }
        let mut edges = BTreeMap::new();
        for (e, targets) in by_event {
            let closed: Vec<StateId> = l.tau_closure(targets).into_iter().collect();
            let id = match index.get(&closed) {
                Some(&id) => id,
                None => {
                    let id = n.members.len() as u32;
                    index.insert(closed.clone(), id);
                    n.members.push(closed);
                    n.parent.push(Some((i as u32, e.clone())));
                    id
                }
            };
            edges.insert(e, id);
        }
        n.edges.push(edges);
        n.enabled.push(enabled);
        n.stable.push(stable);
        i += 1;
    }
    n
}
