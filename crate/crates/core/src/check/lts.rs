use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use super::{CheckError, CheckOptions};
use crate::csp::{Environment, Event, Proc, Stepper, Term, Transitions};
use crate::translate::CspModel;
use crate::csp::CspError;

pub type StateId = u32;

/// Explicit transition system. State ids follow breadth-first discovery order, and each
/// state's transitions are sorted by event, so the BFS tree holds the least shortest paths.
#[derive(Debug, Clone)]
pub struct Lts {
    states: Vec<Proc>,
    succ: Vec<Vec<(Event, StateId)>>,
    parent: Vec<Option<(StateId, Event)>>,
    expanded: usize,
    complete: bool,
}

impl Lts {
    pub const ROOT: StateId = 0;

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Number of states whose transitions are known; states `0..expanded()`.
    pub fn expanded(&self) -> usize {
        self.expanded
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn state(&self, s: StateId) -> &Proc {
        &self.states[s as usize]
    }

    pub fn successors(&self, s: StateId) -> &[(Event, StateId)] {
        &self.succ[s as usize]
    }

    pub fn is_terminated(&self, s: StateId) -> bool {
        matches!(self.states[s as usize].term(), Term::Omega)
    }

    pub fn transition_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn path_to(&self, mut s: StateId) -> Vec<Event> {
        let mut out = Vec::new();
        while let Some((p, e)) = &self.parent[s as usize] {
            out.push(e.clone());
            s = *p;
        }
        out.reverse();
        out
    }

    /// Shortest path from the root to `target` whose visible events are exactly `trace`.
    pub fn path_along(&self, trace: &[Event], target: StateId) -> Option<Vec<Event>> {
        let mut parent: HashMap<(StateId, usize), ((StateId, usize), Event)> = HashMap::new();
        let start = (Self::ROOT, 0);
        let mut queue = std::collections::VecDeque::from([start]);
        let mut seen: BTreeSet<(StateId, usize)> = [start].into();
        while let Some((s, k)) = queue.pop_front() {
            if s == target && k == trace.len() {
                let mut out = Vec::new();
                let mut cur = (s, k);
                while let Some((prev, e)) = parent.get(&cur) {
                    out.push(e.clone());
                    cur = *prev;
                }
                out.reverse();
                return Some(out);
            }
            if (s as usize) >= self.expanded {
                continue;
            }
            for (e, t) in self.successors(s) {
                let next = if *e == Event::Tau {
                    (*t, k)
                } else if trace.get(k) == Some(e) {
                    (*t, k + 1)
                } else {
                    continue;
                };
                if seen.insert(next) {
                    parent.insert(next, ((s, k), e.clone()));
                    queue.push_back(next);
                }
            }
        }
        None
    }

    /// States reachable by performing `trace` exactly (tau steps must be listed).
    pub fn replay(&self, trace: &[Event]) -> BTreeSet<StateId> {
        let mut cur: BTreeSet<StateId> = [Self::ROOT].into();
        for e in trace {
            cur = cur
                .iter()
                .flat_map(|&s| self.successors(s).iter())
                .filter(|(f, _)| f == e)
                .map(|(_, t)| *t)
                .collect();
        }
        cur
    }

    /// States reachable by `trace` of visible events, allowing tau steps anywhere.
    pub fn replay_visible(&self, trace: &[Event]) -> BTreeSet<StateId> {
        let mut cur = self.tau_closure([Self::ROOT]);
        for e in trace {
            let next: Vec<StateId> = cur
                .iter()
                .flat_map(|&s| self.successors(s).iter())
                .filter(|(f, _)| f == e)
                .map(|(_, t)| *t)
                .collect();
            cur = self.tau_closure(next);
        }
        cur
    }

    pub fn tau_closure(&self, start: impl IntoIterator<Item = StateId>) -> BTreeSet<StateId> {
        let mut seen: BTreeSet<StateId> = BTreeSet::new();
        let mut stack: Vec<StateId> = start.into_iter().collect();
        while let Some(s) = stack.pop() {
            if !seen.insert(s) {
                continue;
            }
            for (e, t) in self.successors(s) {
                if *e == Event::Tau && !seen.contains(t) {
                    stack.push(*t);
                }
            }
        }
        seen
    }
}

fn sorted(t: &Transitions) -> Vec<(Event, Proc)> {
    let mut v: Vec<(Event, Proc)> = t.iter().cloned().collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v
}

/// Explores the model breadth first from `main`, up to `opts.state_limit` states.
pub fn build_lts(m: &CspModel, opts: &CheckOptions) -> Result<Lts, CheckError> {
    let lts = explore(&m.main, &m.env, opts)?;
    if m.strict {
        for s in 0..lts.expanded() as StateId {
            for (e, _) in lts.successors(s) {
                if m.is_overflow(e) {
                    let mut trace = lts.path_to(s);
                    trace.push(e.clone());
                    return Err(CheckError::TokenBoundExceeded {
                        trace: super::visible(&trace),
                    });
                }
            }
        }
    }
    Ok(lts)
}

/// Explores an arbitrary closed term.
pub fn explore(root: &Proc, env: &Environment, opts: &CheckOptions) -> Result<Lts, CheckError> {
    let limit = opts.state_limit.max(1);
    let mut lts = Lts {
        states: vec![root.clone()],
        succ: vec![Vec::new()],
        parent: vec![None],
        expanded: 0,
        complete: true,
    };
    let mut index: HashMap<Proc, StateId> = HashMap::new();
    index.insert(root.clone(), 0);
    let pool = if opts.jobs > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(opts.jobs)
                .build()
                .expect("thread pool"),
        )
    } else {
        None
    };
    let mut stepper = Stepper::new(env);
    let mut frontier: Vec<StateId> = vec![0];
    while !frontier.is_empty() {
        let results: Vec<Result<Vec<(Event, Proc)>, CspError>> = match &pool {
            None => frontier
                .iter()
                .map(|&s| stepper.transitions(&lts.states[s as usize]).map(|t| sorted(&t)))
                .collect(),
            Some(pool) => {
                let states = &lts.states;
                pool.install(|| {
                    frontier
                        .par_iter()
                        .map_init(
                            || Stepper::new(env),
                            |st, &s| st.transitions(&states[s as usize]).map(|t| sorted(&t)),
                        )
                        .collect()
                })
            }
        };
        let mut next = Vec::new();
        for (&s, res) in frontier.iter().zip(results) {
            let trans = res?;
            let mut out = Vec::with_capacity(trans.len());
            for (e, p) in trans {
                let id = match index.get(&p) {
                    Some(&id) => id,
                    None => {
                        if lts.states.len() >= limit {
                            lts.complete = false;
                            return Ok(lts);
                        }
                        let id = lts.states.len() as StateId;
                        index.insert(p.clone(), id);
                        lts.states.push(p);
                        lts.succ.push(Vec::new());
                        lts.parent.push(Some((s, e.clone())));
                        next.push(id);
                        id
                    }
                };
                out.push((e, id));
            }
            lts.succ[s as usize] = out;
            lts.expanded = s as usize + 1;
        }
        frontier = next;
    }
    Ok(lts)
}
