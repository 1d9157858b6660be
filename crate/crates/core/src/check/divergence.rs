use std::collections::{BTreeSet, VecDeque};

use super::lts::{Lts, StateId};
use crate::csp::Event;

/// A reachable cycle of silent steps: `stem` leads from the root to `state`, from which
/// `cycle` returns to `state`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    pub stem: Vec<Event>,
    pub cycle: Vec<Event>,
    pub state: StateId,
}

/// Finds a tau cycle by strongly connected components of the tau-only subgraph. The lasso
/// goes through the smallest state id lying on any such cycle.
pub fn find_divergence(l: &Lts) -> Option<Lasso> {
    let n = l.expanded();
    let tau_succ = |s: usize| -> Vec<usize> {
        l.successors(s as StateId)
            .iter()
            .filter(|(e, t)| *e == Event::Tau && (*t as usize) < n)
            .map(|(_, t)| *t as usize)
            .collect()
    };
    // iterative Tarjan
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut comp_cyclic: Vec<bool> = Vec::new();
    let mut counter = 0;
    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, Vec<usize>, usize)> = vec![(start, tau_succ(start), 0)];
        index[start] = counter;
        low[start] = counter;
        counter += 1;
        stack.push(start);
        on_stack[start] = true;
        while let Some((v, succ, i)) = call.last_mut() {
            let v = *v;
            if *i < succ.len() {
                let w = succ[*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, tau_succ(w), 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            let self_loop = succ.contains(&v);
            call.pop();
            if let Some((u, _, _)) = call.last() {
                low[*u] = low[*u].min(low[v]);
            }
            if low[v] == index[v] {
                let c = comp_cyclic.len();
                let mut size = 0;
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp[w] = c;
                    size += 1;
                    if w == v {
                        break;
                    }
                }
                comp_cyclic.push(size > 1 || self_loop);
            }
        }
    }
    let s = (0..n).find(|&s| comp_cyclic[comp[s]])?;
    // shortest tau path from s back to s inside its component
    let mut prev: Vec<Option<usize>> = vec![None; n];
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([s]);
    let mut closing = None;
    while let Some(v) = queue.pop_front() {
        for w in tau_succ(v) {
            if comp[w] != comp[s] {
                continue;
            }
            if w == s {
                closing = Some(v);
                break;
            }
            if seen.insert(w) {
                prev[w] = Some(v);
                queue.push_back(w);
            }
        }
        if closing.is_some() {
            break;
        }
    }
    let mut len = 1;
    let mut v = closing.expect("cyclic component has a cycle");
    while v != s {
        len += 1;
        v = prev[v].expect("bfs predecessor");
    }
    Some(Lasso {
        stem: l.path_to(s as StateId),
        cycle: vec![Event::Tau; len],
        state: s as StateId,
    })
}
