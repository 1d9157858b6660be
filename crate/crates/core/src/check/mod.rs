//! Explicit-state exploration of a translated model and the deadlock, determinism and
//! divergence checks over the resulting transition system.

mod divergence;
mod lts;
mod normalize;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::csp::{CspError, Event};

pub use divergence::{find_divergence, Lasso};
pub use lts::{build_lts, explore, Lts, StateId};
pub use normalize::{normalize, NormalizedLts};

pub const DEFAULT_STATE_LIMIT: usize = 1_000_000;
pub const STATE_LIMIT_ENV: &str = "ACTDIAG_STATE_LIMIT";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error(transparent)]
    Csp(#[from] CspError),
    #[error("token bound exceeded after trace <{}>", fmt_trace(.trace))]
    TokenBoundExceeded { trace: Vec<Event> },
    #[error("state {0} is not reachable")]
    Unreachable(StateId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub state_limit: usize,
    /// Worker threads for frontier expansion; 1 explores sequentially.
    pub jobs: usize,
}

impl Default for CheckOptions {
    /// The state limit comes from `ACTDIAG_STATE_LIMIT` when set to a positive number.
    fn default() -> Self {
        let state_limit = std::env::var(STATE_LIMIT_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|n| *n > 0)
            .unwrap_or(DEFAULT_STATE_LIMIT);
        CheckOptions {
            state_limit,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Deadlock,
    Determinism,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Deadlock => "deadlock",
            Property::Determinism => "determinism",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerdictResult {
    Pass,
    Fail {
        /// Visible events leading to the defect. For nondeterminism the last event is the
        /// one that can be both accepted and refused.
        trace: Vec<Event>,
        /// Every event, hidden ones included, from the root to the witness state.
        full_trace: Vec<Event>,
        witness: StateId,
        /// The refused event of a nondeterminism witness.
        choice: Option<Event>,
        detail: String,
    },
    ResourceLimit {
        states_explored: usize,
    },
    Divergent {
        stem: Vec<Event>,
        cycle: Vec<Event>,
        full_stem: Vec<Event>,
        witness: StateId,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub property: Property,
    pub result: VerdictResult,
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self.result, VerdictResult::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self.result, VerdictResult::Fail { .. })
    }
}

pub fn fmt_trace(t: &[Event]) -> String {
    t.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.result {
            VerdictResult::Pass => write!(f, "{}: pass", self.property),
            VerdictResult::Fail { trace, detail, .. } => {
                write!(f, "{}: fail ({detail}) after <{}>", self.property, fmt_trace(trace))
            }
            VerdictResult::ResourceLimit { states_explored } => write!(
                f,
                "{}: state limit reached after {states_explored} states",
                self.property
            ),
            VerdictResult::Divergent { stem, cycle, .. } => write!(
                f,
                "{}: divergent after <{}> cycling on <{}>",
                self.property,
                fmt_trace(stem),
                fmt_trace(cycle)
            ),
        }
    }
}

pub(crate) fn visible(t: &[Event]) -> Vec<Event> {
    t.iter().filter(|e| e.is_visible()).cloned().collect()
}

/// Deadlock: a reachable, fully expanded state with no transitions that is not terminated.
/// The witness is the first such state in breadth-first order.
pub fn check_deadlock(l: &Lts) -> Verdict {
    let found = (0..l.expanded() as StateId)
        .find(|&s| l.successors(s).is_empty() && !l.is_terminated(s));
    let result = match found {
        Some(s) => {
            let full = l.path_to(s);
            VerdictResult::Fail {
                trace: visible(&full),
                full_trace: full,
                witness: s,
                choice: None,
                detail: "no event possible in a non-terminated state".into(),
            }
        }
        None if !l.is_complete() => VerdictResult::ResourceLimit {
            states_explored: l.len(),
        },
        None => VerdictResult::Pass,
    };
    Verdict {
        property: Property::Deadlock,
        result,
    }
}

/// Failures-model determinism. A divergence is reported as such, since refusals are not
/// meaningful below a divergent trace.
pub fn check_determinism(l: &Lts) -> Verdict {
    let property = Property::Determinism;
    if let Some(lasso) = find_divergence(l) {
        return Verdict {
            property,
            result: VerdictResult::Divergent {
                stem: visible(&lasso.stem),
                cycle: lasso.cycle.clone(),
                full_stem: lasso.stem,
                witness: lasso.state,
            },
        };
    }
    if !l.is_complete() {
        return Verdict {
            property,
            result: VerdictResult::ResourceLimit {
                states_explored: l.len(),
            },
        };
    }
    let n = normalize(l);
    let result = match n.first_violation() {
        None => VerdictResult::Pass,
        Some((m, event, q)) => {
            let mut trace = n.trace_to(m);
            let full = l.path_along(&trace, q).unwrap_or_else(|| l.path_to(q));
            trace.push(event.clone());
            VerdictResult::Fail {
                trace,
                full_trace: full,
                witness: q,
                detail: format!("`{event}` can be both accepted and refused"),
                choice: Some(event),
            }
        }
    };
    Verdict { property, result }
}

/// Minimal-length path from the root to `target`, ties broken by event order.
pub fn shortest_trace(l: &Lts, target: StateId) -> Result<Vec<Event>, CheckError> {
    if (target as usize) >= l.len() {
        return Err(CheckError::Unreachable(target));
    }
    Ok(l.path_to(target))
}

#[cfg(test)]
mod tests;
