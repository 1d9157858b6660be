//! Counterexample traceability: trace-to-diagram mapping, DOT rendering and JSON reports.

mod dot;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::check::{Property, Verdict, VerdictResult};
use crate::csp::Event;
use crate::diagram::ActivityDiagram;
use crate::translate::{CspModel, ElementKind, ElementRef};
use crate::Name;

pub use dot::emit_dot;

pub const REPORT_SCHEMA: &str = "report-v1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReportError {
    #[error("event `{0}` does not correspond to any diagram element")]
    UnmappedEvent(String),
    #[error("malformed report: {0}")]
    Parse(String),
}

/// One trace event with the diagram elements it stands for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappedEvent {
    pub event: String,
    pub elements: Vec<ElementRef>,
}

/// A counterexample projected onto the diagram.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TraceMapping {
    pub steps: Vec<MappedEvent>,
    /// The event at which behaviour becomes nondeterministic, if any.
    pub choice: Option<MappedEvent>,
    /// Elements on the defect path.
    pub highlighted: BTreeSet<ElementRef>,
    /// Elements of the choice event, drawn distinctly from the path.
    pub choice_point: BTreeSet<ElementRef>,
}

impl TraceMapping {
    pub fn is_empty(&self) -> bool {
        self.highlighted.is_empty() && self.choice_point.is_empty()
    }

    /// Every element the rendering marks, path and choice point together.
    pub fn marked(&self) -> BTreeSet<ElementRef> {
        self.highlighted.union(&self.choice_point).cloned().collect()
    }
}

fn resolve(e: &Event, m: &CspModel, d: &ActivityDiagram) -> Result<MappedEvent, ReportError> {
    let direct = m.trace_map.lookup(e);
    if direct.is_empty() {
        return Err(ReportError::UnmappedEvent(e.to_string()));
    }
    let mut out: BTreeSet<ElementRef> = BTreeSet::new();
    for el in direct {
        if let ElementKind::Edge(id) = &el.kind {
            if let Some(edge) = d.activity(&el.activity).and_then(|a| a.edge(id)) {
                out.insert(ElementRef::node(&el.activity, &edge.source));
                out.insert(ElementRef::node(&el.activity, &edge.target));
            }
        }
        out.insert(el);
    }
    Ok(MappedEvent {
        event: e.to_string(),
        elements: out.into_iter().collect(),
    })
}

/// Resolves a verdict's visible trace to diagram elements. Verdicts without a
/// counterexample give an empty mapping.
pub fn map_trace(v: &Verdict, m: &CspModel, d: &ActivityDiagram) -> Result<TraceMapping, ReportError> {
    let (path, choice): (&[Event], Option<&Event>) = match &v.result {
        VerdictResult::Pass | VerdictResult::ResourceLimit { .. } => {
            return Ok(TraceMapping::default())
        }
        VerdictResult::Fail { trace, choice, .. } => match choice {
            Some(c) if trace.last() == Some(c) => (&trace[..trace.len() - 1], Some(c)),
            _ => (trace, None),
        },
        VerdictResult::Divergent { stem, .. } => (stem, None),
    };
    let mut t = TraceMapping::default();
    for e in path.iter().filter(|e| e.is_visible()) {
        let step = resolve(e, m, d)?;
        t.highlighted.extend(step.elements.iter().cloned());
        t.steps.push(step);
    }
    if let Some(c) = choice.filter(|c| c.is_visible()) {
        let step = resolve(c, m, d)?;
        t.choice_point.extend(step.elements.iter().cloned());
        t.choice = Some(step);
    }
    if t.steps.is_empty() && t.choice.is_none() {
        t.highlighted.insert(ElementRef::activity(&d.top_level));
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    ResourceLimit,
    Divergent,
}

impl Outcome {
    pub fn of(r: &VerdictResult) -> Self {
        match r {
            VerdictResult::Pass => Outcome::Pass,
            VerdictResult::Fail { .. } => Outcome::Fail,
            VerdictResult::ResourceLimit { .. } => Outcome::ResourceLimit,
            VerdictResult::Divergent { .. } => Outcome::Divergent,
        }
    }

    /// Process exit status for this outcome.
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::ResourceLimit => 3,
            Outcome::Divergent => 4,
        }
    }

    fn advice(self) -> &'static str {
        match self {
            Outcome::Pass => "exit 0: property holds",
            Outcome::Fail => "exit 1: property violated, see trace and highlighted elements",
            Outcome::ResourceLimit => "exit 3: state limit reached before a verdict; raise --state-limit",
            Outcome::Divergent => "exit 4: divergence found; determinism is undefined below it",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Statistics {
    pub states: usize,
    pub transitions: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
    pub state_limit: usize,
    pub max_tokens: std::collections::BTreeMap<Name, i64>,
    pub hidden: Vec<String>,
    pub strict: bool,
}

impl ToolInfo {
    pub fn new(m: &CspModel, state_limit: usize) -> Self {
        ToolInfo {
            name: "actdiag".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            state_limit,
            max_tokens: m.max_tokens.clone(),
            hidden: m.hidden.iter().map(|c| c.to_string()).collect(),
            strict: m.strict,
        }
    }
}

/// The machine-readable outcome of one property check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub schema: String,
    pub diagram: Name,
    pub property: Property,
    pub result: Outcome,
    pub trace: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cycle: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choice: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states_explored: Option<usize>,
    pub mapping: Vec<MappedEvent>,
    pub highlighted: Vec<ElementRef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub choice_point: Vec<ElementRef>,
    /// Replayable path including hidden steps; present only on request.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_trace: Option<Vec<String>>,
    pub statistics: Statistics,
    pub tool: ToolInfo,
    pub exit_code: i32,
    pub advice: String,
}

fn strings(t: &[Event]) -> Vec<String> {
    t.iter().map(|e| e.to_string()).collect()
}

impl Report {
    pub fn new(
        diagram: &str,
        v: &Verdict,
        t: &TraceMapping,
        statistics: Statistics,
        tool: ToolInfo,
        debug_trace: bool,
    ) -> Self {
        let outcome = Outcome::of(&v.result);
        let mut r = Report {
            schema: REPORT_SCHEMA.into(),
            diagram: diagram.into(),
            property: v.property,
            result: outcome,
            trace: Vec::new(),
            cycle: Vec::new(),
            choice: None,
            detail: None,
            states_explored: None,
            mapping: t.steps.iter().chain(&t.choice).cloned().collect(),
            highlighted: t.highlighted.iter().cloned().collect(),
            choice_point: t.choice_point.iter().cloned().collect(),
            full_trace: None,
            statistics,
            tool,
            exit_code: outcome.exit_code(),
            advice: outcome.advice().into(),
        };
        match &v.result {
            VerdictResult::Pass => {}
            VerdictResult::Fail {
                trace,
                full_trace,
                choice,
                detail,
                ..
            } => {
                r.trace = strings(trace);
                r.choice = choice.as_ref().map(|c| c.to_string());
                r.detail = Some(detail.clone());
                if debug_trace {
                    r.full_trace = Some(strings(full_trace));
                }
            }
            VerdictResult::ResourceLimit { states_explored } => {
                r.states_explored = Some(*states_explored);
            }
            VerdictResult::Divergent {
                stem,
                cycle,
                full_stem,
                ..
            } => {
                r.trace = strings(stem);
                r.cycle = strings(cycle);
                if debug_trace {
                    r.full_trace = Some(strings(full_stem));
                }
            }
        }
        r
    }

    pub fn parse(text: &str) -> Result<Self, ReportError> {
        let r: Report = serde_json::from_str(text).map_err(|e| ReportError::Parse(e.to_string()))?;
        if r.schema != REPORT_SCHEMA {
            return Err(ReportError::Parse(format!("unsupported schema `{}`", r.schema)));
        }
        Ok(r)
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn emit_report(r: &Report) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report serialises");
    s.push('\n');
    s
}
