//! Translation of activity diagrams into CSP process definitions.
//!
//! Every node becomes a recursive definition plus an `_t` wrapper that is torn down by the
//! activity's `endDiagram` event. The wrappers of an activity run in parallel, synchronising on
//! shared edge events, next to a `Token_Manager` that counts live tokens.

mod cspm;
mod nodes;
mod trace;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::csp::{
    domain, ChannelBase, ChannelName, CspError, Domain, Environment, EventSet, Expr, ExprOp, Field,
    Param, Pattern, Proc,
};
use crate::diagram::{
    ActivityDiagram, EdgeKind, NodeKind, Severity, ValidationConfig, Violation, DEFAULT_INT_CAP,
};
use crate::{Name, Value};

pub use cspm::export_cspm;
pub use trace::{ElementKind, ElementRef, TraceMap};

use nodes::{chan, NodeBuilder, Production};

/// Channel bases hidden unless made visible.
pub const DEFAULT_HIDDEN: [&str; 6] = ["update", "clear", "dc", "get", "set", "sysdone"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TranslateError {
    #[error("diagram is not well formed:\n{}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Violation>),
    #[error("no value type for `{element}` in activity `{activity}`")]
    MissingType { activity: String, element: String },
    #[error("node `{node}` in activity `{activity}` lacks its signal or callee")]
    MissingReference { activity: String, node: String },
    #[error("unknown channel `{0}`")]
    UnknownChannel(String),
    #[error("token bound must be at least 1, got {0}")]
    TokenBound(i64),
    #[error(transparent)]
    Csp(#[from] CspError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationConfig {
    /// Token bound per activity; `None` uses the activity's node count plus edge count.
    pub max_tokens: Option<i64>,
    /// Channel bases to hide in addition to the defaults.
    pub hide: Vec<String>,
    /// Channel bases to keep visible even if hidden by default.
    pub visible: Vec<String>,
    pub int_cap: u64,
    /// Exceeding the token bound leads to a visible `overflow` event instead of saturating.
    pub strict: bool,
}

impl Default for TranslationConfig {
    fn default() -> Self {
        TranslationConfig {
            max_tokens: None,
            hide: Vec::new(),
            visible: Vec::new(),
            int_cap: DEFAULT_INT_CAP,
            strict: false,
        }
    }
}

impl TranslationConfig {
    pub fn hidden_bases(&self) -> Result<BTreeSet<String>, TranslateError> {
        let mut h: BTreeSet<String> = DEFAULT_HIDDEN.iter().map(|s| s.to_string()).collect();
        for s in &self.hide {
            ChannelBase::parse(s).ok_or_else(|| TranslateError::UnknownChannel(s.clone()))?;
            h.insert(s.clone());
        }
        for s in &self.visible {
            ChannelBase::parse(s).ok_or_else(|| TranslateError::UnknownChannel(s.clone()))?;
            h.remove(s);
        }
        Ok(h)
    }
}

/// A closed CSP model of a diagram together with what is needed to explain its traces.
#[derive(Debug, Clone)]
pub struct CspModel {
    pub env: Environment,
    pub main: Proc,
    pub trace_map: TraceMap,
    /// Every channel with the value domain of each field.
    pub channels: BTreeMap<ChannelName, Vec<Domain>>,
    pub hidden: BTreeSet<ChannelName>,
    pub visible: BTreeSet<ChannelName>,
    pub max_tokens: BTreeMap<Name, i64>,
    pub top: Name,
    pub strict: bool,
}

impl CspModel {
    pub fn hidden_set(&self) -> EventSet {
        EventSet::channels(self.hidden.iter().cloned())
    }

    pub fn is_overflow(&self, e: &crate::Event) -> bool {
        e.channel().is_some_and(|c| c.base == ChannelBase::Overflow)
    }
}

#[derive(Default)]
pub(crate) struct Registry {
    channels: BTreeMap<ChannelName, Vec<Domain>>,
    trace: TraceMap,
    start_params: BTreeMap<Name, Vec<Domain>>,
}

impl Registry {
    fn declare(&mut self, c: ChannelName, fields: Vec<Domain>) {
        match self.channels.get_mut(&c) {
            Some(old) if old.len() == fields.len() => {
                for (o, f) in old.iter_mut().zip(fields) {
                    if *o != f {
                        *o = domain(o.iter().chain(f.iter()).cloned());
                    }
                }
            }
            _ => {
                self.channels.insert(c, fields);
            }
        }
    }

    fn trace(&mut self, c: ChannelName, prefix: Vec<Value>, el: ElementRef) {
        self.trace.insert(c, prefix, el);
    }
}

fn intersect(a: &[Production], b: &[Production]) -> Vec<Production> {
    let mut out = Vec::new();
    for (c1, p1) in a {
        for (c2, p2) in b {
            if c1 != c2 {
                continue;
            }
            if p1.starts_with(p2) {
                out.push((c1.clone(), p1.clone()));
            } else if p2.starts_with(p1) {
                out.push((c1.clone(), p2.clone()));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Right-nested alphabetised parallel: each component synchronises with the rest on the
/// events both sides mention.
fn par_all(parts: Vec<(Proc, Vec<Production>)>) -> (Proc, Vec<Production>) {
    let mut it = parts.into_iter().rev();
    let Some(mut acc) = it.next() else {
        return (Proc::skip(), Vec::new());
    };
    for (p, alpha) in it {
        let sync = intersect(&alpha, &acc.1);
        let proc = if sync.is_empty() {
            Proc::interleave(p, acc.0)
        } else {
            Proc::par(p, EventSet::new(sync), acc.0)
        };
        let mut union = alpha;
        union.extend(acc.1);
        acc = (proc, union);
    }
    acc
}

fn bool_dom() -> Domain {
    domain([Value::Bool(false), Value::Bool(true)])
}

fn token_manager(a: &str, max: i64, strict: bool) -> (String, Vec<Param>, Proc) {
    let name = format!("Token_Manager_{a}");
    let update = chan(ChannelBase::Update, None, a);
    let clear = chan(ChannelBase::Clear, None, a);
    let end = chan(ChannelBase::EndDiagram, None, a);
    let sum = Expr::bin(ExprOp::Add, Expr::var("n"), Expr::var("x"));
    let next = |n: Expr| Proc::call(&name, vec![n, Expr::bool(true)]);
    let after_update = if strict {
        Proc::ext(
            Proc::guard(Expr::bin(ExprOp::Le, sum.clone(), Expr::int(max)), next(sum.clone())),
            Proc::guard(
                Expr::bin(ExprOp::Gt, sum.clone(), Expr::int(max)),
                Proc::prefix(
                    Pattern::bare(chan(ChannelBase::Overflow, None, a)),
                    Proc::stop(),
                ),
            ),
        )
    } else {
        next(Expr::bin(
            ExprOp::Max,
            Expr::int(0),
            Expr::bin(ExprOp::Min, sum, Expr::int(max)),
        ))
    };
    let body = Proc::ext(
        Proc::prefix(
            Pattern::new(
                update,
                vec![Field::In {
                    var: "x".into(),
                    domain: Some(domain((-max..=max).map(Value::Int))),
                }],
            ),
            after_update,
        ),
        Proc::ext(
            Proc::prefix(
                Pattern::bare(clear),
                Proc::prefix(Pattern::bare(end.clone()), Proc::skip()),
            ),
            Proc::guard(
                Expr::bin(
                    ExprOp::And,
                    Expr::bin(ExprOp::Eq, Expr::var("n"), Expr::int(0)),
                    Expr::var("init"),
                ),
                Proc::prefix(Pattern::bare(end), Proc::skip()),
            ),
        ),
    );
    let params = vec![
        Param::new("n", Some(domain((0..=max).map(Value::Int)))),
        Param::new("init", Some(bool_dom())),
    ];
    (name, params, body)
}

struct ActivityOut {
    body: Proc,
    start_fields: Vec<Field>,
    global_alpha: Vec<Production>,
}

fn translate_activity(
    act: &crate::diagram::Activity,
    acts: &[Name],
    cfg: &TranslationConfig,
    reg: &mut Registry,
    env: &mut Environment,
    bounds: &mut BTreeMap<Name, i64>,
) -> Result<ActivityOut, TranslateError> {
    let a: &str = &act.id;
    let max = cfg
        .max_tokens
        .unwrap_or((act.nodes.len() + act.edges.len()) as i64);
    if max < 1 {
        return Err(TranslateError::TokenBound(max));
    }
    bounds.insert(act.id.clone(), max);

    let ce_idx: Vec<Value> = act
        .edges
        .iter()
        .filter(|e| e.kind == EdgeKind::Control)
        .map(|e| Value::Int(e.index as i64))
        .collect();
    if !ce_idx.is_empty() {
        reg.declare(chan(ChannelBase::Ce, None, a), vec![domain(ce_idx)]);
    }
    let mut oe_idx = Vec::new();
    let mut oe_vals = Vec::new();
    for e in act.edges.iter().filter(|e| e.kind == EdgeKind::Object) {
        oe_idx.push(Value::Int(e.index as i64));
        if let Some(t) = act.edge_type(e) {
            oe_vals.extend(t.values());
        }
    }
    if !oe_idx.is_empty() {
        reg.declare(
            chan(ChannelBase::Oe, None, a),
            vec![domain(oe_idx), domain(oe_vals)],
        );
    }
    for e in &act.edges {
        let base = match e.kind {
            EdgeKind::Control => ChannelBase::Ce,
            EdgeKind::Object => ChannelBase::Oe,
        };
        reg.trace(
            chan(base, None, a),
            vec![Value::Int(e.index as i64)],
            ElementRef::edge(a, &e.id),
        );
    }
    reg.declare(
        chan(ChannelBase::Update, None, a),
        vec![domain((-max..=max).map(Value::Int))],
    );
    for base in [ChannelBase::Update, ChannelBase::Clear, ChannelBase::EndDiagram] {
        if base != ChannelBase::Update {
            reg.declare(chan(base.clone(), None, a), vec![]);
        }
        reg.trace(chan(base, None, a), vec![], ElementRef::activity(a));
    }
    if cfg.strict {
        reg.declare(chan(ChannelBase::Overflow, None, a), vec![]);
        reg.trace(chan(ChannelBase::Overflow, None, a), vec![], ElementRef::activity(a));
    }

    let end_diagram = Proc::prefix(
        Pattern::bare(chan(ChannelBase::EndDiagram, None, a)),
        Proc::skip(),
    );
    let mut parts = Vec::new();
    let mut global_alpha = Vec::new();
    let mut start_fields = Vec::new();
    for n in &act.nodes {
        let built = NodeBuilder { act, acts, reg }.build(n)?;
        env.define(&built.name, vec![], built.body)?;
        let mut inner = Proc::call(&built.name, vec![]);
        if let Some(m) = &built.memory {
            let mem_body = Proc::ext(
                Proc::prefix(
                    Pattern::new(m.get.clone(), vec![Field::Out(Expr::var("x"))]),
                    Proc::call(&m.name, vec![Expr::var("x")]),
                ),
                Proc::prefix(
                    Pattern::new(
                        m.set.clone(),
                        vec![Field::In {
                            var: "y".into(),
                            domain: Some(m.dom.clone()),
                        }],
                    ),
                    Proc::call(&m.name, vec![Expr::var("y")]),
                ),
            );
            env.define(&m.name, vec![Param::new("x", Some(m.dom.clone()))], mem_body)?;
            inner = Proc::par(
                inner,
                EventSet::channels([m.get.clone(), m.set.clone()]),
                Proc::call(&m.name, vec![m.init.clone()]),
            );
        }
        let wrapper = format!("{}_t", built.name);
        let (params, args) = match &built.start_param {
            Some((var, dom)) => {
                start_fields.push(Field::In {
                    var: var.clone(),
                    domain: Some(dom.clone()),
                });
                (
                    vec![Param::new(var, Some(dom.clone()))],
                    vec![Expr::Var(var.clone())],
                )
            }
            None => (vec![], vec![]),
        };
        env.define(&wrapper, params, Proc::interrupt(inner, end_diagram.clone()))?;
        parts.push((Proc::call(&wrapper, args), built.local_alpha));
        global_alpha.extend(built.global_alpha);
    }
    let (nodes, _) = par_all(parts);
    let (tm_name, tm_params, tm_body) = token_manager(a, max, cfg.strict);
    env.define(&tm_name, tm_params, tm_body)?;
    let body = Proc::par(
        nodes,
        EventSet::channels([
            chan(ChannelBase::Update, None, a),
            chan(ChannelBase::Clear, None, a),
            chan(ChannelBase::EndDiagram, None, a),
        ]),
        Proc::call(&tm_name, vec![Expr::int(0), Expr::bool(false)]),
    );
    Ok(ActivityOut {
        body,
        start_fields,
        global_alpha,
    })
}

/// Builds the closed model: one harness for the top-level activity, a recursive wrapper for
/// every called activity, and hiding of bookkeeping channels on the outside.
pub fn translate(d: &ActivityDiagram, cfg: &TranslationConfig) -> Result<CspModel, TranslateError> {
    let errors: Vec<Violation> = crate::diagram::validate_with(
        d,
        &ValidationConfig {
            int_cap: cfg.int_cap,
        },
    )
    .into_iter()
    .filter(|v| v.severity == Severity::Error)
    .collect();
    if !errors.is_empty() {
        return Err(TranslateError::Invalid(errors));
    }
    translate_unchecked(d, cfg)
}

/// Translates without structural validation. Node arities outside the validated ranges are
/// translated literally.
pub fn translate_unchecked(
    d: &ActivityDiagram,
    cfg: &TranslationConfig,
) -> Result<CspModel, TranslateError> {
    let hidden_bases = cfg.hidden_bases()?;
    let acts = d.reachable_activities();
    let act_ids: Vec<Name> = acts.iter().map(|a| a.id.clone()).collect();
    let top = d.top_level.clone();

    let mut reg = Registry::default();
    let mut callers: BTreeMap<Name, BTreeSet<Value>> = BTreeMap::new();
    for act in &acts {
        let doms = act
            .parameters()
            .map(|p| {
                p.value_type
                    .as_ref()
                    .map(|t| domain(t.values()))
                    .ok_or_else(|| TranslateError::MissingType {
                        activity: act.id.to_string(),
                        element: p.id.to_string(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        reg.start_params.insert(act.id.clone(), doms);
        for n in act.nodes.iter().filter(|n| n.kind == NodeKind::CallBehavior) {
            if let Some(w) = &n.callee {
                callers
                    .entry(w.clone())
                    .or_default()
                    .insert(Value::Sym(act.id.clone()));
            }
        }
    }

    let sysdone = ChannelName::simple(ChannelBase::Sysdone);
    reg.declare(sysdone.clone(), vec![]);
    reg.trace(sysdone.clone(), vec![], ElementRef::activity(&top));

    let mut env = Environment::new();
    let mut bounds = BTreeMap::new();
    let mut components = Vec::new();
    for act in &acts {
        let a: &str = &act.id;
        let out = translate_activity(act, &act_ids, cfg, &mut reg, &mut env, &mut bounds)?;
        let start = chan(ChannelBase::StartActivity, None, a);
        let end = chan(ChannelBase::EndActivity, None, a);
        reg.trace(start.clone(), vec![], ElementRef::activity(a));
        reg.trace(end.clone(), vec![], ElementRef::activity(a));
        let param_doms = reg.start_params[a].clone();
        let mut alpha = out.global_alpha;
        alpha.push((start.clone(), vec![]));
        alpha.push((end.clone(), vec![]));
        alpha.push((sysdone.clone(), vec![]));
        if act.id == top {
            reg.declare(start.clone(), param_doms);
            reg.declare(end.clone(), vec![]);
            let tail = Proc::prefix(
                Pattern::bare(end),
                Proc::prefix(Pattern::bare(sysdone.clone()), Proc::skip()),
            );
            let harness = Proc::prefix(
                Pattern::new(start, out.start_fields),
                Proc::seq(out.body, tail),
            );
            components.insert(0, (harness, alpha));
        } else {
            let who = domain(callers.get(a).cloned().unwrap_or_default());
            let mut fields = vec![Field::In {
                var: "caller".into(),
                domain: Some(who.clone()),
            }];
            fields.extend(out.start_fields);
            let mut decl = vec![who.clone()];
            decl.extend(param_doms);
            reg.declare(start.clone(), decl);
            reg.declare(end.clone(), vec![who]);
            let name = format!("Activity_{a}");
            let body = Proc::prefix(
                Pattern::new(start, fields),
                Proc::seq(
                    out.body,
                    Proc::prefix(
                        Pattern::new(end, vec![Field::Out(Expr::var("caller"))]),
                        Proc::call(&name, vec![]),
                    ),
                ),
            );
            env.define(&name, vec![], body)?;
            let wrapped = Proc::interrupt(
                Proc::call(&name, vec![]),
                Proc::prefix(Pattern::bare(sysdone.clone()), Proc::skip()),
            );
            components.push((wrapped, alpha));
        }
    }

    let orphans = orphan_signals(&components);
    let (mut system, _) = par_all(components);
    if !orphans.is_empty() {
        system = Proc::par(system, EventSet::new(orphans), Proc::skip());
    }
    let hidden: BTreeSet<ChannelName> = reg
        .channels
        .keys()
        .filter(|c| hidden_bases.contains(c.base.as_str()))
        .cloned()
        .collect();
    let visible: BTreeSet<ChannelName> = reg
        .channels
        .keys()
        .filter(|c| !hidden.contains(*c))
        .cloned()
        .collect();
    if !hidden.is_empty() {
        system = Proc::hide(system, EventSet::channels(hidden.iter().cloned()));
    }
    Ok(CspModel {
        env,
        main: system,
        trace_map: reg.trace,
        channels: reg.channels,
        hidden,
        visible,
        max_tokens: bounds,
        top,
        strict: cfg.strict,
    })
}

/// Signal events that only one side (sender or receiver) can perform.
fn orphan_signals(components: &[(Proc, Vec<Production>)]) -> Vec<Production> {
    let mut count: BTreeMap<&Production, usize> = BTreeMap::new();
    for (_, alpha) in components {
        let mine: BTreeSet<&Production> = alpha
            .iter()
            .filter(|(c, _)| c.base == ChannelBase::Signal)
            .collect();
        for p in mine {
            *count.entry(p).or_default() += 1;
        }
    }
    count
        .into_iter()
        .filter(|(_, k)| *k < 2)
        .map(|(p, _)| p.clone())
        .collect()
}

#[cfg(test)]
mod tests;
