use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::{ChannelName, EventSet, Expr};
use crate::{Name, Value};

/// A finite, sorted value domain for input fields and process parameters.
pub type Domain = Arc<[Value]>;

pub fn domain(values: impl IntoIterator<Item = Value>) -> Domain {
    let mut v: Vec<Value> = values.into_iter().collect();
    v.sort();
    v.dedup();
    v.into()
}

/// One field of a communication pattern: `.e`/`!e` output or `?x` input.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Field {
    Out(Expr),
    /// Input binding `var`, ranging over `domain`. A missing domain cannot be explored.
    In { var: Name, domain: Option<Domain> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    pub channel: ChannelName,
    pub fields: Vec<Field>,
}

impl Pattern {
    pub fn new(channel: ChannelName, fields: Vec<Field>) -> Self {
        Pattern { channel, fields }
    }

    pub fn bare(channel: ChannelName) -> Self {
        Pattern {
            channel,
            fields: Vec::new(),
        }
    }

    pub fn out(channel: ChannelName, values: impl IntoIterator<Item = Value>) -> Self {
        Pattern {
            channel,
            fields: values.into_iter().map(|v| Field::Out(Expr::Const(v))).collect(),
        }
    }

    fn bound_vars(&self) -> impl Iterator<Item = &Name> {
        self.fields.iter().filter_map(|f| match f {
            Field::In { var, .. } => Some(var),
            Field::Out(_) => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Stop,
    Skip,
    /// Successfully terminated: no further behaviour.
    Omega,
    Prefix(Pattern, Proc),
    ExtChoice(Proc, Proc),
    IntChoice(Proc, Proc),
    Seq(Proc, Proc),
    Par(Proc, EventSet, Proc),
    Interleave(Proc, Proc),
    Hide(Proc, EventSet),
    Interrupt(Proc, Proc),
    Guard(Expr, Proc),
    Ref(Name, Vec<Expr>),
}

/// Shared, immutable process term with a cached structural hash.
#[derive(Clone)]
pub struct Proc(Arc<ProcNode>);

struct ProcNode {
    hash: u64,
    has_vars: bool,
    term: Term,
}

impl Proc {
    pub fn new(term: Term) -> Self {
        let mut h = std::hash::DefaultHasher::new();
        term.hash(&mut h);
        let has_vars = match &term {
            Term::Stop | Term::Skip | Term::Omega => false,
            Term::Prefix(p, k) => {
                k.has_vars()
                    || p.fields.iter().any(|f| match f {
                        Field::Out(e) => e.has_vars(),
                        Field::In { .. } => false,
                    })
            }
            Term::ExtChoice(a, b)
            | Term::IntChoice(a, b)
            | Term::Seq(a, b)
            | Term::Par(a, _, b)
            | Term::Interleave(a, b)
            | Term::Interrupt(a, b) => a.has_vars() || b.has_vars(),
            Term::Hide(a, _) => a.has_vars(),
            Term::Guard(c, p) => c.has_vars() || p.has_vars(),
            Term::Ref(_, args) => args.iter().any(Expr::has_vars),
        };
        Proc(Arc::new(ProcNode {
            hash: h.finish(),
            has_vars,
            term,
        }))
    }

    pub fn term(&self) -> &Term {
        &self.0.term
    }

    /// True if any variable occurs in the term (bound or free).
    pub fn has_vars(&self) -> bool {
        self.0.has_vars
    }

    pub fn stop() -> Self {
        Proc::new(Term::Stop)
    }

    pub fn skip() -> Self {
        Proc::new(Term::Skip)
    }

    pub fn omega() -> Self {
        Proc::new(Term::Omega)
    }

    pub fn prefix(p: Pattern, k: Proc) -> Self {
        Proc::new(Term::Prefix(p, k))
    }

    /// `ev -> k` for a fixed event on `channel` with constant `values`.
    pub fn send(channel: ChannelName, values: impl IntoIterator<Item = Value>, k: Proc) -> Self {
        Proc::prefix(Pattern::out(channel, values), k)
    }

    pub fn ext(a: Proc, b: Proc) -> Self {
        Proc::new(Term::ExtChoice(a, b))
    }

    pub fn int(a: Proc, b: Proc) -> Self {
        Proc::new(Term::IntChoice(a, b))
    }

    pub fn seq(a: Proc, b: Proc) -> Self {
        Proc::new(Term::Seq(a, b))
    }

    pub fn par(a: Proc, sync: EventSet, b: Proc) -> Self {
        Proc::new(Term::Par(a, sync, b))
    }

    pub fn interleave(a: Proc, b: Proc) -> Self {
        Proc::new(Term::Interleave(a, b))
    }

    pub fn hide(a: Proc, set: EventSet) -> Self {
        Proc::new(Term::Hide(a, set))
    }

    pub fn interrupt(a: Proc, b: Proc) -> Self {
        Proc::new(Term::Interrupt(a, b))
    }

    pub fn guard(cond: Expr, p: Proc) -> Self {
        Proc::new(Term::Guard(cond, p))
    }

    pub fn call(name: &str, args: Vec<Expr>) -> Self {
        Proc::new(Term::Ref(name.into(), args))
    }

    /// Right-nested n-ary combination; `None` for an empty list.
    pub fn fold_right(parts: Vec<Proc>, op: impl Fn(Proc, Proc) -> Proc) -> Option<Proc> {
        let mut it = parts.into_iter().rev();
        let last = it.next()?;
        Some(it.fold(last, |acc, p| op(p, acc)))
    }

    /// Sequential composition of the parts, dropping `SKIP`s; `SKIP` when nothing is left.
    pub fn seq_all(parts: Vec<Proc>) -> Proc {
        let parts: Vec<Proc> = parts
            .into_iter()
            .filter(|p| !matches!(p.term(), Term::Skip))
            .collect();
        Proc::fold_right(parts, Proc::seq).unwrap_or_else(Proc::skip)
    }

    /// Replaces variables by values. Input fields shadow outer bindings of the same name.
    pub fn subst(&self, bindings: &[(Name, Value)]) -> Proc {
        if bindings.is_empty() || !self.has_vars() {
            return self.clone();
        }
        let s = |p: &Proc| p.subst(bindings);
        let t = match self.term() {
            Term::Stop | Term::Skip | Term::Omega => return self.clone(),
            Term::Prefix(pat, k) => {
                let fields = pat
                    .fields
                    .iter()
                    .map(|f| match f {
                        Field::Out(e) => Field::Out(e.subst(bindings)),
                        Field::In { .. } => f.clone(),
                    })
                    .collect();
                let shadowed: Vec<&Name> = pat.bound_vars().collect();
                let k = if shadowed.is_empty() {
                    k.subst(bindings)
                } else {
                    let inner: Vec<(Name, Value)> = bindings
                        .iter()
                        .filter(|(n, _)| !shadowed.contains(&n))
                        .cloned()
                        .collect();
                    k.subst(&inner)
                };
                Term::Prefix(Pattern::new(pat.channel.clone(), fields), k)
            }
            Term::ExtChoice(a, b) => Term::ExtChoice(s(a), s(b)),
            Term::IntChoice(a, b) => Term::IntChoice(s(a), s(b)),
            Term::Seq(a, b) => Term::Seq(s(a), s(b)),
            Term::Par(a, set, b) => Term::Par(s(a), set.clone(), s(b)),
            Term::Interleave(a, b) => Term::Interleave(s(a), s(b)),
            Term::Hide(a, set) => Term::Hide(s(a), set.clone()),
            Term::Interrupt(a, b) => Term::Interrupt(s(a), s(b)),
            Term::Guard(c, p) => Term::Guard(c.subst(bindings), s(p)),
            Term::Ref(n, args) => Term::Ref(n.clone(), args.iter().map(|a| a.subst(bindings)).collect()),
        };
        Proc::new(t)
    }
}

impl PartialEq for Proc {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.hash == other.0.hash && self.0.term == other.0.term)
    }
}

impl Eq for Proc {}

impl Hash for Proc {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash)
    }
}

impl fmt::Debug for Proc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
