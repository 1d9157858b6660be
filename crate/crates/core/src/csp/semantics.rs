//! Structural operational semantics: the labelled transitions of a term.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::{CspError, Environment, Event, EventSet, Expr, Field, Pattern, Proc, Term};
use crate::{Name, Value};

pub type Transitions = Arc<[(Event, Proc)]>;

const CACHE_LIMIT: usize = 1 << 21;

/// Computes transitions, memoising them per subterm. One stepper per worker thread.
pub struct Stepper<'e> {
    env: &'e Environment,
    cache: HashMap<Proc, Transitions>,
    depth: usize,
}

const MAX_UNFOLD_DEPTH: usize = 64;

impl<'e> Stepper<'e> {
    pub fn new(env: &'e Environment) -> Self {
        Stepper {
            env,
            cache: HashMap::new(),
            depth: 0,
        }
    }

    pub fn env(&self) -> &'e Environment {
        self.env
    }

    /// All `(event, successor)` pairs of `p`, without duplicates, in generation order.
    pub fn transitions(&mut self, p: &Proc) -> Result<Transitions, CspError> {
        if let Some(t) = self.cache.get(p) {
            return Ok(t.clone());
        }
        let mut out = Vec::new();
        self.compute(p, &mut out)?;
        dedup(&mut out);
        let t: Transitions = out.into();
        if self.cache.len() >= CACHE_LIMIT {
            self.cache.clear();
        }
        self.cache.insert(p.clone(), t.clone());
        Ok(t)
    }

    fn compute(&mut self, p: &Proc, out: &mut Vec<(Event, Proc)>) -> Result<(), CspError> {
        match p.term() {
            Term::Stop | Term::Omega => {}
            Term::Skip => out.push((Event::Tick, Proc::omega())),
            Term::Prefix(pat, k) => expand_prefix(pat, k, out)?,
            Term::ExtChoice(l, r) => {
                for (e, l2) in self.transitions(l)?.iter() {
                    out.push(match e {
                        Event::Tau => (Event::Tau, Proc::ext(l2.clone(), r.clone())),
                        _ => (e.clone(), l2.clone()),
                    });
                }
                for (e, r2) in self.transitions(r)?.iter() {
                    out.push(match e {
                        Event::Tau => (Event::Tau, Proc::ext(l.clone(), r2.clone())),
                        _ => (e.clone(), r2.clone()),
                    });
                }
            }
            Term::IntChoice(l, r) => {
                out.push((Event::Tau, l.clone()));
                out.push((Event::Tau, r.clone()));
            }
            Term::Seq(l, r) => {
                for (e, l2) in self.transitions(l)?.iter() {
                    out.push(match e {
                        Event::Tick => (Event::Tau, r.clone()),
                        _ => (e.clone(), Proc::seq(l2.clone(), r.clone())),
                    });
                }
            }
            Term::Par(l, sync, r) => self.parallel(l, Some(sync), r, out)?,
            Term::Interleave(l, r) => self.parallel(l, None, r, out)?,
            Term::Hide(q, set) => {
                for (e, q2) in self.transitions(q)?.iter() {
                    out.push(match e {
                        Event::Tick => (Event::Tick, Proc::omega()),
                        e if set.contains(e) => (Event::Tau, Proc::hide(q2.clone(), set.clone())),
                        _ => (e.clone(), Proc::hide(q2.clone(), set.clone())),
                    });
                }
            }
            Term::Interrupt(l, r) => {
                for (e, l2) in self.transitions(l)?.iter() {
                    out.push(match e {
                        Event::Tick => (Event::Tick, Proc::omega()),
                        _ => (e.clone(), Proc::interrupt(l2.clone(), r.clone())),
                    });
                }
                for (e, r2) in self.transitions(r)?.iter() {
                    out.push(match e {
                        Event::Tau => (Event::Tau, Proc::interrupt(l.clone(), r2.clone())),
                        Event::Tick => (Event::Tick, Proc::omega()),
                        _ => (e.clone(), r2.clone()),
                    });
                }
            }
            Term::Guard(c, q) => {
                if eval_bool(c)? {
                    out.extend(self.transitions(q)?.iter().cloned());
                }
            }
            Term::Ref(name, args) => {
                let args = args.iter().map(Expr::eval).collect::<Result<Vec<_>, _>>()?;
                let body = self.env.expand_ref(name, &args)?;
                if self.depth >= MAX_UNFOLD_DEPTH {
                    return Err(CspError::UnguardedRecursion(name.to_string()));
                }
                self.depth += 1;
                let res = self.transitions(&body);
                self.depth -= 1;
                out.extend(res?.iter().cloned());
            }
        }
        Ok(())
    }

    fn parallel(
        &mut self,
        l: &Proc,
        sync: Option<&EventSet>,
        r: &Proc,
        out: &mut Vec<(Event, Proc)>,
    ) -> Result<(), CspError> {
        let lt = self.transitions(l)?;
        let rt = self.transitions(r)?;
        let rebuild = |a: Proc, b: Proc| match sync {
            Some(s) => Proc::par(a, s.clone(), b),
            None => Proc::interleave(a, b),
        };
        let synced = |e: &Event| sync.is_some_and(|s| s.contains(e));
        let r_ticks = rt.iter().any(|(e, _)| *e == Event::Tick);
        for (e, l2) in lt.iter() {
            match e {
                Event::Tick => {
                    if r_ticks {
                        out.push((Event::Tick, Proc::omega()));
                    }
                }
                e if synced(e) => {
                    for (f, r2) in rt.iter() {
                        if f == e {
                            out.push((e.clone(), rebuild(l2.clone(), r2.clone())));
                        }
                    }
                }
                _ => out.push((e.clone(), rebuild(l2.clone(), r.clone()))),
            }
        }
        for (e, r2) in rt.iter() {
            if *e != Event::Tick && !synced(e) {
                out.push((e.clone(), rebuild(l.clone(), r2.clone())));
            }
        }
        Ok(())
    }
}

fn eval_bool(c: &Expr) -> Result<bool, CspError> {
    match c.eval()? {
        Value::Bool(b) => Ok(b),
        v => Err(CspError::Type(format!("guard evaluates to {v}, expected a boolean"))),
    }
}

type Binding = (Vec<Value>, Vec<(Name, Value)>);

fn expand_prefix(pat: &Pattern, k: &Proc, out: &mut Vec<(Event, Proc)>) -> Result<(), CspError> {
    // cartesian product over input fields, outputs evaluated once
    let mut partial: Vec<Binding> = vec![(Vec::new(), Vec::new())];
    for f in &pat.fields {
        match f {
            Field::Out(e) => {
                let v = e.eval()?;
                for (vals, _) in &mut partial {
                    vals.push(v.clone());
                }
            }
            Field::In { var, domain } => {
                let dom = domain
                    .as_ref()
                    .ok_or_else(|| CspError::UnboundedDomain(pat.channel.to_string()))?;
                let mut next = Vec::with_capacity(partial.len() * dom.len());
                for (vals, binds) in &partial {
                    for v in dom.iter() {
                        let mut vals = vals.clone();
                        vals.push(v.clone());
                        let mut binds = binds.clone();
                        binds.push((var.clone(), v.clone()));
                        next.push((vals, binds));
                    }
                }
                partial = next;
            }
        }
    }
    for (vals, binds) in partial {
        out.push((Event::new(pat.channel.clone(), vals), k.subst(&binds)));
    }
    Ok(())
}

fn dedup(v: &mut Vec<(Event, Proc)>) {
    if v.len() < 2 {
        return;
    }
    let mut seen = std::collections::HashSet::with_capacity(v.len());
    v.retain(|(e, p)| seen.insert((e.clone(), p.clone())));
}

/// The events `t` can perform in one step.
pub fn initials(t: &Proc, env: &Environment) -> Result<BTreeSet<Event>, CspError> {
    Ok(Stepper::new(env)
        .transitions(t)?
        .iter()
        .map(|(e, _)| e.clone())
        .collect())
}

/// Every successor of `t` after `e`; empty if `e` is not an initial of `t`.
pub fn step(t: &Proc, e: &Event, env: &Environment) -> Result<Vec<Proc>, CspError> {
    Ok(Stepper::new(env)
        .transitions(t)?
        .iter()
        .filter(|(f, _)| f == e)
        .map(|(_, p)| p.clone())
        .collect())
}
