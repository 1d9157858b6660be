//! One process definition per activity node.

use crate::csp::{
    domain, ChannelBase, ChannelName, Domain, EventSet, Expr, ExprOp, Field, Pattern, Proc, Term,
};
use crate::diagram::{
    decision_input_type, Activity, BinOp, DataType, Edge, EdgeKind, GuardExpr, Node, NodeKind,
};
use crate::{Name, Value};

use super::trace::ElementRef;
use super::{Registry, TranslateError};

pub(super) type Production = (ChannelName, Vec<Value>);

pub(super) struct Memory {
    pub name: String,
    pub get: ChannelName,
    pub set: ChannelName,
    pub dom: Domain,
    pub init: Expr,
}

pub(super) struct NodeProcs {
    pub name: String,
    pub body: Proc,
    pub memory: Option<Memory>,
    /// Input parameters take the activity's start value as wrapper argument.
    pub start_param: Option<(Name, Domain)>,
    /// Edge and teardown events shared with sibling nodes.
    pub local_alpha: Vec<Production>,
    /// Events shared with other activities (signals, call brackets).
    pub global_alpha: Vec<Production>,
}

pub(super) fn chan(base: ChannelBase, node: Option<&str>, act: &str) -> ChannelName {
    ChannelName::new(base, node, Some(act))
}

pub(super) fn kind_prefix(k: NodeKind) -> &'static str {
    match k {
        NodeKind::BasicAction => "Action",
        NodeKind::SendSignal => "SendSignal",
        NodeKind::AcceptEvent => "AcceptEvent",
        NodeKind::CallBehavior => "CallBehavior",
        NodeKind::Initial => "Init",
        NodeKind::ActivityFinal => "ActivityFinal",
        NodeKind::FlowFinal => "FlowFinal",
        NodeKind::Merge => "Merge",
        NodeKind::Decision => "Decision",
        NodeKind::Fork => "Fork",
        NodeKind::Join => "Join",
        NodeKind::ObjectNode => "Object",
        NodeKind::InputPin => "InPin",
        NodeKind::OutputPin => "OutPin",
        NodeKind::InputParameter => "InParam",
        NodeKind::OutputParameter => "OutParam",
    }
}

pub(super) fn def_name(act: &str, n: &Node) -> String {
    format!("{}_{}_{}", kind_prefix(n.kind), n.id, act)
}

pub(super) fn interleave_all(parts: Vec<Proc>) -> Proc {
    Proc::fold_right(parts, Proc::interleave).unwrap_or_else(Proc::skip)
}

pub(super) fn ext_all(parts: Vec<Proc>) -> Proc {
    Proc::fold_right(parts, Proc::ext).unwrap_or_else(Proc::stop)
}

/// `a ; b`, splicing prefix chains so no silent step is introduced.
pub(super) fn then(a: Proc, b: Proc) -> Proc {
    match a.term() {
        Term::Skip => b,
        Term::Prefix(p, k) => Proc::prefix(p.clone(), then(k.clone(), b)),
        _ => Proc::seq(a, b),
    }
}

fn ev(p: Pattern) -> Proc {
    Proc::prefix(p, Proc::skip())
}

fn input(var: &str, dom: Domain) -> Field {
    Field::In {
        var: var.into(),
        domain: Some(dom),
    }
}

pub(super) fn guard_expr(g: &GuardExpr, var: &str) -> Expr {
    match g {
        GuardExpr::Int(i) => Expr::int(*i),
        GuardExpr::Bool(b) => Expr::bool(*b),
        GuardExpr::Label(l) => Expr::Const(Value::Sym(l.clone())),
        GuardExpr::Var => Expr::var(var),
        GuardExpr::Not(e) => Expr::negate(guard_expr(e, var)),
        GuardExpr::Bin(op, a, b) => {
            let op = match op {
                BinOp::Add => ExprOp::Add,
                BinOp::Sub => ExprOp::Sub,
                BinOp::Mul => ExprOp::Mul,
                BinOp::Lt => ExprOp::Lt,
                BinOp::Le => ExprOp::Le,
                BinOp::Eq => ExprOp::Eq,
                BinOp::Ne => ExprOp::Ne,
                BinOp::Ge => ExprOp::Ge,
                BinOp::Gt => ExprOp::Gt,
                BinOp::And => ExprOp::And,
                BinOp::Or => ExprOp::Or,
            };
            Expr::bin(op, guard_expr(a, var), guard_expr(b, var))
        }
    }
}

pub(super) struct NodeBuilder<'a> {
    pub act: &'a Activity,
    /// Activities that may exchange signals, i.e. every translated activity.
    pub acts: &'a [Name],
    pub reg: &'a mut Registry,
}

impl NodeBuilder<'_> {
    fn aid(&self) -> &str {
        &self.act.id
    }

    fn edge_dom(&self, e: &Edge) -> Result<Domain, TranslateError> {
        self.act
            .edge_type(e)
            .map(|t| domain(t.values()))
            .ok_or_else(|| TranslateError::MissingType {
                activity: self.aid().to_string(),
                element: e.id.to_string(),
            })
    }

    fn node_dom(&self, n: &Node, t: Option<DataType>) -> Result<Domain, TranslateError> {
        t.map(|t| domain(t.values()))
            .ok_or_else(|| TranslateError::MissingType {
                activity: self.aid().to_string(),
                element: n.id.to_string(),
            })
    }

    fn idx(e: &Edge) -> Expr {
        Expr::int(e.index as i64)
    }

    /// Receiving a token on `e`; object values are bound to `var`.
    fn intake(&self, e: &Edge, var: &str) -> Result<Pattern, TranslateError> {
        Ok(match e.kind {
            EdgeKind::Control => Pattern::new(
                chan(ChannelBase::Ce, None, self.aid()),
                vec![Field::Out(Self::idx(e))],
            ),
            EdgeKind::Object => Pattern::new(
                chan(ChannelBase::Oe, None, self.aid()),
                vec![Field::Out(Self::idx(e)), input(var, self.edge_dom(e)?)],
            ),
        })
    }

    /// Offering a token on `e`. Object edges carry `bound` when given, otherwise any value.
    fn emit(&self, e: &Edge, bound: Option<&str>) -> Result<Proc, TranslateError> {
        let p = match (e.kind, bound) {
            (EdgeKind::Control, _) => Pattern::new(
                chan(ChannelBase::Ce, None, self.aid()),
                vec![Field::Out(Self::idx(e))],
            ),
            (EdgeKind::Object, Some(v)) => Pattern::new(
                chan(ChannelBase::Oe, None, self.aid()),
                vec![Field::Out(Self::idx(e)), Field::Out(Expr::var(v))],
            ),
            (EdgeKind::Object, None) => Pattern::new(
                chan(ChannelBase::Oe, None, self.aid()),
                vec![Field::Out(Self::idx(e)), input("o", self.edge_dom(e)?)],
            ),
        };
        Ok(ev(p))
    }

    fn emit_all(&self, outs: &[&Edge], bound: Option<&str>) -> Result<Proc, TranslateError> {
        let parts = outs
            .iter()
            .map(|e| self.emit(e, bound))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(interleave_all(parts))
    }

    fn intake_all(&self, ins: &[&Edge]) -> Result<Proc, TranslateError> {
        let parts = ins
            .iter()
            .map(|e| self.intake(e, "i").map(ev))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(interleave_all(parts))
    }

    fn intake_any(&self, ins: &[&Edge]) -> Result<Proc, TranslateError> {
        let parts = ins
            .iter()
            .map(|e| self.intake(e, "i").map(ev))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ext_all(parts))
    }

    fn update(&self, x: i64) -> Proc {
        ev(Pattern::out(
            chan(ChannelBase::Update, None, self.aid()),
            [Value::Int(x)],
        ))
    }

    fn update_nonzero(&self, x: i64) -> Proc {
        if x == 0 {
            Proc::skip()
        } else {
            self.update(x)
        }
    }

    fn memory(&mut self, n: &Node, dom: Domain, init: Expr) -> Memory {
        let a = self.aid().to_string();
        let get = chan(ChannelBase::Get, Some(&n.id), &a);
        let set = chan(ChannelBase::Set, Some(&n.id), &a);
        for c in [&get, &set] {
            self.reg.declare(c.clone(), vec![dom.clone()]);
            self.reg.trace(c.clone(), vec![], ElementRef::node(&a, &n.id));
        }
        Memory {
            name: format!("Mem_{}_{}", n.id, a),
            get,
            set,
            dom,
            init,
        }
    }

    pub fn build(&mut self, n: &Node) -> Result<NodeProcs, TranslateError> {
        let a = self.aid().to_string();
        let name = def_name(&a, n);
        let recurse = Proc::call(&name, vec![]);
        let all_in: Vec<&Edge> = self.act.incoming(&n.id).collect();
        let ins: Vec<&Edge> = all_in.iter().copied().filter(|e| !e.decision_input).collect();
        let dins: Vec<&Edge> = all_in.iter().copied().filter(|e| e.decision_input).collect();
        let outs: Vec<&Edge> = self.act.outgoing(&n.id).collect();
        let (n_in, n_out) = (ins.len() as i64, outs.len() as i64);

        let mut local_alpha: Vec<Production> = all_in
            .iter()
            .chain(outs.iter())
            .map(|e| {
                let base = match e.kind {
                    EdgeKind::Control => ChannelBase::Ce,
                    EdgeKind::Object => ChannelBase::Oe,
                };
                (chan(base, None, &a), vec![Value::Int(e.index as i64)])
            })
            .collect();
        local_alpha.push((chan(ChannelBase::EndDiagram, None, &a), vec![]));
        let mut global_alpha = Vec::new();
        let mut memory = None;
        let mut start_param = None;

        let body = match n.kind {
            NodeKind::BasicAction
            | NodeKind::SendSignal
            | NodeKind::AcceptEvent
            | NodeKind::CallBehavior => {
                let core = self.action_core(n, &mut global_alpha)?;
                let body = then(self.update_nonzero(n_out - n_in), then(self.emit_all(&outs, None)?, recurse));
                then(self.intake_all(&ins)?, then(core, body))
            }
            NodeKind::Initial => then(self.update(n_out), self.emit_all(&outs, None)?),
            NodeKind::Fork => then(
                self.intake_all(&ins)?,
                then(self.update(n_out - 1), then(self.emit_all(&outs, None)?, recurse)),
            ),
            NodeKind::Join => then(
                self.intake_all(&ins)?,
                then(self.update(1 - n_in), then(self.emit_all(&outs, None)?, recurse)),
            ),
            NodeKind::Merge => self.merge(&ins, &outs, recurse)?,
            NodeKind::FlowFinal => Proc::seq(self.intake_any(&ins)?, then(self.update(-1), recurse)),
            NodeKind::ActivityFinal => {
                let clear = chan(ChannelBase::Clear, None, &a);
                self.reg.trace(clear.clone(), vec![], ElementRef::node(&a, &n.id));
                Proc::seq(self.intake_any(&ins)?, ev(Pattern::bare(clear)))
            }
            NodeKind::Decision => {
                let (body, mem) = self.decision(n, &ins, &dins, &outs, recurse)?;
                memory = mem;
                body
            }
            NodeKind::InputParameter => {
                let dom = self.node_dom(n, n.value_type.clone())?;
                let var: Name = format!("p_{}", n.id).into();
                memory = Some(self.memory(n, dom.clone(), Expr::Var(var.clone())));
                start_param = Some((var, dom.clone()));
                if outs.is_empty() {
                    Proc::skip()
                } else {
                    let get = chan(ChannelBase::Get, Some(&n.id), &a);
                    then(
                        self.update(n_out),
                        Proc::prefix(
                            Pattern::new(get, vec![input("x", dom)]),
                            self.emit_all(&outs, Some("x"))?,
                        ),
                    )
                }
            }
            NodeKind::ObjectNode
            | NodeKind::InputPin
            | NodeKind::OutputPin
            | NodeKind::OutputParameter => {
                let dom = self.node_dom(n, n.value_type.clone())?;
                let init = Expr::Const(dom[0].clone());
                let mem = self.memory(n, dom.clone(), init);
                let body = self.object(&ins, &outs, &mem, recurse)?;
                memory = Some(mem);
                body
            }
        };
        Ok(NodeProcs {
            name,
            body,
            memory,
            start_param,
            local_alpha,
            global_alpha,
        })
    }

    fn action_core(&mut self, n: &Node, global: &mut Vec<Production>) -> Result<Proc, TranslateError> {
        let a = self.aid().to_string();
        let me = Value::sym(&a);
        let others = domain(self.acts.iter().filter(|x| ***x != *a).map(|x| Value::Sym(x.clone())));
        let all = domain(self.acts.iter().map(|x| Value::Sym(x.clone())));
        let el = ElementRef::node(&a, &n.id);
        Ok(match n.kind {
            NodeKind::BasicAction => {
                let c = chan(ChannelBase::Behavior, Some(&n.id), &a);
                self.reg.declare(c.clone(), vec![]);
                self.reg.trace(c.clone(), vec![], el);
                ev(Pattern::bare(c))
            }
            NodeKind::SendSignal | NodeKind::AcceptEvent => {
                let sig = n.signal.as_deref().ok_or_else(|| TranslateError::MissingReference {
                    activity: a.clone(),
                    node: n.id.to_string(),
                })?;
                let c = ChannelName::new(ChannelBase::Signal, Some(sig), None);
                self.reg.declare(c.clone(), vec![all.clone(), all]);
                let fields = if n.kind == NodeKind::SendSignal {
                    self.reg.trace(c.clone(), vec![me.clone()], el);
                    for t in others.iter() {
                        global.push((c.clone(), vec![me.clone(), t.clone()]));
                    }
                    vec![Field::Out(Expr::Const(me)), input("t", others)]
                } else {
                    for s in others.iter() {
                        self.reg.trace(c.clone(), vec![s.clone(), me.clone()], el.clone());
                        global.push((c.clone(), vec![s.clone(), me.clone()]));
                    }
                    vec![input("s", others), Field::Out(Expr::Const(me))]
                };
                ev(Pattern::new(c, fields))
            }
            NodeKind::CallBehavior => {
                let w = n.callee.as_deref().ok_or_else(|| TranslateError::MissingReference {
                    activity: a.clone(),
                    node: n.id.to_string(),
                })?;
                let start = chan(ChannelBase::StartActivity, None, w);
                let end = chan(ChannelBase::EndActivity, None, w);
                let params = self.reg.start_params.get(w).cloned().unwrap_or_default();
                let mut fields = vec![Field::Out(Expr::Const(me.clone()))];
                for (i, d) in params.iter().enumerate() {
                    fields.push(input(&format!("a{i}"), d.clone()));
                }
                for c in [&start, &end] {
                    self.reg.trace(c.clone(), vec![me.clone()], el.clone());
                    global.push((c.clone(), vec![me.clone()]));
                }
                Proc::prefix(
                    Pattern::new(start, fields),
                    ev(Pattern::out(end, [me])),
                )
            }
            _ => unreachable!("not an action"),
        })
    }

    fn merge(&self, ins: &[&Edge], outs: &[&Edge], recurse: Proc) -> Result<Proc, TranslateError> {
        let n_out = outs.len() as i64;
        let control_only = ins
            .iter()
            .chain(outs.iter())
            .all(|e| e.kind == EdgeKind::Control);
        if control_only {
            let rest = then(self.update_nonzero(n_out - 1), then(self.emit_all(outs, None)?, recurse));
            return Ok(Proc::seq(self.intake_any(ins)?, rest));
        }
        let mut branches = Vec::new();
        for e in ins {
            let bound = (e.kind == EdgeKind::Object).then_some("x");
            let rest = then(self.update_nonzero(n_out - 1), then(self.emit_all(outs, bound)?, recurse.clone()));
            branches.push(Proc::prefix(self.intake(e, "x")?, rest));
        }
        Ok(ext_all(branches))
    }

    fn decision(
        &mut self,
        n: &Node,
        ins: &[&Edge],
        dins: &[&Edge],
        outs: &[&Edge],
        recurse: Proc,
    ) -> Result<(Proc, Option<Memory>), TranslateError> {
        let a = self.aid().to_string();
        let dc = chan(ChannelBase::Dc, Some(&n.id), &a);
        self.reg.declare(dc.clone(), vec![]);
        self.reg.trace(dc.clone(), vec![], ElementRef::node(&a, &n.id));
        let choice = |this: &Self, bound: Option<&str>| -> Result<Proc, TranslateError> {
            let mut branches = Vec::new();
            for e in outs {
                let b = Proc::prefix(Pattern::bare(dc.clone()), this.emit(e, bound)?);
                branches.push(match &e.guard {
                    Some(g) => Proc::guard(guard_expr(g, "x"), b),
                    None => b,
                });
            }
            Ok(Proc::hide(ext_all(branches), EventSet::channels([dc.clone()])))
        };
        if let Some(din) = dins.first() {
            let t = decision_input_type(self.act, n);
            let dom = self.node_dom(n, t)?;
            let mem = self.memory(n, dom.clone(), Expr::Const(dom[0].clone()));
            let store = Proc::prefix(
                self.intake(din, "v")?,
                ev(Pattern::new(mem.set.clone(), vec![Field::Out(Expr::var("v"))])),
            );
            let main = self.intake_any(ins)?;
            let read = Proc::prefix(
                Pattern::new(mem.get.clone(), vec![input("x", dom)]),
                then(choice(self, None)?, recurse),
            );
            let body = then(
                interleave_all(vec![main, store]),
                then(self.update(-1), read),
            );
            return Ok((body, Some(mem)));
        }
        let mut branches = Vec::new();
        for e in ins {
            let bound = (e.kind == EdgeKind::Object).then_some("x");
            branches.push(Proc::prefix(
                self.intake(e, "x")?,
                then(choice(self, bound)?, recurse.clone()),
            ));
        }
        Ok((ext_all(branches), None))
    }

    fn object(
        &self,
        ins: &[&Edge],
        outs: &[&Edge],
        mem: &Memory,
        recurse: Proc,
    ) -> Result<Proc, TranslateError> {
        let n_out = outs.len() as i64;
        let mut branches = Vec::new();
        for e in ins {
            let store = match e.kind {
                EdgeKind::Object => ev(Pattern::new(mem.set.clone(), vec![Field::Out(Expr::var("x"))])),
                EdgeKind::Control => Proc::skip(),
            };
            let out = if outs.is_empty() {
                recurse.clone()
            } else {
                Proc::prefix(
                    Pattern::new(mem.get.clone(), vec![input("y", mem.dom.clone())]),
                    then(self.emit_all(outs, Some("y"))?, recurse.clone()),
                )
            };
            branches.push(Proc::prefix(
                self.intake(e, "x")?,
                then(store, then(self.update(n_out - 1), out)),
            ));
        }
        Ok(if branches.is_empty() {
            Proc::skip()
        } else {
            ext_all(branches)
        })
    }
}
