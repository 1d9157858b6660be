use std::fmt;

use super::CspError;
use crate::{Name, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExprOp {
    Add,
    Sub,
    Mul,
    Min,
    Max,
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
    And,
    Or,
}

/// Data expressions appearing in outputs, guards and process arguments.
/// Closed subexpressions are folded to constants during substitution.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Value),
    Var(Name),
    Not(Box<Expr>),
    Bin(ExprOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn int(i: i64) -> Self {
        Expr::Const(Value::Int(i))
    }

    pub fn bool(b: bool) -> Self {
        Expr::Const(Value::Bool(b))
    }

    pub fn var(name: &str) -> Self {
        Expr::Var(name.into())
    }

    pub fn bin(op: ExprOp, a: Expr, b: Expr) -> Self {
        Expr::Bin(op, Box::new(a), Box::new(b)).folded()
    }

    pub fn negate(e: Expr) -> Self {
        Expr::Not(Box::new(e)).folded()
    }

    pub fn as_const(&self) -> Option<&Value> {
        match self {
            Expr::Const(v) => Some(v),
            _ => None,
        }
    }

    pub fn has_vars(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(_) => true,
            Expr::Not(e) => e.has_vars(),
            Expr::Bin(_, a, b) => a.has_vars() || b.has_vars(),
        }
    }

    /// Evaluates a closed expression.
    pub fn eval(&self) -> Result<Value, CspError> {
        match self {
            Expr::Const(v) => Ok(v.clone()),
            Expr::Var(v) => Err(CspError::OpenExpression(format!("free variable `{v}`"))),
            Expr::Not(e) => match e.eval()? {
                Value::Bool(b) => Ok(Value::Bool(!b)),
                v => Err(CspError::Type(format!("`not` applied to {v}"))),
            },
            Expr::Bin(op, a, b) => apply(*op, a.eval()?, b.eval()?),
        }
    }

    pub fn subst(&self, bindings: &[(Name, Value)]) -> Expr {
        if bindings.is_empty() || !self.has_vars() {
            return self.clone();
        }
        match self {
            Expr::Const(_) => self.clone(),
            Expr::Var(v) => bindings
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, val)| Expr::Const(val.clone()))
                .unwrap_or_else(|| self.clone()),
            Expr::Not(e) => Expr::negate(e.subst(bindings)),
            Expr::Bin(op, a, b) => Expr::bin(*op, a.subst(bindings), b.subst(bindings)),
        }
    }

    fn folded(self) -> Self {
        if self.has_vars() {
            return self;
        }
        match self.eval() {
            Ok(v) => Expr::Const(v),
            Err(_) => self,
        }
    }
}

fn apply(op: ExprOp, a: Value, b: Value) -> Result<Value, CspError> {
    let type_err = || CspError::Type(format!("operator {op:?} applied to {a} and {b}"));
    match op {
        ExprOp::Eq => return Ok(Value::Bool(a == b)),
        ExprOp::Ne => return Ok(Value::Bool(a != b)),
        ExprOp::And | ExprOp::Or => {
            let (Value::Bool(p), Value::Bool(q)) = (&a, &b) else {
                return Err(type_err());
            };
            return Ok(Value::Bool(if op == ExprOp::And { *p && *q } else { *p || *q }));
        }
        _ => {}
    }
    let (Value::Int(i), Value::Int(j)) = (&a, &b) else {
        return Err(type_err());
    };
    let (i, j) = (*i, *j);
    Ok(match op {
        ExprOp::Add => Value::Int(i + j),
        ExprOp::Sub => Value::Int(i - j),
        ExprOp::Mul => Value::Int(i * j),
        ExprOp::Min => Value::Int(i.min(j)),
        ExprOp::Max => Value::Int(i.max(j)),
        ExprOp::Lt => Value::Bool(i < j),
        ExprOp::Le => Value::Bool(i <= j),
        ExprOp::Ge => Value::Bool(i >= j),
        ExprOp::Gt => Value::Bool(i > j),
        ExprOp::Eq | ExprOp::Ne | ExprOp::And | ExprOp::Or => unreachable!(),
    })
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) => super::print::write_value_bare(f, v),
            Expr::Var(v) => f.write_str(v),
            Expr::Not(e) => write!(f, "not ({e})"),
            Expr::Bin(op, a, b) => {
                let sym = match op {
                    ExprOp::Min => return write!(f, "min({a}, {b})"),
                    ExprOp::Max => return write!(f, "max({a}, {b})"),
                    ExprOp::Add => "+",
                    ExprOp::Sub => "-",
                    ExprOp::Mul => "*",
                    ExprOp::Lt => "<",
                    ExprOp::Le => "<=",
                    ExprOp::Eq => "==",
                    ExprOp::Ne => "!=",
                    ExprOp::Ge => ">=",
                    ExprOp::Gt => ">",
                    ExprOp::And => "and",
                    ExprOp::Or => "or",
                };
                write!(f, "({a} {sym} {b})")
            }
        }
    }
}
