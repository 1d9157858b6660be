//! Guard expressions on decision edges.
//!
//! Guards are written in prefix notation, e.g. `(and (>= x 1) (not (= x 3)))`. The only
//! variable is `x`, the value delivered to the decision node. Bare symbols other than `x`,
//! `true` and `false` are enumeration labels.

use std::fmt;

use thiserror::Error;

use super::DataType;
use crate::{Name, Value};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GuardError {
    #[error("guard syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("literal {literal} outside the declared range {ty}")]
    OutOfRange { literal: String, ty: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Eq => "=",
            BinOp::Ne => "!=",
            BinOp::Ge => ">=",
            BinOp::Gt => ">",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "+" => BinOp::Add,
            "-" => BinOp::Sub,
            "*" | "×" => BinOp::Mul,
            "<" => BinOp::Lt,
            "<=" | "≤" => BinOp::Le,
            "=" | "==" => BinOp::Eq,
            "!=" | "≠" => BinOp::Ne,
            ">=" | "≥" => BinOp::Ge,
            ">" => BinOp::Gt,
            "and" => BinOp::And,
            "or" => BinOp::Or,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GuardExpr {
    Int(i64),
    Bool(bool),
    Label(Name),
    /// The decision input value.
    Var,
    Not(Box<GuardExpr>),
    Bin(BinOp, Box<GuardExpr>, Box<GuardExpr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Int,
    Bool,
    Label,
}

impl GuardExpr {
    pub fn uses_var(&self) -> bool {
        match self {
            GuardExpr::Var => true,
            GuardExpr::Not(e) => e.uses_var(),
            GuardExpr::Bin(_, a, b) => a.uses_var() || b.uses_var(),
            _ => false,
        }
    }

    /// Checks the guard is boolean, that `x` is only used when a typed input exists, and that
    /// integer literals stay within the declared range.
    pub fn typecheck(&self, x_type: Option<&DataType>) -> Result<(), GuardError> {
        match self.ty(x_type)? {
            Ty::Bool => Ok(()),
            other => Err(GuardError::TypeMismatch(format!(
                "guard has type {other:?}, expected Bool"
            ))),
        }
    }

    fn ty(&self, x_type: Option<&DataType>) -> Result<Ty, GuardError> {
        match self {
            GuardExpr::Int(i) => {
                if let Some(t @ DataType::BoundedInt { min, max }) = x_type {
                    if i < min || i > max {
                        return Err(GuardError::OutOfRange {
                            literal: i.to_string(),
                            ty: t.to_string(),
                        });
                    }
                }
                Ok(Ty::Int)
            }
            GuardExpr::Bool(_) => Ok(Ty::Bool),
            GuardExpr::Label(l) => match x_type {
                Some(DataType::Enum { labels }) if labels.contains(l) => Ok(Ty::Label),
                Some(t) => Err(GuardError::OutOfRange {
                    literal: l.to_string(),
                    ty: t.to_string(),
                }),
                None => Err(GuardError::TypeMismatch(format!(
                    "label `{l}` used without an enumeration input"
                ))),
            },
            GuardExpr::Var => match x_type {
                Some(DataType::BoundedInt { .. }) => Ok(Ty::Int),
                Some(DataType::Bool) => Ok(Ty::Bool),
                Some(DataType::Enum { .. }) => Ok(Ty::Label),
                None => Err(GuardError::TypeMismatch(
                    "variable `x` used but the decision has no input value".into(),
                )),
            },
            GuardExpr::Not(e) => match e.ty(x_type)? {
                Ty::Bool => Ok(Ty::Bool),
                t => Err(GuardError::TypeMismatch(format!("`not` applied to {t:?}"))),
            },
            GuardExpr::Bin(op, a, b) => {
                let (ta, tb) = (a.ty(x_type)?, b.ty(x_type)?);
                let want = |t: Ty, res: Ty| {
                    if ta == t && tb == t {
                        Ok(res)
                    } else {
                        Err(GuardError::TypeMismatch(format!(
                            "`{}` applied to {ta:?} and {tb:?}",
                            op.symbol()
                        )))
                    }
                };
                match op {
                    BinOp::Add | BinOp::Sub | BinOp::Mul => want(Ty::Int, Ty::Int),
                    BinOp::Lt | BinOp::Le | BinOp::Ge | BinOp::Gt => {
                        want(Ty::Int, Ty::Bool)
                    }
                    BinOp::And | BinOp::Or => want(Ty::Bool, Ty::Bool),
                    BinOp::Eq | BinOp::Ne => {
                        if ta == tb {
                            Ok(Ty::Bool)
                        } else {
                            Err(GuardError::TypeMismatch(format!(
                                "`{}` compares {ta:?} with {tb:?}",
                                op.symbol()
                            )))
                        }
                    }
                }
            }
        }
    }

    fn eval(&self, x: Option<&Value>) -> Result<Value, GuardError> {
        let mismatch = || GuardError::TypeMismatch(format!("cannot evaluate `{self}`"));
        Ok(match self {
            GuardExpr::Int(i) => Value::Int(*i),
            GuardExpr::Bool(b) => Value::Bool(*b),
            GuardExpr::Label(l) => Value::Sym(l.clone()),
            GuardExpr::Var => x
                .cloned()
                .ok_or_else(|| GuardError::TypeMismatch("variable `x` has no value".into()))?,
            GuardExpr::Not(e) => Value::Bool(!e.eval(x)?.as_bool().ok_or_else(mismatch)?),
            GuardExpr::Bin(op, a, b) => {
                let (va, vb) = (a.eval(x)?, b.eval(x)?);
                match op {
                    BinOp::Eq => return Ok(Value::Bool(va == vb)),
                    BinOp::Ne => return Ok(Value::Bool(va != vb)),
                    BinOp::And | BinOp::Or => {
                        let (p, q) = (
                            va.as_bool().ok_or_else(mismatch)?,
                            vb.as_bool().ok_or_else(mismatch)?,
                        );
                        return Ok(Value::Bool(if *op == BinOp::And { p && q } else { p || q }));
                    }
                    _ => {}
                }
                let (i, j) = (
                    va.as_int().ok_or_else(mismatch)?,
                    vb.as_int().ok_or_else(mismatch)?,
                );
                match op {
                    BinOp::Add => Value::Int(i + j),
                    BinOp::Sub => Value::Int(i - j),
                    BinOp::Mul => Value::Int(i * j),
                    BinOp::Lt => Value::Bool(i < j),
                    BinOp::Le => Value::Bool(i <= j),
                    BinOp::Ge => Value::Bool(i >= j),
                    BinOp::Gt => Value::Bool(i > j),
                    BinOp::Eq | BinOp::Ne | BinOp::And | BinOp::Or => unreachable!(),
                }
            }
        })
    }
}

/// Evaluates a guard for a decision input `x` of type `x_type`.
pub fn eval_guard(
    g: &GuardExpr,
    x: Option<&Value>,
    x_type: Option<&DataType>,
) -> Result<bool, GuardError> {
    g.typecheck(x_type)?;
    if let (Some(v), Some(t)) = (x, x_type) {
        if !t.contains(v) {
            return Err(GuardError::OutOfRange {
                literal: v.to_string(),
                ty: t.to_string(),
            });
        }
    }
    g.eval(x)?
        .as_bool()
        .ok_or_else(|| GuardError::TypeMismatch("guard is not boolean".into()))
}

impl fmt::Display for GuardExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GuardExpr::Int(i) => write!(f, "{i}"),
            GuardExpr::Bool(b) => write!(f, "{b}"),
            GuardExpr::Label(l) => f.write_str(l),
            GuardExpr::Var => f.write_str("x"),
            GuardExpr::Not(e) => write!(f, "(not {e})"),
            GuardExpr::Bin(op, a, b) => write!(f, "({} {a} {b})", op.symbol()),
        }
    }
}

/// Parses a prefix-notation guard.
pub fn parse_guard(src: &str) -> Result<GuardExpr, GuardError> {
    let tokens = tokenize(src);
    let mut pos = 0;
    let expr = parse_expr(&tokens, &mut pos, src.len())?;
    if let Some((off, tok)) = tokens.get(pos) {
        return Err(GuardError::Syntax {
            offset: *off,
            message: format!("unexpected trailing `{tok}`"),
        });
    }
    Ok(expr)
}

fn tokenize(src: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in src.char_indices() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &src[s..i]));
            }
            if !c.is_whitespace() {
                out.push((i, &src[i..i + 1]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &src[s..]));
    }
    out
}

fn parse_expr(tokens: &[(usize, &str)], pos: &mut usize, end: usize) -> Result<GuardExpr, GuardError> {
    let Some(&(off, tok)) = tokens.get(*pos) else {
        return Err(GuardError::Syntax {
            offset: end,
            message: "unexpected end of guard".into(),
        });
    };
    *pos += 1;
    match tok {
        "(" => {
            let Some(&(op_off, op)) = tokens.get(*pos) else {
                return Err(GuardError::Syntax {
                    offset: end,
                    message: "missing operator".into(),
                });
            };
            *pos += 1;
            let mut args = Vec::new();
            loop {
                match tokens.get(*pos) {
                    Some((_, ")")) => {
                        *pos += 1;
                        break;
                    }
                    Some(_) => args.push(parse_expr(tokens, pos, end)?),
                    None => {
                        return Err(GuardError::Syntax {
                            offset: end,
                            message: "unclosed `(`".into(),
                        })
                    }
                }
            }
            if op == "not" {
                let [arg]: [GuardExpr; 1] = args.try_into().map_err(|_| GuardError::Syntax {
                    offset: op_off,
                    message: "`not` takes exactly one argument".into(),
                })?;
                return Ok(GuardExpr::Not(Box::new(arg)));
            }
            let bin = BinOp::parse(op).ok_or_else(|| GuardError::Syntax {
                offset: op_off,
                message: format!("unknown operator `{op}`"),
            })?;
            let variadic = matches!(bin, BinOp::And | BinOp::Or | BinOp::Add | BinOp::Mul);
            if args.len() < 2 || (!variadic && args.len() != 2) {
                return Err(GuardError::Syntax {
                    offset: op_off,
                    message: format!("`{op}` given {} arguments", args.len()),
                });
            }
            let mut it = args.into_iter();
            let first = it.next().expect("checked length");
            Ok(it.fold(first, |acc, a| GuardExpr::Bin(bin, Box::new(acc), Box::new(a))))
        }
        ")" => Err(GuardError::Syntax {
            offset: off,
            message: "unexpected `)`".into(),
        }),
        "x" => Ok(GuardExpr::Var),
        "true" => Ok(GuardExpr::Bool(true)),
        "false" => Ok(GuardExpr::Bool(false)),
        _ => {
            if let Ok(i) = tok.parse::<i64>() {
                Ok(GuardExpr::Int(i))
            } else if super::is_identifier(tok) {
                Ok(GuardExpr::Label(tok.into()))
            } else {
                Err(GuardError::Syntax {
                    offset: off,
                    message: format!("unexpected token `{tok}`"),
                })
            }
        }
    }
}
