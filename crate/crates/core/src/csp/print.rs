//! CSP-style ASCII rendering of terms, also used for the CSP_M export.

use std::fmt;

use super::{Expr, Field, Proc, Term};
use crate::Value;

/// Writes a value as a dotted field, parenthesising negative integers.
pub(crate) fn write_value(f: &mut fmt::Formatter<'_>, v: &Value) -> fmt::Result {
    f.write_str(".")?;
    write_value_bare(f, v)
}

pub(crate) fn write_value_bare(f: &mut fmt::Formatter<'_>, v: &Value) -> fmt::Result {
    match v {
        Value::Int(i) if *i < 0 => write!(f, "({i})"),
        v => write!(f, "{v}"),
    }
}

impl fmt::Display for Proc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term() {
            Term::Stop => f.write_str("STOP"),
            Term::Skip => f.write_str("SKIP"),
            Term::Omega => f.write_str("OMEGA"),
            Term::Prefix(pat, k) => {
                write!(f, "{}", pat.channel)?;
                for field in &pat.fields {
                    match field {
                        Field::Out(e) => match e {
                            Expr::Const(v) => write_value(f, v)?,
                            Expr::Var(v) => write!(f, ".{v}")?,
                            _ => write!(f, ".({e})")?,
                        },
                        Field::In { var, domain } => {
                            write!(f, "?{var}")?;
                            if let Some(d) = domain {
                                f.write_str(":{")?;
                                for (i, v) in d.iter().enumerate() {
                                    if i > 0 {
                                        f.write_str(",")?;
                                    }
                                    write_value_bare(f, v)?;
                                }
                                f.write_str("}")?;
                            }
                        }
                    }
                }
                write!(f, " -> {k}")
            }
            Term::ExtChoice(a, b) => write!(f, "({a} [] {b})"),
            Term::IntChoice(a, b) => write!(f, "({a} |~| {b})"),
            Term::Seq(a, b) => write!(f, "({a} ; {b})"),
            Term::Par(a, s, b) => write!(f, "({a} [| {s} |] {b})"),
            Term::Interleave(a, b) => write!(f, "({a} ||| {b})"),
            Term::Hide(a, s) => write!(f, "({a} \\ {s})"),
            Term::Interrupt(a, b) => write!(f, "({a} /\\ {b})"),
            Term::Guard(c, p) => write!(f, "({c} & {p})"),
            Term::Ref(n, args) => {
                f.write_str(n)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}
