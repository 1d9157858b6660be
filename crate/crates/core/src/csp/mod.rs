//! A small CSP kernel: terms, events, definitions and the operational semantics.

mod env;
mod event;
mod expr;
pub(crate) mod print;
mod semantics;
mod term;

pub use env::{Definition, Environment, Param};
pub use event::{ChannelBase, ChannelName, Event, EventSet, VisibleEvent};
pub use expr::{Expr, ExprOp};
pub use semantics::{initials, step, Stepper, Transitions};
pub use term::{domain, Domain, Field, Pattern, Proc, Term};

use crate::Value;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CspError {
    #[error("reference to undefined process `{0}`")]
    UnresolvedRef(String),
    #[error("process `{name}` expects {expected} argument(s), got {got}")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("argument {value} for parameter `{param}` of `{name}` is outside its domain")]
    ArgumentOutOfRange {
        name: String,
        param: String,
        value: Value,
    },
    #[error("input on channel `{0}` has no finite domain")]
    UnboundedDomain(String),
    #[error("cannot evaluate open expression: {0}")]
    OpenExpression(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("process `{0}` is defined twice")]
    DuplicateDefinition(String),
    #[error("unguarded recursion through `{0}`")]
    UnguardedRecursion(String),
}
