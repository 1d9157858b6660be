//! Activity diagram verification through a compositional process-algebra semantics.
//!
//! The pipeline is: [`diagram::parse_diagram`] and [`diagram::validate`], then
//! [`translate::translate`] into a [`translate::CspModel`], then exploration and
//! checking in [`check`], and finally counterexample rendering in [`report`].

pub mod check;
pub mod csp;
pub mod diagram;
pub mod report;
pub mod translate;
mod value;

pub use check::{
    build_lts, check_deadlock, check_determinism, find_divergence, shortest_trace, CheckError,
    CheckOptions, Lts, NormalizedLts, Property, Verdict, VerdictResult,
};
pub use csp::{ChannelBase, ChannelName, Environment, Event, Proc};
pub use diagram::{parse_diagram, validate, ActivityDiagram, DataType, DiagramError, Violation};
pub use report::{emit_dot, emit_report, map_trace, Report, TraceMapping};
pub use translate::{export_cspm, translate, CspModel, TranslateError, TranslationConfig};
pub use value::Value;

use std::sync::Arc;

/// Interned identifier shared across diagrams, channels and process names.
pub type Name = Arc<str>;
