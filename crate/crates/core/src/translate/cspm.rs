//! CSP_M rendering of a translated model, for cross-checking with an external refinement checker.

use std::collections::BTreeSet;
use std::fmt::Write;

use super::CspModel;
use crate::csp::Domain;
use crate::Value;

fn render_set(d: &Domain) -> String {
    let items: Vec<String> = d
        .iter()
        .map(|v| match v {
            Value::Int(i) => i.to_string(),
            v => v.to_string(),
        })
        .collect();
    format!("{{{}}}", items.join(", "))
}

/// Deterministic CSP_M text: symbol datatype, channels, helpers, definitions, then assertions.
pub fn export_cspm(m: &CspModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "-- activity `{}`", m.top);
    let syms: BTreeSet<String> = m
        .channels
        .values()
        .flatten()
        .flat_map(|d| d.iter())
        .filter_map(|v| match v {
            Value::Sym(s) => Some(s.to_string()),
            _ => None,
        })
        .collect();
    if !syms.is_empty() {
        let list: Vec<String> = syms.into_iter().collect();
        let _ = writeln!(out, "datatype Sym = {}", list.join(" | "));
    }
    out.push('\n');
    for (c, fields) in &m.channels {
        if fields.is_empty() {
            let _ = writeln!(out, "channel {c}");
        } else {
            let types: Vec<String> = fields.iter().map(render_set).collect();
            let _ = writeln!(out, "channel {c} : {}", types.join("."));
        }
    }
    out.push_str("\nmin(a, b) = if a < b then a else b\nmax(a, b) = if a < b then b else a\n\n");
    for def in m.env.iter() {
        if def.params.is_empty() {
            let _ = writeln!(out, "{} = {}", def.name, def.body);
        } else {
            let ps: Vec<&str> = def.params.iter().map(|p| &*p.name).collect();
            let _ = writeln!(out, "{}({}) = {}", def.name, ps.join(", "), def.body);
        }
    }
    let _ = writeln!(out, "\nMAIN = {}\n", m.main);
    out.push_str("assert MAIN :[deadlock free [F]]\n");
    out.push_str("assert MAIN :[divergence free]\n");
    out.push_str("assert MAIN :[deterministic [F]]\n");
    out
}
