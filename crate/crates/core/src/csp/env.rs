use std::collections::BTreeMap;

use super::{CspError, Domain, Proc};
use crate::{Name, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: Name,
    /// Allowed argument values; `None` accepts any value.
    pub domain: Option<Domain>,
}

impl Param {
    pub fn new(name: &str, domain: Option<Domain>) -> Self {
        Param {
            name: name.into(),
            domain,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub name: Name,
    pub params: Vec<Param>,
    pub body: Proc,
}

/// Named, possibly parameterised process definitions. Recursion goes through names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Environment {
    defs: BTreeMap<Name, Definition>,
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a definition; fails if the name is already defined.
    pub fn define(&mut self, name: &str, params: Vec<Param>, body: Proc) -> Result<(), CspError> {
        if self.defs.contains_key(name) {
            return Err(CspError::DuplicateDefinition(name.to_string()));
        }
        self.defs.insert(
            name.into(),
            Definition {
                name: name.into(),
                params,
                body,
            },
        );
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Definition> {
        self.defs.get(name)
    }

    pub fn remove(&mut self, name: &str) -> Option<Definition> {
        self.defs.remove(name)
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    /// Definitions in name order.
    pub fn iter(&self) -> impl Iterator<Item = &Definition> {
        self.defs.values()
    }

    /// Instantiates a definition with concrete arguments.
    pub fn expand_ref(&self, name: &str, args: &[Value]) -> Result<Proc, CspError> {
        let def = self
            .defs
            .get(name)
            .ok_or_else(|| CspError::UnresolvedRef(name.to_string()))?;
        if def.params.len() != args.len() {
            return Err(CspError::ArityMismatch {
                name: name.to_string(),
                expected: def.params.len(),
                got: args.len(),
            });
        }
        let mut bindings = Vec::with_capacity(args.len());
        for (p, a) in def.params.iter().zip(args) {
            if let Some(d) = &p.domain {
                if d.binary_search(a).is_err() {
                    return Err(CspError::ArgumentOutOfRange {
                        name: name.to_string(),
                        param: p.name.to_string(),
                        value: a.clone(),
                    });
                }
            }
            bindings.push((p.name.clone(), a.clone()));
        }
        Ok(def.body.subst(&bindings))
    }
}
