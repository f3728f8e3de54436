//! Resolution of type paths to literals.
//!
//! Top-level classes are stored with `This` already replaced by their own
//! name, so any path into them is absolute. A trait is checked with `This`
//! bound to its own (unsubstituted) literal.

use std::collections::HashMap;
use std::sync::Arc;

use crate::ast::*;
use crate::prelude;

#[derive(Clone, Debug, Default)]
pub struct ClassTable {
    classes: HashMap<String, Arc<CodeLiteral>>,
    pub prelude: bool,
}

impl ClassTable {
    pub fn new(prelude: bool) -> ClassTable {
        ClassTable {
            classes: HashMap::new(),
            prelude,
        }
    }

    /// Every literal-bodied class of the table.
    pub fn from_table(table: &DeclarationTable, prelude: bool) -> ClassTable {
        let mut ct = ClassTable::new(prelude);
        for d in &table.decls {
            if let (true, Some(l)) = (d.is_class(), d.body.as_literal()) {
                ct.insert(&d.name, l);
            }
        }
        ct
    }

    pub fn insert(&mut self, name: &str, literal: &CodeLiteral) {
        let substituted = literal.subst_this(&TypePath::new([name]));
        self.classes.insert(name.to_string(), Arc::new(substituted));
    }

    pub fn remove(&mut self, name: &str) {
        self.classes.remove(name);
    }

    pub fn contains(&self, name: &str) -> bool {
        self.classes.contains_key(name)
    }

    pub fn get(&self, name: &str) -> Option<&CodeLiteral> {
        self.classes.get(name).map(|l| &**l)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.classes.keys().map(String::as_str)
    }

    pub fn scope(&self) -> Scope<'_> {
        Scope {
            classes: self,
            this: None,
        }
    }

    pub fn scope_with_this<'a>(&'a self, this: &'a CodeLiteral) -> Scope<'a> {
        Scope {
            classes: self,
            this: Some(this),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lookup<'a> {
    Literal(&'a CodeLiteral),
    Prelude,
    Missing,
}

impl<'a> Lookup<'a> {
    pub fn literal(self) -> Option<&'a CodeLiteral> {
        match self {
            Lookup::Literal(l) => Some(l),
            _ => None,
        }
    }
}

/// A class table, optionally with a binding for `This`.
#[derive(Clone, Copy, Debug)]
pub struct Scope<'a> {
    pub classes: &'a ClassTable,
    pub this: Option<&'a CodeLiteral>,
}

impl<'a> Scope<'a> {
    pub fn lookup(&self, path: &TypePath) -> Lookup<'a> {
        let head = path.head();
        let root = if head == THIS_TYPE {
            self.this
        } else if self.classes.prelude && prelude::is_prelude_type(head) {
            return if path.segments.len() == 1 {
                Lookup::Prelude
            } else {
                Lookup::Missing
            };
        } else {
            self.classes.get(head)
        };
        match root.and_then(|r| r.navigate(&path.segments[1..])) {
            Some(l) => Lookup::Literal(l),
            None => Lookup::Missing,
        }
    }

    pub fn resolves(&self, path: &TypePath) -> bool {
        !matches!(self.lookup(path), Lookup::Missing)
    }

    pub fn literal(&self, path: &TypePath) -> Option<&'a CodeLiteral> {
        self.lookup(path).literal()
    }
}
