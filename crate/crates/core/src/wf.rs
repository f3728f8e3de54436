//! Well-formedness of literals and programs, and the `consistentSubtype`
//! judgment relating a literal to the interfaces it implements.

use std::collections::{HashMap, HashSet};

use crate::ast::*;
use crate::diag::{Code, Diagnostic, Diagnostics};
use crate::env::{ClassTable, Lookup, Scope};
use crate::prelude;

/// One `NotWellFormed` diagnostic per violation, nested literals included.
pub fn wf_literal(lit: &CodeLiteral) -> Diagnostics {
    let mut out = Vec::new();
    wf_into(lit, &mut out);
    out
}

fn wf_into(lit: &CodeLiteral, out: &mut Diagnostics) {
    let bad = |span, msg: String| Diagnostic::new(Code::NotWellFormed, span, msg);
    let mut seen = HashSet::new();
    for m in &lit.members {
        if !seen.insert(m.key()) {
            out.push(bad(
                m.span(),
                match m {
                    Member::Method(m) => {
                        format!("duplicate method `{}` with {} parameter(s)", m.sig.name, m.sig.arity())
                    }
                    Member::Nested(n) => format!("duplicate nested class `{}`", n.name),
                },
            ));
        }
        match m {
            Member::Nested(n) => {
                if n.name == THIS_TYPE {
                    out.push(bad(n.span, "a nested class cannot be called `This`".into()));
                }
                wf_into(&n.literal, out);
            }
            Member::Method(m) => {
                let mut params = HashSet::new();
                for p in &m.sig.params {
                    if p.name == THIS_VAR {
                        out.push(bad(
                            m.span,
                            format!("method `{}` has a parameter named `this`", m.sig.name),
                        ));
                    } else if !params.insert(p.name.as_str()) {
                        out.push(bad(
                            m.span,
                            format!("method `{}` declares parameter `{}` twice", m.sig.name, p.name),
                        ));
                    }
                }
                if let Some(body) = &m.body {
                    let mut reported = HashSet::new();
                    for (v, span) in body.free_vars() {
                        let in_scope = params.contains(v) || (v == THIS_VAR && !m.sig.is_static);
                        if !in_scope && reported.insert(v) {
                            out.push(bad(span, format!("variable `{v}` is not in scope in `{}`", m.sig.name)));
                        }
                    }
                }
                if lit.is_interface {
                    if m.sig.is_static {
                        out.push(bad(
                            m.span,
                            format!("interface declares static method `{}`", m.sig.name),
                        ));
                    }
                    if m.body.is_some() {
                        out.push(bad(m.span, format!("interface method `{}` has a body", m.sig.name)));
                    }
                }
            }
        }
    }
}

/// Every implemented type is an interface whose methods all appear in the
/// literal with the same header, recursively for nested classes. `scope`
/// must bind `This` to the root literal when checking a source literal.
pub fn consistent_subtype(scope: &Scope<'_>, lit: &CodeLiteral) -> Diagnostics {
    let mut out = Vec::new();
    consistent_into(scope, lit, &TypePath::this(), &mut out);
    out
}

fn consistent_into(scope: &Scope<'_>, lit: &CodeLiteral, own: &TypePath, out: &mut Diagnostics) {
    let clash = |msg: String| Diagnostic::new(Code::ImplementsClash, lit.span, msg);
    for t in &lit.implements {
        match scope.lookup(t) {
            Lookup::Literal(i) if i.is_interface => {
                for m in i.methods() {
                    match lit.method(&m.sig.name, m.sig.arity()) {
                        None => out.push(clash(format!(
                            "`{own}` implements `{t}` but has no method `{}`",
                            m.sig
                        ))),
                        Some(mine) if !mine.sig.same_header(&m.sig) => out.push(clash(format!(
                            "`{own}` declares `{}` but `{t}` requires `{}`",
                            mine.sig, m.sig
                        ))),
                        Some(_) => {}
                    }
                }
                if reaches(scope, t, own, &mut HashSet::new()) {
                    out.push(clash(format!("circular implements between `{own}` and `{t}`")));
                }
            }
            Lookup::Literal(_) | Lookup::Prelude => {
                out.push(clash(format!("`{own}` implements `{t}`, which is not an interface")))
            }
            Lookup::Missing => out.push(clash(format!(
                "`{own}` implements `{t}`, which cannot be resolved; interfaces in other top-level names must be declared by a literal"
            ))),
        }
    }
    for n in lit.nested() {
        consistent_into(scope, &n.literal, &own.child(&n.name), out);
    }
}

fn reaches(scope: &Scope<'_>, from: &TypePath, target: &TypePath, seen: &mut HashSet<TypePath>) -> bool {
    if from == target {
        return true;
    }
    if !seen.insert(from.clone()) {
        return false;
    }
    match scope.literal(from) {
        Some(l) => l.implements.iter().any(|t| reaches(scope, t, target, seen)),
        None => false,
    }
}

/// Program-level checks: unique top-level names, reserved names, and the
/// per-literal judgments above for every literal in every declaration.
pub fn wf_program(table: &DeclarationTable, with_prelude: bool) -> Diagnostics {
    let mut out = Vec::new();
    let mut names: HashMap<&str, usize> = HashMap::new();
    for (i, d) in table.decls.iter().enumerate() {
        if d.name == THIS_TYPE {
            out.push(Diagnostic::new(Code::NotWellFormed, d.span, "`This` cannot be declared").in_decl(i));
        } else if with_prelude && prelude::is_prelude_type(&d.name) {
            out.push(
                Diagnostic::new(
                    Code::NotWellFormed,
                    d.span,
                    format!("`{}` is a prelude class and cannot be redeclared", d.name),
                )
                .in_decl(i),
            );
        }
        if let Some(prev) = names.insert(&d.name, i) {
            out.push(
                Diagnostic::new(
                    Code::NotWellFormed,
                    d.span,
                    format!("`{}` is already declared (declaration {})", d.name, prev + 1),
                )
                .in_decl(i),
            );
        }
    }
    if !out.is_empty() {
        return out;
    }
    let view = ClassTable::from_table(table, with_prelude);
    for (i, d) in table.decls.iter().enumerate() {
        for lit in d.body.literals() {
            out.extend(wf_literal(lit).into_iter().map(|e| e.in_decl(i)));
            out.extend(
                consistent_subtype(&view.scope_with_this(lit), lit)
                    .into_iter()
                    .map(|e| e.in_decl(i)),
            );
        }
    }
    out
}
