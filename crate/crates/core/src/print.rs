//! Canonical rendering. Nested classes come first sorted by name, then
//! methods sorted by name and arity; implemented types are sorted. The
//! output re-parses to a structurally equal table.
//!
//! The `surface_*` variants print `This`-rooted paths by the shortest
//! name that qualifies back to the same path, as a programmer would
//! write them.

use std::fmt::Write;

use crate::ast::*;
use crate::parser::operator_symbol;

pub fn print_table(table: &DeclarationTable) -> String {
    let mut out = String::new();
    for d in &table.decls {
        out.push_str(&d.name);
        out.push_str(" = ");
        print_code_expr_into(&d.body, 0, &mut out);
        out.push('\n');
    }
    out
}

pub fn print_literal(lit: &CodeLiteral) -> String {
    let mut out = String::new();
    literal_into(lit, 0, &mut out);
    out
}

pub fn print_code_expr(e: &CodeExpr) -> String {
    let mut out = String::new();
    print_code_expr_into(e, 0, &mut out);
    out
}

fn print_code_expr_into(e: &CodeExpr, indent: usize, out: &mut String) {
    match e {
        CodeExpr::Lit(l) => literal_into(l, indent, out),
        CodeExpr::TraitRef { name, .. } => out.push_str(name),
        CodeExpr::Sum { left, right, .. } => {
            print_code_expr_into(left, indent, out);
            out.push_str(" + ");
            if matches!(**right, CodeExpr::Sum { .. }) {
                out.push('(');
                print_code_expr_into(right, indent, out);
                out.push(')');
            } else {
                print_code_expr_into(right, indent, out);
            }
        }
        CodeExpr::Rename { inner, from, to, .. } => {
            suffix_operand(inner, indent, out);
            let _ = write!(out, "[rename {from} into {to}]");
        }
        CodeExpr::SuperAs {
            inner,
            target,
            arity,
            alias,
            ..
        } => {
            suffix_operand(inner, indent, out);
            let _ = match arity {
                Some(a) => write!(out, "[super {target}/{a} as {alias}]"),
                None => write!(out, "[super {target} as {alias}]"),
            };
        }
    }
}

fn suffix_operand(e: &CodeExpr, indent: usize, out: &mut String) {
    if matches!(e, CodeExpr::Sum { .. }) {
        out.push('(');
        print_code_expr_into(e, indent, out);
        out.push(')');
    } else {
        print_code_expr_into(e, indent, out);
    }
}

/// Members in canonical order.
pub fn sorted_members(lit: &CodeLiteral) -> Vec<&Member> {
    let mut members: Vec<&Member> = lit.members.iter().collect();
    members.sort_by_key(|m| m.key());
    members
}

fn literal_into(lit: &CodeLiteral, indent: usize, out: &mut String) {
    out.push('{');
    if lit.is_interface {
        out.push_str("interface");
    }
    if !lit.implements.is_empty() {
        if lit.is_interface {
            out.push(' ');
        }
        let mut imps: Vec<String> = lit.implements.iter().map(|t| t.to_string()).collect();
        imps.sort();
        imps.dedup();
        let _ = write!(out, "implements {}", imps.join(", "));
    }
    if lit.members.is_empty() {
        out.push('}');
        return;
    }
    out.push('\n');
    for m in sorted_members(lit) {
        pad(indent + 1, out);
        match m {
            Member::Nested(n) => {
                out.push_str(&n.name);
                out.push_str(" = ");
                literal_into(&n.literal, indent + 1, out);
            }
            Member::Method(m) => {
                let _ = write!(out, "{}", m.sig);
                if let Some(body) = &m.body {
                    out.push_str(" {return ");
                    expr_into(body, out);
                    out.push_str(";}");
                }
            }
        }
        out.push('\n');
    }
    pad(indent, out);
    out.push('}');
}

fn pad(indent: usize, out: &mut String) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    expr_into(e, &mut out);
    out
}

fn is_operator_call(e: &Expr) -> bool {
    match e {
        Expr::Call { name, args, .. } => {
            (args.len() == 1 && operator_symbol(name).is_some()) || (args.is_empty() && name == "not")
        }
        Expr::Const {
            value: Intrinsic::Int(n),
            ..
        } => *n < 0,
        _ => false,
    }
}

fn operand_into(e: &Expr, out: &mut String) {
    if is_operator_call(e) {
        out.push('(');
        expr_into(e, out);
        out.push(')');
    } else {
        expr_into(e, out);
    }
}

fn args_into(args: &[Expr], out: &mut String) {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        expr_into(a, out);
    }
    out.push(')');
}

fn expr_into(e: &Expr, out: &mut String) {
    match e {
        Expr::Var { name, .. } => out.push_str(name),
        Expr::Const { value, .. } => {
            let _ = write!(out, "{value}");
        }
        Expr::StaticCall { ty, name, args, .. } => {
            let _ = write!(out, "{ty}.{name}");
            args_into(args, out);
        }
        Expr::Call {
            receiver, name, args, ..
        } => {
            if let (Some(sym), [arg]) = (operator_symbol(name), args.as_slice()) {
                operand_into(receiver, out);
                let _ = write!(out, " {sym} ");
                operand_into(arg, out);
            } else if name == "not" && args.is_empty() {
                out.push('!');
                operand_into(receiver, out);
            } else {
                operand_into(receiver, out);
                let _ = write!(out, ".{name}");
                args_into(args, out);
            }
        }
    }
}

/// Nested-class names visible at one literal, with its path from the root.
struct SurfaceScope {
    path: Vec<String>,
    names: Vec<String>,
}

fn requalifies(candidate: &[String], scopes: &[SurfaceScope]) -> Option<Vec<String>> {
    let head = candidate.first()?;
    let scope = scopes.iter().rev().find(|s| s.names.contains(head))?;
    let mut out = scope.path.clone();
    out.extend(candidate.iter().cloned());
    Some(out)
}

fn surface_path(t: &TypePath, scopes: &[SurfaceScope]) -> TypePath {
    if !t.is_this_rooted() || t.segments.len() == 1 {
        return t.clone();
    }
    let inner = &t.segments[1..];
    for start in (0..inner.len()).rev() {
        let candidate = &inner[start..];
        if requalifies(candidate, scopes).as_deref() == Some(inner) {
            return TypePath::new(candidate.iter().cloned());
        }
    }
    t.clone()
}

fn surface_into(lit: &CodeLiteral, scopes: &mut Vec<SurfaceScope>) -> CodeLiteral {
    let mut f = |t: &TypePath| surface_path(t, scopes);
    let implements = lit.implements.iter().map(&mut f).collect();
    let mut members = Vec::with_capacity(lit.members.len());
    for m in &lit.members {
        members.push(match m {
            Member::Method(m) => {
                let mut f = |t: &TypePath| surface_path(t, scopes);
                Member::Method(Method {
                    sig: m.sig.map_types(&mut f),
                    body: m.body.as_ref().map(|e| e.map_types(&mut f)),
                    span: m.span,
                })
            }
            Member::Nested(n) => {
                let mut path = scopes.last().map(|s| s.path.clone()).unwrap_or_default();
                path.push(n.name.clone());
                scopes.push(SurfaceScope {
                    path,
                    names: n.literal.nested().map(|c| c.name.clone()).collect(),
                });
                let literal = surface_into(&n.literal, scopes);
                scopes.pop();
                Member::Nested(NestedClass {
                    name: n.name.clone(),
                    literal,
                    span: n.span,
                })
            }
        });
    }
    CodeLiteral {
        is_interface: lit.is_interface,
        implements,
        members,
        span: lit.span,
    }
}

/// A qualified literal with its paths shortened.
pub fn surface_literal(lit: &CodeLiteral) -> CodeLiteral {
    let root = SurfaceScope {
        path: Vec::new(),
        names: lit.nested().map(|c| c.name.clone()).collect(),
    };
    surface_into(lit, &mut vec![root])
}

pub fn print_surface_literal(lit: &CodeLiteral) -> String {
    print_literal(&surface_literal(lit))
}

/// [`print_table`] with shortened paths.
pub fn print_surface_table(table: &DeclarationTable) -> String {
    let mut t = table.clone();
    for d in &mut t.decls {
        d.body.literals_mut(&mut |l| *l = surface_literal(l));
    }
    print_table(&t)
}

/// Print an expression with paths under `open.` shortened.
pub fn print_expr_relative(e: &Expr, open: Option<&str>) -> String {
    match open {
        None => print_expr(e),
        Some(o) => {
            let prefix = TypePath::new([o]);
            let short = e.map_types(&mut |t| {
                if t.segments.len() > 1 && t.starts_with(&prefix) {
                    TypePath::new(t.segments[1..].iter().cloned())
                } else {
                    t.clone()
                }
            });
            print_expr(&short)
        }
    }
}
