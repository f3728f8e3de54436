//! The three literal-level composition operators.

use std::collections::BTreeSet;

use crate::ast::*;
use crate::diag::{Code, Diagnostic};

fn describe(path: &[String]) -> String {
    if path.is_empty() {
        "the composed literal".to_string()
    } else {
        format!("nested class `{}`", path.join("."))
    }
}

/// `L1 + L2`. Clashes are reported in canonical member order so that the
/// diagnostic does not depend on operand order.
pub fn sum_literals(l1: &CodeLiteral, l2: &CodeLiteral) -> Result<CodeLiteral, Diagnostic> {
    sum_at(l1, l2, &mut Vec::new())
}

fn sum_at(l1: &CodeLiteral, l2: &CodeLiteral, path: &mut Vec<String>) -> Result<CodeLiteral, Diagnostic> {
    if l1.is_interface != l2.is_interface {
        return Err(Diagnostic::new(
            Code::ClassClash,
            l2.span,
            format!("{} is an interface on one side only", describe(path)),
        ));
    }
    let mut keys: BTreeSet<MemberKey> = l1.members.iter().map(Member::key).collect();
    keys.extend(l2.members.iter().map(Member::key));
    let mut merged = Vec::with_capacity(keys.len());
    for key in &keys {
        let m = match (l1.member(key), l2.member(key)) {
            (Some(a), None) => a.clone(),
            (None, Some(b)) => b.clone(),
            (Some(Member::Method(a)), Some(Member::Method(b))) => Member::Method(sum_methods(a, b, path)?),
            (Some(Member::Nested(a)), Some(Member::Nested(b))) => {
                path.push(a.name.clone());
                let literal = sum_at(&a.literal, &b.literal, path)?;
                path.pop();
                Member::Nested(NestedClass {
                    name: a.name.clone(),
                    literal,
                    span: a.span,
                })
            }
            _ => unreachable!("member keys separate methods from nested classes"),
        };
        merged.push(m);
    }
    // keep first-appearance order for readable output
    let position = |k: &MemberKey| {
        l1.members
            .iter()
            .position(|m| &m.key() == k)
            .unwrap_or_else(|| l1.members.len() + l2.members.iter().position(|m| &m.key() == k).unwrap_or(0))
    };
    merged.sort_by_key(|m| position(&m.key()));
    let mut implements = l1.implements.clone();
    for t in &l2.implements {
        if !implements.contains(t) {
            implements.push(t.clone());
        }
    }
    Ok(CodeLiteral {
        is_interface: l1.is_interface,
        implements,
        members: merged,
        span: l1.span,
    })
}

fn sum_methods(a: &Method, b: &Method, path: &[String]) -> Result<Method, Diagnostic> {
    let in_where = if path.is_empty() {
        String::new()
    } else {
        format!(" in `{}`", path.join("."))
    };
    if !a.sig.same_header(&b.sig) {
        return Err(Diagnostic::new(
            Code::MethodClash,
            b.span,
            format!(
                "method `{}/{}`{in_where} has different headers: `{}` and `{}`",
                a.sig.name,
                a.sig.arity(),
                a.sig,
                b.sig
            ),
        ));
    }
    match (&a.body, &b.body) {
        (Some(_), Some(_)) => Err(Diagnostic::new(
            Code::MethodClash,
            b.span,
            format!(
                "method `{}/{}`{in_where} is implemented on both sides",
                a.sig.name,
                a.sig.arity()
            ),
        )),
        (Some(_), None) => Ok(a.clone()),
        (None, Some(_)) => Ok(b.clone()),
        (None, None) => {
            let names = |m: &Method| m.sig.params.iter().map(|p| p.name.clone()).collect::<Vec<_>>();
            Ok(if names(b) < names(a) { b.clone() } else { a.clone() })
        }
    }
}

/// `L[rename from into to]` on a nested class of `L`.
pub fn rename_nested(lit: &CodeLiteral, from: &str, to: &str) -> Result<CodeLiteral, Diagnostic> {
    if lit.nested_class(from).is_none() {
        return Err(Diagnostic::new(
            Code::NotWellFormed,
            lit.span,
            format!("cannot rename `{from}`: no such nested class"),
        ));
    }
    if from == to {
        return Ok(lit.clone());
    }
    if lit.nested_class(to).is_some() {
        return Err(Diagnostic::new(
            Code::NotWellFormed,
            lit.span,
            format!("cannot rename `{from}` into `{to}`: `{to}` already exists"),
        ));
    }
    let old = TypePath::new([THIS_TYPE, from]);
    let mut renamed = lit.map_types(&mut |t| {
        if t.starts_with(&old) {
            let mut segments = vec![THIS_TYPE.to_string(), to.to_string()];
            segments.extend(t.segments[2..].iter().cloned());
            TypePath { segments }
        } else {
            t.clone()
        }
    });
    for m in &mut renamed.members {
        if let Member::Nested(n) = m {
            if n.name == from {
                n.name = to.to_string();
            }
        }
    }
    Ok(renamed)
}

/// `L[super m/n as alias]`: `m` becomes abstract and its body moves to `alias`.
pub fn super_extract(
    lit: &CodeLiteral,
    target: &str,
    arity: Option<usize>,
    alias: &str,
) -> Result<CodeLiteral, Diagnostic> {
    let bad = |msg: String| Diagnostic::new(Code::NotWellFormed, lit.span, msg);
    let candidates: Vec<&Method> = lit
        .methods()
        .filter(|m| m.sig.name == target && arity.is_none_or(|a| m.sig.arity() == a))
        .collect();
    let method = match candidates.as_slice() {
        [] => {
            return Err(bad(match arity {
                Some(a) => format!("cannot apply super: no method `{target}/{a}`"),
                None => format!("cannot apply super: no method `{target}`"),
            }))
        }
        [m] => *m,
        _ => {
            return Err(bad(format!(
                "cannot apply super: `{target}` is overloaded; write `{target}/<arity>`"
            )))
        }
    };
    let n = method.sig.arity();
    let Some(body) = &method.body else {
        return Err(bad(format!("cannot apply super: `{target}/{n}` is abstract")));
    };
    if lit.method(alias, n).is_some() {
        return Err(bad(format!("cannot apply super: `{alias}/{n}` already exists")));
    }
    let mut out = lit.clone();
    for m in &mut out.members {
        if let Member::Method(m) = m {
            if m.sig.name == target && m.sig.arity() == n {
                m.body = None;
            }
        }
    }
    out.members.push(Member::Method(Method {
        sig: MethodSig {
            name: alias.to_string(),
            ..method.sig.clone()
        },
        body: Some(body.clone()),
        span: method.span,
    }));
    Ok(out)
}
