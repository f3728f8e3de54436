//! One step of composition reduction, leftmost-innermost and call by value.

use std::fmt;

use crate::ast::*;
use crate::diag::{Code, Diagnostic};

use super::ops::{rename_nested, sum_literals, super_extract};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    LookUp,
    Sum,
    Rename,
    Super,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::LookUp => "LOOK-UP",
            Rule::Sum => "SUM",
            Rule::Rename => "RENAME",
            Rule::Super => "SUPER",
        })
    }
}

/// A reduced redex: which rule, where (`root`, `root.left.right`, ...).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Redex {
    pub rule: Rule,
    pub path: String,
}

/// `prefix` supplies trait literals. `Ok(None)` means `e` is a literal.
pub fn step_compose(e: &CodeExpr, prefix: &DeclarationTable) -> Result<Option<(CodeExpr, Redex)>, Diagnostic> {
    step_at(e, prefix, "root".to_string())
}

fn step_at(e: &CodeExpr, prefix: &DeclarationTable, path: String) -> Result<Option<(CodeExpr, Redex)>, Diagnostic> {
    let done = |expr: CodeExpr, rule: Rule, path: String| Ok(Some((expr, Redex { rule, path })));
    match e {
        CodeExpr::Lit(_) => Ok(None),
        CodeExpr::TraitRef { name, span } => match prefix.get(name) {
            Some(d) => match &d.body {
                CodeExpr::Lit(l) => done(CodeExpr::Lit(l.clone()), Rule::LookUp, path),
                _ => Err(Diagnostic::new(
                    Code::OrderError,
                    *span,
                    format!("trait `{name}` is not compiled yet"),
                )),
            },
            None => Err(Diagnostic::new(
                Code::UnknownTrait,
                *span,
                format!("unknown trait `{name}`"),
            )),
        },
        CodeExpr::Sum { left, right, span } => {
            if let Some((l, r)) = step_at(left, prefix, format!("{path}.left"))? {
                return done(
                    CodeExpr::Sum {
                        left: Box::new(l),
                        right: right.clone(),
                        span: *span,
                    },
                    r.rule,
                    r.path,
                );
            }
            if let Some((rr, r)) = step_at(right, prefix, format!("{path}.right"))? {
                return done(
                    CodeExpr::Sum {
                        left: left.clone(),
                        right: Box::new(rr),
                        span: *span,
                    },
                    r.rule,
                    r.path,
                );
            }
            let (CodeExpr::Lit(l1), CodeExpr::Lit(l2)) = (&**left, &**right) else {
                unreachable!("both operands are values");
            };
            let sum = sum_literals(l1, l2).map_err(|d| d.at(*span))?;
            done(CodeExpr::Lit(sum), Rule::Sum, path)
        }
        CodeExpr::Rename { inner, from, to, span } => match step_at(inner, prefix, format!("{path}.inner"))? {
            Some((i, r)) => done(
                CodeExpr::Rename {
                    inner: Box::new(i),
                    from: from.clone(),
                    to: to.clone(),
                    span: *span,
                },
                r.rule,
                r.path,
            ),
            None => {
                let CodeExpr::Lit(l) = &**inner else { unreachable!() };
                let out = rename_nested(l, from, to).map_err(|d| d.at(*span))?;
                done(CodeExpr::Lit(out), Rule::Rename, path)
            }
        },
        CodeExpr::SuperAs {
            inner,
            target,
            arity,
            alias,
            span,
        } => match step_at(inner, prefix, format!("{path}.inner"))? {
            Some((i, r)) => done(
                CodeExpr::SuperAs {
                    inner: Box::new(i),
                    target: target.clone(),
                    arity: *arity,
                    alias: alias.clone(),
                    span: *span,
                },
                r.rule,
                r.path,
            ),
            None => {
                let CodeExpr::Lit(l) = &**inner else { unreachable!() };
                let out = super_extract(l, target, *arity, alias).map_err(|d| d.at(*span))?;
                done(CodeExpr::Lit(out), Rule::Super, path)
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_source;

    fn body(src: &str) -> CodeExpr {
        parse_source(&format!("X={src}"), 0).unwrap().decls[0].body.clone()
    }

    fn steps(e: &CodeExpr) -> Vec<Redex> {
        let prefix = parse_source("t={method int m(){return 1;}}", 0).unwrap();
        let mut e = e.clone();
        let mut out = Vec::new();
        while let Some((next, r)) = step_compose(&e, &prefix).unwrap() {
            out.push(r);
            e = next;
        }
        out
    }

    #[test]
    fn look_up_replaces_a_trait_name() {
        let r = steps(&body("t"));
        assert_eq!(
            r,
            vec![Redex {
                rule: Rule::LookUp,
                path: "root".into()
            }]
        );
    }

    #[test]
    fn right_nested_sum_reduces_inner_first() {
        let r = steps(&body("{} + ({} + {})"));
        assert_eq!(r[0].path, "root.right");
        assert_eq!(r[1].path, "root");
    }

    #[test]
    fn left_to_right_order() {
        let r = steps(&body("Use t[super m as k], {}, t"));
        let seen: Vec<_> = r.iter().map(|r| format!("{} at {}", r.rule, r.path)).collect();
        assert_eq!(
            seen,
            [
                "LOOK-UP at root.left.left.inner",
                "SUPER at root.left.left",
                "SUM at root.left",
                "LOOK-UP at root.right",
                "SUM at root",
            ]
        );
    }

    #[test]
    fn leftmost_clash_is_reported() {
        let e = body("Use {method int m(){return 1;}}, {method int m(){return 2;}}, {method int n(){return 1;}} + {method int n(){return 2;}}");
        let prefix = DeclarationTable::default();
        let mut e = e;
        let err = loop {
            match step_compose(&e, &prefix) {
                Ok(Some((n, _))) => e = n,
                Ok(None) => panic!("expected a clash"),
                Err(d) => break d,
            }
        };
        assert_eq!(err.code, Code::MethodClash);
        assert!(err.message.contains("m/0"), "{}", err.message);
    }

    #[test]
    fn unknown_trait() {
        let prefix = DeclarationTable::default();
        let err = step_compose(&body("zz"), &prefix).unwrap_err();
        assert_eq!(err.code, Code::UnknownTrait);
    }
}
