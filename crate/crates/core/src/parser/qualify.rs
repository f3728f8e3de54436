//! Name qualification pre-pass: bare nested-class names in type positions
//! become `This`-rooted paths from the top of their literal.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::ast::*;
use crate::diag::{Code, Diagnostic};
use crate::prelude;

struct Scope {
    /// Path from the literal root to this scope.
    path: Vec<String>,
    names: BTreeSet<String>,
}

/// Qualify every literal of every declaration. Idempotent.
pub fn qualify_names(table: &DeclarationTable, with_prelude: bool) -> Result<DeclarationTable, Diagnostic> {
    let top_classes: HashSet<&str> = table
        .decls
        .iter()
        .filter(|d| d.is_class())
        .map(|d| d.name.as_str())
        .collect();
    let mut memo = HashMap::new();
    let mut out = table.clone();
    for (index, decl) in out.decls.iter_mut().enumerate() {
        let root_names = composition_names(table, &decl.body, &mut memo, &mut Vec::new());
        let mut err = None;
        decl.body.literals_mut(&mut |lit| {
            if err.is_some() {
                return;
            }
            let mut names: BTreeSet<String> = lit.nested().map(|n| n.name.clone()).collect();
            names.extend(root_names.iter().cloned());
            let q = Qualifier {
                top_classes: &top_classes,
                with_prelude,
            };
            let root = Scope {
                path: Vec::new(),
                names,
            };
            match q.literal(lit, &mut vec![root]) {
                Ok(l) => *lit = l,
                Err(e) => err = Some(e.in_decl(index)),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    }
    Ok(out)
}

/// Root-level nested class names a composition expression can produce,
/// looking through referenced traits and renames.
fn composition_names(
    table: &DeclarationTable,
    e: &CodeExpr,
    memo: &mut HashMap<String, BTreeSet<String>>,
    visiting: &mut Vec<String>,
) -> BTreeSet<String> {
    match e {
        CodeExpr::Lit(l) => l.nested().map(|n| n.name.clone()).collect(),
        CodeExpr::TraitRef { name, .. } => {
            if let Some(names) = memo.get(name) {
                return names.clone();
            }
            if visiting.contains(name) {
                return BTreeSet::new();
            }
            let Some(decl) = table.get(name) else {
                return BTreeSet::new();
            };
            visiting.push(name.clone());
            let names = composition_names(table, &decl.body, memo, visiting);
            visiting.pop();
            memo.insert(name.clone(), names.clone());
            names
        }
        CodeExpr::Sum { left, right, .. } => {
            let mut names = composition_names(table, left, memo, visiting);
            names.extend(composition_names(table, right, memo, visiting));
            names
        }
        CodeExpr::Rename { inner, from, to, .. } => {
            let mut names = composition_names(table, inner, memo, visiting);
            if names.remove(from) {
                names.insert(to.clone());
            }
            names
        }
        CodeExpr::SuperAs { inner, .. } => composition_names(table, inner, memo, visiting),
    }
}

struct Qualifier<'a> {
    top_classes: &'a HashSet<&'a str>,
    with_prelude: bool,
}

impl Qualifier<'_> {
    fn path(&self, t: &TypePath, scopes: &[Scope], span: Span) -> Result<TypePath, Diagnostic> {
        let head = t.head();
        if head == THIS_TYPE {
            return Ok(t.clone());
        }
        for scope in scopes.iter().rev() {
            if scope.names.contains(head) {
                let mut segments = vec![THIS_TYPE.to_string()];
                segments.extend(scope.path.iter().cloned());
                segments.extend(t.segments.iter().cloned());
                return Ok(TypePath { segments });
            }
        }
        if self.top_classes.contains(head) || (self.with_prelude && prelude::is_prelude_type(head)) {
            return Ok(t.clone());
        }
        Err(Diagnostic::new(
            Code::NotWellFormed,
            span,
            format!("type `{t}` does not resolve to a nested or top-level class"),
        ))
    }

    fn literal(&self, lit: &CodeLiteral, scopes: &mut Vec<Scope>) -> Result<CodeLiteral, Diagnostic> {
        let implements = lit
            .implements
            .iter()
            .map(|t| self.path(t, scopes, lit.span))
            .collect::<Result<_, _>>()?;
        let mut members = Vec::with_capacity(lit.members.len());
        for m in &lit.members {
            members.push(match m {
                Member::Method(m) => Member::Method(self.method(m, scopes)?),
                Member::Nested(n) => {
                    let names: BTreeSet<String> = n.literal.nested().map(|c| c.name.clone()).collect();
                    let mut path = scopes.last().map(|s| s.path.clone()).unwrap_or_default();
                    path.push(n.name.clone());
                    scopes.push(Scope { path, names });
                    let literal = self.literal(&n.literal, scopes);
                    scopes.pop();
                    let literal = literal?;
                    Member::Nested(NestedClass {
                        name: n.name.clone(),
                        literal,
                        span: n.span,
                    })
                }
            });
        }
        Ok(CodeLiteral {
            is_interface: lit.is_interface,
            implements,
            members,
            span: lit.span,
        })
    }

    fn method(&self, m: &Method, scopes: &[Scope]) -> Result<Method, Diagnostic> {
        let mut params = Vec::with_capacity(m.sig.params.len());
        for p in &m.sig.params {
            params.push(Param {
                ty: self.path(&p.ty, scopes, m.span)?,
                name: p.name.clone(),
            });
        }
        let ret = self.path(&m.sig.ret, scopes, m.span)?;
        let body = match &m.body {
            Some(e) => Some(self.expr(e, scopes)?),
            None => None,
        };
        Ok(Method {
            sig: MethodSig {
                is_static: m.sig.is_static,
                name: m.sig.name.clone(),
                params,
                ret,
            },
            body,
            span: m.span,
        })
    }

    fn expr(&self, e: &Expr, scopes: &[Scope]) -> Result<Expr, Diagnostic> {
        Ok(match e {
            Expr::Var { .. } | Expr::Const { .. } => e.clone(),
            Expr::Call {
                receiver,
                name,
                args,
                span,
            } => Expr::Call {
                receiver: Box::new(self.expr(receiver, scopes)?),
                name: name.clone(),
                args: args.iter().map(|a| self.expr(a, scopes)).collect::<Result<_, _>>()?,
                span: *span,
            },
            Expr::StaticCall { ty, name, args, span } => Expr::StaticCall {
                ty: self.path(ty, scopes, *span)?,
                name: name.clone(),
                args: args.iter().map(|a| self.expr(a, scopes)).collect::<Result<_, _>>()?,
                span: *span,
            },
        })
    }
}

/// Qualify a standalone expression (for `run`) against top-level classes,
/// optionally opening one class so its nested names resolve unqualified.
pub fn qualify_expr(
    e: &Expr,
    table: &DeclarationTable,
    open: Option<&str>,
    with_prelude: bool,
) -> Result<Expr, Diagnostic> {
    let top_classes: HashSet<&str> = table
        .decls
        .iter()
        .filter(|d| d.is_class())
        .map(|d| d.name.as_str())
        .collect();
    let names: BTreeSet<String> = open
        .and_then(|o| table.literal(o))
        .map(|l| l.nested().map(|n| n.name.clone()).collect())
        .unwrap_or_default();
    let q = Qualifier {
        top_classes: &top_classes,
        with_prelude,
    };
    let scopes = [Scope {
        path: Vec::new(),
        names,
    }];
    let qualified = q.expr(e, &scopes)?;
    // `This` in the scope of an opened class is that class.
    Ok(match open {
        Some(o) => qualified.map_types(&mut |t| t.subst_this(&TypePath::new([o]))),
        None => qualified,
    })
}
