//! Declaration, literal, method and expression typing, plus nominal
//! subtyping. Subsumption is algorithmic: types are synthesized and
//! compared with [`subtype`] at argument and return positions.

mod coherence;

pub use coherence::{abstract_state, coherence_diagnostics, coherent, AbstractStateReport};

use std::collections::HashSet;

use crate::ast::*;
use crate::diag::{Code, Diagnostic, Diagnostics};
use crate::env::{ClassTable, Lookup, Scope};
use crate::prelude;

/// Variable typing context.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeEnv {
    pub bindings: Vec<(String, TypePath)>,
}

impl TypeEnv {
    pub fn new() -> TypeEnv {
        TypeEnv::default()
    }

    pub fn with(mut self, name: &str, ty: TypePath) -> TypeEnv {
        self.bindings.push((name.to_string(), ty));
        self
    }

    pub fn get(&self, name: &str) -> Option<&TypePath> {
        self.bindings.iter().rev().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    /// Context for a method body: `this` only for instance methods.
    pub fn for_method(self_type: &TypePath, sig: &MethodSig) -> TypeEnv {
        let mut env = TypeEnv::new();
        if !sig.is_static {
            env = env.with(THIS_VAR, self_type.clone());
        }
        for p in &sig.params {
            env = env.with(&p.name, p.ty.clone());
        }
        env
    }
}

/// Reflexive-transitive closure of `implements`.
pub fn subtype(scope: &Scope<'_>, sub: &TypePath, sup: &TypePath) -> bool {
    let mut seen = HashSet::new();
    let mut work = vec![sub.clone()];
    while let Some(t) = work.pop() {
        if &t == sup {
            return true;
        }
        if !seen.insert(t.clone()) {
            continue;
        }
        if let Some(l) = scope.literal(&t) {
            work.extend(l.implements.iter().cloned());
        }
    }
    false
}

fn type_error(span: Span, msg: String) -> Diagnostic {
    Diagnostic::new(Code::TypeError, span, msg)
}

fn check_args(
    scope: &Scope<'_>,
    env: &TypeEnv,
    what: &str,
    params: &[TypePath],
    args: &[Expr],
) -> Result<(), Diagnostic> {
    for (i, (p, a)) in params.iter().zip(args).enumerate() {
        let t = type_expr(scope, env, a)?;
        if !subtype(scope, &t, p) {
            return Err(type_error(
                a.span(),
                format!(
                    "argument {} of `{what}` has type `{t}`, which is not a subtype of `{p}`",
                    i + 1
                ),
            ));
        }
    }
    Ok(())
}

/// Synthesize the type of `e`.
pub fn type_expr(scope: &Scope<'_>, env: &TypeEnv, e: &Expr) -> Result<TypePath, Diagnostic> {
    match e {
        Expr::Var { name, span } => env
            .get(name)
            .cloned()
            .ok_or_else(|| type_error(*span, format!("variable `{name}` is not in scope"))),
        Expr::Const { value, span } => {
            if scope.classes.prelude {
                Ok(prelude::type_of(value))
            } else {
                Err(type_error(*span, format!("the constant `{value}` needs the prelude")))
            }
        }
        Expr::StaticCall { ty, name, args, span } => {
            let lit = match scope.lookup(ty) {
                Lookup::Literal(l) => l,
                Lookup::Prelude => {
                    return Err(type_error(
                        *span,
                        format!("prelude class `{ty}` has no static method `{name}`"),
                    ))
                }
                Lookup::Missing => return Err(type_error(*span, format!("unknown type `{ty}`"))),
            };
            let m = match lit.method(name, args.len()) {
                Some(m) if m.sig.is_static => m,
                Some(_) => return Err(type_error(*span, format!("`{ty}.{name}/{}` is not static", args.len()))),
                None => {
                    return Err(type_error(
                        *span,
                        format!("`{ty}` has no static method `{name}/{}`", args.len()),
                    ))
                }
            };
            let params: Vec<TypePath> = m.sig.params.iter().map(|p| p.ty.clone()).collect();
            check_args(scope, env, &format!("{ty}.{name}"), &params, args)?;
            Ok(m.sig.ret.clone())
        }
        Expr::Call {
            receiver,
            name,
            args,
            span,
        } => {
            let rt = type_expr(scope, env, receiver)?;
            match scope.lookup(&rt) {
                Lookup::Prelude => {
                    let Some((params, ret)) =
                        prelude::method_sig(rt.head(), name).filter(|(ps, _)| ps.len() == args.len())
                    else {
                        return Err(type_error(
                            *span,
                            format!("`{rt}` has no method `{name}/{}`", args.len()),
                        ));
                    };
                    let params: Vec<TypePath> = params.into_iter().map(|p| TypePath::new([p])).collect();
                    check_args(scope, env, &format!("{rt}.{name}"), &params, args)?;
                    Ok(TypePath::new([ret]))
                }
                Lookup::Literal(lit) => {
                    let m = match lit.method(name, args.len()) {
                        Some(m) if !m.sig.is_static => m,
                        Some(_) => {
                            return Err(type_error(
                                *span,
                                format!("`{rt}.{name}/{}` is static; call it as `{rt}.{name}(..)`", args.len()),
                            ))
                        }
                        None => {
                            return Err(type_error(
                                *span,
                                format!("`{rt}` has no method `{name}/{}`", args.len()),
                            ))
                        }
                    };
                    let params: Vec<TypePath> = m.sig.params.iter().map(|p| p.ty.clone()).collect();
                    check_args(scope, env, &format!("{rt}.{name}"), &params, args)?;
                    Ok(m.sig.ret.clone())
                }
                Lookup::Missing => Err(type_error(*span, format!("unknown type `{rt}`"))),
            }
        }
    }
}

fn check_sig_types(scope: &Scope<'_>, m: &Method) -> Result<(), Diagnostic> {
    for t in m.sig.params.iter().map(|p| &p.ty).chain([&m.sig.ret]) {
        if !scope.resolves(t) {
            return Err(type_error(
                m.span,
                format!("unknown type `{t}` in method `{}`", m.sig.name),
            ));
        }
    }
    Ok(())
}

/// Abstract methods only need resolvable types; bodies must type at the
/// declared return type.
pub fn check_method(self_type: &TypePath, scope: &Scope<'_>, m: &Method) -> Result<(), Diagnostic> {
    check_sig_types(scope, m)?;
    let Some(body) = &m.body else {
        return Ok(());
    };
    let env = TypeEnv::for_method(self_type, &m.sig);
    let t = type_expr(scope, &env, body)?;
    if subtype(scope, &t, &m.sig.ret) {
        Ok(())
    } else {
        Err(type_error(
            body.span(),
            format!(
                "body of `{}` has type `{t}`, which is not a subtype of `{}`",
                m.sig.name, m.sig.ret
            ),
        ))
    }
}

/// One diagnostic per ill-typed method, nested classes included.
pub fn check_literal(self_type: &TypePath, scope: &Scope<'_>, lit: &CodeLiteral) -> Diagnostics {
    let mut out = Vec::new();
    literal_into(self_type, scope, lit, &mut out);
    out
}

fn literal_into(self_type: &TypePath, scope: &Scope<'_>, lit: &CodeLiteral, out: &mut Diagnostics) {
    for m in &lit.members {
        match m {
            Member::Method(m) => {
                if let Err(d) = check_method(self_type, scope, m) {
                    out.push(d);
                }
            }
            Member::Nested(n) => literal_into(&self_type.child(&n.name), scope, &n.literal, out),
        }
    }
}

/// A class is checked with `This` replaced by its name and must be
/// coherent; a trait is checked with `This` bound to its own literal.
pub fn check_declaration(classes: &ClassTable, decl: &Declaration) -> Diagnostics {
    let Some(lit) = decl.body.as_literal() else {
        return vec![type_error(decl.span, format!("`{}` is not flattened", decl.name))];
    };
    if decl.is_class() {
        let owned;
        let classes = if classes.contains(&decl.name) {
            classes
        } else {
            let mut c = classes.clone();
            c.insert(&decl.name, lit);
            owned = c;
            &owned
        };
        let nominal = TypePath::new([decl.name.as_str()]);
        let me = classes.get(&decl.name).expect("inserted above");
        let mut out = check_literal(&nominal, &classes.scope(), me);
        if out.is_empty() {
            // A flattened literal carries the span of one of its operands.
            out.extend(coherence_diagnostics(&nominal, me).into_iter().map(|d| {
                if d.span == me.span {
                    Diagnostic { span: decl.span, ..d }
                } else {
                    d
                }
            }));
        }
        out
    } else {
        check_literal(&TypePath::this(), &classes.scope_with_this(lit), lit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_expr, parse_literal, parse_source, qualify_names};

    fn table(src: &str) -> ClassTable {
        let t = qualify_names(&parse_source(src, 0).unwrap(), true).unwrap();
        ClassTable::from_table(&t, true)
    }

    const SEC_2_2: &str = "
        IA={interface method int ma()}
        Utils={static method int m(IA a){return 1;}}
        A={implements IA method int ma(){return Utils.m(this);}}
    ";

    #[test]
    fn subtype_is_reflexive_and_follows_implements() {
        let ct = table(SEC_2_2);
        let s = ct.scope();
        assert!(subtype(&s, &TypePath::parse("A"), &TypePath::parse("A")));
        assert!(subtype(&s, &TypePath::parse("A"), &TypePath::parse("IA")));
        assert!(!subtype(&s, &TypePath::parse("IA"), &TypePath::parse("A")));
    }

    #[test]
    fn variables_and_static_calls() {
        let ct = table(SEC_2_2);
        let env = TypeEnv::new().with("x", TypePath::parse("IA"));
        let s = ct.scope();
        assert_eq!(
            type_expr(&s, &env, &parse_expr("x", 0).unwrap()).unwrap(),
            TypePath::parse("IA")
        );
        let env = TypeEnv::new().with("this", TypePath::parse("A"));
        assert_eq!(
            type_expr(&s, &env, &parse_expr("Utils.m(this)", 0).unwrap()).unwrap(),
            TypePath::parse("Int")
        );
    }

    #[test]
    fn unknown_method_is_a_type_error() {
        let ct = table("B={method int mb(){return 1;}}");
        let env = TypeEnv::new().with("this", TypePath::parse("B"));
        let err = type_expr(&ct.scope(), &env, &parse_expr("this.ma()", 0).unwrap()).unwrap_err();
        assert_eq!(err.code, Code::TypeError);
    }

    #[test]
    fn trait_relies_on_its_interface() {
        let ct = table("IA={interface method int ma()} Utils={static method int m(IA a){return 1;}}");
        let ok = parse_literal("{implements IA method int ma(){return Utils.m(this);}}").unwrap();
        let d = Declaration {
            name: "ta".into(),
            body: CodeExpr::Lit(ok),
            span: Span::default(),
        };
        assert!(check_declaration(&ct, &d).is_empty());
        let bad = parse_literal("{method int ma(){return Utils.m(this);}}").unwrap();
        let d = Declaration {
            name: "ta".into(),
            body: CodeExpr::Lit(bad),
            span: Span::default(),
        };
        let errs = check_declaration(&ct, &d);
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].code, Code::TypeError);
    }

    #[test]
    fn static_bodies_have_no_this() {
        let ct = table("U={static method U k(){return this;}}");
        let d = check_declaration(
            &ct,
            &Declaration {
                name: "U".into(),
                body: CodeExpr::Lit(ct.get("U").unwrap().clone()),
                span: Span::default(),
            },
        );
        assert_eq!(d[0].code, Code::TypeError);
    }

    #[test]
    fn return_type_uses_subsumption() {
        let ct = table(SEC_2_2);
        let m = parse_literal("{static method IA up(A a){return a;}}").unwrap();
        let m = m.methods().next().unwrap();
        assert!(check_method(&TypePath::parse("Utils"), &ct.scope(), m).is_ok());
        let m2 = parse_literal("{static method A down(IA a){return a;}}").unwrap();
        let m2 = m2.methods().next().unwrap();
        assert!(check_method(&TypePath::parse("Utils"), &ct.scope(), m2).is_err());
    }

    #[test]
    fn empty_literal_is_well_typed() {
        let ct = ClassTable::new(true);
        let l = CodeLiteral::empty();
        assert!(check_literal(&TypePath::this(), &ct.scope_with_this(&l), &l).is_empty());
    }
}
