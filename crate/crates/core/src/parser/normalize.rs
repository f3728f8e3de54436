//! Interface-member import: a source literal implementing an interface
//! receives abstract copies of the interface methods it does not declare.
//! Disabled in strict mode, where literals must spell out every method.

use crate::ast::*;
use crate::env::{ClassTable, Scope};

/// Runs to a fixpoint so chains of interfaces are imported transitively.
pub fn import_interface_methods(table: &DeclarationTable, with_prelude: bool) -> DeclarationTable {
    let mut current = table.clone();
    loop {
        let snapshot = current.clone();
        let view = ClassTable::from_table(&snapshot, with_prelude);
        let mut changed = false;
        for (decl, old) in current.decls.iter_mut().zip(&snapshot.decls) {
            let old_lits = old.body.literals();
            let mut k = 0;
            decl.body.literals_mut(&mut |lit| {
                let scope = view.scope_with_this(old_lits[k]);
                k += 1;
                changed |= import_into(&scope, lit);
            });
        }
        if !changed {
            return current;
        }
    }
}

fn import_into(scope: &Scope<'_>, lit: &mut CodeLiteral) -> bool {
    let mut changed = false;
    let mut missing = Vec::new();
    for t in &lit.implements {
        let Some(iface) = scope.literal(t).filter(|l| l.is_interface) else {
            continue;
        };
        for m in iface.methods() {
            let present = lit.method(&m.sig.name, m.sig.arity()).is_some()
                || missing
                    .iter()
                    .any(|s: &MethodSig| s.name == m.sig.name && s.arity() == m.sig.arity());
            if !present {
                missing.push(m.sig.clone());
            }
        }
    }
    for sig in missing {
        changed = true;
        lit.members.push(Member::Method(Method {
            sig,
            body: None,
            span: lit.span,
        }));
    }
    for m in &mut lit.members {
        if let Member::Nested(n) = m {
            changed |= import_into(scope, &mut n.literal);
        }
    }
    changed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_source, qualify_names};

    #[test]
    fn placeholder_receives_interface_methods() {
        let src = "eval={Exp={interface method int eval()} T={implements Exp}}";
        let t = qualify_names(&parse_source(src, 0).unwrap(), true).unwrap();
        let n = import_interface_methods(&t, true);
        let lit = n.decls[0].body.as_literal().unwrap();
        let tlit = &lit.nested_class("T").unwrap().literal;
        let m = tlit.method("eval", 0).expect("imported");
        assert!(m.is_abstract());
    }

    #[test]
    fn top_level_interfaces_are_imported_with_absolute_types() {
        let src = "I={interface method This me()} a={implements I}";
        let t = qualify_names(&parse_source(src, 0).unwrap(), true).unwrap();
        let n = import_interface_methods(&t, true);
        let a = n.decls[1].body.as_literal().unwrap();
        assert_eq!(a.method("me", 0).unwrap().sig.ret, TypePath::parse("I"));
    }

    #[test]
    fn declared_methods_are_not_duplicated() {
        let src = "I={interface method int m()} a={implements I method int m(){return 1;}}";
        let t = qualify_names(&parse_source(src, 0).unwrap(), true).unwrap();
        assert_eq!(import_interface_methods(&t, true), t);
    }
}
