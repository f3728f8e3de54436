//! Concrete syntax to AST.

mod grammar;
mod lexer;
mod normalize;
mod qualify;

pub use grammar::{binary_method, desugar_use, operator_symbol, Parser};
pub use lexer::{tokenize, Keyword, Token, TokenKind};
pub use normalize::import_interface_methods;
pub use qualify::{qualify_expr, qualify_names};

use crate::ast::{CodeLiteral, DeclarationTable, Expr};
use crate::diag::Diagnostic;

pub fn parse_program(tokens: &[Token], file: u32) -> Result<DeclarationTable, Diagnostic> {
    Parser::new(tokens, file).parse_program()
}

/// Tokenize and parse one source file.
pub fn parse_source(source: &str, file: u32) -> Result<DeclarationTable, Diagnostic> {
    let tokens = tokenize(source, file)?;
    parse_program(&tokens, file)
}

/// Parse a single code literal, e.g. `{method int m()}`.
pub fn parse_literal(source: &str) -> Result<CodeLiteral, Diagnostic> {
    let tokens = tokenize(source, 0)?;
    let mut p = Parser::new(&tokens, 0);
    let lit = p.literal()?;
    if !p.at_end() {
        return Err(trailing(&tokens));
    }
    Ok(lit)
}

/// Parse a standalone expression, e.g. `Point.of(1, 2).x()`.
pub fn parse_expr(source: &str, file: u32) -> Result<Expr, Diagnostic> {
    let tokens = tokenize(source, file)?;
    let mut p = Parser::new(&tokens, file);
    let e = p.expr()?;
    if !p.at_end() {
        return Err(trailing(&tokens));
    }
    Ok(e)
}

fn trailing(tokens: &[Token]) -> Diagnostic {
    let t = tokens.last().expect("nonempty");
    Diagnostic::new(
        crate::diag::Code::NotWellFormed,
        t.span,
        format!("syntax error: unexpected trailing input near `{}`", t.text),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::*;
    use crate::diag::Code;

    const SEC_2_2: &str = "
        IA={interface method int ma()}
        Utils={static method int m(IA a){return 1;}}
        ta={implements IA method int ma(){return Utils.m(this);}}
        A=Use ta
    ";

    #[test]
    fn section_two_program_has_four_declarations() {
        let t = parse_source(SEC_2_2, 0).unwrap();
        let names: Vec<_> = t.decls.iter().map(|d| d.name.as_str()).collect();
        assert_eq!(names, ["IA", "Utils", "ta", "A"]);
        assert_eq!(t.decls[3].body, CodeExpr::trait_ref("ta"));
    }

    #[test]
    fn use_with_literal_is_a_sum() {
        let t = parse_source("B=Use ta, { method int mb(){return this.ma();} }", 0).unwrap();
        match &t.decls[0].body {
            CodeExpr::Sum { left, right, .. } => {
                assert_eq!(**left, CodeExpr::trait_ref("ta"));
                assert!(matches!(**right, CodeExpr::Lit(_)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_body_is_a_syntax_error() {
        let err = parse_source("X=", 0).unwrap_err();
        assert_eq!(err.code, Code::NotWellFormed);
        assert!(err.message.contains("end of input"));
    }

    #[test]
    fn trait_names_are_not_types() {
        let err = parse_source("Utils={ static method int m(ta a){return 1;} }", 0).unwrap_err();
        assert!(err.message.contains("trait names cannot be used as types"));
    }

    #[test]
    fn classes_cannot_be_reused() {
        assert!(parse_source("B=Use A", 0).is_err());
    }

    #[test]
    fn use_is_left_associated() {
        let t = parse_source("P=Use pointSum,pointMul,pointDiv", 0).unwrap();
        let expected = CodeExpr::sum(
            CodeExpr::sum(CodeExpr::trait_ref("pointSum"), CodeExpr::trait_ref("pointMul")),
            CodeExpr::trait_ref("pointDiv"),
        );
        assert_eq!(t.decls[0].body, expected);
    }

    #[test]
    fn single_use_item_is_unchanged() {
        let t = parse_source("Set=Use set L=Use {}", 0).unwrap();
        assert_eq!(t.decls[0].body, CodeExpr::trait_ref("set"));
        assert_eq!(t.decls[1].body, CodeExpr::Lit(CodeLiteral::empty()));
    }

    #[test]
    fn suffix_operators() {
        let t = parse_source("D=t[rename B into C] F=colored[super merge/1 as _1merge]", 0).unwrap();
        assert!(matches!(&t.decls[0].body, CodeExpr::Rename { from, to, .. } if from == "B" && to == "C"));
        assert!(matches!(
            &t.decls[1].body,
            CodeExpr::SuperAs { target, arity: Some(1), alias, .. } if target == "merge" && alias == "_1merge"
        ));
    }

    #[test]
    fn operators_desugar_to_calls() {
        let e = parse_expr("this.x() + that.x() * 2", 0).unwrap();
        let expected = Expr::call(
            Expr::call(Expr::var("this"), "x", vec![]),
            "plus",
            vec![Expr::call(
                Expr::call(Expr::var("that"), "x", vec![]),
                "times",
                vec![Expr::int(2)],
            )],
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn static_calls_on_nested_paths() {
        let e = parse_expr("A.B.of(1).x()", 0).unwrap();
        let expected = Expr::call(
            Expr::static_call(TypePath::parse("A.B"), "of", vec![Expr::int(1)]),
            "x",
            vec![],
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn qualification_roots_nested_names_at_this() {
        let t = parse_source("exp={ Exp={interface} T={implements Exp} }", 0).unwrap();
        let q = qualify_names(&t, true).unwrap();
        let lit = q.decls[0].body.as_literal().unwrap();
        let inner = &lit.nested_class("T").unwrap().literal;
        assert_eq!(inner.implements, vec![TypePath::parse("This.Exp")]);
        assert_eq!(qualify_names(&q, true).unwrap(), q);
    }

    #[test]
    fn qualification_sees_names_from_composed_traits() {
        let src = "
            exp={ Exp={interface} T={implements Exp} }
            plus=Use exp[rename T into Plus], { Plus={method Exp left() static method Plus of(Exp left)} }
            double={ Exp={interface method Exp double()} T={implements Exp} }
            doublePlus=Use plus, double[rename T into Plus], {
              Plus={ method Exp double(){ return Plus.of(this.left().double()); } } }
        ";
        let q = qualify_names(&parse_source(src, 0).unwrap(), true).unwrap();
        let lits = q.decls[3].body.literals();
        let plus = &lits[0].nested_class("Plus").unwrap().literal;
        let m = plus.method("double", 0).unwrap();
        assert_eq!(m.sig.ret, TypePath::parse("This.Exp"));
        let mut statics = Vec::new();
        m.body.as_ref().unwrap().for_each_type(&mut |t| statics.push(t.clone()));
        assert_eq!(statics, vec![TypePath::parse("This.Plus")]);
    }

    #[test]
    fn literal_without_nested_classes_is_unchanged() {
        let t = parse_source(
            "A={method int m(Utils u){return Utils.k();}} Utils={static method int k(){return 1;}}",
            0,
        )
        .unwrap();
        assert_eq!(qualify_names(&t, true).unwrap(), t);
    }

    #[test]
    fn unresolved_type_names_are_rejected() {
        let t = parse_source("a={method Color color()}", 0).unwrap();
        let err = qualify_names(&t, true).unwrap_err();
        assert_eq!(err.code, Code::NotWellFormed);
        assert!(err.message.contains("Color"));
    }

    #[test]
    fn int_needs_the_prelude() {
        let t = parse_source("a={method int m()}", 0).unwrap();
        assert!(qualify_names(&t, true).is_ok());
        assert!(qualify_names(&t, false).is_err());
    }

    #[test]
    fn innermost_scope_wins() {
        let src = "a={ B={} C={ B={} method B m() } method B n() }";
        let q = qualify_names(&parse_source(src, 0).unwrap(), true).unwrap();
        let lit = q.decls[0].body.as_literal().unwrap();
        assert_eq!(lit.method("n", 0).unwrap().sig.ret, TypePath::parse("This.B"));
        let c = &lit.nested_class("C").unwrap().literal;
        assert_eq!(c.method("m", 0).unwrap().sig.ret, TypePath::parse("This.C.B"));
    }
}
