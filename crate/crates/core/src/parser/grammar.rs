//! Recursive descent over the token stream.
//!
//! ```text
//! program  := decl*
//! decl     := IDENT '=' cexpr
//! cexpr    := term ('+' term)*
//! term     := 'Use' primary (',' primary)* | primary
//! primary  := atom suffix*
//! atom     := literal | TRAITNAME | '(' cexpr ')'
//! suffix   := '[' 'rename' CLASS 'into' CLASS ']'
//!           | '[' 'super' METHOD ('/' INT)? 'as' METHOD ']'
//! literal  := '{' 'interface'? ('implements' type (',' type)*)? member* '}'
//! member   := 'static'? 'method' type METHOD '(' params? ')' body? | CLASS '=' literal
//! body     := '{' 'return' expr ';'? '}'
//! ```
//!
//! Expressions add infix operators over the prelude types; each operator
//! is sugar for a method call on its left operand (see [`binary_method`]).

use super::lexer::{Keyword, Token, TokenKind};
use crate::ast::*;
use crate::diag::{Code, Diagnostic};

/// Method name an infix operator desugars to.
pub fn binary_method(op: &TokenKind) -> Option<&'static str> {
    Some(match op {
        TokenKind::Plus => "plus",
        TokenKind::Minus => "minus",
        TokenKind::Star => "times",
        TokenKind::Slash => "divide",
        TokenKind::EqEq => "equals",
        TokenKind::Lt => "lessThan",
        TokenKind::AndAnd => "and",
        TokenKind::OrOr => "or",
        _ => return None,
    })
}

/// Infix spelling of an operator method, for printing.
pub fn operator_symbol(method: &str) -> Option<&'static str> {
    Some(match method {
        "plus" => "+",
        "minus" => "-",
        "times" => "*",
        "divide" => "/",
        "equals" => "==",
        "lessThan" => "<",
        "and" => "&&",
        "or" => "||",
        _ => return None,
    })
}

/// `Use i1, ..., in` as a left-associated chain of sums.
pub fn desugar_use(items: Vec<CodeExpr>) -> CodeExpr {
    let mut iter = items.into_iter();
    let first = iter.next().expect("Use takes at least one item");
    iter.fold(first, CodeExpr::sum)
}

pub struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    file: u32,
}

type PResult<T> = Result<T, Diagnostic>;

impl<'t> Parser<'t> {
    pub fn new(tokens: &'t [Token], file: u32) -> Parser<'t> {
        Parser { tokens, pos: 0, file }
    }

    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, offset: usize) -> Option<&TokenKind> {
        self.tokens.get(self.pos + offset).map(|t| &t.kind)
    }

    fn span(&self) -> Span {
        match self.tokens.get(self.pos) {
            Some(t) => t.span,
            None => match self.tokens.last() {
                Some(t) => Span::new(self.file, t.span.line, t.span.col + t.span.len, 0),
                None => Span::new(self.file, 1, 1, 0),
            },
        }
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        let found = match self.tokens.get(self.pos) {
            Some(t) => format!("`{}`", t.text),
            None => "end of input".to_string(),
        };
        Err(Diagnostic::new(
            Code::NotWellFormed,
            self.span(),
            format!("syntax error: expected {expected}, found {found}"),
        ))
    }

    fn bump(&mut self) -> &'t Token {
        let t = &self.tokens[self.pos];
        self.pos += 1;
        t
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> PResult<Span> {
        if self.peek() == Some(&kind) {
            Ok(self.bump().span)
        } else {
            self.error(what)
        }
    }

    fn eat_kw(&mut self, kw: Keyword) -> bool {
        self.eat(&TokenKind::Keyword(kw))
    }

    fn expect_kw(&mut self, kw: Keyword, what: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.error(what)
        }
    }

    fn class_ident(&mut self, what: &str) -> PResult<(String, Span)> {
        match self.peek() {
            Some(TokenKind::ClassIdent(s)) => {
                let s = s.clone();
                Ok((s, self.bump().span))
            }
            _ => self.error(what),
        }
    }

    fn lower_ident(&mut self, what: &str) -> PResult<(String, Span)> {
        match self.peek() {
            Some(TokenKind::LowerIdent(s)) => {
                let s = s.clone();
                Ok((s, self.bump().span))
            }
            _ => self.error(what),
        }
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub fn parse_program(&mut self) -> PResult<DeclarationTable> {
        let mut decls = Vec::new();
        while !self.at_end() {
            decls.push(self.declaration()?);
        }
        Ok(DeclarationTable::new(decls))
    }

    fn declaration(&mut self) -> PResult<Declaration> {
        let span = self.span();
        let name = match self.peek() {
            Some(TokenKind::ClassIdent(s)) | Some(TokenKind::LowerIdent(s)) => s.clone(),
            _ => return self.error("a class or trait name"),
        };
        self.pos += 1;
        self.expect(TokenKind::Eq, "`=`")?;
        let body = self.code_expr()?;
        Ok(Declaration { name, body, span })
    }

    pub fn code_expr(&mut self) -> PResult<CodeExpr> {
        let mut e = self.term()?;
        while self.eat(&TokenKind::Plus) {
            let rhs = self.term()?;
            e = CodeExpr::sum(e, rhs);
        }
        Ok(e)
    }

    fn term(&mut self) -> PResult<CodeExpr> {
        if self.eat_kw(Keyword::Use) {
            let mut items = vec![self.primary()?];
            while self.eat(&TokenKind::Comma) {
                items.push(self.primary()?);
            }
            Ok(desugar_use(items))
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> PResult<CodeExpr> {
        let mut e = match self.peek() {
            Some(TokenKind::LBrace) => CodeExpr::Lit(self.literal()?),
            Some(TokenKind::LowerIdent(_)) => {
                let (name, span) = self.lower_ident("a trait name")?;
                CodeExpr::TraitRef { name, span }
            }
            Some(TokenKind::LParen) => {
                self.bump();
                let inner = self.code_expr()?;
                self.expect(TokenKind::RParen, "`)`")?;
                inner
            }
            Some(TokenKind::ClassIdent(_)) => {
                return Err(Diagnostic::new(
                    Code::NotWellFormed,
                    self.span(),
                    "syntax error: class names cannot be reused; only traits may appear in a composition",
                ))
            }
            _ => return self.error("a code literal or trait name"),
        };
        while self.peek() == Some(&TokenKind::LBracket) {
            let span = self.bump().span;
            if self.eat_kw(Keyword::Rename) {
                let (from, _) = self.class_ident("the nested class to rename")?;
                self.expect_kw(Keyword::Into, "`into`")?;
                let (to, _) = self.class_ident("the new nested class name")?;
                e = CodeExpr::Rename {
                    inner: Box::new(e),
                    from,
                    to,
                    span,
                };
            } else if self.eat_kw(Keyword::Super) {
                let (target, _) = self.lower_ident("a method name")?;
                let arity = if self.eat(&TokenKind::Slash) {
                    match self.peek() {
                        Some(TokenKind::Int(n)) if *n >= 0 => {
                            let n = *n as usize;
                            self.bump();
                            Some(n)
                        }
                        _ => return self.error("an arity"),
                    }
                } else {
                    None
                };
                self.expect_kw(Keyword::As, "`as`")?;
                let (alias, _) = self.lower_ident("a method name")?;
                e = CodeExpr::SuperAs {
                    inner: Box::new(e),
                    target,
                    arity,
                    alias,
                    span,
                };
            } else {
                return self.error("`rename` or `super`");
            }
            self.expect(TokenKind::RBracket, "`]`")?;
        }
        Ok(e)
    }

    pub fn literal(&mut self) -> PResult<CodeLiteral> {
        let span = self.expect(TokenKind::LBrace, "`{`")?;
        let is_interface = self.eat_kw(Keyword::Interface);
        let mut implements = Vec::new();
        if self.eat_kw(Keyword::Implements) {
            implements.push(self.type_path()?);
            while self.eat(&TokenKind::Comma) {
                implements.push(self.type_path()?);
            }
        }
        let mut members = Vec::new();
        while !self.eat(&TokenKind::RBrace) {
            members.push(self.member()?);
        }
        Ok(CodeLiteral {
            is_interface,
            implements,
            members,
            span,
        })
    }

    fn member(&mut self) -> PResult<Member> {
        match self.peek() {
            Some(TokenKind::ClassIdent(_)) => {
                let (name, span) = self.class_ident("a nested class name")?;
                self.expect(TokenKind::Eq, "`=`")?;
                let literal = self.literal()?;
                Ok(Member::Nested(NestedClass { name, literal, span }))
            }
            Some(TokenKind::Keyword(Keyword::Static)) | Some(TokenKind::Keyword(Keyword::Method)) => {
                let span = self.span();
                let is_static = self.eat_kw(Keyword::Static);
                self.expect_kw(Keyword::Method, "`method`")?;
                let ret = self.type_path()?;
                let (name, _) = self.lower_ident("a method name")?;
                self.expect(TokenKind::LParen, "`(`")?;
                let mut params = Vec::new();
                if !self.eat(&TokenKind::RParen) {
                    loop {
                        let ty = self.type_path()?;
                        let (pname, _) = self.lower_ident("a parameter name")?;
                        params.push(Param { ty, name: pname });
                        if self.eat(&TokenKind::RParen) {
                            break;
                        }
                        self.expect(TokenKind::Comma, "`,` or `)`")?;
                    }
                }
                let body = if self.eat(&TokenKind::LBrace) {
                    self.expect_kw(Keyword::Return, "`return`")?;
                    let e = self.expr()?;
                    self.eat(&TokenKind::Semi);
                    self.expect(TokenKind::RBrace, "`}`")?;
                    Some(e)
                } else {
                    None
                };
                Ok(Member::Method(Method {
                    sig: MethodSig {
                        is_static,
                        name,
                        params,
                        ret,
                    },
                    body,
                    span,
                }))
            }
            _ => self.error("a member declaration or `}`"),
        }
    }

    /// `int` is accepted as an alias for the prelude class `Int`.
    fn type_path(&mut self) -> PResult<TypePath> {
        match self.peek() {
            Some(TokenKind::LowerIdent(s)) if s == "int" => {
                self.bump();
                return Ok(TypePath::new(["Int"]));
            }
            Some(TokenKind::ClassIdent(_)) => {}
            Some(TokenKind::LowerIdent(_)) => {
                return Err(Diagnostic::new(
                    Code::NotWellFormed,
                    self.span(),
                    "syntax error: trait names cannot be used as types",
                ))
            }
            _ => return self.error("a type"),
        }
        let (first, _) = self.class_ident("a type")?;
        let mut segments = vec![first];
        while self.peek() == Some(&TokenKind::Dot) && matches!(self.peek_at(1), Some(TokenKind::ClassIdent(_))) {
            self.bump();
            segments.push(self.class_ident("a nested class name")?.0);
        }
        Ok(TypePath { segments })
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        self.binary_level(0)
    }

    fn binary_level(&mut self, level: usize) -> PResult<Expr> {
        const LEVELS: [&[TokenKind]; 5] = [
            &[TokenKind::OrOr],
            &[TokenKind::AndAnd],
            &[TokenKind::EqEq, TokenKind::Lt],
            &[TokenKind::Plus, TokenKind::Minus],
            &[TokenKind::Star, TokenKind::Slash],
        ];
        if level == LEVELS.len() {
            return self.unary();
        }
        let mut lhs = self.binary_level(level + 1)?;
        while let Some(op) = self.peek().filter(|k| LEVELS[level].contains(k)).cloned() {
            let span = self.bump().span;
            let rhs = self.binary_level(level + 1)?;
            lhs = Expr::Call {
                receiver: Box::new(lhs),
                name: binary_method(&op).unwrap().to_string(),
                args: vec![rhs],
                span,
            };
            // comparisons do not chain
            if level == 2 {
                break;
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.peek() == Some(&TokenKind::Bang) {
            let span = self.bump().span;
            let inner = self.unary()?;
            return Ok(Expr::Call {
                receiver: Box::new(inner),
                name: "not".into(),
                args: vec![],
                span,
            });
        }
        if self.peek() == Some(&TokenKind::Minus) {
            if let Some(TokenKind::Int(n)) = self.peek_at(1) {
                let n = *n;
                let span = self.bump().span;
                self.bump();
                let e = Expr::Const {
                    value: Intrinsic::Int(-n),
                    span,
                };
                return self.postfix(e);
            }
        }
        let atom = self.expr_atom()?;
        self.postfix(atom)
    }

    fn postfix(&mut self, mut e: Expr) -> PResult<Expr> {
        while self.peek() == Some(&TokenKind::Dot) {
            self.bump();
            let (name, span) = self.lower_ident("a method name")?;
            let args = self.args()?;
            e = Expr::Call {
                receiver: Box::new(e),
                name,
                args,
                span,
            };
        }
        Ok(e)
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect(TokenKind::LParen, "`(`")?;
        let mut args = Vec::new();
        if self.eat(&TokenKind::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.eat(&TokenKind::RParen) {
                return Ok(args);
            }
            self.expect(TokenKind::Comma, "`,` or `)`")?;
        }
    }

    fn expr_atom(&mut self) -> PResult<Expr> {
        let span = self.span();
        match self.peek().cloned() {
            Some(TokenKind::Int(n)) => {
                self.bump();
                Ok(Expr::Const {
                    value: Intrinsic::Int(n),
                    span,
                })
            }
            Some(TokenKind::Keyword(kw @ (Keyword::True | Keyword::False | Keyword::Void))) => {
                self.bump();
                let value = match kw {
                    Keyword::True => Intrinsic::Bool(true),
                    Keyword::False => Intrinsic::Bool(false),
                    _ => Intrinsic::Void,
                };
                Ok(Expr::Const { value, span })
            }
            Some(TokenKind::LowerIdent(name)) => {
                if self.peek_at(1) == Some(&TokenKind::LParen) {
                    return self.error("a receiver before the method call");
                }
                self.bump();
                Ok(Expr::Var { name, span })
            }
            Some(TokenKind::ClassIdent(_)) => {
                let ty = self.type_path()?;
                self.expect(TokenKind::Dot, "`.` and a static method call")?;
                let (name, span) = self.lower_ident("a static method name")?;
                let args = self.args()?;
                Ok(Expr::StaticCall { ty, name, args, span })
            }
            Some(TokenKind::LParen) => {
                self.bump();
                let e = self.expr()?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(e)
            }
            _ => self.error("an expression"),
        }
    }
}
