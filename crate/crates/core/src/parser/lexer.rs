use crate::ast::Span;
use crate::diag::{Code, Diagnostic};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keyword {
    Interface,
    Implements,
    Method,
    Static,
    Use,
    Rename,
    Into,
    Super,
    As,
    Return,
    True,
    False,
    Void,
}

impl Keyword {
    fn from_ident(s: &str) -> Option<Keyword> {
        Some(match s {
            "interface" => Keyword::Interface,
            "implements" => Keyword::Implements,
            "method" => Keyword::Method,
            "static" => Keyword::Static,
            "Use" => Keyword::Use,
            "rename" => Keyword::Rename,
            "into" => Keyword::Into,
            "super" => Keyword::Super,
            "as" => Keyword::As,
            "return" => Keyword::Return,
            "true" => Keyword::True,
            "false" => Keyword::False,
            "void" => Keyword::Void,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    /// Identifier starting with an uppercase letter.
    ClassIdent(String),
    /// Identifier starting with a lowercase letter or `_`.
    LowerIdent(String),
    Int(i64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Plus,
    Minus,
    Star,
    Slash,
    Comma,
    Eq,
    EqEq,
    Lt,
    AndAnd,
    OrOr,
    Bang,
    Dot,
    Semi,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: Span,
}

/// Split source text into tokens. `//` and `/* */` comments are skipped.
pub fn tokenize(source: &str, file: u32) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut col = 1u32;

    macro_rules! advance {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance!();
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance!();
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            let span = Span::new(file, line, col, 2);
            advance!();
            advance!();
            loop {
                if i >= chars.len() {
                    return Err(Diagnostic::new(Code::NotWellFormed, span, "unterminated block comment"));
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    advance!();
                    advance!();
                    break;
                }
                advance!();
            }
            continue;
        }

        let start = i;
        let (sline, scol) = (line, col);
        let kind = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance!();
            }
            let word: String = chars[start..i].iter().collect();
            if let Some(kw) = Keyword::from_ident(&word) {
                TokenKind::Keyword(kw)
            } else if c.is_ascii_uppercase() {
                TokenKind::ClassIdent(word)
            } else {
                TokenKind::LowerIdent(word)
            }
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance!();
            }
            let digits: String = chars[start..i].iter().collect();
            let value = digits.parse::<i64>().map_err(|_| {
                Diagnostic::new(
                    Code::NotWellFormed,
                    Span::new(file, sline, scol, (i - start) as u32),
                    format!("integer literal `{digits}` out of range"),
                )
            })?;
            TokenKind::Int(value)
        } else {
            let two = chars.get(i + 1).copied();
            let (kind, width) = match (c, two) {
                ('=', Some('=')) => (TokenKind::EqEq, 2),
                ('&', Some('&')) => (TokenKind::AndAnd, 2),
                ('|', Some('|')) => (TokenKind::OrOr, 2),
                ('{', _) => (TokenKind::LBrace, 1),
                ('}', _) => (TokenKind::RBrace, 1),
                ('(', _) => (TokenKind::LParen, 1),
                (')', _) => (TokenKind::RParen, 1),
                ('[', _) => (TokenKind::LBracket, 1),
                (']', _) => (TokenKind::RBracket, 1),
                ('+', _) => (TokenKind::Plus, 1),
                ('-', _) => (TokenKind::Minus, 1),
                ('*', _) => (TokenKind::Star, 1),
                ('/', _) => (TokenKind::Slash, 1),
                (',', _) => (TokenKind::Comma, 1),
                ('=', _) => (TokenKind::Eq, 1),
                ('<', _) => (TokenKind::Lt, 1),
                ('!', _) => (TokenKind::Bang, 1),
                ('.', _) => (TokenKind::Dot, 1),
                (';', _) => (TokenKind::Semi, 1),
                _ => {
                    return Err(Diagnostic::new(
                        Code::NotWellFormed,
                        Span::new(file, sline, scol, 1),
                        format!("illegal character `{c}`"),
                    ))
                }
            };
            for _ in 0..width {
                advance!();
            }
            kind
        };
        tokens.push(Token {
            kind,
            text: chars[start..i].iter().collect(),
            span: Span::new(file, sline, scol, (i - start) as u32),
        });
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src, 0).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn use_declaration() {
        assert_eq!(
            kinds("A=Use ta"),
            vec![
                TokenKind::ClassIdent("A".into()),
                TokenKind::Eq,
                TokenKind::Keyword(Keyword::Use),
                TokenKind::LowerIdent("ta".into()),
            ]
        );
    }

    #[test]
    fn empty_source() {
        assert!(kinds("").is_empty());
        assert!(kinds("  // only a comment\n").is_empty());
    }

    #[test]
    fn rename_suffix() {
        let k = kinds("t[rename B into C]");
        assert!(k.contains(&TokenKind::Keyword(Keyword::Rename)));
        assert!(k.contains(&TokenKind::Keyword(Keyword::Into)));
        assert_eq!(k.len(), 7);
    }

    #[test]
    fn maximal_munch_on_operators() {
        assert_eq!(
            kinds("a==b=c"),
            vec![
                TokenKind::LowerIdent("a".into()),
                TokenKind::EqEq,
                TokenKind::LowerIdent("b".into()),
                TokenKind::Eq,
                TokenKind::LowerIdent("c".into()),
            ]
        );
    }

    #[test]
    fn illegal_character_is_reported_with_position() {
        let err = tokenize("A = {\n  #", 3).unwrap_err();
        assert_eq!(err.code, Code::NotWellFormed);
        assert_eq!((err.span.file, err.span.line, err.span.col), (3, 2, 3));
    }

    #[test]
    fn block_comments_are_skipped() {
        assert_eq!(kinds("Color.of(/*red*/)").len(), 5);
    }
}
