use std::fmt;

use crate::ast::Span;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Code {
    MethodClash,
    ClassClash,
    ImplementsClash,
    UnknownTrait,
    NotWellFormed,
    NotCoherent,
    TypeError,
    OrderError,
    Stuck,
    FuelExhausted,
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A classified, located error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: Code,
    pub message: String,
    pub span: Span,
    /// Index of the top-level declaration being compiled, when known.
    pub decl_index: Option<usize>,
}

impl Diagnostic {
    pub fn new(code: Code, span: Span, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            code,
            message: message.into(),
            span,
            decl_index: None,
        }
    }

    pub fn in_decl(mut self, index: usize) -> Diagnostic {
        self.decl_index.get_or_insert(index);
        self
    }

    /// Fill in a location when the diagnostic has none.
    pub fn at(mut self, span: Span) -> Diagnostic {
        if self.span.line == 0 {
            self.span = span;
        }
        self
    }

    /// `<file>:<line>:<col>: <code>: <message>`
    pub fn render(&self, sources: &SourceMap) -> String {
        format!(
            "{}:{}:{}: {}: {}",
            sources.name(self.span.file),
            self.span.line,
            self.span.col,
            self.code,
            self.message
        )
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}: {}",
            self.span.line, self.span.col, self.code, self.message
        )
    }
}

impl std::error::Error for Diagnostic {}

pub type Diagnostics = Vec<Diagnostic>;

/// File names indexed by the `file` field of [`Span`].
#[derive(Clone, Debug, Default)]
pub struct SourceMap {
    names: Vec<String>,
}

impl SourceMap {
    pub fn new() -> SourceMap {
        SourceMap::default()
    }

    pub fn add(&mut self, name: impl Into<String>) -> u32 {
        self.names.push(name.into());
        (self.names.len() - 1) as u32
    }

    pub fn name(&self, file: u32) -> &str {
        self.names.get(file as usize).map(String::as_str).unwrap_or("<input>")
    }
}
