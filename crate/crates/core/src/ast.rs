//! Abstract syntax of the calculus: declarations, code literals, the
//! composition algebra over literals, and runtime expressions.

use std::fmt;

/// Reserved class name standing for the declaration being defined.
pub const THIS_TYPE: &str = "This";
/// Reserved variable name for the receiver.
pub const THIS_VAR: &str = "this";

/// Source location. Spans never participate in structural equality.
#[derive(Clone, Copy, Debug, Default)]
pub struct Span {
    pub file: u32,
    pub line: u32,
    pub col: u32,
    pub len: u32,
}

impl Span {
    pub fn new(file: u32, line: u32, col: u32, len: u32) -> Span {
        Span { file, line, col, len }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl std::hash::Hash for Span {
    fn hash<H: std::hash::Hasher>(&self, _: &mut H) {}
}

/// Classification of identifiers by their leading character.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentKind {
    ClassName,
    TraitName,
    MethodName,
    VarName,
}

/// Class names start with an uppercase letter; everything else
/// (traits, methods, variables) starts lowercase or with `_`.
pub fn is_class_name(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_uppercase())
}

pub fn is_trait_name(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_lowercase() || c == '_')
}

/// `C`, `C.D`, or a `This`-rooted path such as `This.Exp`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypePath {
    pub segments: Vec<String>,
}

impl TypePath {
    pub fn new<I, S>(segments: I) -> TypePath
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let segments: Vec<String> = segments.into_iter().map(Into::into).collect();
        assert!(!segments.is_empty(), "type paths are nonempty");
        TypePath { segments }
    }

    pub fn parse(text: &str) -> TypePath {
        TypePath::new(text.split('.'))
    }

    pub fn this() -> TypePath {
        TypePath::new([THIS_TYPE])
    }

    pub fn head(&self) -> &str {
        &self.segments[0]
    }

    pub fn is_this_rooted(&self) -> bool {
        self.head() == THIS_TYPE
    }

    pub fn child(&self, name: &str) -> TypePath {
        let mut segments = self.segments.clone();
        segments.push(name.to_string());
        TypePath { segments }
    }

    /// Replace a leading `This` by `with`.
    pub fn subst_this(&self, with: &TypePath) -> TypePath {
        if self.is_this_rooted() {
            let mut segments = with.segments.clone();
            segments.extend(self.segments[1..].iter().cloned());
            TypePath { segments }
        } else {
            self.clone()
        }
    }

    pub fn starts_with(&self, prefix: &TypePath) -> bool {
        self.segments.len() >= prefix.segments.len() && self.segments[..prefix.segments.len()] == prefix.segments[..]
    }
}

impl fmt::Display for TypePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.segments.join("."))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub ty: TypePath,
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MethodSig {
    pub is_static: bool,
    pub name: String,
    pub params: Vec<Param>,
    pub ret: TypePath,
}

impl MethodSig {
    pub fn arity(&self) -> usize {
        self.params.len()
    }

    pub fn key(&self) -> MemberKey {
        MemberKey::Method(self.name.clone(), self.arity())
    }

    /// Staticness, parameter types and return type agree. Parameter names
    /// are not part of the header type.
    pub fn same_header(&self, other: &MethodSig) -> bool {
        self.is_static == other.is_static
            && self.name == other.name
            && self.ret == other.ret
            && self.params.len() == other.params.len()
            && self.params.iter().zip(&other.params).all(|(a, b)| a.ty == b.ty)
    }

    pub fn map_types(&self, f: &mut impl FnMut(&TypePath) -> TypePath) -> MethodSig {
        MethodSig {
            is_static: self.is_static,
            name: self.name.clone(),
            params: self
                .params
                .iter()
                .map(|p| Param {
                    ty: f(&p.ty),
                    name: p.name.clone(),
                })
                .collect(),
            ret: f(&self.ret),
        }
    }
}

impl fmt::Display for MethodSig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_static {
            f.write_str("static ")?;
        }
        write!(f, "method {} {}(", self.ret, self.name)?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{} {}", p.ty, p.name)?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Method {
    pub sig: MethodSig,
    pub body: Option<Expr>,
    pub span: Span,
}

impl Method {
    pub fn is_abstract(&self) -> bool {
        self.body.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestedClass {
    pub name: String,
    pub literal: CodeLiteral,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Member {
    Method(Method),
    Nested(NestedClass),
}

/// Identity of a member inside a literal: methods by name and arity,
/// nested classes by name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MemberKey {
    Nested(String),
    Method(String, usize),
}

impl fmt::Display for MemberKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MemberKey::Nested(n) => f.write_str(n),
            MemberKey::Method(n, a) => write!(f, "{n}/{a}"),
        }
    }
}

impl Member {
    pub fn key(&self) -> MemberKey {
        match self {
            Member::Method(m) => m.sig.key(),
            Member::Nested(n) => MemberKey::Nested(n.name.clone()),
        }
    }

    pub fn span(&self) -> Span {
        match self {
            Member::Method(m) => m.span,
            Member::Nested(n) => n.span,
        }
    }
}

/// `{interface? implements T1, ..., Tn M1 ... Mk}`.
#[derive(Clone, Debug, Default)]
pub struct CodeLiteral {
    pub is_interface: bool,
    pub implements: Vec<TypePath>,
    /// Source order is kept for diagnostics; equality treats members as a set.
    pub members: Vec<Member>,
    pub span: Span,
}

impl PartialEq for CodeLiteral {
    fn eq(&self, other: &CodeLiteral) -> bool {
        if self.is_interface != other.is_interface
            || self.members.len() != other.members.len()
            || self.implements.len() != other.implements.len()
        {
            return false;
        }
        let mut a = self.implements.clone();
        let mut b = other.implements.clone();
        a.sort();
        b.sort();
        if a != b {
            return false;
        }
        self.members.iter().all(|m| {
            let key = m.key();
            other.member(&key) == Some(m)
        })
    }
}

impl Eq for CodeLiteral {}

impl CodeLiteral {
    pub fn empty() -> CodeLiteral {
        CodeLiteral::default()
    }

    pub fn member(&self, key: &MemberKey) -> Option<&Member> {
        self.members.iter().find(|m| &m.key() == key)
    }

    pub fn methods(&self) -> impl Iterator<Item = &Method> {
        self.members.iter().filter_map(|m| match m {
            Member::Method(m) => Some(m),
            Member::Nested(_) => None,
        })
    }

    pub fn nested(&self) -> impl Iterator<Item = &NestedClass> {
        self.members.iter().filter_map(|m| match m {
            Member::Nested(n) => Some(n),
            Member::Method(_) => None,
        })
    }

    pub fn nested_class(&self, name: &str) -> Option<&NestedClass> {
        self.nested().find(|n| n.name == name)
    }

    pub fn method(&self, name: &str, arity: usize) -> Option<&Method> {
        self.methods().find(|m| m.sig.name == name && m.sig.arity() == arity)
    }

    /// Navigate nested classes along `segments`.
    pub fn navigate(&self, segments: &[String]) -> Option<&CodeLiteral> {
        let mut current = self;
        for seg in segments {
            current = &current.nested_class(seg)?.literal;
        }
        Some(current)
    }

    /// Rewrite every type path (implements, signatures, bodies) recursively.
    pub fn map_types(&self, f: &mut impl FnMut(&TypePath) -> TypePath) -> CodeLiteral {
        CodeLiteral {
            is_interface: self.is_interface,
            implements: self.implements.iter().map(&mut *f).collect(),
            members: self
                .members
                .iter()
                .map(|m| match m {
                    Member::Method(m) => Member::Method(Method {
                        sig: m.sig.map_types(f),
                        body: m.body.as_ref().map(|e| e.map_types(f)),
                        span: m.span,
                    }),
                    Member::Nested(n) => Member::Nested(NestedClass {
                        name: n.name.clone(),
                        literal: n.literal.map_types(f),
                        span: n.span,
                    }),
                })
                .collect(),
            span: self.span,
        }
    }

    /// `L[This = with]`.
    pub fn subst_this(&self, with: &TypePath) -> CodeLiteral {
        self.map_types(&mut |t| t.subst_this(with))
    }

    /// Visit every type path occurring in the literal.
    pub fn for_each_type(&self, f: &mut impl FnMut(&TypePath)) {
        for t in &self.implements {
            f(t);
        }
        for m in &self.members {
            match m {
                Member::Method(m) => {
                    for p in &m.sig.params {
                        f(&p.ty);
                    }
                    f(&m.sig.ret);
                    if let Some(body) = &m.body {
                        body.for_each_type(f);
                    }
                }
                Member::Nested(n) => n.literal.for_each_type(f),
            }
        }
    }
}

/// Composition expression over code literals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodeExpr {
    Lit(CodeLiteral),
    TraitRef {
        name: String,
        span: Span,
    },
    Sum {
        left: Box<CodeExpr>,
        right: Box<CodeExpr>,
        span: Span,
    },
    Rename {
        inner: Box<CodeExpr>,
        from: String,
        to: String,
        span: Span,
    },
    SuperAs {
        inner: Box<CodeExpr>,
        target: String,
        arity: Option<usize>,
        alias: String,
        span: Span,
    },
}

impl CodeExpr {
    pub fn sum(left: CodeExpr, right: CodeExpr) -> CodeExpr {
        let span = right.span();
        CodeExpr::Sum {
            left: Box::new(left),
            right: Box::new(right),
            span,
        }
    }

    pub fn trait_ref(name: &str) -> CodeExpr {
        CodeExpr::TraitRef {
            name: name.to_string(),
            span: Span::default(),
        }
    }

    pub fn span(&self) -> Span {
        match self {
            CodeExpr::Lit(l) => l.span,
            CodeExpr::TraitRef { span, .. }
            | CodeExpr::Sum { span, .. }
            | CodeExpr::Rename { span, .. }
            | CodeExpr::SuperAs { span, .. } => *span,
        }
    }

    pub fn as_literal(&self) -> Option<&CodeLiteral> {
        match self {
            CodeExpr::Lit(l) => Some(l),
            _ => None,
        }
    }

    /// All literal leaves, left to right.
    pub fn literals(&self) -> Vec<&CodeLiteral> {
        let mut out = Vec::new();
        self.collect_literals(&mut out);
        out
    }

    fn collect_literals<'a>(&'a self, out: &mut Vec<&'a CodeLiteral>) {
        match self {
            CodeExpr::Lit(l) => out.push(l),
            CodeExpr::TraitRef { .. } => {}
            CodeExpr::Sum { left, right, .. } => {
                left.collect_literals(out);
                right.collect_literals(out);
            }
            CodeExpr::Rename { inner, .. } | CodeExpr::SuperAs { inner, .. } => inner.collect_literals(out),
        }
    }

    pub fn literals_mut(&mut self, f: &mut impl FnMut(&mut CodeLiteral)) {
        match self {
            CodeExpr::Lit(l) => f(l),
            CodeExpr::TraitRef { .. } => {}
            CodeExpr::Sum { left, right, .. } => {
                left.literals_mut(f);
                right.literals_mut(f);
            }
            CodeExpr::Rename { inner, .. } | CodeExpr::SuperAs { inner, .. } => inner.literals_mut(f),
        }
    }

    /// Trait names referenced, left to right, with repeats.
    pub fn trait_refs(&self) -> Vec<(&str, Span)> {
        let mut out = Vec::new();
        self.collect_traits(&mut out);
        out
    }

    fn collect_traits<'a>(&'a self, out: &mut Vec<(&'a str, Span)>) {
        match self {
            CodeExpr::Lit(_) => {}
            CodeExpr::TraitRef { name, span } => out.push((name, *span)),
            CodeExpr::Sum { left, right, .. } => {
                left.collect_traits(out);
                right.collect_traits(out);
            }
            CodeExpr::Rename { inner, .. } | CodeExpr::SuperAs { inner, .. } => inner.collect_traits(out),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Declaration {
    pub name: String,
    pub body: CodeExpr,
    pub span: Span,
}

impl Declaration {
    pub fn is_class(&self) -> bool {
        is_class_name(&self.name)
    }
}

/// The program: an ordered list of top-level declarations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeclarationTable {
    pub decls: Vec<Declaration>,
}

impl DeclarationTable {
    pub fn new(decls: Vec<Declaration>) -> DeclarationTable {
        DeclarationTable { decls }
    }

    pub fn get(&self, name: &str) -> Option<&Declaration> {
        self.decls.iter().find(|d| d.name == name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.decls.iter().position(|d| d.name == name)
    }

    pub fn is_flattened(&self) -> bool {
        self.decls.iter().all(|d| d.body.as_literal().is_some())
    }

    /// The literal body of a top-level declaration, if it has one.
    pub fn literal(&self, name: &str) -> Option<&CodeLiteral> {
        self.get(name).and_then(|d| d.body.as_literal())
    }

    /// Navigate a path through literal-bodied declarations and their nested
    /// classes. `This`-rooted paths are not resolvable here.
    pub fn lookup_type(&self, path: &TypePath) -> Option<&CodeLiteral> {
        self.literal(path.head())?.navigate(&path.segments[1..])
    }

    pub fn lookup_member(&self, path: &TypePath, name: &str, arity: usize) -> Option<&Method> {
        self.lookup_type(path)?.method(name, arity)
    }
}

/// Constants of the intrinsic prelude.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Intrinsic {
    Int(i64),
    Bool(bool),
    Void,
}

impl fmt::Display for Intrinsic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Intrinsic::Int(n) => write!(f, "{n}"),
            Intrinsic::Bool(b) => write!(f, "{b}"),
            Intrinsic::Void => f.write_str("void"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Var {
        name: String,
        span: Span,
    },
    Call {
        receiver: Box<Expr>,
        name: String,
        args: Vec<Expr>,
        span: Span,
    },
    StaticCall {
        ty: TypePath,
        name: String,
        args: Vec<Expr>,
        span: Span,
    },
    Const {
        value: Intrinsic,
        span: Span,
    },
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var {
            name: name.to_string(),
            span: Span::default(),
        }
    }

    pub fn call(receiver: Expr, name: &str, args: Vec<Expr>) -> Expr {
        Expr::Call {
            receiver: Box::new(receiver),
            name: name.to_string(),
            args,
            span: Span::default(),
        }
    }

    pub fn static_call(ty: TypePath, name: &str, args: Vec<Expr>) -> Expr {
        Expr::StaticCall {
            ty,
            name: name.to_string(),
            args,
            span: Span::default(),
        }
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const {
            value: Intrinsic::Int(n),
            span: Span::default(),
        }
    }

    pub fn span(&self) -> Span {
        match self {
            Expr::Var { span, .. }
            | Expr::Call { span, .. }
            | Expr::StaticCall { span, .. }
            | Expr::Const { span, .. } => *span,
        }
    }

    pub fn map_types(&self, f: &mut impl FnMut(&TypePath) -> TypePath) -> Expr {
        match self {
            Expr::Var { .. } | Expr::Const { .. } => self.clone(),
            Expr::Call {
                receiver,
                name,
                args,
                span,
            } => Expr::Call {
                receiver: Box::new(receiver.map_types(f)),
                name: name.clone(),
                args: args.iter().map(|a| a.map_types(f)).collect(),
                span: *span,
            },
            Expr::StaticCall { ty, name, args, span } => Expr::StaticCall {
                ty: f(ty),
                name: name.clone(),
                args: args.iter().map(|a| a.map_types(f)).collect(),
                span: *span,
            },
        }
    }

    pub fn for_each_type(&self, f: &mut impl FnMut(&TypePath)) {
        match self {
            Expr::Var { .. } | Expr::Const { .. } => {}
            Expr::Call { receiver, args, .. } => {
                receiver.for_each_type(f);
                args.iter().for_each(|a| a.for_each_type(f));
            }
            Expr::StaticCall { ty, args, .. } => {
                f(ty);
                args.iter().for_each(|a| a.for_each_type(f));
            }
        }
    }

    /// Variables used in the expression, in order of first appearance.
    pub fn free_vars(&self) -> Vec<(&str, Span)> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<(&'a str, Span)>) {
        match self {
            Expr::Var { name, span } => out.push((name, *span)),
            Expr::Const { .. } => {}
            Expr::Call { receiver, args, .. } => {
                receiver.collect_vars(out);
                args.iter().for_each(|a| a.collect_vars(out));
            }
            Expr::StaticCall { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Simultaneous substitution of variables by closed terms.
    pub fn subst(&self, bindings: &[(&str, &Expr)]) -> Expr {
        match self {
            Expr::Var { name, .. } => bindings
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, v)| (*v).clone())
                .unwrap_or_else(|| self.clone()),
            Expr::Const { .. } => self.clone(),
            Expr::Call {
                receiver,
                name,
                args,
                span,
            } => Expr::Call {
                receiver: Box::new(receiver.subst(bindings)),
                name: name.clone(),
                args: args.iter().map(|a| a.subst(bindings)).collect(),
                span: *span,
            },
            Expr::StaticCall { ty, name, args, span } => Expr::StaticCall {
                ty: ty.clone(),
                name: name.clone(),
                args: args.iter().map(|a| a.subst(bindings)).collect(),
                span: *span,
            },
        }
    }

    /// Number of nodes; used to bound generated terms.
    pub fn size(&self) -> usize {
        match self {
            Expr::Var { .. } | Expr::Const { .. } => 1,
            Expr::Call { receiver, args, .. } => 1 + receiver.size() + args.iter().map(Expr::size).sum::<usize>(),
            Expr::StaticCall { args, .. } => 1 + args.iter().map(Expr::size).sum::<usize>(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nested(name: &str, literal: CodeLiteral) -> Member {
        Member::Nested(NestedClass {
            name: name.into(),
            literal,
            span: Span::default(),
        })
    }

    #[test]
    fn lookup_navigates_nested_classes() {
        let inner = CodeLiteral::empty();
        let a = CodeLiteral {
            members: vec![nested("B", inner.clone())],
            ..CodeLiteral::empty()
        };
        let table = DeclarationTable::new(vec![Declaration {
            name: "A".into(),
            body: CodeExpr::Lit(a),
            span: Span::default(),
        }]);
        assert_eq!(table.lookup_type(&TypePath::parse("A.B")), Some(&inner));
        assert!(table.lookup_type(&TypePath::parse("A.C")).is_none());
        assert!(table.lookup_type(&TypePath::parse("Z")).is_none());
    }

    #[test]
    fn literal_equality_ignores_member_order() {
        let m = |name: &str| {
            Member::Method(Method {
                sig: MethodSig {
                    is_static: false,
                    name: name.into(),
                    params: vec![],
                    ret: TypePath::parse("Int"),
                },
                body: None,
                span: Span::default(),
            })
        };
        let l1 = CodeLiteral {
            members: vec![m("a"), m("b")],
            ..CodeLiteral::empty()
        };
        let l2 = CodeLiteral {
            members: vec![m("b"), m("a")],
            ..CodeLiteral::empty()
        };
        assert_eq!(l1, l2);
    }

    #[test]
    fn this_substitution_only_touches_this_rooted_paths() {
        let t = TypePath::parse("This.Exp");
        assert_eq!(t.subst_this(&TypePath::parse("Ex")), TypePath::parse("Ex.Exp"));
        let abs = TypePath::parse("Utils");
        assert_eq!(abs.subst_this(&TypePath::parse("Ex")), abs);
    }

    #[test]
    fn identifier_case_classifies_names() {
        assert!(is_class_name("Point"));
        assert!(is_trait_name("pointSum"));
        assert!(is_trait_name("_1merge"));
        assert!(!is_class_name("ta"));
    }
}
