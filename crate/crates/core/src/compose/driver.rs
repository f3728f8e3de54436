//! Top-down compilation: declarations are flattened in source order, and
//! the declarations a composition depends on are type-checked just before
//! it is flattened.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::ast::*;
use crate::diag::{Code, Diagnostic};
use crate::env::ClassTable;
use crate::prelude;
use crate::typecheck::{check_declaration, check_literal};
use crate::wf::consistent_subtype;

use super::step::{step_compose, Rule};

/// Which earlier declarations are type-checked before flattening one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Demand {
    /// The used traits and, transitively, the top-level types their code
    /// mentions.
    #[default]
    DemandDriven,
    /// Every earlier declaration that can be typed at that point; used
    /// traits must be among them.
    Maximal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompileOptions {
    pub with_prelude: bool,
    pub demand: Demand,
    /// Type-check every declaration not yet verified once all are flat.
    pub final_check: bool,
}

impl Default for CompileOptions {
    fn default() -> CompileOptions {
        CompileOptions {
            with_prelude: true,
            demand: Demand::DemandDriven,
            final_check: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComposeStep {
    pub decl_index: usize,
    pub decl: String,
    pub rule: Rule,
    pub path: String,
    pub before: CodeExpr,
    pub after: CodeExpr,
}

impl fmt::Display for ComposeStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} at {}", self.decl, self.rule, self.path)
    }
}

#[derive(Clone, Debug)]
pub struct CompileOutcome {
    /// Flattened up to the point of failure; later bodies untouched.
    pub table: DeclarationTable,
    pub steps: Vec<ComposeStep>,
    /// For each declaration flattened, the indices checked for it.
    pub demanded: Vec<(usize, Vec<usize>)>,
    pub error: Option<Diagnostic>,
}

impl CompileOutcome {
    pub fn into_result(self) -> Result<(DeclarationTable, Vec<ComposeStep>), Diagnostic> {
        match self.error {
            Some(e) => Err(e),
            None => Ok((self.table, self.steps)),
        }
    }
}

/// Top-level class names mentioned anywhere in a literal.
pub fn referenced_classes(lit: &CodeLiteral, with_prelude: bool) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    lit.for_each_type(&mut |t| {
        let h = t.head();
        if h != THIS_TYPE && !(with_prelude && prelude::is_prelude_type(h)) {
            out.insert(h.to_string());
        }
    });
    out
}

struct Driver<'a> {
    source: &'a DeclarationTable,
    decls: Vec<Declaration>,
    opts: CompileOptions,
    verified: Vec<bool>,
    steps: Vec<ComposeStep>,
    demanded: Vec<(usize, Vec<usize>)>,
    index: HashMap<&'a str, usize>,
}

pub fn compile_program(table: &DeclarationTable, opts: CompileOptions) -> CompileOutcome {
    let mut d = Driver {
        source: table,
        decls: table.decls.clone(),
        opts,
        verified: vec![false; table.decls.len()],
        steps: Vec::new(),
        demanded: Vec::new(),
        index: table
            .decls
            .iter()
            .enumerate()
            .map(|(i, d)| (d.name.as_str(), i))
            .collect(),
    };
    let error = d.run().err();
    CompileOutcome {
        table: DeclarationTable::new(d.decls),
        steps: d.steps,
        demanded: d.demanded,
        error,
    }
}

impl Driver<'_> {
    fn run(&mut self) -> Result<(), Diagnostic> {
        for i in 0..self.decls.len() {
            self.compile_one(i).map_err(|e| e.in_decl(i))?;
        }
        if self.opts.final_check {
            let classes = ClassTable::from_table(&DeclarationTable::new(self.decls.clone()), self.opts.with_prelude);
            for j in 0..self.decls.len() {
                if !self.verified[j] {
                    if let Some(e) = check_declaration(&classes, &self.decls[j]).into_iter().next() {
                        return Err(e.in_decl(j));
                    }
                    self.verified[j] = true;
                }
            }
        }
        Ok(())
    }

    fn compile_one(&mut self, i: usize) -> Result<(), Diagnostic> {
        let decl = &self.decls[i];
        let mut used = Vec::new();
        for (name, span) in decl.body.trait_refs() {
            match self.index.get(name) {
                None => {
                    return Err(Diagnostic::new(
                        Code::UnknownTrait,
                        span,
                        format!("unknown trait `{name}`"),
                    ))
                }
                Some(&j) if j >= i => {
                    return Err(Diagnostic::new(
                        Code::OrderError,
                        span,
                        if j == i {
                            format!("`{name}` uses itself")
                        } else {
                            format!(
                                "`{}` uses trait `{name}`, which is declared later; move `{name}` before `{}`",
                                decl.name, decl.name
                            )
                        },
                    ))
                }
                Some(&j) => {
                    if !used.contains(&j) {
                        used.push(j);
                    }
                }
            }
        }
        if !used.is_empty() {
            let prefix = DeclarationTable::new(self.decls[..i].to_vec());
            let classes = ClassTable::from_table(&prefix, self.opts.with_prelude);
            match self.opts.demand {
                Demand::DemandDriven => self.check_demanded(i, &used, &classes)?,
                Demand::Maximal => self.check_maximal(i, &used, &classes)?,
            }
        }
        self.flatten_one(i)
    }

    fn check_demanded(&mut self, i: usize, used: &[usize], classes: &ClassTable) -> Result<(), Diagnostic> {
        let mut set = BTreeSet::new();
        let mut work: Vec<usize> = used.to_vec();
        let mut late: Vec<(usize, usize)> = Vec::new();
        while let Some(j) = work.pop() {
            if !set.insert(j) {
                continue;
            }
            let lit = self.decls[j].body.as_literal().expect("earlier declarations are flat");
            for name in referenced_classes(lit, self.opts.with_prelude) {
                if let Some(&k) = self.index.get(name.as_str()) {
                    if k < i {
                        work.push(k);
                    } else {
                        late.push((j, k));
                    }
                }
            }
        }
        self.demanded.push((i, set.iter().copied().collect()));
        if let Some(&(j, k)) = late.iter().min() {
            return Err(self.late_reference(i, j, k, &set));
        }
        for &j in &set {
            if !self.verified[j] {
                if let Some(e) = check_declaration(classes, &self.decls[j]).into_iter().next() {
                    return Err(e);
                }
                self.verified[j] = true;
            }
        }
        Ok(())
    }

    fn check_maximal(&mut self, i: usize, used: &[usize], classes: &ClassTable) -> Result<(), Diagnostic> {
        let mut failures: HashMap<usize, Diagnostic> = HashMap::new();
        for j in 0..i {
            if self.verified[j] {
                continue;
            }
            let lit = self.decls[j].body.as_literal().expect("earlier declarations are flat");
            let late = referenced_classes(lit, self.opts.with_prelude)
                .iter()
                .filter_map(|n| self.index.get(n.as_str()).copied())
                .filter(|&k| k >= i)
                .min();
            if let Some(k) = late {
                let deps: BTreeSet<usize> = used.iter().copied().collect();
                failures.insert(j, self.late_reference(i, j, k, &deps));
                continue;
            }
            match check_declaration(classes, &self.decls[j]).into_iter().next() {
                None => self.verified[j] = true,
                Some(e) => {
                    failures.insert(j, e);
                }
            }
        }
        self.demanded.push((i, (0..i).filter(|&j| self.verified[j]).collect()));
        for j in used {
            if let Some(e) = failures.remove(j) {
                return Err(e);
            }
        }
        Ok(())
    }

    /// Declaration `j`, needed by `i`, mentions `k`, which is not compiled
    /// yet. When `k` is `i` itself or is built from what `i` needs, no
    /// order could work.
    fn late_reference(&self, i: usize, j: usize, k: usize, needed: &BTreeSet<usize>) -> Diagnostic {
        let (dj, dk, di) = (&self.decls[j], &self.decls[k], &self.decls[i]);
        let circular = k == i || self.uses_any(k, needed);
        if circular {
            if let Some(e) = self.tentative_error(i, needed) {
                return e;
            }
            Diagnostic::new(
                Code::OrderError,
                dj.span,
                format!(
                    "`{}` mentions `{}`, which is generated using `{}`; no declaration order can type it",
                    dj.name, dk.name, dj.name
                ),
            )
        } else {
            Diagnostic::new(
                Code::TypeError,
                dj.span,
                format!(
                    "cannot type `{}` while compiling `{}`: `{}` is declared later (declaration {})",
                    dj.name,
                    di.name,
                    dk.name,
                    k + 1
                ),
            )
        }
    }

    /// Flatten `i` and everything after it without any checks, then type
    /// `needed` against the result. An error there means the code is wrong
    /// under any order, not just this one.
    fn tentative_error(&self, i: usize, needed: &BTreeSet<usize>) -> Option<Diagnostic> {
        let mut decls = self.decls.clone();
        for x in i..decls.len() {
            let prefix = DeclarationTable::new(decls[..x].to_vec());
            let mut e = decls[x].body.clone();
            while let Some((next, _)) = step_compose(&e, &prefix).ok()? {
                e = next;
            }
            decls[x].body = e;
        }
        let classes = ClassTable::from_table(&DeclarationTable::new(decls.clone()), self.opts.with_prelude);
        needed
            .iter()
            .find_map(|&j| check_declaration(&classes, &decls[j]).into_iter().next())
    }

    /// Whether declaration `k` uses, directly or through other traits, one
    /// of `targets`.
    fn uses_any(&self, k: usize, targets: &BTreeSet<usize>) -> bool {
        let mut seen = BTreeSet::new();
        let mut work = vec![k];
        while let Some(x) = work.pop() {
            if !seen.insert(x) {
                continue;
            }
            for (name, _) in self.source.decls[x].body.trait_refs() {
                if let Some(&t) = self.index.get(name) {
                    if targets.contains(&t) {
                        return true;
                    }
                    work.push(t);
                }
            }
        }
        false
    }

    fn flatten_one(&mut self, i: usize) -> Result<(), Diagnostic> {
        let prefix = DeclarationTable::new(self.decls[..i].to_vec());
        let view = ClassTable::from_table(&DeclarationTable::new(self.decls.clone()), self.opts.with_prelude);
        let mut e = self.decls[i].body.clone();
        let span = e.span();
        while let Some((next, redex)) = step_compose(&e, &prefix)? {
            self.steps.push(ComposeStep {
                decl_index: i,
                decl: self.decls[i].name.clone(),
                rule: redex.rule,
                path: redex.path,
                before: e,
                after: next.clone(),
            });
            e = next;
        }
        // Interfaces are checked on the literal the declaration ends up
        // with; intermediate sums may still be missing methods.
        let lit = e.as_literal().expect("reduction ends on a literal");
        if let Some(d) = consistent_subtype(&view.scope_with_this(lit), lit).into_iter().next() {
            return Err(Diagnostic { span, ..d });
        }
        self.decls[i].body = e;
        Ok(())
    }
}

/// Number of literal leaves of `e` that are not well typed on their own,
/// against the flattened `prefix`.
pub fn wrong_count(prefix: &DeclarationTable, e: &CodeExpr, with_prelude: bool) -> usize {
    let classes = ClassTable::from_table(prefix, with_prelude);
    e.literals()
        .into_iter()
        .filter(|l| !check_literal(&TypePath::this(), &classes.scope_with_this(l), l).is_empty())
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_source, qualify_names};

    fn compile(src: &str) -> CompileOutcome {
        let t = qualify_names(&parse_source(src, 0).unwrap(), true).unwrap();
        compile_program(&t, CompileOptions::default())
    }

    const ORDERED: &str = "
        ta={method int ma(){return 2;}}
        tc={method int mc(A a, B b){return b.mb(a);}}
        A=Use ta
        B={method int mb(A a){return a.ma() + 1;}}
        C=Use tc, {method int hello(){return 1;}}
    ";

    #[test]
    fn ordered_program_compiles_demanding_only_what_it_uses() {
        let out = compile(ORDERED);
        assert!(out.error.is_none(), "{:?}", out.error);
        assert_eq!(out.demanded[0], (2, vec![0]));
        assert_eq!(out.demanded[1], (4, vec![1, 2, 3]));
        assert!(out.table.is_flattened());
    }

    #[test]
    fn swapped_program_is_a_type_error_at_c() {
        let src = "
            ta={method int ma(){return 2;}}
            tc={method int mc(A a, B b){return b.mb(a);}}
            A=Use ta
            C=Use tc, {method int hello(){return 1;}}
            B={method int mb(A a){return a.ma() + 1;}}
        ";
        let e = compile(src).error.unwrap();
        assert_eq!(e.code, Code::TypeError);
        assert_eq!(e.decl_index, Some(3));
    }

    #[test]
    fn mutual_program_is_an_order_error() {
        let e = compile("t={method int mt(A a){return a.ma();}} A=Use t, {method int ma(){return 1;}}")
            .error
            .unwrap();
        assert_eq!(e.code, Code::OrderError);
        assert_eq!(e.decl_index, Some(1));
    }

    #[test]
    fn cycle_through_ill_typed_code_is_a_type_error() {
        let e =
            compile("Utils={static method int m(A a){return 1;}} ta={method int ma(){return Utils.m(this);}} A=Use ta")
                .error
                .unwrap();
        assert_eq!(e.code, Code::TypeError);
        assert_eq!(e.decl_index, Some(2));
    }

    #[test]
    fn hello_clash_is_reported_at_c() {
        let src = ORDERED.replace("method int mc(", "method int hello(){return 2;} method int mc(");
        let e = compile(&src).error.unwrap();
        assert_eq!(e.code, Code::MethodClash);
        assert_eq!(e.decl_index, Some(4));
    }

    #[test]
    fn forward_trait_reference_is_an_order_error() {
        let e = compile("A=Use t t={}").error.unwrap();
        assert_eq!(e.code, Code::OrderError);
    }

    #[test]
    fn wrong_count_drops_after_flattening() {
        let src = "t={method int m(){return 2;} method int n(){return this.m() + 1;}}
                   C=Use t, {method int k(){return this.n() + this.m();}}";
        let t = qualify_names(&parse_source(src, 0).unwrap(), true).unwrap();
        let prefix = DeclarationTable::new(t.decls[..1].to_vec());
        assert_eq!(wrong_count(&prefix, &t.decls[1].body, true), 1);
        let out = compile_program(&t, CompileOptions::default());
        assert!(out.error.is_none());
        assert_eq!(wrong_count(&prefix, &out.table.decls[1].body, true), 0);
    }

    #[test]
    fn maximal_demand_agrees_on_the_ordering_examples() {
        let t = qualify_names(&parse_source(ORDERED, 0).unwrap(), true).unwrap();
        let opts = CompileOptions {
            demand: Demand::Maximal,
            ..CompileOptions::default()
        };
        assert!(compile_program(&t, opts).error.is_none());
    }

    #[test]
    fn implements_clash_on_the_flattened_result() {
        let e = compile("t1={ A={interface method Void a()} } t2={ A={interface} B={implements A} } X=Use t1, t2")
            .error
            .unwrap();
        assert_eq!(e.code, Code::ImplementsClash);
        assert_eq!(e.decl_index, Some(2));
    }

    #[test]
    fn intermediate_sums_may_be_incomplete() {
        let src = "
            a={ I={interface method int v()} P={implements I method int v(){return 1;}} }
            b={ I={interface method int w()} }
            c={ P={method int w(){return 2;}} }
            X=Use a, b, c
        ";
        assert!(compile(src).error.is_none());
    }

    #[test]
    fn trace_lines() {
        let out = compile(ORDERED);
        let lines: Vec<String> = out.steps.iter().map(|s| s.to_string()).collect();
        assert_eq!(
            lines,
            ["A: LOOK-UP at root", "C: LOOK-UP at root.left", "C: SUM at root"]
        );
    }
}
