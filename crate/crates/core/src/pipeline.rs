//! Source text to a compiled program: parse, qualify, import interface
//! methods, check well-formedness, then compile.

use std::collections::BTreeSet;

use crate::ast::*;
use crate::compose::{compile_program, CompileOptions, ComposeStep, Demand};
use crate::diag::{Code, Diagnostic, Diagnostics, SourceMap};
use crate::env::ClassTable;
use crate::eval::{self, RunOutcome};
use crate::parser::{import_interface_methods, parse_expr, parse_source, qualify_expr, qualify_names};
use crate::prelude;
use crate::typecheck::{subtype, type_expr, TypeEnv};
use crate::wf::wf_program;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    /// Literals must spell out the methods of their interfaces.
    pub strict: bool,
    pub with_prelude: bool,
    pub demand: Demand,
    /// Type-check every declaration after flattening.
    pub final_check: bool,
}

impl Default for Options {
    fn default() -> Options {
        Options {
            strict: false,
            with_prelude: true,
            demand: Demand::DemandDriven,
            final_check: true,
        }
    }
}

impl Options {
    fn compile_options(&self) -> CompileOptions {
        CompileOptions {
            with_prelude: self.with_prelude,
            demand: self.demand,
            final_check: self.final_check,
        }
    }
}

/// Parse files in order and concatenate their declarations.
pub fn parse_files(files: &[(String, String)], sources: &mut SourceMap) -> Result<DeclarationTable, Diagnostic> {
    let mut decls = Vec::new();
    for (name, text) in files {
        let id = sources.add(name.clone());
        decls.extend(parse_source(text, id)?.decls);
    }
    Ok(DeclarationTable::new(decls))
}

/// Qualification, interface import and well-formedness.
pub fn front_end(table: &DeclarationTable, opts: &Options) -> Result<DeclarationTable, Diagnostics> {
    let q = qualify_names(table, opts.with_prelude).map_err(|e| vec![e])?;
    let n = if opts.strict {
        q
    } else {
        import_interface_methods(&q, opts.with_prelude)
    };
    let errs = wf_program(&n, opts.with_prelude);
    if errs.is_empty() {
        Ok(n)
    } else {
        Err(errs)
    }
}

#[derive(Clone, Debug)]
pub struct Program {
    pub sources: SourceMap,
    pub opts: Options,
    /// After the front end, before flattening.
    pub source: DeclarationTable,
    pub flat: DeclarationTable,
    pub steps: Vec<ComposeStep>,
    pub classes: ClassTable,
}

/// Failure of a whole-program operation, with the files for rendering.
#[derive(Clone, Debug)]
pub struct Failure {
    pub sources: SourceMap,
    pub diagnostics: Diagnostics,
    /// The table as far as compilation got, when the front end passed.
    pub partial: Option<DeclarationTable>,
}

impl Failure {
    pub fn render(&self) -> Vec<String> {
        self.diagnostics.iter().map(|d| d.render(&self.sources)).collect()
    }

    pub fn first_code(&self) -> Code {
        self.diagnostics[0].code
    }
}

pub fn compile_files(files: &[(String, String)], opts: Options) -> Result<Program, Failure> {
    let mut sources = SourceMap::new();
    let fail = |sources: &SourceMap, diagnostics| Failure {
        sources: sources.clone(),
        diagnostics,
        partial: None,
    };
    let parsed = parse_files(files, &mut sources).map_err(|e| fail(&sources, vec![e]))?;
    let source = front_end(&parsed, &opts).map_err(|e| fail(&sources, e))?;
    let outcome = compile_program(&source, opts.compile_options());
    if let Some(e) = outcome.error {
        return Err(Failure {
            sources,
            diagnostics: vec![e],
            partial: Some(outcome.table),
        });
    }
    let (flat, steps) = (outcome.table, outcome.steps);
    let classes = ClassTable::from_table(&flat, opts.with_prelude);
    Ok(Program {
        sources,
        opts,
        source,
        flat,
        steps,
        classes,
    })
}

/// Compile a single in-memory source.
pub fn compile_str(text: &str, opts: Options) -> Result<Program, Failure> {
    compile_files(&[("<input>".to_string(), text.to_string())], opts)
}

impl Program {
    /// The unique top-level class having nested classes for every
    /// unresolved head in `e`.
    fn infer_open(&self, e: &Expr) -> Option<String> {
        let mut heads = BTreeSet::new();
        e.for_each_type(&mut |t| {
            let h = t.head();
            let known = self.flat.get(h).is_some_and(|d| d.is_class())
                || (self.opts.with_prelude && prelude::is_prelude_type(h));
            if !known {
                heads.insert(h.to_string());
            }
        });
        if heads.is_empty() {
            return None;
        }
        let owners: Vec<&Declaration> = self
            .flat
            .decls
            .iter()
            .filter(|d| d.is_class())
            .filter(|d| {
                d.body
                    .as_literal()
                    .is_some_and(|l| heads.iter().all(|h| l.nested_class(h).is_some()))
            })
            .collect();
        match owners.as_slice() {
            [d] => Some(d.name.clone()),
            _ => None,
        }
    }

    /// Parse, qualify and type a closed expression. Returns it with the
    /// class it was opened in, if any.
    pub fn prepare_expr(&self, text: &str, open: Option<&str>) -> Result<(Expr, Option<String>, TypePath), Diagnostic> {
        let mut sources = self.sources.clone();
        let id = sources.add("<expr>");
        let raw = parse_expr(text, id)?;
        let open = match open {
            Some(o) => {
                if !self.flat.get(o).is_some_and(|d| d.is_class()) {
                    return Err(Diagnostic::new(
                        Code::NotWellFormed,
                        raw.span(),
                        format!("`{o}` is not a top-level class"),
                    ));
                }
                Some(o.to_string())
            }
            None => self.infer_open(&raw),
        };
        let e = qualify_expr(&raw, &self.flat, open.as_deref(), self.opts.with_prelude)?;
        let ty = type_expr(&self.classes.scope(), &TypeEnv::new(), &e)?;
        Ok((e, open, ty))
    }

    pub fn run(
        &self,
        text: &str,
        open: Option<&str>,
        fuel: u64,
        trace: bool,
    ) -> Result<(RunOutcome, Option<String>), Diagnostic> {
        let (e, open, _) = self.prepare_expr(text, open)?;
        let out = eval::run(&self.classes, &e, fuel, trace)?;
        Ok((out, open))
    }

    pub fn subtype(&self, sub: &str, sup: &str) -> bool {
        subtype(&self.classes.scope(), &TypePath::parse(sub), &TypePath::parse(sup))
    }
}
