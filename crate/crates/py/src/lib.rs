//! Python bindings: compile programs, flatten them, run expressions,
//! query subtyping and coherence, compose literals and run the property
//! checks.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use l42mu::ast::TypePath;
use l42mu::compose::{sum_literals, Demand};
use l42mu::diag::SourceMap;
use l42mu::eval::DEFAULT_FUEL;
use l42mu::harness::{self, Check, FuzzConfig};
use l42mu::parser::parse_literal;
use l42mu::pipeline::{self, Failure, Options};
use l42mu::print::{print_expr_relative, print_literal, print_surface_table, print_table};
use l42mu::typecheck::abstract_state;

/// `(index, rule, term)` of one reduction step.
type Step = (u64, String, String);

create_exception!(l42mu, CompileError, PyException);
create_exception!(l42mu, RunError, PyException);

/// One diagnostic: `code`, `message`, `file`, `line`, `col` and the index
/// of the declaration being compiled, if any.
#[pyclass(frozen, get_all, skip_from_py_object, module = "l42mu")]
#[derive(Clone)]
struct Diagnostic {
    code: String,
    message: String,
    file: String,
    line: u32,
    col: u32,
    decl_index: Option<usize>,
}

#[pymethods]
impl Diagnostic {
    fn __str__(&self) -> String {
        format!(
            "{}:{}:{}: {}: {}",
            self.file, self.line, self.col, self.code, self.message
        )
    }

    fn __repr__(&self) -> String {
        format!("<Diagnostic {}>", self.__str__())
    }
}

fn diagnostic(d: &l42mu::diag::Diagnostic, sources: &SourceMap) -> Diagnostic {
    Diagnostic {
        code: d.code.to_string(),
        message: d.message.clone(),
        file: sources.name(d.span.file).to_string(),
        line: d.span.line,
        col: d.span.col,
        decl_index: d.decl_index,
    }
}

fn failure(f: &Failure) -> PyErr {
    let diags: Vec<Diagnostic> = f.diagnostics.iter().map(|d| diagnostic(d, &f.sources)).collect();
    CompileError::new_err((f.render().join("\n"), diags))
}

fn options(strict: bool, prelude: bool, maximal: bool, final_check: bool) -> Options {
    Options {
        strict,
        with_prelude: prelude,
        demand: if maximal { Demand::Maximal } else { Demand::DemandDriven },
        final_check,
    }
}

/// A compiled program: every declaration flattened and type-checked.
#[pyclass(frozen, module = "l42mu")]
struct Program {
    inner: pipeline::Program,
}

#[pymethods]
impl Program {
    /// Names of the top-level declarations, in order.
    #[getter]
    fn declarations(&self) -> Vec<String> {
        self.inner.flat.decls.iter().map(|d| d.name.clone()).collect()
    }

    /// The flattened program; `qualified` keeps `This`-rooted paths.
    #[pyo3(signature = (qualified = false))]
    fn flat(&self, qualified: bool) -> String {
        if qualified {
            print_table(&self.inner.flat)
        } else {
            print_surface_table(&self.inner.flat)
        }
    }

    /// The composition steps taken, as `decl: rule at path`.
    fn steps(&self) -> Vec<String> {
        self.inner.steps.iter().map(|s| s.to_string()).collect()
    }

    /// Evaluate a closed expression and return its printed value.
    #[pyo3(signature = (expr, open = None, fuel = DEFAULT_FUEL))]
    fn run(&self, expr: &str, open: Option<&str>, fuel: u64) -> PyResult<String> {
        self.trace(expr, open, fuel).map(|(v, _)| v)
    }

    /// Like `run`, also returning `(index, rule, term)` for every step.
    #[pyo3(signature = (expr, open = None, fuel = DEFAULT_FUEL))]
    fn trace(&self, expr: &str, open: Option<&str>, fuel: u64) -> PyResult<(String, Vec<Step>)> {
        let (out, open) = self.inner.run(expr, open, fuel, true).map_err(|d| {
            let mut sources = self.inner.sources.clone();
            sources.add("<expr>");
            RunError::new_err((d.render(&sources), vec![diagnostic(&d, &sources)]))
        })?;
        let steps = out
            .trace
            .iter()
            .map(|t| {
                (
                    t.index,
                    t.rule.to_string(),
                    print_expr_relative(&t.expr, open.as_deref()),
                )
            })
            .collect();
        Ok((print_expr_relative(&out.value, open.as_deref()), steps))
    }

    fn subtype(&self, sub: &str, sup: &str) -> bool {
        self.inner.subtype(sub, sup)
    }

    /// The abstract state of a class by path, e.g. `"Example.Plus"`.
    fn explain_coherence(&self, path: &str) -> PyResult<String> {
        let t = TypePath::parse(path);
        let top = self
            .inner
            .flat
            .literal(t.head())
            .ok_or_else(|| PyValueError::new_err(format!("no class `{path}`")))?;
        let named = top.subst_this(&TypePath::new([t.head()]));
        let lit = named
            .navigate(&t.segments[1..])
            .ok_or_else(|| PyValueError::new_err(format!("no class `{path}`")))?;
        Ok(abstract_state(&t, lit).to_string())
    }

    fn __repr__(&self) -> String {
        format!("<Program {} declarations>", self.inner.flat.decls.len())
    }
}

/// Compile source text; raises `CompileError(text, diagnostics)`.
#[pyfunction]
#[pyo3(signature = (source, *, name = "<input>", strict = false, prelude = true, maximal = false, final_check = true))]
fn compile(
    source: &str,
    name: &str,
    strict: bool,
    prelude: bool,
    maximal: bool,
    final_check: bool,
) -> PyResult<Program> {
    let files = [(name.to_string(), source.to_string())];
    pipeline::compile_files(&files, options(strict, prelude, maximal, final_check))
        .map(|inner| Program { inner })
        .map_err(|f| failure(&f))
}

/// Compile files, concatenated in order.
#[pyfunction]
#[pyo3(signature = (paths, *, strict = false, prelude = true, maximal = false, final_check = true))]
fn compile_files(
    paths: Vec<String>,
    strict: bool,
    prelude: bool,
    maximal: bool,
    final_check: bool,
) -> PyResult<Program> {
    let mut files = Vec::new();
    for p in paths {
        let text = std::fs::read_to_string(&p).map_err(|e| PyValueError::new_err(format!("{p}: {e}")))?;
        files.push((p, text));
    }
    pipeline::compile_files(&files, options(strict, prelude, maximal, final_check))
        .map(|inner| Program { inner })
        .map_err(|f| failure(&f))
}

/// The diagnostics of compiling `source`; empty when it compiles.
#[pyfunction]
#[pyo3(signature = (source, *, name = "<input>", strict = false, prelude = true, maximal = false))]
fn check(source: &str, name: &str, strict: bool, prelude: bool, maximal: bool) -> Vec<Diagnostic> {
    let files = [(name.to_string(), source.to_string())];
    match pipeline::compile_files(&files, options(strict, prelude, maximal, true)) {
        Ok(_) => Vec::new(),
        Err(f) => f.diagnostics.iter().map(|d| diagnostic(d, &f.sources)).collect(),
    }
}

/// The sum of two code literals, canonically printed; raises
/// `CompileError` on a clash.
#[pyfunction]
fn sum(left: &str, right: &str) -> PyResult<String> {
    let parse = |s: &str| parse_literal(s).map_err(|d| CompileError::new_err(format!("{}: {}", d.code, d.message)));
    let (a, b) = (parse(left)?, parse(right)?);
    sum_literals(&a, &b)
        .map(|l| print_literal(&l))
        .map_err(|d| CompileError::new_err(format!("{}: {}", d.code, d.message)))
}

/// Result of a property run.
#[pyclass(frozen, get_all, module = "l42mu")]
struct FuzzReport {
    check: String,
    seed: u64,
    cases: usize,
    stats: Vec<(String, String)>,
    /// `(case, message, counterexample source or None)`.
    violations: Vec<(u64, String, Option<String>)>,
    text: String,
}

#[pymethods]
impl FuzzReport {
    fn __str__(&self) -> String {
        self.text.clone()
    }
}

/// Run one of the property checks: `"soundness"`, `"wrong-count"`,
/// `"algebra"` or `"getters"`. Releases the interpreter lock while running.
#[pyfunction]
#[pyo3(signature = (check, seed = 0, count = 100))]
fn fuzz(py: Python<'_>, check: &str, seed: u64, count: usize) -> PyResult<FuzzReport> {
    let c = Check::from_name(check).ok_or_else(|| PyValueError::new_err(format!("unknown check `{check}`")))?;
    let r = py.detach(|| harness::fuzz(c, &FuzzConfig { seed, count }));
    Ok(FuzzReport {
        check: r.check.name().to_string(),
        seed: r.seed,
        cases: r.cases,
        stats: r.stats.clone(),
        violations: r
            .violations
            .iter()
            .map(|v| (v.case, v.message.clone(), v.counterexample.clone()))
            .collect(),
        text: r.to_string(),
    })
}

#[pymodule]
#[pyo3(name = "l42mu")]
fn py_l42mu(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Program>()?;
    m.add_class::<Diagnostic>()?;
    m.add_class::<FuzzReport>()?;
    m.add_function(wrap_pyfunction!(compile, m)?)?;
    m.add_function(wrap_pyfunction!(compile_files, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(sum, m)?)?;
    m.add_function(wrap_pyfunction!(fuzz, m)?)?;
    m.add("CompileError", m.py().get_type::<CompileError>())?;
    m.add("RunError", m.py().get_type::<RunError>())?;
    m.add("DEFAULT_FUEL", DEFAULT_FUEL)?;
    Ok(())
}
