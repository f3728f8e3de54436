//! The individual properties, each on one generated case.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::ast::*;
use crate::compose::{compile_program, sum_literals, wrong_count, CompileOptions, Demand};
use crate::diag::Code;
use crate::eval::Machine;
use crate::harness::coherent::CoherentProgram;
use crate::harness::gen::{gen_constant, gen_factory, gen_options};
use crate::pipeline::{compile_str, front_end, Options, Program};
use crate::print::{print_expr, print_literal};
use crate::typecheck::{subtype, type_expr, TypeEnv};

/// Outcome of the wrong-count check on one table.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WrongCountVerdict {
    pub steps: usize,
    /// Steps where the ill-typed literal count went down.
    pub decreases: usize,
    pub compiled: bool,
    /// `steps[i]` had more ill-typed literals after than before.
    pub violation: Option<String>,
}

/// Replay the compilation of `table`, comparing wrong counts across every
/// composition step against the declarations already flattened.
pub fn check_wrong_count(table: &DeclarationTable, opts: &Options) -> WrongCountVerdict {
    let mut v = WrongCountVerdict::default();
    let Ok(source) = front_end(table, opts) else {
        return v;
    };
    let out = compile_program(
        &source,
        CompileOptions {
            with_prelude: opts.with_prelude,
            demand: opts.demand,
            final_check: true,
        },
    );
    v.compiled = out.error.is_none();
    for s in &out.steps {
        let prefix = DeclarationTable::new(out.table.decls[..s.decl_index].to_vec());
        let before = wrong_count(&prefix, &s.before, opts.with_prelude);
        let after = wrong_count(&prefix, &s.after, opts.with_prelude);
        v.steps += 1;
        if after < before {
            v.decreases += 1;
        }
        if after > before && v.violation.is_none() {
            v.violation = Some(format!("{s}: ill-typed literals went from {before} to {after}"));
        }
    }
    v
}

/// Whether demand-driven and maximal checking disagree on `table`.
pub fn demand_diverges(table: &DeclarationTable) -> bool {
    let verdict = |demand| {
        let opts = Options {
            demand,
            ..gen_options()
        };
        match front_end(table, &opts) {
            Err(e) => Some(e[0].code),
            Ok(src) => compile_program(
                &src,
                CompileOptions {
                    with_prelude: false,
                    demand,
                    final_check: true,
                },
            )
            .error
            .map(|e| e.code),
        }
    };
    verdict(Demand::DemandDriven) != verdict(Demand::Maximal)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SoundnessVerdict {
    pub compiled: bool,
    pub runs: usize,
    pub steps: u64,
    /// Expressions the generator produced that did not type; a generator
    /// defect rather than a finding.
    pub untyped: usize,
    pub fuel_exhausted: usize,
    pub violation: Option<String>,
}

/// Run `exprs` closed expressions to values, checking at every step that
/// the term is not stuck and its type stays below the original.
pub fn check_soundness(program: &CoherentProgram, rng: &mut ChaCha8Rng, exprs: usize, fuel: u64) -> SoundnessVerdict {
    let mut v = SoundnessVerdict::default();
    let Ok(prog) = compile_str(&program.source, gen_options()) else {
        return v;
    };
    v.compiled = true;
    for _ in 0..exprs {
        let t = program.random_type(rng);
        let depth = rng.gen_range(1..=4);
        let text = program.closed_expr(rng, t, depth);
        match run_and_check(&prog, &text, fuel) {
            RunCheck::Untyped => v.untyped += 1,
            RunCheck::Fuel(s) => {
                v.fuel_exhausted += 1;
                v.steps += s;
            }
            RunCheck::Ok(s) => {
                v.runs += 1;
                v.steps += s;
            }
            RunCheck::Violation(msg) => {
                v.runs += 1;
                v.violation = Some(format!("{text}: {msg}"));
                return v;
            }
        }
    }
    v
}

pub enum RunCheck {
    Untyped,
    Ok(u64),
    Fuel(u64),
    Violation(String),
}

/// Evaluate `text` against `prog` step by step.
pub fn run_and_check(prog: &Program, text: &str, fuel: u64) -> RunCheck {
    let Ok((e, _, ty)) = prog.prepare_expr(text, None) else {
        return RunCheck::Untyped;
    };
    let scope = prog.classes.scope();
    let mut m = Machine::new(&prog.classes, e, fuel);
    loop {
        match m.step() {
            Ok(false) => return RunCheck::Ok(m.steps),
            Ok(true) => match type_expr(&scope, &TypeEnv::new(), &m.expr) {
                Ok(t) if subtype(&scope, &t, &ty) => {}
                Ok(t) => {
                    return RunCheck::Violation(format!(
                        "step {} has type {t}, not below {ty}: {}",
                        m.steps,
                        print_expr(&m.expr)
                    ))
                }
                Err(d) => {
                    return RunCheck::Violation(format!(
                        "step {} is ill typed ({}): {}",
                        m.steps,
                        d.message,
                        print_expr(&m.expr)
                    ))
                }
            },
            Err(d) if d.code == Code::FuelExhausted => return RunCheck::Fuel(m.steps),
            Err(d) => return RunCheck::Violation(format!("{}: {} at {}", d.code, d.message, print_expr(&m.expr))),
        }
    }
}

/// `Ok(print)` or the diagnostic code, for comparing sums.
fn sum_key(a: &CodeLiteral, b: &CodeLiteral) -> Result<String, Code> {
    sum_literals(a, b).map(|l| print_literal(&l)).map_err(|d| d.code)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlgebraVerdict {
    pub sums_defined: usize,
    pub clashes: usize,
    pub associative_checked: usize,
    /// Triples where exactly one association order is defined.
    pub definedness_differs: usize,
    pub violation: Option<String>,
}

/// Commutativity, identity and associativity on one triple. The identity
/// is `{}` for classes and `{interface}` for interfaces, since composing a
/// class with an interface is a clash even when the class is empty.
pub fn check_algebra(a: &CodeLiteral, b: &CodeLiteral, c: &CodeLiteral) -> AlgebraVerdict {
    let mut v = AlgebraVerdict::default();
    let empty = CodeLiteral {
        is_interface: a.is_interface,
        ..CodeLiteral::empty()
    };
    let fail = |v: &mut AlgebraVerdict, msg: String| {
        if v.violation.is_none() {
            v.violation = Some(msg);
        }
    };
    let show = print_literal;
    let a_print = show(a);
    for (x, y) in [(a, &empty), (&empty, a)] {
        if sum_key(x, y) != Ok(a_print.clone()) {
            fail(&mut v, format!("identity fails for {a_print}"));
        }
    }
    let ab = sum_key(a, b);
    let ba = sum_key(b, a);
    match &ab {
        Ok(_) => v.sums_defined += 1,
        Err(_) => v.clashes += 1,
    }
    if ab != ba {
        fail(
            &mut v,
            format!("{} + {} is {ab:?} but the other order is {ba:?}", a_print, show(b)),
        );
    }
    let left = sum_literals(a, b).and_then(|ab| sum_literals(&ab, c));
    let right = sum_literals(b, c).and_then(|bc| sum_literals(a, &bc));
    match (left, right) {
        (Ok(l), Ok(r)) => {
            v.associative_checked += 1;
            if show(&l) != show(&r) {
                fail(
                    &mut v,
                    format!(
                        "({} + {}) + {} differs from the other grouping",
                        a_print,
                        show(b),
                        show(c)
                    ),
                );
            }
        }
        (Ok(_), Err(_)) | (Err(_), Ok(_)) => v.definedness_differs += 1,
        (Err(_), Err(_)) => {}
    }
    v
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GetterVerdict {
    pub evaluations: usize,
    pub violation: Option<String>,
}

/// Getter and wither laws on a random factory: `of(v).xi() = vi`,
/// `of(v).withXi(w).xi() = w`, `of(v).withXi(w).xj() = vj` for `j != i`.
pub fn check_getters(rng: &mut ChaCha8Rng) -> GetterVerdict {
    let mut v = GetterVerdict::default();
    let (src, fields) = gen_factory(rng);
    let prog = match compile_str(&src, Options::default()) {
        Ok(p) => p,
        Err(f) => {
            v.violation = Some(format!("{src}: {}", f.render().join("; ")));
            return v;
        }
    };
    let values: Vec<String> = fields.iter().map(|(_, t)| gen_constant(rng, t)).collect();
    let built = format!("P.of({})", values.join(", "));
    let cap = |f: &str| format!("{}{}", f[..1].to_uppercase(), &f[1..]);
    let mut cases: Vec<(String, String)> = Vec::new();
    for (i, (f, t)) in fields.iter().enumerate() {
        cases.push((format!("{built}.{f}()"), values[i].clone()));
        let w = gen_constant(rng, t);
        let changed = format!("{built}.with{}({w})", cap(f));
        cases.push((format!("{changed}.{f}()"), w.clone()));
        for (j, (g, _)) in fields.iter().enumerate() {
            if j != i {
                cases.push((format!("{changed}.{g}()"), values[j].clone()));
            }
        }
    }
    for (expr, expected) in cases {
        v.evaluations += 1;
        let got = prog
            .run(&expr, None, 1000, false)
            .map(|(o, _)| print_expr(&o.value))
            .map_err(|d| format!("{}: {}", d.code, d.message));
        if got.as_deref() != Ok(expected.as_str()) {
            v.violation = Some(format!("{src}\n{expr} gave {got:?}, expected {expected}"));
            return v;
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_literal, parse_source};

    #[test]
    fn ordered_program_keeps_the_count() {
        let t = parse_source(
            "ta={method Int ma(){return 2;}}
             tc={method Int mc(A a, B b){return b.mb(a);}}
             A= Use ta
             B= {method Int mb(A a){return a.ma()+1;}}
             C= Use tc, {method Int hello(){return 1;}}",
            0,
        )
        .unwrap();
        let v = check_wrong_count(&t, &Options::default());
        assert!(v.compiled);
        assert_eq!(v.steps, 3);
        assert!(v.violation.is_none());
    }

    #[test]
    fn final_sum_fixes_the_literal() {
        let t = parse_source(
            "IA={interface method Int ma()}
             Utils={static method Int m(IA a){return 42;}}
             ta={implements IA method Int ma(){return Utils.m(this);}}
             B=Use ta, { method Int mb(){return this.ma();} }",
            0,
        )
        .unwrap();
        let v = check_wrong_count(&t, &Options::default());
        assert!(v.compiled);
        assert_eq!(v.decreases, 1);
    }

    #[test]
    fn clash_symmetry() {
        let a = parse_literal("{method K m(){return K.k();}}").unwrap();
        let b = parse_literal("{method K m(){return K.j();}}").unwrap();
        let v = check_algebra(&a, &b, &CodeLiteral::empty());
        assert_eq!(v.clashes, 1);
        assert!(v.violation.is_none());
    }

    #[test]
    fn interfaces_do_not_absorb_the_empty_class() {
        let i = parse_literal("{interface}").unwrap();
        let err = sum_literals(&i, &CodeLiteral::empty()).unwrap_err();
        assert_eq!(err.code, Code::ClassClash);
        assert!(check_algebra(&i, &i, &i).violation.is_none());
    }
}
