//! One line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use l42mu::ast::{CodeExpr, CodeLiteral, Member, TypePath};
use l42mu::cli;
use l42mu::diag::Code;
use l42mu::harness::{fuzz, Check, FuzzConfig};
use l42mu::print::{print_expr_relative, print_literal};
use l42mu::typecheck::abstract_state;

const SEED: u64 = 42;
const GOLDEN_BUDGET: Duration = Duration::from_secs(1);
const EXPRESSION_BUDGET: Duration = Duration::from_secs(1);
const A2_TABLES: usize = 10_000;
const A2_BUDGET: Duration = Duration::from_secs(60);
const A1_PROGRAMS: usize = 1_000;
const A1_BUDGET: Duration = Duration::from_secs(120);
const ALGEBRA_SAMPLES: usize = 10_000;
const GETTER_FACTORIES: usize = 10_000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < budget, || format!("took {t:.2?}, budget {budget:?}"))?;
    Ok(t)
}

fn cli_run(args: &[&str]) -> (i32, Vec<u8>, Vec<u8>) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["l42mu"];
    argv.extend_from_slice(args);
    let code = cli::run(argv, &mut out, &mut err);
    (code, out, err)
}

fn golden_flattening() -> Outcome {
    let mut times = Vec::new();
    for (program, expected) in [("inlining.l42mu", "inlining.flat"), ("rename.l42mu", "rename.flat")] {
        let start = Instant::now();
        let path = corpus_path(program).display().to_string();
        let (code, _, err) = cli_run(&["flatten", &path]);
        ensure(code == 0, || {
            format!("{program}: exit {code}: {}", String::from_utf8_lossy(&err))
        })?;
        let p = flatten_only(program);
        for (name, lit) in expected_in_context(program, expected) {
            let got = p.flat.literal(&name).map(print_literal);
            ensure(got.as_deref() == Some(print_literal(&lit).as_str()), || {
                format!("{program}: {name} differs from {expected}")
            })?;
        }
        times.push(format!("{program} {:.0?}", within(start, GOLDEN_BUDGET)?));
    }
    Ok(times.join(", "))
}

fn coherent(p: &l42mu::pipeline::Program, class: &str) -> bool {
    let nominal = TypePath::new([class]);
    p.flat
        .literal(class)
        .is_some_and(|l| abstract_state(&nominal, &l.subst_this(&nominal)).is_coherent())
}

fn coherence_suite() -> Outcome {
    let algebra = compile("point_algebra.l42mu").map_err(|f| f.render().join("; "))?;
    let body = &algebra.source.get("PointAlgebra").unwrap().body;
    ensure(
        body.literals().is_empty() && matches!(body, CodeExpr::Sum { .. }),
        || "PointAlgebra has glue members".into(),
    )?;
    ensure(coherent(&algebra, "PointAlgebra"), || {
        "PointAlgebra not coherent".into()
    })?;
    let fail = compile("cpoint_fail.l42mu");
    ensure(matches!(&fail, Err(f) if f.first_code() == Code::NotCoherent), || {
        "pointSum + colored did not fail NotCoherent".into()
    })?;
    for (file, class) in [("cpoint_extended.l42mu", "CPoint"), ("fcpoint.l42mu", "FCPoint")] {
        let p = compile(file).map_err(|f| format!("{file}: {}", f.render().join("; ")))?;
        ensure(coherent(&p, class), || format!("{class} not coherent"))?;
    }
    Ok("4/4 verdicts".into())
}

fn method_prints(lit: &CodeLiteral, path: &str, out: &mut Vec<String>) {
    for m in &lit.members {
        match m {
            Member::Method(_) => {
                let one = CodeLiteral {
                    members: vec![m.clone()],
                    ..CodeLiteral::empty()
                };
                out.push(format!("{path}: {}", print_literal(&one)));
            }
            Member::Nested(n) => method_prints(&n.literal, &format!("{path}.{}", n.name), out),
        }
    }
}

fn set_bag() -> Outcome {
    let mut bags = Vec::new();
    for file in ["set_bag_v1.l42mu", "set_bag_v2.l42mu"] {
        let p = compile(file).map_err(|f| format!("{file}: {}", f.render().join("; ")))?;
        let (set, bag) = (p.flat.literal("Set").unwrap(), p.flat.literal("Bag").unwrap());
        let (mut sm, mut bm) = (Vec::new(), Vec::new());
        method_prints(set, "", &mut sm);
        method_prints(bag, "", &mut bm);
        let shared = sm.iter().filter(|m| bm.contains(m)).count();
        ensure(shared == sm.len(), || {
            format!("{file}: Bag shares {shared} of {} Set methods", sm.len())
        })?;
        ensure(!p.subtype("Bag", "Set"), || format!("{file}: Bag is a subtype of Set"))?;
        bags.push(print_literal(bag));
    }
    ensure(bags[0] == bags[1], || "Bag differs between versions".into())?;
    Ok("Bag shares all Set bodies, not a subtype, identical in both versions".into())
}

fn expression_problem() -> Outcome {
    let start = Instant::now();
    let p = compile("expression_problem.l42mu").map_err(|f| f.render().join("; "))?;
    ensure(p.flat.literal("Example").is_some(), || "no Example".into())?;
    let run = |e: &str| -> Result<String, String> {
        let (o, open) = p.run(e, Some("Example"), 10_000, false).map_err(|d| d.message)?;
        Ok(print_expr_relative(&o.value, open.as_deref()))
    };
    let eval = run("Plus.of(Num.of(1),Num.of(2)).eval()")?;
    ensure(eval == "3", || format!("eval gave {eval}"))?;
    let double = run("Plus.of(Num.of(1),Num.of(2)).double()")?;
    ensure(double == "Plus.of(Num.of(2), Num.of(4))", || {
        format!("double gave {double}")
    })?;
    let t = within(start, EXPRESSION_BUDGET)?;
    Ok(format!("eval 3, double {double}, {t:.0?}"))
}

fn ordering() -> Outcome {
    let verdict = |f: &str| compile(f).err().map(|f| (f.first_code(), f.diagnostics[0].decl_index));
    let got = [
        verdict("ordering_ok.l42mu"),
        verdict("ordering_swapped.l42mu"),
        verdict("ordering_mutual.l42mu"),
    ];
    let want = [
        None,
        Some((Code::TypeError, Some(3))),
        Some((Code::OrderError, Some(1))),
    ];
    ensure(got == want, || format!("got {got:?}"))?;
    Ok("ok, TypeError at declaration 3, OrderError at declaration 1".into())
}

fn property(check: Check, count: usize, budget: Option<Duration>) -> Outcome {
    let start = Instant::now();
    let report = fuzz(check, &FuzzConfig { seed: SEED, count });
    ensure(report.violations.is_empty(), || {
        let v = &report.violations[0];
        format!(
            "{} violations, first case {}: {}",
            report.violations.len(),
            v.case,
            v.message
        )
    })?;
    let t = match budget {
        Some(b) => within(start, b)?,
        None => start.elapsed(),
    };
    let stats: Vec<String> = report.stats.iter().map(|(k, v)| format!("{k} {v}")).collect();
    Ok(format!("{count} cases, 0 violations, {t:.1?}; {}", stats.join(", ")))
}

fn determinism() -> Outcome {
    let mut invocations: Vec<Vec<String>> = Vec::new();
    for file in programs() {
        let path = corpus_path(&file).display().to_string();
        invocations.push(vec!["check".into(), path.clone()]);
        invocations.push(vec!["flatten".into(), "--trace".into(), path.clone()]);
        invocations.push(vec!["flatten".into(), "--qualified".into(), path]);
    }
    let ep = corpus_path("expression_problem.l42mu").display().to_string();
    invocations.push(
        [
            "run",
            &ep,
            "--steps",
            "--open",
            "Example",
            "-e",
            "Plus.of(Num.of(1),Num.of(2)).double()",
        ]
        .map(String::from)
        .to_vec(),
    );
    for check in ["soundness", "wrong-count", "algebra", "getters"] {
        invocations.push(
            ["fuzz", "--seed", "7", "--count", "20", "--check", check]
                .map(String::from)
                .to_vec(),
        );
    }
    for args in &invocations {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        ensure(cli_run(&args) == cli_run(&args), || {
            format!("{args:?} differs between runs")
        })?;
    }
    Ok(format!("{} invocations byte-identical", invocations.len()))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("golden flattening", Box::new(golden_flattening)),
        ("coherence suite", Box::new(coherence_suite)),
        ("set/bag separation", Box::new(set_bag)),
        ("expression problem", Box::new(expression_problem)),
        ("ordering semantics", Box::new(ordering)),
        (
            "wrong count never grows",
            Box::new(|| property(Check::WrongCount, A2_TABLES, Some(A2_BUDGET))),
        ),
        (
            "soundness",
            Box::new(|| property(Check::Soundness, A1_PROGRAMS, Some(A1_BUDGET))),
        ),
        ("sum laws", Box::new(|| property(Check::Algebra, ALGEBRA_SAMPLES, None))),
        (
            "getter and wither laws",
            Box::new(|| property(Check::Getters, GETTER_FACTORIES, None)),
        ),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
