//! Property harness: seeded generators, the soundness and wrong-count
//! properties, the sum laws, the getter and wither laws, and shrinking.
//!
//! Every case draws from its own stream of the run seed, so results do not
//! depend on how cases are spread over threads.

pub mod coherent;
pub mod gen;
pub mod props;
pub mod shrink;

use std::fmt;
use std::path::{Path, PathBuf};

pub use coherent::{gen_coherent_program, CoherentProgram};
pub use gen::{case_rng, gen_table, GenConfig};
pub use props::{check_algebra, check_getters, check_soundness, check_wrong_count, demand_diverges};
pub use shrink::shrink_table;

use crate::parser::parse_source;
use crate::pipeline::compile_str;
use crate::print::print_table;
use gen::{gen_options, gen_sum_literal};
use props::{run_and_check, RunCheck};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    /// Closed well-typed expressions over coherent programs never get stuck.
    Soundness,
    /// No composition step increases the number of ill-typed literals.
    WrongCount,
    Algebra,
    Getters,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Soundness => "soundness",
            Check::WrongCount => "wrong-count",
            Check::Algebra => "algebra",
            Check::Getters => "getters",
        }
    }

    /// Short names accepted as well.
    pub fn alias(self) -> &'static str {
        match self {
            Check::Soundness => "a1",
            Check::WrongCount => "a2",
            c => c.name(),
        }
    }

    pub fn from_name(name: &str) -> Option<Check> {
        [Check::Soundness, Check::WrongCount, Check::Algebra, Check::Getters]
            .into_iter()
            .find(|c| c.name() == name || c.alias() == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzConfig {
    pub seed: u64,
    pub count: usize,
}

/// Closed expressions per program and fuel per run for [`Check::Soundness`].
pub const SOUNDNESS_EXPRS: usize = 100;
pub const SOUNDNESS_FUEL: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub case: u64,
    pub message: String,
    /// A minimized source file reproducing the failure, when there is one.
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzReport {
    pub check: Check,
    pub seed: u64,
    pub cases: usize,
    /// Counters, in a fixed order.
    pub stats: Vec<(String, String)>,
    pub violations: Vec<Violation>,
}

impl FuzzReport {
    pub fn stat(&self, key: &str) -> Option<&str> {
        self.stats.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Write each counterexample as `<check>-<case>.l42mu` under `dir`.
    pub fn write_counterexamples(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        for v in &self.violations {
            if let Some(text) = &v.counterexample {
                let path = dir.join(format!("{}-{}.l42mu", self.check.name(), v.case));
                std::fs::write(&path, text)?;
                out.push(path);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for FuzzReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "check: {}", self.check.name())?;
        writeln!(f, "seed: {}", self.seed)?;
        writeln!(f, "cases: {}", self.cases)?;
        for (k, v) in &self.stats {
            writeln!(f, "{k}: {v}")?;
        }
        writeln!(f, "violations: {}", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "violation {}: {}", v.case, v.message)?;
        }
        Ok(())
    }
}

/// Map `f` over `0..count` on all cores, keeping the results in order.
fn par_map<T: Send>(count: usize, f: impl Fn(u64) -> T + Sync) -> Vec<T> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(16);
    let chunk = count.div_ceil(threads.max(1)).max(1);
    let mut out = Vec::with_capacity(count);
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..count)
            .step_by(chunk)
            .map(|start| {
                let f = &f;
                s.spawn(move || {
                    (start..(start + chunk).min(count))
                        .map(|i| f(i as u64))
                        .collect::<Vec<T>>()
                })
            })
            .collect();
        for h in handles {
            out.extend(h.join().expect("worker panicked"));
        }
    });
    out
}

fn pct(n: usize, of: usize) -> String {
    if of == 0 {
        format!("{n} of 0")
    } else {
        format!("{n} of {of} ({:.2}%)", 100.0 * n as f64 / of as f64)
    }
}

pub fn fuzz(check: Check, cfg: &FuzzConfig) -> FuzzReport {
    let mut report = FuzzReport {
        check,
        seed: cfg.seed,
        cases: cfg.count,
        stats: Vec::new(),
        violations: Vec::new(),
    };
    match check {
        Check::WrongCount => fuzz_wrong_count(cfg, &mut report),
        Check::Soundness => fuzz_soundness(cfg, &mut report),
        Check::Algebra => fuzz_algebra(cfg, &mut report),
        Check::Getters => fuzz_getters(cfg, &mut report),
    }
    report
}

fn fuzz_wrong_count(cfg: &FuzzConfig, report: &mut FuzzReport) {
    let gcfg = GenConfig {
        seed: cfg.seed,
        ..GenConfig::default()
    };
    let results = par_map(cfg.count, |case| {
        let table = gen_table(&gcfg, &mut case_rng(cfg.seed, case));
        let v = check_wrong_count(&table, &gen_options());
        let diverged = demand_diverges(&table);
        let violation = v.violation.clone().map(|message| {
            let small = shrink_table(&table, |t| check_wrong_count(t, &gen_options()).violation.is_some());
            Violation {
                case,
                message,
                counterexample: Some(format!(
                    "// wrong-count increase, seed {} case {case}; check with --no-prelude\n{}",
                    cfg.seed,
                    print_table(&small)
                )),
            }
        });
        (v, diverged, violation)
    });
    let (mut compiled, mut steps, mut decreases, mut diverged) = (0, 0, 0, 0);
    for (v, d, viol) in results {
        compiled += usize::from(v.compiled);
        steps += v.steps;
        decreases += v.decreases;
        diverged += usize::from(d);
        report.violations.extend(viol);
    }
    report.stats = vec![
        ("compiled".into(), pct(compiled, cfg.count)),
        ("compose steps".into(), steps.to_string()),
        ("steps lowering the count".into(), decreases.to_string()),
        (
            "demand-driven vs maximal disagreements".into(),
            pct(diverged, cfg.count),
        ),
    ];
}

fn fuzz_soundness(cfg: &FuzzConfig, report: &mut FuzzReport) {
    let results = par_map(cfg.count, |case| {
        let mut rng = case_rng(cfg.seed, case);
        let program = gen_coherent_program(&mut rng, 5);
        let v = check_soundness(&program, &mut rng, SOUNDNESS_EXPRS, SOUNDNESS_FUEL);
        let violation = if !v.compiled {
            let why = compile_str(&program.source, gen_options())
                .err()
                .map(|f| f.render().join("; "))
                .unwrap_or_default();
            Some(Violation {
                case,
                message: format!("generated program does not compile: {why}"),
                counterexample: Some(program.source.clone()),
            })
        } else if v.untyped > 0 {
            Some(Violation {
                case,
                message: format!("{} generated expressions do not type", v.untyped),
                counterexample: Some(program.source.clone()),
            })
        } else {
            v.violation.clone().map(|message| {
                let expr = message.split(": ").next().unwrap_or_default().to_string();
                Violation {
                    case,
                    counterexample: Some(shrink_soundness(&program.source, &expr)),
                    message,
                }
            })
        };
        (v, violation)
    });
    let (mut runs, mut steps, mut fuel) = (0, 0u64, 0);
    for (v, viol) in results {
        runs += v.runs;
        steps += v.steps;
        fuel += v.fuel_exhausted;
        report.violations.extend(viol);
    }
    report.stats = vec![
        ("expressions per program".into(), SOUNDNESS_EXPRS.to_string()),
        ("runs".into(), runs.to_string()),
        ("reduction steps".into(), steps.to_string()),
        ("out of fuel".into(), fuel.to_string()),
    ];
}

fn shrink_soundness(source: &str, expr: &str) -> String {
    let fails = |t: &crate::ast::DeclarationTable| {
        compile_str(&print_table(t), gen_options())
            .is_ok_and(|p| matches!(run_and_check(&p, expr, SOUNDNESS_FUEL), RunCheck::Violation(_)))
    };
    let table = parse_source(source, 0).expect("generated source parses");
    let small = if fails(&table) {
        shrink_table(&table, fails)
    } else {
        table
    };
    format!("// stuck or ill typed: {expr}\n{}", print_table(&small))
}

fn fuzz_algebra(cfg: &FuzzConfig, report: &mut FuzzReport) {
    let results = par_map(cfg.count, |case| {
        let mut rng = case_rng(cfg.seed, case);
        let a = gen_sum_literal(&mut rng, 2);
        let b = gen_sum_literal(&mut rng, 2);
        let c = gen_sum_literal(&mut rng, 2);
        let v = check_algebra(&a, &b, &c);
        let violation = v.violation.clone().map(|message| Violation {
            case,
            message,
            counterexample: None,
        });
        (v, violation)
    });
    let (mut defined, mut clashes, mut assoc, mut differs) = (0, 0, 0, 0);
    for (v, viol) in results {
        defined += v.sums_defined;
        clashes += v.clashes;
        assoc += v.associative_checked;
        differs += v.definedness_differs;
        report.violations.extend(viol);
    }
    report.stats = vec![
        ("pairs summed".into(), defined.to_string()),
        ("pairs clashing".into(), clashes.to_string()),
        ("triples compared by grouping".into(), assoc.to_string()),
        ("triples defined in one grouping only".into(), differs.to_string()),
    ];
}

fn fuzz_getters(cfg: &FuzzConfig, report: &mut FuzzReport) {
    let results = par_map(cfg.count, |case| {
        let v = check_getters(&mut case_rng(cfg.seed, case));
        let violation = v.violation.clone().map(|message| Violation {
            case,
            message,
            counterexample: None,
        });
        (v, violation)
    });
    let mut evals = 0;
    for (v, viol) in results {
        evals += v.evaluations;
        report.violations.extend(viol);
    }
    report.stats = vec![("evaluations".into(), evals.to_string())];
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_are_deterministic() {
        let cfg = FuzzConfig { seed: 11, count: 40 };
        for check in [Check::WrongCount, Check::Algebra, Check::Getters] {
            assert_eq!(fuzz(check, &cfg).to_string(), fuzz(check, &cfg).to_string());
        }
    }

    #[test]
    fn small_runs_find_nothing() {
        let cfg = FuzzConfig { seed: 2, count: 30 };
        for check in [Check::WrongCount, Check::Soundness, Check::Algebra, Check::Getters] {
            let r = fuzz(check, &cfg);
            assert!(r.violations.is_empty(), "{r}");
        }
    }
}
