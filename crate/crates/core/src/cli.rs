//! Command-line driver. Exit codes: 0 success, 1 program error, 2 usage
//! error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::ast::TypePath;
use crate::compose::Demand;
use crate::eval::DEFAULT_FUEL;
use crate::harness::{self, Check, FuzzConfig};
use crate::pipeline::{compile_files, Failure, Options, Program};
use crate::print::{print_expr_relative, print_surface_table, print_table};
use crate::typecheck::abstract_state;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROGRAM: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "l42mu", version, about = "Check, flatten and run 42μ programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse, flatten and type-check.
    Check {
        #[command(flatten)]
        input: Input,
        /// Print the abstract-state classification of a class path.
        #[arg(long, value_name = "CLASS")]
        explain_coherence: Option<String>,
    },
    /// Print the flattened program.
    Flatten {
        #[command(flatten)]
        input: Input,
        /// Print composition steps on standard error.
        #[arg(long)]
        trace: bool,
        /// Print every nested path in full, rooted at `This`.
        #[arg(long)]
        qualified: bool,
    },
    /// Evaluate a closed expression against the program.
    Run {
        #[command(flatten)]
        input: Input,
        #[arg(short = 'e', long = "expr", value_name = "EXPR")]
        expr: String,
        /// Print each reduction step.
        #[arg(long)]
        steps: bool,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        /// Resolve bare names in the expression inside this top-level class.
        #[arg(long, value_name = "CLASS")]
        open: Option<String>,
    },
    /// Run a property check on generated programs.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, value_enum)]
        check: CheckArg,
        /// Directory for minimized counterexamples.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Input {
    #[arg(required = true, value_name = "FILE")]
    files: Vec<PathBuf>,
    /// Require literals to list the methods of the interfaces they implement.
    #[arg(long)]
    strict: bool,
    /// Disable Int, Bool, Void and the operators.
    #[arg(long)]
    no_prelude: bool,
    /// Type-check every typeable earlier declaration, not just the used ones.
    #[arg(long)]
    maximal: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CheckArg {
    /// Well-typed closed expressions never get stuck.
    #[value(alias = "a1")]
    Soundness,
    /// No composition step adds ill-typed literals.
    #[value(alias = "a2")]
    WrongCount,
    Algebra,
    Getters,
}

impl From<CheckArg> for Check {
    fn from(c: CheckArg) -> Check {
        match c {
            CheckArg::Soundness => Check::Soundness,
            CheckArg::WrongCount => Check::WrongCount,
            CheckArg::Algebra => Check::Algebra,
            CheckArg::Getters => Check::Getters,
        }
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write counterexamples: {0}")]
    Write(std::io::Error),
}

impl Input {
    fn options(&self) -> Options {
        self.options_with(true)
    }

    fn options_with(&self, final_check: bool) -> Options {
        Options {
            strict: self.strict,
            with_prelude: !self.no_prelude,
            demand: if self.maximal {
                Demand::Maximal
            } else {
                Demand::DemandDriven
            },
            final_check,
        }
    }

    fn read(&self) -> Result<Vec<(String, String)>, CliError> {
        self.files
            .iter()
            .map(|p| {
                let path = p.display().to_string();
                std::fs::read_to_string(p)
                    .map(|text| (path.clone(), text))
                    .map_err(|source| CliError::Read { path, source })
            })
            .collect()
    }

    fn compile(&self, final_check: bool, err: &mut dyn Write) -> Result<Program, i32> {
        let files = match self.read() {
            Ok(f) => f,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return Err(EXIT_USAGE);
            }
        };
        compile_files(&files, self.options_with(final_check)).map_err(|f| {
            report(&f, err);
            EXIT_PROGRAM
        })
    }
}

fn report(f: &Failure, err: &mut dyn Write) {
    for line in f.render() {
        let _ = writeln!(err, "{line}");
    }
}

/// Run the command line `args` (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match cli.command {
        Command::Check {
            input,
            explain_coherence,
        } => check(&input, explain_coherence.as_deref(), out, err),
        Command::Flatten {
            input,
            trace,
            qualified,
        } => {
            // Traits need not be coherent classes, so only what the
            // compositions demand is checked.
            let p = match input.compile(false, err) {
                Ok(p) => p,
                Err(code) => return code,
            };
            if trace {
                for s in &p.steps {
                    let _ = writeln!(err, "{s}");
                }
            }
            let text = if qualified {
                print_table(&p.flat)
            } else {
                print_surface_table(&p.flat)
            };
            let _ = write!(out, "{text}");
            EXIT_OK
        }
        Command::Run {
            input,
            expr,
            steps,
            fuel,
            open,
        } => {
            let p = match input.compile(true, err) {
                Ok(p) => p,
                Err(code) => return code,
            };
            match p.run(&expr, open.as_deref(), fuel, steps) {
                Ok((outcome, open)) => {
                    for t in &outcome.trace {
                        let _ = writeln!(
                            out,
                            "{:>4} {:<9} {}",
                            t.index,
                            t.rule.to_string(),
                            print_expr_relative(&t.expr, open.as_deref())
                        );
                    }
                    let _ = writeln!(out, "{}", print_expr_relative(&outcome.value, open.as_deref()));
                    EXIT_OK
                }
                Err(d) => {
                    let mut sources = p.sources.clone();
                    sources.add("<expr>");
                    let _ = writeln!(err, "{}", d.render(&sources));
                    EXIT_PROGRAM
                }
            }
        }
        Command::Fuzz {
            seed,
            count,
            check,
            out: dir,
        } => {
            let report = harness::fuzz(check.into(), &FuzzConfig { seed, count });
            let _ = write!(out, "{report}");
            if let Some(dir) = dir {
                if let Err(e) = report.write_counterexamples(&dir).map_err(CliError::Write) {
                    let _ = writeln!(err, "error: {e}");
                    return EXIT_USAGE;
                }
            }
            if report.violations.is_empty() {
                EXIT_OK
            } else {
                EXIT_PROGRAM
            }
        }
    }
}

fn check(input: &Input, explain: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let files = match input.read() {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let result = compile_files(&files, input.options());
    if let Some(path) = explain {
        let table = match &result {
            Ok(p) => Some(&p.flat),
            Err(f) => f.partial.as_ref(),
        };
        let t = TypePath::parse(path);
        let lit = table.and_then(|tab| {
            let top = tab.get(t.head())?.body.as_literal()?;
            let named = top.subst_this(&TypePath::new([t.head()]));
            named.navigate(&t.segments[1..]).cloned()
        });
        match lit {
            Some(l) => {
                let _ = write!(out, "{}", abstract_state(&t, &l));
            }
            None => {
                let _ = writeln!(err, "error: no flattened class `{path}`");
                if result.is_ok() {
                    return EXIT_USAGE;
                }
            }
        }
    }
    match result {
        Ok(p) => {
            let _ = writeln!(out, "ok: {} declarations", p.flat.decls.len());
            EXIT_OK
        }
        Err(f) => {
            report(&f, err);
            EXIT_PROGRAM
        }
    }
}
