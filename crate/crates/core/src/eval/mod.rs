//! Small-step reduction over a flattened class table.
//!
//! Values are calls to abstract static methods whose arguments are values,
//! plus prelude constants. Instance calls on a value built by factory `T.f`
//! run the method body, or read (getter) or replace (wither) one of the
//! factory arguments.

use std::fmt;

use crate::ast::*;
use crate::diag::{Code, Diagnostic};
use crate::env::ClassTable;
use crate::prelude::{self, IntrinsicError};

pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepRule {
    /// Static method with a body.
    StaticMethod,
    /// Instance method with a body.
    Method,
    Getter,
    Wither,
    Intrinsic,
}

impl fmt::Display for StepRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepRule::StaticMethod => "S-M",
            StepRule::Method => "M",
            StepRule::Getter => "M-getter",
            StepRule::Wither => "M-wither",
            StepRule::Intrinsic => "intrinsic",
        })
    }
}

pub fn is_value(classes: &ClassTable, e: &Expr) -> bool {
    match e {
        Expr::Const { .. } => true,
        Expr::StaticCall { ty, name, args, .. } => {
            let abstract_static = classes
                .scope()
                .literal(ty)
                .and_then(|l| l.method(name, args.len()))
                .is_some_and(|m| m.sig.is_static && m.is_abstract());
            abstract_static && args.iter().all(|a| is_value(classes, a))
        }
        _ => false,
    }
}

fn stuck(span: Span, msg: String) -> Diagnostic {
    Diagnostic::new(Code::Stuck, span, msg)
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(first) => first.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Reduce the leftmost redex. `Ok(None)` means `e` is a value.
pub fn step_expr(classes: &ClassTable, e: &Expr) -> Result<Option<(Expr, StepRule)>, Diagnostic> {
    match e {
        Expr::Const { .. } => Ok(None),
        Expr::Var { name, span } => Err(stuck(*span, format!("free variable `{name}`"))),
        Expr::StaticCall { ty, name, args, span } => {
            if let Some(r) = step_args(classes, args)? {
                let (args, rule) = r;
                let e = Expr::StaticCall {
                    ty: ty.clone(),
                    name: name.clone(),
                    args,
                    span: *span,
                };
                return Ok(Some((e, rule)));
            }
            let m = classes
                .scope()
                .literal(ty)
                .and_then(|l| l.method(name, args.len()))
                .filter(|m| m.sig.is_static)
                .ok_or_else(|| stuck(*span, format!("no static method `{ty}.{name}/{}`", args.len())))?;
            match &m.body {
                None => Ok(None),
                Some(body) => {
                    let bindings: Vec<(&str, &Expr)> = m.sig.params.iter().map(|p| p.name.as_str()).zip(args).collect();
                    Ok(Some((body.subst(&bindings), StepRule::StaticMethod)))
                }
            }
        }
        Expr::Call {
            receiver,
            name,
            args,
            span,
        } => {
            if !is_value(classes, receiver) {
                let Some((r, rule)) = step_expr(classes, receiver)? else {
                    unreachable!("non-values always step or get stuck");
                };
                let e = Expr::Call {
                    receiver: Box::new(r),
                    name: name.clone(),
                    args: args.clone(),
                    span: *span,
                };
                return Ok(Some((e, rule)));
            }
            if let Some((args, rule)) = step_args(classes, args)? {
                let e = Expr::Call {
                    receiver: receiver.clone(),
                    name: name.clone(),
                    args,
                    span: *span,
                };
                return Ok(Some((e, rule)));
            }
            invoke(classes, receiver, name, args, *span).map(Some)
        }
    }
}

fn step_args(classes: &ClassTable, args: &[Expr]) -> Result<Option<(Vec<Expr>, StepRule)>, Diagnostic> {
    let Some(i) = args.iter().position(|a| !is_value(classes, a)) else {
        return Ok(None);
    };
    let Some((a, rule)) = step_expr(classes, &args[i])? else {
        unreachable!("non-values always step or get stuck");
    };
    let mut out = args.to_vec();
    out[i] = a;
    Ok(Some((out, rule)))
}

fn invoke(
    classes: &ClassTable,
    receiver: &Expr,
    name: &str,
    args: &[Expr],
    span: Span,
) -> Result<(Expr, StepRule), Diagnostic> {
    match receiver {
        Expr::Const { value, .. } => {
            let consts: Option<Vec<Intrinsic>> = args
                .iter()
                .map(|a| match a {
                    Expr::Const { value, .. } => Some(*value),
                    _ => None,
                })
                .collect();
            let result = consts.and_then(|c| prelude::apply(value, name, &c));
            match result {
                Some(Ok(v)) => Ok((Expr::Const { value: v, span }, StepRule::Intrinsic)),
                Some(Err(IntrinsicError::DivisionByZero)) => {
                    Err(stuck(span, format!("division by zero in `{value}.divide(0)`")))
                }
                Some(Err(IntrinsicError::Overflow)) => {
                    Err(stuck(span, format!("integer overflow in `{value}.{name}(..)`")))
                }
                None => Err(stuck(
                    span,
                    format!("`{}` has no method `{name}/{}`", prelude::type_of(value), args.len()),
                )),
            }
        }
        Expr::StaticCall {
            ty,
            name: factory,
            args: fields,
            ..
        } => {
            let lit = classes
                .scope()
                .literal(ty)
                .ok_or_else(|| stuck(span, format!("unknown class `{ty}`")))?;
            let m = lit
                .method(name, args.len())
                .filter(|m| !m.sig.is_static)
                .ok_or_else(|| stuck(span, format!("`{ty}` has no method `{name}/{}`", args.len())))?;
            if let Some(body) = &m.body {
                let mut bindings: Vec<(&str, &Expr)> = vec![(THIS_VAR, receiver)];
                bindings.extend(m.sig.params.iter().map(|p| p.name.as_str()).zip(args));
                return Ok((body.subst(&bindings), StepRule::Method));
            }
            let f = lit
                .method(factory, fields.len())
                .expect("values are built by abstract static methods");
            let params = &f.sig.params;
            if args.is_empty() {
                if let Some(i) = params.iter().position(|p| p.name == *name) {
                    return Ok((fields[i].clone(), StepRule::Getter));
                }
            } else if args.len() == 1 {
                if let Some(i) = params
                    .iter()
                    .position(|p| *name == format!("with{}", capitalize(&p.name)))
                {
                    let mut updated = fields.clone();
                    updated[i] = args[0].clone();
                    let e = Expr::StaticCall {
                        ty: ty.clone(),
                        name: factory.clone(),
                        args: updated,
                        span,
                    };
                    return Ok((e, StepRule::Wither));
                }
            }
            Err(stuck(
                span,
                format!(
                    "abstract method `{ty}.{name}/{}` is neither a getter nor a wither of `{factory}`",
                    args.len()
                ),
            ))
        }
        _ => unreachable!("receiver is a value"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub index: u64,
    pub rule: StepRule,
    /// The whole term after the step.
    pub expr: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub value: Expr,
    pub steps: u64,
    pub trace: Vec<TraceStep>,
}

/// A single-owner reduction state.
#[derive(Clone, Debug)]
pub struct Machine<'a> {
    pub classes: &'a ClassTable,
    pub expr: Expr,
    pub fuel: u64,
    pub steps: u64,
    pub trace: Option<Vec<TraceStep>>,
}

impl<'a> Machine<'a> {
    pub fn new(classes: &'a ClassTable, expr: Expr, fuel: u64) -> Machine<'a> {
        Machine {
            classes,
            expr,
            fuel,
            steps: 0,
            trace: None,
        }
    }

    pub fn traced(mut self) -> Machine<'a> {
        self.trace = Some(Vec::new());
        self
    }

    /// `Ok(false)` once the term is a value.
    pub fn step(&mut self) -> Result<bool, Diagnostic> {
        if is_value(self.classes, &self.expr) {
            return Ok(false);
        }
        if self.fuel == 0 {
            return Err(Diagnostic::new(
                Code::FuelExhausted,
                self.expr.span(),
                format!("no value after {} steps", self.steps),
            ));
        }
        match step_expr(self.classes, &self.expr)? {
            None => Ok(false),
            Some((next, rule)) => {
                self.fuel -= 1;
                self.steps += 1;
                if let Some(t) = &mut self.trace {
                    t.push(TraceStep {
                        index: self.steps,
                        rule,
                        expr: next.clone(),
                    });
                }
                self.expr = next;
                Ok(true)
            }
        }
    }

    pub fn run(mut self) -> Result<RunOutcome, Diagnostic> {
        while self.step()? {}
        Ok(RunOutcome {
            value: self.expr,
            steps: self.steps,
            trace: self.trace.unwrap_or_default(),
        })
    }
}

/// Reduce to a value or fail with `Stuck` / `FuelExhausted`.
pub fn run(classes: &ClassTable, e: &Expr, fuel: u64, trace: bool) -> Result<RunOutcome, Diagnostic> {
    let m = Machine::new(classes, e.clone(), fuel);
    if trace { m.traced() } else { m }.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_expr, parse_source, qualify_names};
    use crate::print::print_expr;

    fn classes(src: &str) -> ClassTable {
        let t = qualify_names(&parse_source(src, 0).unwrap(), true).unwrap();
        ClassTable::from_table(&t, true)
    }

    const POINT: &str = "Point={method int x() method int y()
        method Point withX(int that) method Point withY(int that)
        static method Point of(int x, int y)
        method Point sum(Point that){return Point.of(this.x() + that.x(), this.y() + that.y());}
        method int loop(){return this.loop();}}";

    fn eval(e: &str) -> Result<String, Diagnostic> {
        let ct = classes(POINT);
        run(&ct, &parse_expr(e, 0).unwrap(), 10_000, false).map(|o| print_expr(&o.value))
    }

    #[test]
    fn values() {
        let ct = classes(POINT);
        assert!(is_value(&ct, &parse_expr("Point.of(1, 2)", 0).unwrap()));
        assert!(!is_value(&ct, &parse_expr("Point.of(1, 2).x()", 0).unwrap()));
        assert!(!is_value(&ct, &parse_expr("Point.of(1 + 1, 2)", 0).unwrap()));
    }

    #[test]
    fn getters_and_withers() {
        assert_eq!(eval("Point.of(1, 2).x()").unwrap(), "1");
        assert_eq!(eval("Point.of(1, 2).withX(5)").unwrap(), "Point.of(5, 2)");
        assert_eq!(eval("Point.of(1, 2).withY(7).y()").unwrap(), "7");
    }

    #[test]
    fn method_bodies() {
        assert_eq!(eval("Point.of(1, 2).sum(Point.of(3, 4))").unwrap(), "Point.of(4, 6)");
    }

    #[test]
    fn a_value_runs_in_zero_steps() {
        let ct = classes(POINT);
        let o = run(&ct, &parse_expr("Point.of(1, 2)", 0).unwrap(), 5, true).unwrap();
        assert_eq!(o.steps, 0);
        assert!(o.trace.is_empty());
    }

    #[test]
    fn self_call_exhausts_fuel() {
        assert_eq!(eval("Point.of(1, 2).loop()").unwrap_err().code, Code::FuelExhausted);
    }

    #[test]
    fn intrinsics() {
        assert_eq!(eval("1 + 2").unwrap(), "3");
        assert_eq!(eval("true && false").unwrap(), "false");
        assert_eq!(eval("1 / 0").unwrap_err().code, Code::Stuck);
    }

    #[test]
    fn trace_records_each_step() {
        let ct = classes(POINT);
        let o = run(&ct, &parse_expr("Point.of(1, 2).withX(5).x()", 0).unwrap(), 10, true).unwrap();
        let rules: Vec<String> = o.trace.iter().map(|t| t.rule.to_string()).collect();
        assert_eq!(rules, ["M-wither", "M-getter"]);
        assert_eq!(o.steps, 2);
    }
}
