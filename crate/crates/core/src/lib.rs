//! A checker, flattener and interpreter for 42μ, a small calculus in
//! which classes are only used and traits are only reused, and traits are
//! composed by flattening.

pub mod ast;
pub mod cli;
pub mod compose;
pub mod diag;
pub mod env;
pub mod eval;
pub mod harness;
pub mod parser;
pub mod pipeline;
pub mod prelude;
pub mod print;
pub mod typecheck;
pub mod wf;
