//! Flattening: the sum, rename and super operators, single-step
//! reduction of composition expressions, and the compilation driver.

mod driver;
mod ops;
mod step;

pub use driver::{
    compile_program, referenced_classes, wrong_count, CompileOptions, CompileOutcome, ComposeStep, Demand,
};
pub use ops::{rename_nested, sum_literals, super_extract};
pub use step::{step_compose, Redex, Rule};
