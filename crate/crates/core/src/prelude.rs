//! Intrinsic classes `Int`, `Bool` and `Void`.
//!
//! The calculus itself has no literals; the prelude gives the corpus
//! programs something to compute with. Operators are ordinary method calls
//! on these receivers (`a + b` is `a.plus(b)`).

use crate::ast::{Intrinsic, TypePath};

pub const INT: &str = "Int";
pub const BOOL: &str = "Bool";
pub const VOID: &str = "Void";

pub fn is_prelude_type(name: &str) -> bool {
    matches!(name, INT | BOOL | VOID)
}

pub fn is_prelude_path(t: &TypePath) -> bool {
    t.segments.len() == 1 && is_prelude_type(t.head())
}

pub fn type_of(value: &Intrinsic) -> TypePath {
    TypePath::new([match value {
        Intrinsic::Int(_) => INT,
        Intrinsic::Bool(_) => BOOL,
        Intrinsic::Void => VOID,
    }])
}

/// Signature of an intrinsic instance method: parameter types and result.
pub fn method_sig(receiver: &str, name: &str) -> Option<(Vec<&'static str>, &'static str)> {
    Some(match (receiver, name) {
        (INT, "plus" | "minus" | "times" | "divide") => (vec![INT], INT),
        (INT, "equals" | "lessThan") => (vec![INT], BOOL),
        (BOOL, "and" | "or") => (vec![BOOL], BOOL),
        (BOOL, "not") => (vec![], BOOL),
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntrinsicError {
    DivisionByZero,
    Overflow,
}

/// Native result of an intrinsic call, `None` when the call is not intrinsic.
pub fn apply(receiver: &Intrinsic, name: &str, args: &[Intrinsic]) -> Option<Result<Intrinsic, IntrinsicError>> {
    use Intrinsic::*;
    let r = match (receiver, name, args) {
        (Int(a), "plus", [Int(b)]) => a.checked_add(*b).map(Int).ok_or(IntrinsicError::Overflow),
        (Int(a), "minus", [Int(b)]) => a.checked_sub(*b).map(Int).ok_or(IntrinsicError::Overflow),
        (Int(a), "times", [Int(b)]) => a.checked_mul(*b).map(Int).ok_or(IntrinsicError::Overflow),
        (Int(_), "divide", [Int(0)]) => Err(IntrinsicError::DivisionByZero),
        (Int(a), "divide", [Int(b)]) => a.checked_div(*b).map(Int).ok_or(IntrinsicError::Overflow),
        (Int(a), "equals", [Int(b)]) => Ok(Bool(a == b)),
        (Int(a), "lessThan", [Int(b)]) => Ok(Bool(a < b)),
        (Bool(a), "and", [Bool(b)]) => Ok(Bool(*a && *b)),
        (Bool(a), "or", [Bool(b)]) => Ok(Bool(*a || *b)),
        (Bool(a), "not", []) => Ok(Bool(!a)),
        _ => return None,
    };
    Some(r)
}
