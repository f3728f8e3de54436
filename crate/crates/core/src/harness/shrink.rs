//! Greedy shrinking of failing tables: drop declarations, replace
//! compositions by an operand, drop members, for as long as the failure
//! persists.

use crate::ast::*;

fn member_count(lit: &CodeLiteral) -> usize {
    lit.members
        .iter()
        .map(|m| match m {
            Member::Nested(n) => 1 + member_count(&n.literal),
            Member::Method(_) => 1,
        })
        .sum()
}

/// Remove the `n`-th member in depth-first order; `n` counts down.
fn remove_member(lit: &mut CodeLiteral, n: &mut usize) -> bool {
    let mut i = 0;
    while i < lit.members.len() {
        if *n == 0 {
            lit.members.remove(i);
            return true;
        }
        *n -= 1;
        if let Member::Nested(nc) = &mut lit.members[i] {
            if remove_member(&mut nc.literal, n) {
                return true;
            }
        }
        i += 1;
    }
    false
}

/// Operands a composition node can be replaced by.
fn operands(e: &CodeExpr) -> Vec<CodeExpr> {
    match e {
        CodeExpr::Sum { left, right, .. } => vec![(**left).clone(), (**right).clone()],
        CodeExpr::Rename { inner, .. } | CodeExpr::SuperAs { inner, .. } => vec![(**inner).clone()],
        CodeExpr::Lit(_) | CodeExpr::TraitRef { .. } => Vec::new(),
    }
}

fn candidates(t: &DeclarationTable) -> Vec<DeclarationTable> {
    let mut out = Vec::new();
    for i in 0..t.decls.len() {
        let mut c = t.clone();
        c.decls.remove(i);
        out.push(c);
    }
    for i in 0..t.decls.len() {
        for op in operands(&t.decls[i].body) {
            let mut c = t.clone();
            c.decls[i].body = op;
            out.push(c);
        }
    }
    for i in 0..t.decls.len() {
        let total: usize = t.decls[i].body.literals().iter().map(|l| member_count(l)).sum();
        for k in 0..total {
            let mut c = t.clone();
            let mut n = k;
            let mut done = false;
            c.decls[i].body.literals_mut(&mut |l| {
                if !done {
                    done = remove_member(l, &mut n);
                }
            });
            out.push(c);
        }
    }
    out
}

/// Smallest table reachable by single greedy reductions on which `fails`
/// still holds. `fails(table)` must hold.
pub fn shrink_table(table: &DeclarationTable, fails: impl Fn(&DeclarationTable) -> bool) -> DeclarationTable {
    let mut current = table.clone();
    'outer: loop {
        for c in candidates(&current) {
            if fails(&c) {
                current = c;
                continue 'outer;
            }
        }
        return current;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_source;
    use crate::print::print_table;

    #[test]
    fn shrinks_to_the_offending_member() {
        let t = parse_source(
            "X={method K a() N={method K b() method K bad()} } y={method K c()} Z=Use y, {method K d()}",
            0,
        )
        .unwrap();
        let has_bad = |t: &DeclarationTable| print_table(t).contains("bad");
        let s = shrink_table(&t, has_bad);
        assert_eq!(print_table(&s), "X = {\n  N = {\n    method K bad()\n  }\n}\n");
    }
}
