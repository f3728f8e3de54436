//! Seeded random programs. Generators emit source text, which is then
//! parsed, so counterexamples are ordinary source files.

use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ast::*;
use crate::parser::{parse_literal, parse_source};
use crate::pipeline::{front_end, Options};

/// The generator stream for case `case` of a run seeded with `seed`.
pub fn case_rng(seed: u64, case: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(case);
    r
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub seed: u64,
    pub max_decls: usize,
    pub max_depth: usize,
    pub max_members: usize,
    pub max_arity: usize,
    pub p_abstract: f64,
    pub p_interface: f64,
    pub p_static: f64,
    /// Probability that a composition leaf names a trait.
    pub p_trait_ref: f64,
    /// Probability that a trait reference points forward or at itself.
    pub p_bad_ref: f64,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            seed: 0,
            max_decls: 6,
            max_depth: 2,
            max_members: 4,
            max_arity: 2,
            p_abstract: 0.4,
            p_interface: 0.2,
            p_static: 0.15,
            p_trait_ref: 0.6,
            p_bad_ref: 0.03,
        }
    }
}

const METHOD_NAMES: [&str; 4] = ["m0", "m1", "m2", "m3"];
const NESTED_NAMES: [&str; 3] = ["N0", "N1", "N2"];

/// Prelude-free options used for generated tables.
pub fn gen_options() -> Options {
    Options {
        with_prelude: false,
        ..Options::default()
    }
}

struct TableGen<'a> {
    cfg: &'a GenConfig,
    rng: &'a mut ChaCha8Rng,
    /// Names of all top-level classes in the table.
    classes: Vec<String>,
    /// Top-level interfaces declared by a literal so far, with sigs.
    interfaces: Vec<(String, Vec<String>)>,
    alias: usize,
    /// Generated bodies so far.
    texts: Vec<(String, String)>,
}

impl TableGen<'_> {
    fn pick<'b, T>(&mut self, xs: &'b [T]) -> &'b T {
        xs.choose(self.rng).expect("nonempty choice")
    }

    fn ty(&mut self, scope: &[Vec<String>]) -> String {
        let mut pool: Vec<String> = vec!["This".to_string()];
        for s in scope {
            pool.extend(s.iter().cloned());
        }
        pool.extend(self.classes.iter().cloned());
        self.pick(&pool).clone()
    }

    fn expr(&mut self, vars: &[String], scope: &[Vec<String>], depth: usize) -> String {
        let leaf = depth == 0 || self.rng.gen_bool(0.35);
        if leaf && !vars.is_empty() {
            return self.pick(vars).clone();
        }
        let name = *self.pick(&METHOD_NAMES);
        let arity = if depth == 0 {
            0
        } else {
            self.rng.gen_range(0..=self.cfg.max_arity.min(2))
        };
        let args: Vec<String> = (0..arity)
            .map(|_| self.expr(vars, scope, depth.saturating_sub(1)))
            .collect();
        if vars.is_empty() || self.rng.gen_bool(0.25) {
            let t = self.ty(scope);
            format!("{t}.{name}({})", args.join(", "))
        } else {
            let r = self.expr(vars, scope, depth.saturating_sub(1));
            format!("{r}.{name}({})", args.join(", "))
        }
    }

    /// A method whose key is not in `taken`.
    fn method(&mut self, interface: bool, scope: &[Vec<String>], taken: &mut Vec<(String, usize)>) -> Option<String> {
        let name = *self.pick(&METHOD_NAMES);
        let arity = self.rng.gen_range(0..=self.cfg.max_arity);
        if taken.contains(&(name.to_string(), arity)) {
            return None;
        }
        taken.push((name.to_string(), arity));
        let is_static = !interface && self.rng.gen_bool(self.cfg.p_static);
        let is_abstract = interface || self.rng.gen_bool(self.cfg.p_abstract);
        let ret = self.ty(scope);
        let mut params = Vec::new();
        let mut vars = Vec::new();
        for i in 0..arity {
            let t = self.ty(scope);
            params.push(format!("{t} x{i}"));
            vars.push(format!("x{i}"));
        }
        if !is_static {
            vars.push("this".to_string());
        }
        let mut out = String::new();
        if is_static {
            out.push_str("static ");
        }
        let _ = write!(out, "method {ret} {name}({})", params.join(", "));
        if !is_abstract {
            let body = self.expr(&vars, scope, 2);
            let _ = write!(out, " {{return {body};}}");
        }
        Some(out)
    }

    /// `scope` lists nested names visible from enclosing literals, outermost
    /// first. `implementable` are interfaces this literal may implement,
    /// with their method texts.
    fn literal(
        &mut self,
        depth: usize,
        scope: &[Vec<String>],
        implementable: &[(String, Vec<String>)],
        top: bool,
    ) -> String {
        let interface = self.rng.gen_bool(self.cfg.p_interface) && !top;
        let members = self.rng.gen_range(0..=self.cfg.max_members);
        // Nested classes first, so their names are in scope for the methods.
        let mut nested_names = Vec::new();
        if !interface && depth < self.cfg.max_depth {
            for _ in 0..members / 2 + usize::from(self.rng.gen_bool(0.3)) {
                let n = *self.pick(&NESTED_NAMES);
                if !nested_names.iter().any(|x: &String| x == n) {
                    nested_names.push(n.to_string());
                }
            }
        }
        let mut inner_scope = scope.to_vec();
        inner_scope.push(nested_names.clone());
        let mut parts = Vec::new();
        let mut own_interfaces: Vec<(String, Vec<String>)> = Vec::new();
        for n in &nested_names {
            let offered: Vec<(String, Vec<String>)> = if depth == 0 {
                own_interfaces.iter().filter(|(i, _)| i != n).cloned().collect()
            } else {
                Vec::new()
            };
            let lit = self.literal(depth + 1, &inner_scope, &offered, false);
            if lit.starts_with("{interface") {
                own_interfaces.push((n.clone(), interface_methods(&lit)));
            }
            parts.push(format!("{n}={lit}"));
        }
        let mut taken = Vec::new();
        let mut header = String::new();
        if interface {
            header.push_str("interface");
        } else {
            let mut pool: Vec<(String, Vec<String>)> = implementable.to_vec();
            if depth == 0 {
                pool.extend(own_interfaces.iter().cloned());
            }
            if !pool.is_empty() && self.rng.gen_bool(0.4) {
                let (name, methods) = self.pick(&pool).clone();
                // Qualification resolves the innermost name first.
                if !nested_names.contains(&name) || depth == 0 {
                    let _ = write!(header, "implements {name}");
                    for m in methods {
                        if let Some(key) = key_of(&m) {
                            taken.push(key);
                        }
                        parts.push(m);
                    }
                }
            }
        }
        for _ in 0..members.saturating_sub(nested_names.len()) {
            if let Some(m) = self.method(interface, &inner_scope, &mut taken) {
                parts.push(m);
            }
        }
        let sep = if header.is_empty() { "" } else { " " };
        format!("{{{header}{sep}{}}}", parts.join(" "))
    }

    fn code_expr(&mut self, traits: &[String], later: &[String], depth: usize) -> String {
        let node = depth > 0 && self.rng.gen_bool(0.5);
        if node {
            match self.rng.gen_range(0..3) {
                0 => {
                    let n = self.rng.gen_range(2..=3);
                    let parts: Vec<String> = (0..n).map(|_| self.code_expr(traits, later, depth - 1)).collect();
                    format!("Use {}", parts.join(", "))
                }
                1 => {
                    let inner = self.suffix_operand(traits, later, depth);
                    let mut present: Vec<String> = self
                        .operand_literals(&inner)
                        .iter()
                        .flat_map(|l| l.nested().map(|n| n.name.clone()))
                        .collect();
                    present.sort();
                    present.dedup();
                    let from = match self.target(&present) {
                        Some(n) => n,
                        None if present.is_empty() && self.rng.gen_bool(0.9) => return inner,
                        None => (*self.pick(&NESTED_NAMES)).to_string(),
                    };
                    let to = *self.pick(&NESTED_NAMES);
                    format!("{inner}[rename {from} into {to}]")
                }
                _ => {
                    let inner = self.suffix_operand(traits, later, depth);
                    let mut present: Vec<(String, usize)> = self
                        .operand_literals(&inner)
                        .iter()
                        .flat_map(|l| {
                            l.methods()
                                .filter(|m| !m.is_abstract())
                                .map(|m| (m.sig.name.clone(), m.sig.arity()))
                                .collect::<Vec<_>>()
                        })
                        .collect();
                    present.retain(|(m, _)| !inner.contains(&format!("super {m}")));
                    present.sort();
                    present.dedup();
                    let (target, arity) = match self.target(&present) {
                        Some(t) => t,
                        None if present.is_empty() && self.rng.gen_bool(0.9) => return inner,
                        None => (
                            (*self.pick(&METHOD_NAMES)).to_string(),
                            self.rng.gen_range(0..=self.cfg.max_arity),
                        ),
                    };
                    self.alias += 1;
                    let alias = format!("_{}{target}", self.alias);
                    if self.rng.gen_bool(0.5) {
                        format!("{inner}[super {target}/{arity} as {alias}]")
                    } else {
                        format!("{inner}[super {target} as {alias}]")
                    }
                }
            }
        } else if !traits.is_empty() && self.rng.gen_bool(self.cfg.p_trait_ref) {
            if !later.is_empty() && self.rng.gen_bool(self.cfg.p_bad_ref) {
                self.pick(later).clone()
            } else {
                self.pick(traits).clone()
            }
        } else {
            let ifaces = self.interfaces.clone();
            self.literal(0, &[], &ifaces, true)
        }
    }

    /// The literal `e` denotes, when it is a literal or names one.
    /// Literal leaves of `e`, following trait references. Renames and
    /// supers are ignored, so this over-approximates the members.
    fn operand_literals(&self, e: &str) -> Vec<CodeLiteral> {
        let mut out = Vec::new();
        let mut work = vec![e.to_string()];
        let mut seen = Vec::new();
        while let Some(e) = work.pop() {
            let Ok(t) = parse_source(&format!("Q={e}"), 0) else {
                continue;
            };
            let body = &t.decls[0].body;
            out.extend(body.literals().into_iter().cloned());
            for (name, _) in body.trait_refs() {
                if !seen.iter().any(|s| s == name) {
                    seen.push(name.to_string());
                    if let Some((_, text)) = self.texts.iter().find(|(n, _)| n == name) {
                        work.push(text.clone());
                    }
                }
            }
        }
        out
    }

    /// One of `present`, or now and then none so that bad targets occur.
    fn target<T: Clone>(&mut self, present: &[T]) -> Option<T> {
        if present.is_empty() || self.rng.gen_bool(0.05) {
            None
        } else {
            Some(self.pick(present).clone())
        }
    }

    fn suffix_operand(&mut self, traits: &[String], later: &[String], depth: usize) -> String {
        let e = self.code_expr(traits, later, depth - 1);
        if e.starts_with("Use ") {
            format!("({e})")
        } else {
            e
        }
    }
}

/// The method texts of a generated interface literal.
fn interface_methods(text: &str) -> Vec<String> {
    let body = text.trim_start_matches("{interface").trim_end_matches('}').trim();
    body.split("method ")
        .filter(|s| !s.trim().is_empty())
        .map(|s| format!("method {}", s.trim()))
        .collect()
}

fn key_of(method_text: &str) -> Option<(String, usize)> {
    let open = method_text.find('(')?;
    let close = method_text.find(')')?;
    let name = method_text[..open].split_whitespace().last()?.to_string();
    let inner = method_text[open + 1..close].trim();
    let arity = if inner.is_empty() { 0 } else { inner.split(',').count() };
    Some((name, arity))
}

/// Source text of a random table; see [`gen_table`].
pub fn gen_table_source(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(2..=cfg.max_decls.max(2));
    let kinds: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let names: Vec<String> = kinds
        .iter()
        .enumerate()
        .map(|(i, &class)| if class { format!("C{i}") } else { format!("t{i}") })
        .collect();
    let classes = names.iter().filter(|n| is_class_name(n)).cloned().collect();
    let mut g = TableGen {
        cfg,
        rng,
        classes,
        interfaces: Vec::new(),
        alias: 0,
        texts: Vec::new(),
    };
    let mut out = String::new();
    for i in 0..n {
        let traits: Vec<String> = names[..i].iter().filter(|n| is_trait_name(n)).cloned().collect();
        let later: Vec<String> = names[i..].iter().filter(|n| is_trait_name(n)).cloned().collect();
        let body = if kinds[i] && g.rng.gen_bool(cfg.p_interface) {
            let scope: Vec<Vec<String>> = Vec::new();
            let mut taken = Vec::new();
            let k = g.rng.gen_range(0..=cfg.max_members);
            let ms: Vec<String> = (0..k).filter_map(|_| g.method(true, &scope, &mut taken)).collect();
            // Copies go into other literals, where `This` means something else.
            let copies = ms.iter().map(|m| m.replace("This", &names[i])).collect();
            g.interfaces.push((names[i].clone(), copies));
            format!("{{interface {}}}", ms.join(" "))
        } else {
            g.code_expr(&traits, &later, 2)
        };
        let _ = writeln!(out, "{}={body}", names[i]);
        g.texts.push((names[i].clone(), body));
    }
    out
}

/// A random table that passes the front end (prelude-free, with interface
/// methods imported). Drawing repeats until one does; after many failed
/// attempts the minimal table `C0={}` is returned.
pub fn gen_table(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> DeclarationTable {
    for _ in 0..64 {
        let text = gen_table_source(cfg, rng);
        if let Ok(t) = parse_source(&text, 0) {
            if front_end(&t, &gen_options()).is_ok() {
                return t;
            }
        }
    }
    parse_source("C0={}", 0).expect("fallback parses")
}

/// A random literal for the sum laws: small name pools so that members
/// meet often, with bodies, abstract methods, nesting and interfaces.
pub fn gen_sum_literal(rng: &mut ChaCha8Rng, depth: usize) -> CodeLiteral {
    let text = sum_literal_text(rng, depth);
    parse_literal(&text).expect("generated literal parses")
}

fn sum_literal_text(rng: &mut ChaCha8Rng, depth: usize) -> String {
    let interface = rng.gen_bool(0.15);
    let mut parts = Vec::new();
    let mut taken: Vec<(&str, usize)> = Vec::new();
    for _ in 0..rng.gen_range(0..=3) {
        let name = ["a", "b", "c"][rng.gen_range(0..3)];
        let arity = rng.gen_range(0..=1);
        if taken.contains(&(name, arity)) {
            continue;
        }
        taken.push((name, arity));
        let ret = ["This", "K", "This.N"][rng.gen_range(0..3)];
        let param = ["x", "y"][rng.gen_range(0..2)];
        let params = if arity == 1 {
            format!("K {param}")
        } else {
            String::new()
        };
        let is_static = !interface && rng.gen_bool(0.1);
        let st = if is_static { "static " } else { "" };
        let abstract_ = interface || rng.gen_bool(0.6);
        if abstract_ {
            parts.push(format!("{st}method {ret} {name}({params})"));
        } else {
            let body = if arity == 1 {
                format!("{param}.k{}()", rng.gen_range(0..2))
            } else {
                format!("K.k{}()", rng.gen_range(0..2))
            };
            parts.push(format!("{st}method {ret} {name}({params}) {{return {body};}}"));
        }
    }
    if !interface && depth > 0 {
        for n in ["N", "M"] {
            if rng.gen_bool(0.35) {
                parts.push(format!("{n}={}", sum_literal_text(rng, depth - 1)));
            }
        }
    }
    let mut header = String::new();
    if interface {
        header.push_str("interface ");
    }
    if rng.gen_bool(0.3) {
        let mut imps: Vec<&str> = ["I", "J"].iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
        if imps.is_empty() {
            imps.push("I");
        }
        let _ = write!(header, "implements {} ", imps.join(", "));
    }
    format!("{{{header}{}}}", parts.join(" "))
}

/// A class `P` with a factory over Int and Bool fields, a getter and a
/// wither per field, members in random order. Returns the source and the
/// field names and types in factory order.
pub fn gen_factory(rng: &mut ChaCha8Rng) -> (String, Vec<(String, &'static str)>) {
    let n = rng.gen_range(1..=4);
    let mut names: Vec<String> = ["x", "y", "size", "flag", "count", "z"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    names.shuffle(rng);
    let fields: Vec<(String, &'static str)> = names
        .into_iter()
        .take(n)
        .map(|f| {
            let ty = if rng.gen_bool(0.7) { "Int" } else { "Bool" };
            (f, ty)
        })
        .collect();
    let mut members = Vec::new();
    let params: Vec<String> = fields.iter().map(|(f, t)| format!("{t} {f}")).collect();
    members.push(format!("static method P of({})", params.join(", ")));
    for (f, t) in &fields {
        members.push(format!("method {t} {f}()"));
        let cap = format!("{}{}", f[..1].to_uppercase(), &f[1..]);
        members.push(format!("method P with{cap}({t} that)"));
    }
    members.shuffle(rng);
    (format!("P={{ {} }}", members.join(" ")), fields)
}

/// A random constant of prelude type `ty`.
pub fn gen_constant(rng: &mut ChaCha8Rng, ty: &str) -> String {
    match ty {
        "Bool" => if rng.gen_bool(0.5) { "true" } else { "false" }.to_string(),
        _ => rng.gen_range(-1000i64..=1000).to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::print::print_table;
    use crate::wf::wf_literal;

    #[test]
    fn equal_seeds_give_equal_tables() {
        let cfg = GenConfig::default();
        for case in 0..20 {
            let a = gen_table(&cfg, &mut case_rng(7, case));
            let b = gen_table(&cfg, &mut case_rng(7, case));
            assert_eq!(print_table(&a), print_table(&b));
        }
    }

    #[test]
    fn generated_literals_are_well_formed() {
        let cfg = GenConfig::default();
        for case in 0..200 {
            let t = gen_table(&cfg, &mut case_rng(1, case));
            for d in &t.decls {
                for l in d.body.literals() {
                    assert!(wf_literal(l).is_empty(), "{}", print_table(&t));
                }
            }
        }
    }

    #[test]
    fn depth_zero_tables_have_flat_literals() {
        let cfg = GenConfig {
            max_depth: 0,
            ..GenConfig::default()
        };
        let t = gen_table(&cfg, &mut case_rng(0, 0));
        for d in &t.decls {
            for l in d.body.literals() {
                assert_eq!(l.nested().count(), 0);
            }
        }
    }

    #[test]
    fn few_fallbacks() {
        let cfg = GenConfig::default();
        let mut fallback = 0;
        for case in 0..200 {
            let t = gen_table(&cfg, &mut case_rng(3, case));
            if print_table(&t) == "C0 = {}\n" {
                fallback += 1;
            }
        }
        assert!(fallback < 10, "{fallback}");
    }

    #[test]
    fn factories_parse() {
        for case in 0..50 {
            let (src, fields) = gen_factory(&mut case_rng(0, case));
            let t = parse_source(&src, 0).unwrap();
            let members = t.decls[0].body.as_literal().unwrap().members.len();
            assert_eq!(members, 1 + 2 * fields.len());
        }
    }
}
