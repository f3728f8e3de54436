//! Prelude-free programs of coherent classes, and closed well-typed
//! expressions over them.
//!
//! Class `Ci` has fields of lower-indexed types only, so every value is
//! finite. A method body calls only methods of lower classes or earlier
//! methods of its own class, and `base()` bodies call nothing, so every
//! closed expression terminates.

use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

type Choice<'a> = Box<dyn Fn(&mut ChaCha8Rng) -> String + 'a>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ty {
    Class(usize),
    Iface,
}

#[derive(Clone, Debug)]
pub struct Op {
    pub class: usize,
    pub index: usize,
    pub name: String,
    pub is_static: bool,
    pub params: Vec<Ty>,
    pub ret: Ty,
}

#[derive(Clone, Debug)]
pub struct ClassSpec {
    pub fields: Vec<Ty>,
    pub getters: Vec<usize>,
    pub withers: Vec<usize>,
    pub implements: bool,
    pub ops: Vec<Op>,
    pub as_traits: bool,
}

/// A generated program with the shape needed to write expressions for it.
#[derive(Clone, Debug)]
pub struct CoherentProgram {
    pub classes: Vec<ClassSpec>,
    pub has_iface: bool,
    pub source: String,
}

/// Where an expression is written: which class's code, which of its
/// methods may be called, and the variables in scope.
struct Ctx<'a> {
    /// Highest class index the code may mention.
    bound: usize,
    /// Inside the code of this class, whose type is written `This`.
    own: Option<usize>,
    vars: &'a [(String, Ty)],
    this: Option<usize>,
    /// Callable ops: all of classes below `class`, and of `class` those
    /// with a lower index. `None` forbids op and `base()` calls.
    ops_before: Option<(usize, usize)>,
}

impl CoherentProgram {
    fn subtype(&self, a: Ty, b: Ty) -> bool {
        match (a, b) {
            (x, y) if x == y => true,
            (Ty::Class(c), Ty::Iface) => self.classes[c].implements,
            _ => false,
        }
    }

    fn implementers(&self, bound: usize) -> Vec<usize> {
        (0..=bound.min(self.classes.len() - 1))
            .filter(|&c| self.classes[c].implements)
            .collect()
    }

    fn buildable(&self, t: Ty, bound: usize) -> bool {
        match t {
            Ty::Class(c) => c <= bound,
            Ty::Iface => self.has_iface && !self.implementers(bound).is_empty(),
        }
    }

    fn name(&self, t: Ty, own: Option<usize>) -> String {
        match t {
            Ty::Class(c) if Some(c) == own => "This".to_string(),
            Ty::Class(c) => format!("C{c}"),
            Ty::Iface => "I".to_string(),
        }
    }

    fn callable(&self, ctx: &Ctx<'_>) -> Vec<&Op> {
        let Some((class, index)) = ctx.ops_before else {
            return Vec::new();
        };
        self.classes[..=class]
            .iter()
            .flat_map(|c| c.ops.iter())
            .filter(|o| o.class < class || o.index < index)
            .collect()
    }

    fn expr(&self, rng: &mut ChaCha8Rng, t: Ty, ctx: &Ctx<'_>, depth: usize) -> String {
        self.expr_below(rng, t, ctx, depth, ctx.bound)
    }

    /// Constructors nested in the result only build classes up to `limit`.
    fn expr_below(&self, rng: &mut ChaCha8Rng, t: Ty, ctx: &Ctx<'_>, depth: usize, limit: usize) -> String {
        let mut options: Vec<Choice<'_>> = Vec::new();
        for (v, vt) in ctx.vars {
            if self.subtype(*vt, t) {
                let v = v.clone();
                options.push(Box::new(move |_| v.clone()));
            }
        }
        if let Some(c) = ctx.this {
            if self.subtype(Ty::Class(c), t) {
                options.push(Box::new(|_| "this".to_string()));
            }
        }
        if depth > 0 {
            for c in 0..=ctx.bound.min(self.classes.len() - 1) {
                let spec = &self.classes[c];
                for &g in &spec.getters {
                    if self.subtype(spec.fields[g], t) {
                        options.push(Box::new(move |r| {
                            let recv = self.expr(r, Ty::Class(c), ctx, depth - 1);
                            format!("{recv}.f{g}()")
                        }));
                    }
                }
                if t == Ty::Class(c) {
                    for &w in &spec.withers {
                        options.push(Box::new(move |r| {
                            let recv = self.expr(r, Ty::Class(c), ctx, depth - 1);
                            let v = self.expr(r, spec.fields[w], ctx, depth - 1);
                            format!("{recv}.withF{w}({v})")
                        }));
                    }
                }
            }
            for op in self.callable(ctx) {
                if self.subtype(op.ret, t) {
                    options.push(Box::new(move |r| {
                        let args: Vec<String> = op.params.iter().map(|&p| self.expr(r, p, ctx, depth - 1)).collect();
                        if op.is_static {
                            format!(
                                "{}.{}({})",
                                self.name(Ty::Class(op.class), ctx.own),
                                op.name,
                                args.join(", ")
                            )
                        } else {
                            let recv = self.expr(r, Ty::Class(op.class), ctx, depth - 1);
                            format!("{recv}.{}({})", op.name, args.join(", "))
                        }
                    }));
                }
            }
            if ctx.ops_before.is_some()
                && self.has_iface
                && self.subtype(Ty::Class(0), t)
                && self.buildable(Ty::Iface, ctx.bound)
            {
                options.push(Box::new(move |r| {
                    let recv = self.expr(r, Ty::Iface, ctx, depth - 1);
                    format!("{recv}.base()")
                }));
            }
        }
        let constructible = match t {
            Ty::Class(c) => c <= limit,
            Ty::Iface => !self.implementers(limit).is_empty(),
        };
        if constructible && (options.is_empty() || rng.gen_bool(0.3)) {
            return self.construct(rng, t, ctx, depth, limit);
        }
        let i = rng.gen_range(0..options.len());
        options[i](rng)
    }

    fn construct(&self, rng: &mut ChaCha8Rng, t: Ty, ctx: &Ctx<'_>, depth: usize, limit: usize) -> String {
        let c = match t {
            Ty::Class(c) => c,
            Ty::Iface => *self
                .implementers(limit)
                .choose(rng)
                .expect("interface types are generated only when buildable"),
        };
        let args: Vec<String> = self.classes[c]
            .fields
            .iter()
            .map(|&f| self.expr_below(rng, f, ctx, depth.saturating_sub(1), c.saturating_sub(1)))
            .collect();
        format!("{}.of({})", self.name(Ty::Class(c), ctx.own), args.join(", "))
    }

    /// A closed expression of type `t` over the whole program.
    pub fn closed_expr(&self, rng: &mut ChaCha8Rng, t: Ty, depth: usize) -> String {
        let ctx = Ctx {
            bound: self.classes.len() - 1,
            own: None,
            vars: &[],
            this: None,
            ops_before: Some((self.classes.len() - 1, usize::MAX)),
        };
        self.expr(rng, t, &ctx, depth)
    }

    /// A random type some closed expression can have.
    pub fn random_type(&self, rng: &mut ChaCha8Rng) -> Ty {
        let n = self.classes.len();
        if self.buildable(Ty::Iface, n - 1) && rng.gen_bool(0.2) {
            Ty::Iface
        } else {
            Ty::Class(rng.gen_range(0..n))
        }
    }
}

fn ty_pool(p: &CoherentProgram, bound: usize) -> Vec<Ty> {
    let mut pool: Vec<Ty> = (0..=bound).map(Ty::Class).collect();
    if p.buildable(Ty::Iface, bound) {
        pool.push(Ty::Iface);
    }
    pool
}

pub fn gen_coherent_program(rng: &mut ChaCha8Rng, max_classes: usize) -> CoherentProgram {
    let n = rng.gen_range(1..=max_classes.max(1));
    let has_iface = n > 1 && rng.gen_bool(0.6);
    let mut p = CoherentProgram {
        classes: Vec::new(),
        has_iface,
        source: String::new(),
    };
    for i in 0..n {
        let implements = has_iface && i > 0 && rng.gen_bool(0.5);
        // Fields may only have types below `i`.
        let pool: Vec<Ty> = if i == 0 { Vec::new() } else { ty_pool(&p, i - 1) };
        let k = if pool.is_empty() { 0 } else { rng.gen_range(0..=3) };
        let fields: Vec<Ty> = (0..k).map(|_| *pool.choose(rng).expect("nonempty")).collect();
        let getters = (0..k).filter(|_| rng.gen_bool(0.8)).collect();
        let withers = (0..k).filter(|_| rng.gen_bool(0.5)).collect();
        p.classes.push(ClassSpec {
            fields,
            getters,
            withers,
            implements,
            ops: Vec::new(),
            as_traits: rng.gen_bool(0.5),
        });
        let ops_pool = ty_pool(&p, i);
        for j in 0..rng.gen_range(0..=3) {
            let is_static = rng.gen_bool(0.3);
            let arity = rng.gen_range(0..=2);
            let params = (0..arity).map(|_| *ops_pool.choose(rng).expect("nonempty")).collect();
            let ret = *ops_pool.choose(rng).expect("nonempty");
            p.classes[i].ops.push(Op {
                class: i,
                index: j,
                name: format!("o{i}x{j}"),
                is_static,
                params,
                ret,
            });
        }
    }
    let mut out = String::new();
    for i in 0..n {
        class_source(&p, rng, i, &mut out);
        if i == 0 && has_iface {
            out.push_str("I={interface method C0 base()}\n");
        }
    }
    p.source = out;
    p
}

fn class_source(p: &CoherentProgram, rng: &mut ChaCha8Rng, i: usize, out: &mut String) {
    let spec = &p.classes[i];
    let own = Some(i);
    let mut state = Vec::new();
    let params: Vec<String> = spec
        .fields
        .iter()
        .enumerate()
        .map(|(k, &t)| format!("{} f{k}", p.name(t, own)))
        .collect();
    state.push(format!("static method This of({})", params.join(", ")));
    for &g in &spec.getters {
        state.push(format!("method {} f{g}()", p.name(spec.fields[g], own)));
    }
    for &w in &spec.withers {
        state.push(format!("method This withF{w}({} that)", p.name(spec.fields[w], own)));
    }
    let mut ops = Vec::new();
    if spec.implements {
        let ctx = Ctx {
            bound: i,
            own,
            vars: &[],
            this: Some(i),
            ops_before: None,
        };
        let body = p.expr(rng, Ty::Class(0), &ctx, 1);
        ops.push(format!("method C0 base(){{return {body};}}"));
    }
    for op in &spec.ops {
        let vars: Vec<(String, Ty)> = op
            .params
            .iter()
            .enumerate()
            .map(|(k, &t)| (format!("a{k}"), t))
            .collect();
        let ctx = Ctx {
            bound: i,
            own,
            vars: &vars,
            this: if op.is_static { None } else { Some(i) },
            ops_before: Some((i, op.index)),
        };
        let body = p.expr(rng, op.ret, &ctx, 2);
        let ps: Vec<String> = vars.iter().map(|(v, t)| format!("{} {v}", p.name(*t, own))).collect();
        let st = if op.is_static { "static " } else { "" };
        ops.push(format!(
            "{st}method {} {}({}) {{return {body};}}",
            p.name(op.ret, own),
            op.name,
            ps.join(", ")
        ));
    }
    let imp = if spec.implements { "implements I " } else { "" };
    if spec.as_traits {
        let _ = writeln!(out, "c{i}state={{{}}}", state.join(" "));
        let _ = writeln!(out, "c{i}ops=Use c{i}state, {{{imp}{}}}", ops.join(" "));
        let _ = writeln!(out, "C{i}=Use c{i}ops");
    } else {
        state.extend(ops);
        let _ = writeln!(out, "C{i}={{{imp}{}}}", state.join(" "));
    }
}
