//! Abstract state: factory, getters and withers, and class coherence.

use std::collections::BTreeMap;
use std::fmt;

use crate::ast::*;
use crate::diag::{Code, Diagnostic, Diagnostics};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AbstractStateReport {
    pub nominal: Option<TypePath>,
    pub is_interface: bool,
    pub factory: Option<MethodSig>,
    pub getters: BTreeMap<String, MethodSig>,
    pub withers: BTreeMap<String, MethodSig>,
    pub unclassified: Vec<MethodSig>,
    pub hints: Vec<String>,
}

impl AbstractStateReport {
    /// The literal's own part of coherence, nested classes aside.
    pub fn is_coherent(&self) -> bool {
        self.is_interface || self.unclassified.is_empty()
    }
}

impl fmt::Display for AbstractStateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = &self.nominal {
            writeln!(f, "type: {n}")?;
        }
        if self.is_interface {
            writeln!(f, "interface: coherent")?;
            return Ok(());
        }
        match &self.factory {
            Some(s) => writeln!(f, "factory: {s}")?,
            None => writeln!(f, "factory: none")?,
        }
        for (x, s) in &self.getters {
            writeln!(f, "getter {x}: {s}")?;
        }
        for (x, s) in &self.withers {
            writeln!(f, "wither {x}: {s}")?;
        }
        for s in &self.unclassified {
            writeln!(f, "unclassified: {s}")?;
        }
        for h in &self.hints {
            writeln!(f, "hint: {h}")?;
        }
        writeln!(f, "coherent: {}", if self.is_coherent() { "yes" } else { "no" })
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(first) => first.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Classify the abstract methods of `lit`, whose own type is `nominal`.
/// Only abstract methods take part; nested classes are not inspected.
pub fn abstract_state(nominal: &TypePath, lit: &CodeLiteral) -> AbstractStateReport {
    let mut report = AbstractStateReport {
        nominal: Some(nominal.clone()),
        is_interface: lit.is_interface,
        ..AbstractStateReport::default()
    };
    let statics: Vec<&Method> = lit.methods().filter(|m| m.is_abstract() && m.sig.is_static).collect();
    let factory = match statics.as_slice() {
        [f] if &f.sig.ret == nominal => Some(&f.sig),
        _ => None,
    };
    if statics.len() > 1 {
        report.hints.push(format!(
            "{} abstract static methods; a factory must be the only one",
            statics.len()
        ));
    }
    for m in lit.methods().filter(|m| m.is_abstract()) {
        let sig = &m.sig;
        if factory == Some(sig) {
            continue;
        }
        if sig.is_static {
            if statics.len() == 1 {
                report.hints.push(format!(
                    "`{}` returns `{}`, not `{nominal}`, so it is not a factory",
                    sig.name, sig.ret
                ));
            }
            report.unclassified.push(sig.clone());
            continue;
        }
        let fields = factory.map(|f| f.params.as_slice()).unwrap_or(&[]);
        let getter = sig.params.is_empty() && fields.iter().any(|p| p.name == sig.name && p.ty == sig.ret);
        let wither = fields.iter().find(|p| {
            sig.name == format!("with{}", capitalize(&p.name))
                && sig.params.len() == 1
                && sig.params[0].ty == p.ty
                && &sig.ret == nominal
        });
        if getter {
            report.getters.insert(sig.name.clone(), sig.clone());
        } else if let Some(p) = wither {
            report.withers.insert(p.name.clone(), sig.clone());
        } else {
            if sig.params.len() == 1 && fields.iter().any(|p| p.name == sig.name) {
                report.hints.push(format!(
                    "`{}` looks like a setter; setters are not supported, declare `method {nominal} with{}({} that)` instead",
                    sig.name,
                    capitalize(&sig.name),
                    sig.params[0].ty
                ));
            } else if factory.is_none() && statics.is_empty() {
                report.hints.push(format!(
                    "`{}` is abstract and there is no factory to give it meaning",
                    sig.name
                ));
            } else if factory.is_some() {
                report.hints.push(format!(
                    "`{}` is not a getter or wither for any factory parameter",
                    sig.name
                ));
            }
            report.unclassified.push(sig.clone());
        }
    }
    report.factory = factory.cloned();
    report
}

pub fn coherent(nominal: &TypePath, lit: &CodeLiteral) -> bool {
    abstract_state(nominal, lit).is_coherent() && lit.nested().all(|n| coherent(&nominal.child(&n.name), &n.literal))
}

/// One `NotCoherent` diagnostic per incoherent class, outermost first.
pub fn coherence_diagnostics(nominal: &TypePath, lit: &CodeLiteral) -> Diagnostics {
    let mut out = Vec::new();
    diagnostics_into(nominal, lit, &mut out);
    out
}

fn diagnostics_into(nominal: &TypePath, lit: &CodeLiteral, out: &mut Diagnostics) {
    let report = abstract_state(nominal, lit);
    if !report.is_coherent() {
        let names: Vec<String> = report
            .unclassified
            .iter()
            .map(|s| format!("{}/{}", s.name, s.arity()))
            .collect();
        let mut msg = format!(
            "class `{nominal}` is not coherent: abstract {} not part of the abstract state",
            if names.len() == 1 {
                format!("method `{}` is", names[0])
            } else {
                format!("methods `{}` are", names.join("`, `"))
            }
        );
        if let Some(h) = report.hints.first() {
            msg.push_str("; ");
            msg.push_str(h);
        }
        out.push(Diagnostic::new(Code::NotCoherent, lit.span, msg));
    }
    for n in lit.nested() {
        diagnostics_into(&nominal.child(&n.name), &n.literal, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_literal;

    fn report(src: &str) -> AbstractStateReport {
        abstract_state(&TypePath::this(), &parse_literal(src).unwrap())
    }

    #[test]
    fn point_algebra_state() {
        let r = report(
            "{method int x() method int y() static method This of(int x, int y)
              method This sum(This that){return This.of(this.x() + that.x(), this.y() + that.y());}}",
        );
        assert_eq!(r.factory.as_ref().unwrap().name, "of");
        assert_eq!(r.getters.keys().collect::<Vec<_>>(), ["x", "y"]);
        assert!(r.is_coherent());
    }

    #[test]
    fn withers() {
        let r = report(
            "{method int x() method int y() method This withX(int that) method This withY(int that)
              static method This of(int x, int y)}",
        );
        assert_eq!(r.withers.keys().collect::<Vec<_>>(), ["x", "y"]);
        assert!(r.is_coherent());
    }

    #[test]
    fn no_abstract_methods_is_coherent() {
        let r = report("{static method int k(){return 1;}}");
        assert!(r.factory.is_none());
        assert!(r.is_coherent());
    }

    #[test]
    fn extra_getter_breaks_coherence() {
        let r = report(
            "{method int x() method int y() static method This of(int x, int y) method Color color()}"
                .replace("Color", "Bool")
                .as_str(),
        );
        assert!(!r.is_coherent());
        assert_eq!(r.unclassified[0].name, "color");
    }

    #[test]
    fn two_abstract_statics_mean_no_factory() {
        let r = report("{static method This of(int x) static method This make(int x) method int x()}");
        assert!(r.factory.is_none());
        assert!(!r.is_coherent());
    }

    #[test]
    fn getter_type_must_match() {
        let r = report("{method Bool x() static method This of(int x)}");
        assert!(!r.is_coherent());
    }

    #[test]
    fn setters_get_a_hint() {
        let r = report("{method int x() method Void x(int that) static method This of(int x)}");
        assert!(!r.is_coherent());
        assert!(r.hints.iter().any(|h| h.contains("setter")));
    }

    #[test]
    fn interfaces_are_coherent() {
        assert!(report("{interface method int ma()}").is_coherent());
    }

    #[test]
    fn nested_classes_must_be_coherent() {
        let l = parse_literal("{B={method int b()}}").unwrap();
        assert!(!coherent(&TypePath::this(), &l));
        assert_eq!(coherence_diagnostics(&TypePath::this(), &l).len(), 1);
    }

    #[test]
    fn permuting_members_keeps_coherence() {
        let a = parse_literal("{static method This of(int x) method int x() method This withX(int that)}").unwrap();
        let mut b = a.clone();
        b.members.reverse();
        assert_eq!(
            abstract_state(&TypePath::this(), &a),
            abstract_state(&TypePath::this(), &b)
        );
    }
}
